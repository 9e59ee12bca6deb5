use einfchar::abelian::{GroupStructure, Order};
use einfchar::error::TableError;
use einfchar::stems::{ProductValue, StemsTable};

fn table() -> StemsTable {
    StemsTable::reference()
}

#[test]
fn low_stems() {
    let t = table();
    let expect: &[(u32, &[u64])] = &[
        (0, &[0]),
        (1, &[2]),
        (2, &[2]),
        (3, &[8]),
        (4, &[]),
        (5, &[]),
        (6, &[2]),
        (7, &[16]),
        (8, &[2, 2]),
        (9, &[2, 2, 2]),
        (10, &[2]),
        (11, &[8]),
        (12, &[]),
        (13, &[]),
        (14, &[2, 2]),
        (15, &[32, 2]),
    ];
    for &(n, orders) in expect {
        assert_eq!(t.sphere.cyclic(n).structure(), GroupStructure::new(orders.to_vec()), "pi_{n}");
    }
    assert_eq!(t.sphere.cyclic(3).structure().order(), Order::Finite(8));
}

#[test]
fn hopf_products() {
    let t = table();
    let e = |s: &str| t.element(s).unwrap();
    let known = |a: &str, b: &str| t.product(&e(a), &e(b)).unwrap().known().unwrap();
    assert_eq!(known("eta", "eta"), e("eta2"));
    assert_eq!(known("eta", "eta2"), e("4*nu"));
    assert_eq!(known("nu", "nu"), e("nu2"));
    assert_eq!(known("eta", "sigma"), e("etasigma"));
    assert!(known("eta", "nu").is_zero());
    assert_eq!(known("2", "eta"), t.sphere.zero(1));
    assert_eq!(known("2", "sigma"), e("2*sigma"));
}

#[test]
fn products_into_trivial_groups_are_zero() {
    let t = table();
    let nu = t.element("nu").unwrap();
    let eta = t.element("eta").unwrap();
    let v = t.product(&nu, &eta).unwrap();
    assert_eq!(v, ProductValue::Known(t.sphere.zero(4)));
}

#[test]
fn serialization_round_trips() {
    let t = table();
    let text = t.serialize();
    let again = StemsTable::parse(&text).unwrap();
    assert_eq!(again, t);
    assert_eq!(again.serialize(), text);
}

#[test]
fn malformed_tables_report_lines() {
    let bad = "prime 2\nrange 3\ngroup 0 iota:0\ngroup 1 eta:3\n";
    match StemsTable::parse(bad) {
        Err(TableError::Parse { line, .. }) => assert_eq!(line, 4),
        other => panic!("{other:?}"),
    }
    let dup = "prime 2\nrange 3\ngroup 0 iota:0\ngroup 1 eta:2\ngroup 2 eta:2\n";
    assert!(matches!(StemsTable::parse(dup), Err(TableError::Parse { line: 5, .. })));
}

#[test]
fn queries_outside_the_range_fail() {
    let t = table();
    assert!(matches!(t.in_range(21), Err(TableError::OutOfRange { .. })));
    assert!(matches!(t.element("sigma^3"), Err(_)));
    assert!(matches!(t.target("K3"), Err(TableError::UnknownTarget(_))));
}

/// Every element of a finite group; a window `-8..=8` on each free summand.
fn sample(orders: &[u64]) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for &n in orders {
        let range: Vec<i64> = if n == 0 { (-8..=8).collect() } else { (0..n as i64).collect() };
        out = out
            .iter()
            .flat_map(|v| range.iter().map(move |&c| [v.clone(), vec![c]].concat()))
            .collect();
    }
    out
}

#[test]
fn indeterminacy_is_a_subgroup() {
    let t = table();
    let cases = [("2,eta,2", None), ("eta,2,eta", None), ("eta,nu,eta", None), ("2,eta,1", Some("kU")), ("8,nu,1", Some("kO"))];
    for (triple, scope) in cases {
        let (a, b, c) = t.parse_triple(triple, scope).unwrap();
        let r = t.toda_bracket(&a, &b, &c, scope).unwrap();
        let sub = &r.indeterminacy;
        let group = sub.group().clone();
        let members: Vec<Vec<i64>> = sample(group.orders())
            .into_iter()
            .filter(|v| sub.contains(v))
            .collect();
        assert!(members.iter().any(|v| group.is_zero(v)), "{triple}");
        for x in &members {
            for y in &members {
                assert!(sub.contains(&group.add(x, y)), "{triple}");
            }
            assert!(sub.contains(&group.scale(-1, x)), "{triple}");
        }
    }
}

#[test]
fn ku_bracket_indeterminacy_is_twice_pi2() {
    let t = table();
    let (a, b, c) = t.parse_triple("2,eta,1", Some("kU")).unwrap();
    let r = t.toda_bracket(&a, &b, &c, Some("kU")).unwrap();
    let ku = t.target("kU").unwrap();
    assert_eq!(r.indeterminacy, ku.groups.cyclic(2).whole().scaled(2));
    assert_eq!(ku.groups.display(&r.representative), "beta");
    assert_eq!(r.cite.as_deref(), Some("Prop 4.7"));
}

#[test]
fn ko_bracket_hits_a() {
    let t = table();
    let (a, b, c) = t.parse_triple("8,nu,1", Some("kO")).unwrap();
    let r = t.toda_bracket(&a, &b, &c, Some("kO")).unwrap();
    let ko = t.target("kO").unwrap();
    assert_eq!(ko.groups.display(&r.representative), "a");
    assert_eq!(r.indeterminacy, ko.groups.cyclic(4).whole().scaled(8));
}

#[test]
fn brackets_with_nonzero_products_are_rejected() {
    let t = table();
    for triple in ["eta,eta,2", "2,eta,eta", "nu,nu,2"] {
        let (a, b, c) = t.parse_triple(triple, None).unwrap();
        assert!(
            matches!(t.toda_bracket(&a, &b, &c, None), Err(TableError::BracketUndefined { .. })),
            "{triple}"
        );
    }
}
