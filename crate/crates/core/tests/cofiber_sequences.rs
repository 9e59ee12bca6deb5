use einfchar::abelian::{GroupStructure, Order};
use einfchar::cofiber::{cofiber_pi, Resolution};
use einfchar::stems::StemsTable;

#[test]
fn known_values() {
    let t = StemsTable::reference();
    let eta = t.element("eta").unwrap();
    assert_eq!(cofiber_pi(&t, &eta, 3).unwrap().group(), Some(GroupStructure::new(vec![4])));

    let nu = t.element("nu").unwrap();
    let r = cofiber_pi(&t, &nu, 7).unwrap();
    assert_eq!(r.order(), Some(Order::Finite(64)));
    match &r.resolution {
        Resolution::Annotated { summands, cite } => {
            let orders: Vec<u64> = summands.iter().map(|s| s.1).collect();
            assert_eq!(orders, vec![16, 4]);
            assert_eq!(cite.as_deref(), Some("Lemma 4.3"));
        }
        other => panic!("{other:?}"),
    }
    assert_eq!(r.to_string(), "Z/16 sigma ⊕ Z/4 2nutilde [Lemma 4.3]");
}

#[test]
fn null_map_gives_a_wedge() {
    let t = StemsTable::reference();
    for a in [1u32, 3, 7] {
        let zero = t.sphere.zero(a);
        for k in 0..=t.range {
            let r = cofiber_pi(&t, &zero, k).unwrap();
            let mut orders: Vec<u64> = t.sphere.cyclic(k).structure().invariants().to_vec();
            if k > a {
                orders.extend(t.sphere.cyclic(k - a - 1).structure().invariants());
            }
            assert_eq!(r.group(), Some(GroupStructure::new(orders)), "alpha=0 in {a}, k={k}");
        }
    }
}

#[test]
fn orders_multiply_along_the_sequence() {
    let t = StemsTable::reference();
    for name in ["2", "4", "eta", "eta2", "nu", "2*nu", "sigma", "eps"] {
        let alpha = t.element(name).unwrap();
        for k in 0..=t.range {
            let r = cofiber_pi(&t, &alpha, k).unwrap();
            let Some((c, q)) = r.orders() else { continue };
            if let (Some(g), Order::Finite(a), Order::Finite(b)) = (r.group(), c, q) {
                assert_eq!(g.order(), Order::Finite(a * b), "{name} k={k}");
            }
        }
    }
}

#[test]
fn moore_spectra() {
    let t = StemsTable::reference();
    for r in 1..=4u32 {
        let two_r = t.element(&(1u64 << r).to_string()).unwrap();
        let c = cofiber_pi(&t, &two_r, 0).unwrap();
        assert_eq!(c.to_string(), format!("Z/{}", 1u64 << r));
    }
}
