mod common;

use std::sync::{Arc, OnceLock};

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

use common::{random_poly, toggle, Triple};
use einfchar::dual_steenrod::DualSteenrod;
use einfchar::dyer_lashof::{adem_reduce_sequence, adem_terms, DLSequence, FreeDLAlgebra};
use einfchar::f2poly::{F2Polynomial, Monomial};
use einfchar::free_homology::ImageMap;

const CAP: u32 = 20;

fn algebra() -> &'static FreeDLAlgebra {
    static A: OnceLock<FreeDLAlgebra> = OnceLock::new();
    A.get_or_init(|| FreeDLAlgebra::new(1, CAP))
}

fn dual() -> &'static DualSteenrod {
    static D: OnceLock<DualSteenrod> = OnceLock::new();
    D.get_or_init(|| DualSteenrod::new(CAP))
}

fn image_maps() -> &'static Vec<ImageMap> {
    static R: OnceLock<Vec<ImageMap>> = OnceLock::new();
    R.get_or_init(|| (0..=3).map(|d| ImageMap::new(d, CAP)).collect())
}

fn free_element(alg: &FreeDLAlgebra, k: u32, seed: u64) -> F2Polynomial {
    let basis = alg.slice(k).unwrap();
    random_poly(alg.universe(), &basis, &mut StdRng::seed_from_u64(seed))
}

fn dual_element(k: u32, seed: u64) -> F2Polynomial {
    let basis = dual().slice(k).unwrap();
    random_poly(dual().universe(), basis.monomials(), &mut StdRng::seed_from_u64(seed))
}

fn sequence() -> impl Strategy<Value = DLSequence> {
    prop::collection::vec(1u32..=18, 2..=4)
        .prop_filter("weight within range", |v| v.iter().sum::<u32>() <= CAP)
        .prop_map(DLSequence::new)
}

/// `(k, s, r)` with `r > 2s` and `k + r + s <= CAP`.
fn inadmissible_pair() -> impl Strategy<Value = (u32, u32, u32)> {
    (2u32..=5)
        .prop_flat_map(|k| (Just(k), 1u32..=(CAP - k - 1) / 3))
        .prop_flat_map(|(k, s)| (Just(k), Just(s), (2 * s + 1)..=(CAP - k - s)))
}

fn cartan(alg: &FreeDLAlgebra, a: u32, x: &F2Polynomial, y: &F2Polynomial) -> F2Polynomial {
    let mut acc = F2Polynomial::zero(alg.universe());
    for b in 0..=a {
        let l = alg.dual_steenrod_action(b, x).unwrap();
        let r = alg.dual_steenrod_action(a - b, y).unwrap();
        acc.add_assign(&l.multiply(&r).unwrap());
    }
    acc
}

fn left_expand(p: &F2Polynomial) -> Triple {
    let d = dual();
    let mut out = Triple::new();
    for (l, r) in d.coproduct(p).terms() {
        let lp = F2Polynomial::from_monomial(d.universe(), l.clone());
        for (ll, lr) in d.coproduct(&lp).terms() {
            toggle(&mut out, (ll.clone(), lr.clone(), r.clone()));
        }
    }
    out
}

fn right_expand(p: &F2Polynomial) -> Triple {
    let d = dual();
    let mut out = Triple::new();
    for (l, r) in d.coproduct(p).terms() {
        let rp = F2Polynomial::from_monomial(d.universe(), r.clone());
        for (rl, rr) in d.coproduct(&rp).terms() {
            toggle(&mut out, (l.clone(), rl.clone(), rr.clone()));
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn adem_output_is_admissible(seq in sequence()) {
        for t in adem_reduce_sequence(&seq) {
            prop_assert!(t.is_admissible(), "{seq} -> {t}");
            prop_assert_eq!(t.weight(), seq.weight());
            prop_assert_eq!(t.len(), seq.len());
        }
    }

    #[test]
    fn adem_agrees_with_cartan((k, s, r) in inadmissible_pair(), seed in any::<u64>()) {
        let alg = algebra();
        let x = free_element(alg, k, seed);
        let lhs = alg.apply_q(r as i64, &alg.apply_q(s as i64, &x).unwrap()).unwrap();
        let mut rhs = F2Polynomial::zero(alg.universe());
        for (a, b) in adem_terms(r, s) {
            rhs.add_assign(&alg.apply_q(a as i64, &alg.apply_q(b as i64, &x).unwrap()).unwrap());
        }
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn cartan_is_order_independent(k1 in 1u32..=10, k2 in 1u32..=10, a in 0u32..=20, seed in any::<u64>()) {
        prop_assume!(k1 + k2 <= CAP && a <= k1 + k2);
        let alg = algebra();
        let x = free_element(alg, k1, seed);
        let y = free_element(alg, k2, seed.wrapping_add(1));
        let direct = alg.dual_steenrod_action(a, &x.multiply(&y).unwrap()).unwrap();
        prop_assert_eq!(&direct, &cartan(alg, a, &x, &y));
        prop_assert_eq!(&direct, &cartan(alg, a, &y, &x));
    }

    #[test]
    fn coproduct_is_coassociative(k in 1u32..=CAP, seed in any::<u64>()) {
        let p = dual_element(k, seed);
        prop_assert_eq!(left_expand(&p), right_expand(&p));
    }

    #[test]
    fn coproduct_has_counit(k in 0u32..=CAP, seed in any::<u64>()) {
        let d = dual();
        let p = dual_element(k, seed);
        let mut left = F2Polynomial::zero(d.universe());
        let mut right = F2Polynomial::zero(d.universe());
        for (l, r) in d.coproduct(&p).terms() {
            if l == &Monomial::one() {
                right.toggle(r.clone());
            }
            if r == &Monomial::one() {
                left.toggle(l.clone());
            }
        }
        prop_assert_eq!(&left, &p);
        prop_assert_eq!(&right, &p);
    }

    #[test]
    fn rho_is_multiplicative(d in 0usize..=3, k1 in 1u32..=12, k2 in 1u32..=12, seed in any::<u64>()) {
        prop_assume!(k1 + k2 <= CAP);
        let rho = &image_maps()[d];
        let alg = rho.source().algebra();
        let bottom = alg.bottom();
        prop_assume!(k1 >= bottom && k2 >= bottom);
        let x = free_element(alg, k1, seed);
        let y = free_element(alg, k2, seed ^ 0x9e37);
        let lhs = rho.rho(&x.multiply(&y).unwrap()).unwrap();
        let rhs = rho.rho(&x).unwrap().multiply(&rho.rho(&y).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn rho_is_a_comodule_map(d in 0usize..=3, k in 1u32..=CAP, seed in any::<u64>()) {
        let rho = &image_maps()[d];
        let alg = rho.source().algebra();
        prop_assume!(k >= alg.bottom());
        let x = free_element(alg, k, seed);
        prop_assert!(rho.comodule_defect(&x).unwrap().is_zero());
    }
}

#[test]
fn dual_slices_are_shared() {
    let a = dual().slice(7).unwrap();
    let b = dual().slice(7).unwrap();
    assert!(Arc::ptr_eq(&a, &b));
}
