#![allow(dead_code)]

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::rngs::StdRng;
use rand::Rng;

use einfchar::builder::ideal_closure;
use einfchar::f2poly::{F2Polynomial, Monomial, Universe};
use einfchar::stems::{Element, Selection, StemsTable, TargetSpec};

/// Power series product, truncated at `cap`.
fn series_mul(a: &[u64], b: &[u64], cap: usize) -> Vec<u64> {
    let mut out = vec![0u64; cap + 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            if i + j <= cap {
                out[i + j] += x * y;
            }
        }
    }
    out
}

/// Dimensions of a polynomial algebra with generators in the given degrees.
pub fn polynomial_dims(generator_degrees: &[u32], cap: u32) -> Vec<u64> {
    let cap = cap as usize;
    let mut series = vec![0u64; cap + 1];
    series[0] = 1;
    for &d in generator_degrees {
        let d = d as usize;
        if d == 0 || d > cap {
            continue;
        }
        let geometric: Vec<u64> = (0..=cap).map(|i| u64::from(i % d == 0)).collect();
        series = series_mul(&series, &geometric, cap);
    }
    series
}

/// Degrees of the generators `Q^I x_n` (admissible, excess above `n`), by
/// building sequences from the right.
pub fn free_generator_degrees(n: u32, cap: u32) -> Vec<u32> {
    let mut out = vec![n];
    // (degree of Q^J x_n, outermost entry of J)
    let mut frontier: Vec<(u32, u32)> = Vec::new();
    for i in (n + 1)..=cap.saturating_sub(n) {
        frontier.push((n + i, i));
    }
    while let Some((deg, first)) = frontier.pop() {
        if deg > cap {
            continue;
        }
        out.push(deg);
        // Q^j on top: needs j > deg (excess) and j <= 2*first (admissible)
        for j in (deg + 1)..=(2 * first) {
            if deg + j <= cap {
                frontier.push((deg + j, j));
            }
        }
    }
    out.sort_unstable();
    out
}

pub fn dual_steenrod_dims(d: u32, cap: u32) -> Vec<u64> {
    let degrees: Vec<u32> = (1..)
        .map(|s| ((1u32 << s) - 1) << d)
        .take_while(|&g| g <= cap)
        .collect();
    polynomial_dims(&degrees, cap)
}

pub fn free_dims(n: u32, cap: u32) -> Vec<u64> {
    polynomial_dims(&free_generator_degrees(n, cap), cap)
}

pub fn random_poly(universe: &Arc<Universe>, basis: &[Monomial], rng: &mut StdRng) -> F2Polynomial {
    let mut p = F2Polynomial::zero(universe);
    for m in basis {
        if rng.gen_bool(0.5) {
            p.toggle(m.clone());
        }
    }
    if p.is_zero() && !basis.is_empty() {
        p.toggle(basis[rng.gen_range(0..basis.len())].clone());
    }
    p
}

/// A kill set closed under the ideal it generates, through `cap`.
pub fn ideal_spec(table: &StemsTable, seeds: &[Element], cap: u32, name: &str) -> TargetSpec {
    let closure = ideal_closure(table, seeds, cap);
    let mut spec = TargetSpec::new(name);
    spec.through = Some(cap);
    for (n, sub) in closure.subgroups.iter().enumerate() {
        for g in sub.generators() {
            spec.kills
                .push(Selection::Element(table.sphere.from_vector(n as u32, g)));
        }
    }
    spec
}

/// Random nonzero sphere elements in degrees `0..=cap`.
pub fn random_seeds(table: &StemsTable, cap: u32, count: usize, rng: &mut StdRng) -> Vec<Element> {
    let degrees: Vec<u32> = (0..=cap)
        .filter(|&n| !table.sphere.summands(n).is_empty())
        .collect();
    let mut out = Vec::new();
    for _ in 0..count {
        let n = degrees[rng.gen_range(0..degrees.len())];
        let orders: Vec<u64> = table.sphere.summands(n).iter().map(|s| s.order).collect();
        let v: Vec<i64> = orders
            .iter()
            .map(|&o| if o == 0 { 1i64 << rng.gen_range(1..4) } else { rng.gen_range(0..o as i64) })
            .collect();
        let e = table.sphere.from_vector(n, v);
        if !e.is_zero() {
            out.push(e);
        }
    }
    out
}

/// Triple tensor as a set of monomial triples (sum over F₂).
pub type Triple = BTreeSet<(Monomial, Monomial, Monomial)>;

pub fn toggle(set: &mut Triple, t: (Monomial, Monomial, Monomial)) {
    if !set.remove(&t) {
        set.insert(t);
    }
}

/// Runs the randomized kill-set checks; returns one message per failure.
pub fn kill_spec_suite(table: &StemsTable, count: u64) -> Vec<String> {
    use einfchar::builder::{build, compare_kernels, Mode, Verdict};
    use rand::SeedableRng;

    let mut failures = Vec::new();
    for case in 0..count {
        let mut rng = StdRng::seed_from_u64(0x5eed_0000 + case);
        let cap = rng.gen_range(3..=13);
        let seeds = random_seeds(table, cap, rng.gen_range(1..=3), &mut rng);
        let mut more = seeds.clone();
        more.extend(random_seeds(table, cap, rng.gen_range(1..=2), &mut rng));
        let small = ideal_spec(table, &seeds, cap, "A");
        let large = ideal_spec(table, &more, cap, "B");
        let twin = ideal_spec(table, &seeds, cap, "A");

        let first = match build(table, &small, &[], cap, Mode::Full) {
            Ok(d) => d,
            Err(e) => {
                failures.push(format!("case {case}: {e}"));
                continue;
            }
        };
        let again = build(table, &twin, &[], cap, Mode::Full).unwrap();
        if first != again || first.render(table) != again.render(table) {
            failures.push(format!("case {case}: equal specs gave different diagrams"));
        }
        if compare_kernels(table, &small, &twin, cap).verdict != Verdict::Both {
            failures.push(format!("case {case}: equal specs not comparable both ways"));
        }

        let other = ideal_spec(table, &random_seeds(table, cap, 2, &mut rng), cap, "C");
        for (x, y) in [(&small, &large), (&small, &other), (&other, &large)] {
            let within = |a: &TargetSpec, b: &TargetSpec| {
                (0..=cap).all(|n| {
                    let kb = b.kernel(table, n);
                    a.kernel(table, n).generators().iter().all(|g| kb.contains(g))
                })
            };
            let expected = match (within(x, y), within(y, x)) {
                (true, true) => Verdict::Both,
                (true, false) => Verdict::AToB,
                (false, true) => Verdict::BToA,
                (false, false) => Verdict::Incomparable,
            };
            let verdict = compare_kernels(table, x, y, cap).verdict;
            if verdict != expected {
                failures.push(format!("case {case}: {}/{} verdict {verdict:?}, expected {expected:?}", x.name, y.name));
            }
        }
        if !matches!(compare_kernels(table, &small, &large, cap).verdict, Verdict::AToB | Verdict::Both) {
            failures.push(format!("case {case}: enlarged kill set gave no morphism"));
        }

        let bigger = build(table, &large, &[], cap, Mode::Full).unwrap();
        for d in [&first, &bigger] {
            for step in &d.steps {
                if !step.generates() || !step.is_minimal() {
                    failures.push(format!("case {case}: stage {} not minimal", step.stage));
                }
            }
        }
        let diverge = (0..=cap)
            .find(|&n| small.kernel(table, n) != large.kernel(table, n))
            .unwrap_or(cap + 1);
        let stages = |d: &einfchar::builder::CellDiagram| -> Vec<u32> {
            d.steps.iter().map(|s| s.stage).filter(|&s| s < diverge).collect()
        };
        if stages(&first) != stages(&bigger) {
            failures.push(format!("case {case}: attachments below degree {diverge} changed"));
        }
    }
    failures
}
