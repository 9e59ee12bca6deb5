mod common;

use einfchar::builder::{build, compare_kernels, core_divergences, Mode, Verdict};
use einfchar::stems::StemsTable;

#[test]
fn random_ideal_kill_sets() {
    let t = StemsTable::reference();
    let failures = common::kill_spec_suite(&t, 100);
    assert!(failures.is_empty(), "{failures:#?}");
}

#[test]
fn reference_builds_are_deterministic() {
    let t = StemsTable::reference();
    for name in ["HZ", "HF2", "kU", "kO", "MSp", "tmf"] {
        let spec = t.target(name).unwrap();
        let cap = spec.data_limit(&t).min(12);
        let a = build(&t, spec, &spec.survivals, cap, Mode::Full).unwrap();
        let b = build(&t, spec, &spec.survivals, cap, Mode::Full).unwrap();
        assert_eq!(a.render(&t), b.render(&t), "{name}");
        assert_eq!(a.machine_lines(&t), b.machine_lines(&t), "{name}");
        assert_eq!(compare_kernels(&t, spec, spec, cap).verdict, Verdict::Both);
    }
}

#[test]
fn core_mode_matches_without_overrides() {
    let t = StemsTable::reference();
    for name in ["HZ", "kO", "MSp", "tmf"] {
        let spec = t.target(name).unwrap();
        let cap = spec.data_limit(&t).min(8);
        let full = build(&t, spec, &[], cap, Mode::Full).unwrap();
        let core = build(&t, spec, &[], cap, Mode::Core).unwrap();
        assert!(core_divergences(&full, &core).is_empty(), "{name}");
    }
}

#[test]
fn ku_needs_the_lemma_without_an_oracle() {
    let t = StemsTable::reference();
    let ku = t.target("kU").unwrap();
    let d = build(&t, ku, &[], 8, Mode::Full).unwrap();
    let statements: Vec<String> = d
        .required
        .iter()
        .map(|r| format!("{} [{}]", r.statement, r.cite.as_deref().unwrap_or("")))
        .collect();
    assert_eq!(statements[0], "nu dies in S//eta [Lemma 4.2]");
}
