//! Homotopy-level bookkeeping for the inductive construction of a
//! characteristic `S → T → R`: at each stage `n` attach E∞ cells along a
//! minimal generating set of the elements of `π_n(S)` that die in `R` but
//! still survive in the partial object.
//!
//! What dies in the partial object is modelled by the ideal generated by the
//! attached cells (a lower bound) plus explicit survival overrides.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::abelian::{Order, Subgroup};
use crate::error::BuildError;
use crate::stems::{Element, ProductValue, Selection, StemsTable, Survival, TargetSpec};

/// Per-degree subgroups generated as an ideal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Closure {
    pub subgroups: Vec<Subgroup>,
    /// Degrees where an unknown product was skipped, so the subgroup is only a lower bound.
    pub unknown: Vec<bool>,
}

fn closure_in_degree(table: &StemsTable, killed: &[Element], n: u32) -> (Subgroup, bool) {
    let groups = &table.sphere;
    let whole = groups.cyclic(n).whole();
    let direct: Vec<Element> = killed.iter().filter(|x| x.degree == n).cloned().collect();
    let mut sub = groups.subgroup(n, &direct);
    let mut unknown = false;
    for x in killed.iter().filter(|x| x.degree < n) {
        if sub == whole {
            break;
        }
        for g in groups.generators(n - x.degree) {
            match table.product(x, &g) {
                Ok(ProductValue::Known(v)) => sub = sub.with(&v.coeffs),
                Ok(ProductValue::Unknown) => unknown = true,
                Err(_) => unknown = true,
            }
        }
    }
    (sub, unknown)
}

/// Smallest ideal containing `killed`, through degree `cap`.
pub fn ideal_closure(table: &StemsTable, killed: &[Element], cap: u32) -> Closure {
    let (subgroups, unknown) = (0..=cap).map(|n| closure_in_degree(table, killed, n)).unzip();
    Closure { subgroups, unknown }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Ideal closure plus oracle overrides.
    Full,
    /// Cells hang off the bottom cell only: composition with attached cells
    /// kills, overrides are ignored.
    Core,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AttachmentStep {
    pub stage: u32,
    pub cells: Vec<Element>,
    /// `ker(π_n S → π_n R)`.
    pub kernel: Subgroup,
    /// Elements of `π_n S` already dead before this stage.
    pub dying: Subgroup,
    /// Closure met an unknown product in this degree.
    pub assumption: bool,
    /// Citations of overrides that changed `dying` at this stage.
    pub overrides: Vec<String>,
}

impl AttachmentStep {
    /// The cells together with `dying` cover the kernel.
    pub fn generates(&self) -> bool {
        let span = self.dying.group().subgroup(&self.cells.iter().map(|c| c.coeffs.clone()).collect::<Vec<_>>());
        self.kernel.is_subgroup_of(&span.join(&self.dying))
    }

    /// No proper sublist of the cells generates the kernel modulo `dying`.
    pub fn is_minimal(&self) -> bool {
        (0..self.cells.len()).all(|skip| {
            let rest: Vec<Vec<i64>> = self
                .cells
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != skip)
                .map(|(_, c)| c.coeffs.clone())
                .collect();
            let span = self.dying.group().subgroup(&rest).join(&self.dying);
            !self.kernel.is_subgroup_of(&span)
        })
    }
}

/// A cited fact the closure disagreed with and that no override supplied.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RequiredOverride {
    pub stage: u32,
    pub statement: String,
    pub cite: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellDiagram {
    pub target: String,
    pub cap: u32,
    pub mode: Mode,
    pub steps: Vec<AttachmentStep>,
    /// Oracle facts that fired, in order of first use.
    pub ledger: Vec<String>,
    pub required: Vec<RequiredOverride>,
}

impl CellDiagram {
    pub fn cells(&self) -> Vec<(u32, Element)> {
        self.steps
            .iter()
            .flat_map(|s| s.cells.iter().map(move |c| (s.stage, c.clone())))
            .collect()
    }

    pub fn name(&self, table: &StemsTable) -> String {
        let names: Vec<String> = self.cells().iter().map(|(_, c)| table.display(c)).collect();
        if names.is_empty() {
            "S".to_string()
        } else {
            format!("S//{}", names.join(","))
        }
    }

    pub fn has_assumptions(&self) -> bool {
        self.steps.iter().any(|s| s.assumption)
    }

    /// `cell <stage> <element> [flag]` lines.
    pub fn machine_lines(&self, table: &StemsTable) -> Vec<String> {
        let mut out = Vec::new();
        for s in &self.steps {
            for c in &s.cells {
                let mut line = format!("cell {} {}", s.stage, table.display(c).replace(' ', ""));
                if s.assumption {
                    line.push_str(" assumption");
                } else if !s.overrides.is_empty() {
                    line.push_str(" override");
                }
                out.push(line);
            }
        }
        out
    }

    pub fn render(&self, table: &StemsTable) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} for {} through degree {}", self.name(table), self.target, self.cap);
        for s in &self.steps {
            let cells: Vec<String> = s.cells.iter().map(|c| table.display(c)).collect();
            let _ = write!(out, "  stage {:>2}: attach {}", s.stage, cells.join(", "));
            if s.assumption {
                out.push_str("  [assumption: closure incomplete]");
            }
            for c in &s.overrides {
                let _ = write!(out, "  [{c}]");
            }
            out.push('\n');
        }
        if !self.ledger.is_empty() {
            out.push_str("  oracle facts used:\n");
            for l in &self.ledger {
                let _ = writeln!(out, "    {l}");
            }
        }
        out
    }
}

fn fate_text(table: &StemsTable, s: &Survival, t_name: &str) -> String {
    let what = match &s.selection {
        Selection::Element(e) => table.display(e),
        Selection::All(crate::stems::Degrees::Positive) => "every positive-degree element".to_string(),
        Selection::All(crate::stems::Degrees::One(n)) => format!("all of pi_{n}"),
    };
    if s.order == 1 {
        format!("{what} dies in {t_name}")
    } else {
        format!("{what} has order {} in {t_name}", s.order)
    }
}

fn cite_suffix(s: &Survival) -> String {
    s.cite.as_ref().map(|c| format!(" [{c}]")).unwrap_or_default()
}

fn t_name(table: &StemsTable, cells: &[Element]) -> String {
    if cells.is_empty() {
        "S".to_string()
    } else {
        let names: Vec<String> = cells.iter().map(|c| table.display(c)).collect();
        format!("S//{}", names.join(","))
    }
}

fn applies(s: &Survival, attached: &BTreeSet<Element>) -> bool {
    let after: BTreeSet<Element> = s.after.iter().cloned().collect();
    if s.order == 1 {
        after.is_subset(attached)
    } else {
        after == *attached
    }
}

/// Elements killed by an applicable override, through degree `n`.
fn override_kills(table: &StemsTable, s: &Survival, n: u32) -> Vec<Element> {
    match &s.selection {
        Selection::Element(e) if e.degree <= n => vec![table.sphere.scale(s.order as i64, e)],
        Selection::Element(_) => vec![],
        sel => (0..=n).flat_map(|m| sel.in_degree(&table.sphere, m)).collect(),
    }
}

/// Does the fate of `s` in degree `n` hold for the dying subgroup `d`?
fn fate_holds(table: &StemsTable, s: &Survival, n: u32, d: &Subgroup) -> bool {
    match &s.selection {
        Selection::Element(e) if e.degree == n => {
            let p = table.prime as i64;
            let k = s.order as i64;
            let killed = d.contains(&table.sphere.scale(k, e).coeffs);
            if k == 1 {
                killed
            } else {
                killed && !d.contains(&table.sphere.scale(k / p, e).coeffs)
            }
        }
        Selection::Element(_) => true,
        sel => sel
            .in_degree(&table.sphere, n)
            .iter()
            .all(|g| d.contains(&g.coeffs)),
    }
}

fn canonical_candidates(table: &StemsTable, kernel: &Subgroup, n: u32) -> Vec<Element> {
    let mut cands: Vec<Element> = kernel
        .generators()
        .into_iter()
        .map(|v| table.sphere.from_vector(n, v))
        .collect();
    cands.sort_by_key(|c| (table.adams_filtration(c).unwrap_or(u32::MAX), table.display(c)));
    cands
}

/// Runs the construction through `cap`. `oracle` holds the active overrides;
/// the target's own `survives` records are only checked against, and every
/// disagreement with the closure that the oracle does not settle is listed in
/// [`CellDiagram::required`].
pub fn build(
    table: &StemsTable,
    spec: &TargetSpec,
    oracle: &[Survival],
    cap: u32,
    mode: Mode,
) -> Result<CellDiagram, BuildError> {
    let limit = spec.data_limit(table);
    if cap > limit {
        return Err(BuildError::CapBeyondData {
            cap,
            range: limit,
            target: spec.name.clone(),
        });
    }
    let active: &[Survival] = match mode {
        Mode::Full => oracle,
        Mode::Core => &[],
    };
    let p = table.prime as i64;
    let mut attached: Vec<Element> = Vec::new();
    let mut steps = Vec::new();
    let mut ledger: Vec<String> = Vec::new();
    let mut required = Vec::new();
    let mut reported = BTreeSet::new();

    for n in 0..=cap {
        let kernel = spec.kernel(table, n);
        let attached_set: BTreeSet<Element> = attached.iter().cloned().collect();
        let name = t_name(table, &attached);

        let (base, mut assumption) = closure_in_degree(table, &attached, n);

        let mut killed = attached.clone();
        let mut fired = Vec::new();
        for s in active.iter().filter(|s| applies(s, &attached_set)) {
            let extra = override_kills(table, s, n);
            if extra.is_empty() {
                continue;
            }
            killed.extend(extra);
            fired.push(s);
        }
        let dying = if fired.is_empty() {
            base.clone()
        } else {
            let (d, unknown) = closure_in_degree(table, &killed, n);
            assumption |= unknown;
            d
        };

        let mut overrides = Vec::new();
        for s in &fired {
            if let Selection::Element(e) = &s.selection {
                if s.order > 1 && e.degree == n {
                    let rest: Vec<Element> = killed
                        .iter()
                        .filter(|x| **x != table.sphere.scale(s.order as i64, e))
                        .cloned()
                        .collect();
                    let (without, _) = closure_in_degree(table, &rest, n);
                    let half = table.sphere.scale(s.order as i64 / p, e);
                    if without.contains(&half.coeffs) {
                        return Err(BuildError::Contradiction {
                            stage: n,
                            message: format!(
                                "{} is asserted{} but {} already dies",
                                fate_text(table, s, &name),
                                cite_suffix(s),
                                table.display(&half)
                            ),
                        });
                    }
                }
            }
            if fate_holds(table, s, n, &dying) && !fate_holds(table, s, n, &base) {
                let text = format!("{}{}", fate_text(table, s, &name), cite_suffix(s));
                overrides.push(s.cite.clone().unwrap_or_else(|| fate_text(table, s, &name)));
                if !ledger.contains(&text) {
                    ledger.push(text);
                }
            }
        }

        if !dying.is_subgroup_of(&kernel) {
            let witness = dying
                .generators()
                .into_iter()
                .find(|g| !kernel.contains(g))
                .map(|g| table.sphere.display(&table.sphere.from_vector(n, g)))
                .unwrap_or_default();
            let why: Vec<String> = fired.iter().map(|s| format!("{}{}", fate_text(table, s, &name), cite_suffix(s))).collect();
            return Err(BuildError::Contradiction {
                stage: n,
                message: format!(
                    "{witness} dies in {name} but survives in {}{}",
                    spec.name,
                    if why.is_empty() { String::new() } else { format!(" (overrides: {})", why.join("; ")) }
                ),
            });
        }

        if mode == Mode::Full {
            for (idx, s) in spec.survivals.iter().enumerate() {
                if active.contains(s) || reported.contains(&idx) || !applies(s, &attached_set) {
                    continue;
                }
                let relevant = match &s.selection {
                    Selection::Element(e) => e.degree == n,
                    sel => sel.degrees().contains(n),
                };
                if relevant && !fate_holds(table, s, n, &dying) {
                    reported.insert(idx);
                    required.push(RequiredOverride {
                        stage: n,
                        statement: fate_text(table, s, &name),
                        cite: s.cite.clone(),
                    });
                }
            }
        }

        if kernel.is_subgroup_of(&dying) {
            continue;
        }
        let target = kernel.join(&dying);
        let floor = dying.join(&target.scaled(p));
        let mut span = floor.clone();
        let mut cells = Vec::new();
        for c in canonical_candidates(table, &kernel, n) {
            if !span.contains(&c.coeffs) {
                span = span.with(&c.coeffs);
                cells.push(c);
            }
        }
        let step = AttachmentStep {
            stage: n,
            cells,
            kernel,
            dying,
            assumption,
            overrides,
        };
        debug_assert!(step.generates());
        attached.extend(step.cells.iter().cloned());
        steps.push(step);
    }

    Ok(CellDiagram {
        target: spec.name.clone(),
        cap,
        mode,
        steps,
        ledger,
        required,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Both,
    AToB,
    BToA,
    Incomparable,
}

impl Verdict {
    pub fn describe(&self, a: &str, b: &str) -> String {
        match self {
            Verdict::Both => format!("kernels agree: morphisms both ways, Char({a}) ~ Char({b})"),
            Verdict::AToB => format!("morphism Char({a}) -> Char({b})"),
            Verdict::BToA => format!("morphism Char({b}) -> Char({a})"),
            Verdict::Incomparable => "incomparable".to_string(),
        }
    }

    pub fn keyword(&self) -> &'static str {
        match self {
            Verdict::Both => "both",
            Verdict::AToB => "a-to-b",
            Verdict::BToA => "b-to-a",
            Verdict::Incomparable => "incomparable",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Comparison {
    pub cap: u32,
    pub verdict: Verdict,
    /// First degree where `ker A ⊄ ker B`, and the reverse.
    pub a_not_in_b: Option<u32>,
    pub b_not_in_a: Option<u32>,
}

/// Degreewise subset test on kernel data through `cap`, clipped to both data ranges.
pub fn compare_kernels(table: &StemsTable, a: &TargetSpec, b: &TargetSpec, cap: u32) -> Comparison {
    let cap = cap.min(a.data_limit(table)).min(b.data_limit(table));
    let mut a_not_in_b = None;
    let mut b_not_in_a = None;
    for n in 0..=cap {
        let (ka, kb) = (a.kernel(table, n), b.kernel(table, n));
        if a_not_in_b.is_none() && !ka.is_subgroup_of(&kb) {
            a_not_in_b = Some(n);
        }
        if b_not_in_a.is_none() && !kb.is_subgroup_of(&ka) {
            b_not_in_a = Some(n);
        }
    }
    let verdict = match (a_not_in_b, b_not_in_a) {
        (None, None) => Verdict::Both,
        (None, Some(_)) => Verdict::AToB,
        (Some(_), None) => Verdict::BToA,
        (Some(_), Some(_)) => Verdict::Incomparable,
    };
    Comparison {
        cap,
        verdict,
        a_not_in_b,
        b_not_in_a,
    }
}

/// Stages where the core-mode diagram differs from the full one.
pub fn core_divergences(full: &CellDiagram, core: &CellDiagram) -> Vec<u32> {
    let stages: BTreeSet<u32> = full.steps.iter().chain(&core.steps).map(|s| s.stage).collect();
    stages
        .into_iter()
        .filter(|&n| {
            let f = full.steps.iter().find(|s| s.stage == n).map(|s| &s.cells);
            let c = core.steps.iter().find(|s| s.stage == n).map(|s| &s.cells);
            f != c
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Check {
    Verified,
    Failed(String),
    /// Not decidable from the table; the reason, if there is more to say.
    Open(Option<String>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConjectureReport {
    pub target: String,
    pub object: String,
    pub cite: Option<String>,
    pub statement: String,
    /// Table-checkable fragments and their outcome.
    pub fragments: Vec<(String, Check)>,
}

/// Reports on the `conjecture` records of a target, given a diagram built for it.
pub fn conjecture_reports(
    table: &StemsTable,
    spec: &TargetSpec,
    diagram: Option<&CellDiagram>,
) -> Vec<ConjectureReport> {
    let mut out = Vec::new();
    for c in &spec.conjectures {
        let object = t_name(table, &c.cells);
        let statement = format!("ker[pi_*(S) -> pi_*({object})] = ker[pi_*(S) -> pi_*({})]", spec.name);
        let mut fragments = Vec::new();
        for cell in &c.cells {
            let ok = spec.kernel(table, cell.degree).contains(&cell.coeffs);
            let label = format!("{} dies in {}", table.display(cell), spec.name);
            fragments.push((
                label,
                if ok {
                    Check::Verified
                } else {
                    Check::Failed("not in the recorded kernel".to_string())
                },
            ));
        }
        if let Some(d) = diagram {
            let built: Vec<Element> = d.cells().into_iter().map(|(_, e)| e).collect();
            let relevant: Vec<Element> = c.cells.iter().filter(|e| e.degree <= d.cap).cloned().collect();
            let label = format!("build through degree {} attaches exactly {}", d.cap, t_name(table, &relevant));
            let check = if built == relevant {
                Check::Verified
            } else if relevant.iter().all(|e| built.contains(e)) {
                // extra cells only mean the closure missed a death
                Check::Open(Some(format!("closure alone gives {}", d.name(table))))
            } else {
                Check::Failed(format!("build gives {}", d.name(table)))
            };
            fragments.push((label, check));
        }
        for other in table.targets.iter().filter(|o| o.name != spec.name) {
            if other.conjectures.iter().any(|oc| oc.cells == c.cells) {
                let cmp = compare_kernels(table, spec, other, table.range);
                let label = format!(
                    "ker[pi_*(S) -> pi_*({})] = ker[pi_*(S) -> pi_*({})] through degree {}",
                    spec.name, other.name, cmp.cap
                );
                let check = if cmp.verdict == Verdict::Both {
                    Check::Verified
                } else {
                    Check::Failed(format!("kernels differ ({})", cmp.verdict.keyword()))
                };
                fragments.push((label, check));
            }
        }
        fragments.push((statement.clone(), Check::Open(None)));
        out.push(ConjectureReport {
            target: spec.name.clone(),
            object,
            cite: c.cite.clone(),
            statement,
            fragments,
        });
    }
    out
}

/// Kill-subgroup orders of a spec, for reports.
pub fn kernel_orders(table: &StemsTable, spec: &TargetSpec, cap: u32) -> Vec<(u32, Order)> {
    (0..=cap.min(spec.data_limit(table)))
        .map(|n| (n, spec.kernel(table, n).order()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cells(table: &StemsTable, d: &CellDiagram) -> Vec<String> {
        d.cells().iter().map(|(n, c)| format!("{n}:{}", table.display(c))).collect()
    }

    #[test]
    fn closure_of_two_and_eta() {
        let t = StemsTable::reference();
        let two = t.element("2").unwrap();
        let c = ideal_closure(&t, &[two], 8);
        assert!(c.subgroups[3].contains(&[2]));
        assert!(!c.subgroups[1].contains(&[1]));
        let eta = t.element("eta").unwrap();
        let c = ideal_closure(&t, &[eta], 3);
        assert!(c.subgroups[3].contains(&[4]));
        assert!(!c.subgroups[3].contains(&[1]));
        let c = ideal_closure(&t, &[], 8);
        assert!(c.subgroups.iter().all(|s| s.is_trivial()));
    }

    #[test]
    fn goldens() {
        let t = StemsTable::reference();
        let hf2 = t.target("HF2").unwrap();
        let oracle = hf2.survivals.clone();
        let d = build(&t, hf2, &oracle, 8, Mode::Full).unwrap();
        assert_eq!(cells(&t, &d), vec!["0:2"]);

        let ku = t.target("kU").unwrap();
        let d = build(&t, ku, &ku.survivals, 7, Mode::Full).unwrap();
        assert_eq!(cells(&t, &d), vec!["1:eta", "7:sigma"]);
        assert!(d.required.is_empty());

        let ko = t.target("kO").unwrap();
        let d = build(&t, ko, &[], 7, Mode::Full).unwrap();
        assert_eq!(cells(&t, &d), vec!["3:nu", "7:sigma"]);

        let tmf = t.target("tmf").unwrap();
        let d = build(&t, tmf, &[], 8, Mode::Full).unwrap();
        assert_eq!(cells(&t, &d), vec!["7:sigma"]);
    }

    #[test]
    fn base_mode_lists_required_override() {
        let t = StemsTable::reference();
        let ku = t.target("kU").unwrap();
        let d = build(&t, ku, &[], 8, Mode::Full).unwrap();
        assert_eq!(d.required.len(), 1);
        assert_eq!(d.required[0].statement, "nu dies in S//eta");
        assert_eq!(d.required[0].cite.as_deref(), Some("Lemma 4.2"));
    }

    #[test]
    fn comparisons() {
        let t = StemsTable::reference();
        let hz = t.target("HZ").unwrap();
        let hf2 = t.target("HF2").unwrap();
        assert_eq!(compare_kernels(&t, hz, hf2, 20).verdict, Verdict::AToB);
        assert_eq!(compare_kernels(&t, hz, hz, 20).verdict, Verdict::Both);
        let ko = t.target("kO").unwrap();
        let ku = t.target("kU").unwrap();
        assert_eq!(compare_kernels(&t, ko, ku, 20).verdict, Verdict::AToB);
    }

    #[test]
    fn extra_cells_leave_conjectures_open() {
        let t = StemsTable::reference();
        let ko = t.target("kO").unwrap();
        let d = build(&t, ko, &[], 8, Mode::Full).unwrap();
        let reports = conjecture_reports(&t, ko, Some(&d));
        let exact = reports[0].fragments.iter().find(|f| f.0.contains("attaches exactly")).unwrap();
        assert!(matches!(&exact.1, Check::Open(Some(why)) if why.contains("eps")));
        let d = build(&t, ko, &[], 7, Mode::Full).unwrap();
        let reports = conjecture_reports(&t, ko, Some(&d));
        assert!(reports[0].fragments.iter().all(|f| !matches!(f.1, Check::Failed(_))));
    }

    #[test]
    fn cap_beyond_data() {
        let t = StemsTable::reference();
        let tmf = t.target("tmf").unwrap();
        assert!(matches!(build(&t, tmf, &[], 9, Mode::Full), Err(BuildError::CapBeyondData { .. })));
    }
}
