mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use einfchar::abelian::Order;
use einfchar::builder::{self, Check, Mode};
use einfchar::cofiber::{cofiber_pi, Resolution};
use einfchar::dyer_lashof::{admissible_generators, excess_and_degree, generator_name, DLSequence};
use einfchar::free_homology::{coaction_of_generator, poincare_comparison, verify_epi};
use einfchar::stems::StemsTable;

use report::{Format, Report, Section};

#[derive(Parser)]
#[command(name = "einfchar", version, about = "E-infinity cone homology and characteristic cell builds")]
struct Cli {
    /// Stems table (defaults to the bundled 2-local table).
    #[arg(long, global = true)]
    table: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value = "text")]
    format: Format,

    /// Accept builds whose steps rest on incomplete product data.
    #[arg(long, global = true)]
    allow_assumptions: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check that rho_d maps onto F2[zeta_s^(2^d)] degree by degree.
    VerifyImages {
        #[arg(long)]
        d: u32,
        #[arg(long)]
        cap: u32,
    },
    /// Compare dimensions of H_*(S//2) and the dual Steenrod algebra.
    Poincare {
        #[arg(long)]
        cap: u32,
    },
    /// Coaction on a generator Q^I x_n.
    Coaction {
        #[arg(long)]
        bottom: u32,
        /// Admissible sequence, e.g. `4,2`; empty for the bottom class.
        #[arg(long, default_value = "")]
        seq: String,
    },
    /// pi_k of the two-cell complex on alpha.
    Cofiber {
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        k: u32,
    },
    /// Simulate a characteristic for a target.
    Build {
        #[arg(long)]
        target: String,
        /// Survival overrides to apply.
        #[arg(long)]
        oracle: Option<PathBuf>,
        #[arg(long)]
        cap: u32,
        /// Additive-only build: overrides are ignored.
        #[arg(long)]
        core: bool,
    },
    /// Compare two kernel specifications.
    Compare {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long)]
        cap: Option<u32>,
    },
    /// Stored Toda bracket with its indeterminacy.
    Bracket {
        #[arg(long)]
        elems: String,
        #[arg(long)]
        scope: Option<String>,
    },
}

type Outcome = Result<(Report, bool), String>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli);
    match result {
        Ok((report, ok)) => {
            print!("{}", report.render(cli.format));
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn load_table(cli: &Cli) -> Result<StemsTable, String> {
    match &cli.table {
        Some(p) => StemsTable::load(p).map_err(|e| e.to_string()),
        None => Ok(StemsTable::reference()),
    }
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::VerifyImages { d, cap } => verify_images(*d, *cap),
        Command::Poincare { cap } => poincare(*cap),
        Command::Coaction { bottom, seq } => coaction(*bottom, seq),
        Command::Cofiber { alpha, k } => cofiber(&load_table(cli)?, alpha, *k),
        Command::Build {
            target,
            oracle,
            cap,
            core,
        } => build(cli, &load_table(cli)?, target, oracle.as_ref(), *cap, *core),
        Command::Compare { a, b, cap } => compare(&load_table(cli)?, a, b, *cap),
        Command::Bracket { elems, scope } => bracket(&load_table(cli)?, elems, scope.as_deref()),
    }
}

fn verify_images(d: u32, cap: u32) -> Outcome {
    let rep = verify_epi(d, cap).map_err(|e| e.to_string())?;
    let mut r = Report::default();
    let mut s = Section::new(format!("image of rho_{d} in F2[zeta_s^{}], degrees 1..{cap}", 1u32 << d));
    s.row(["degree", "source", "image", "target", "onto", "kernel"]);
    for row in &rep.rows {
        s.row([
            row.degree.to_string(),
            row.source_dim.to_string(),
            row.image_dim.to_string(),
            row.target_dim.to_string(),
            if row.surjective() { "yes" } else { "NO" }.to_string(),
            (row.source_dim - row.image_dim).to_string(),
        ]);
        r.machine(
            "epi-row",
            &[
                ("degree", row.degree.to_string()),
                ("source", row.source_dim.to_string()),
                ("image", row.image_dim.to_string()),
                ("target", row.target_dim.to_string()),
            ],
        );
    }
    let kernel = match rep.first_kernel_degree() {
        Some(k) => format!("kernel first nonzero in degree {k}"),
        None => format!("kernel zero through degree {cap}"),
    };
    s.note(format!("surjective: {}/{} degrees; {kernel}", rep.surjective_degrees(), rep.rows.len()));
    if d == 0 && !rep.all_injective() {
        s.note("injectivity fails, so rho_0 is not an isomorphism");
    }
    r.section(s);
    r.machine(
        "epi",
        &[
            ("d", d.to_string()),
            ("cap", cap.to_string()),
            ("surjective", rep.surjective_degrees().to_string()),
            ("degrees", rep.rows.len().to_string()),
            ("first_kernel", rep.first_kernel_degree().map_or("none".into(), |k| k.to_string())),
            ("passed", rep.passed().to_string()),
        ],
    );
    Ok((r, rep.passed()))
}

fn poincare(cap: u32) -> Outcome {
    let rows = poincare_comparison(cap);
    let mut r = Report::default();
    let mut s = Section::new(format!("dim H_k(S//2) against dim A_k, k <= {cap}"));
    s.row(["k", "S//2", "A", ""]);
    let mut first_bad = None;
    for &(k, a, b) in &rows {
        if a != b && first_bad.is_none() {
            first_bad = Some(k);
        }
        s.row([k.to_string(), a.to_string(), b.to_string(), if a == b { "" } else { "differs" }.to_string()]);
        r.machine("poincare", &[("k", k.to_string()), ("free", a.to_string()), ("dual", b.to_string())]);
    }
    match first_bad {
        Some(k) => s.note(format!("dimensions first differ in degree {k}")),
        None => s.note(format!("equal through degree {cap}")),
    };
    r.section(s);
    Ok((r, first_bad.is_none()))
}

fn coaction(bottom: u32, seq: &str) -> Outcome {
    if bottom == 0 {
        return Err("the bottom class needs positive degree".into());
    }
    let seq = DLSequence::parse(seq).ok_or_else(|| format!("cannot parse sequence `{seq}`"))?;
    let (_, degree) = excess_and_degree(&seq, bottom);
    if !seq.is_empty() && !admissible_generators(bottom, degree).contains(&seq) {
        return Err(format!("{} is not a generator: need an admissible sequence of excess above {bottom}", generator_name(&seq, bottom)));
    }
    let psi = coaction_of_generator(bottom, &seq, degree).map_err(|e| e.to_string())?;
    let mut r = Report::default();
    let name = generator_name(&seq, bottom);
    let mut s = Section::new(format!("coaction on {name} (degree {degree})"));
    s.note(format!("psi({name}) = {psi}"));
    r.section(s);
    r.machine("coaction", &[("generator", name), ("degree", degree.to_string()), ("terms", psi.len().to_string())]);
    for (left, right) in psi.terms() {
        r.machine(
            "term",
            &[
                ("", left.display(psi.left_universe()).to_string()),
                ("", right.display(psi.right_universe()).to_string()),
            ],
        );
    }
    Ok((r, true))
}

fn cofiber(table: &StemsTable, alpha: &str, k: u32) -> Outcome {
    let a = table.element(alpha).map_err(|e| e.to_string())?;
    let res = cofiber_pi(table, &a, k).map_err(|e| e.to_string())?;
    let show = |g: &Option<einfchar::abelian::GroupStructure>| g.as_ref().map_or("unknown".to_string(), |g| g.to_string());
    let mut r = Report::default();
    let mut s = Section::new(format!("pi_{k} of the cofibre of {} (cells in 0 and {})", table.display(&a), res.top_cell));
    s.row(["cokernel of alpha", &show(&res.coker)]);
    s.row(["kernel of alpha", &show(&res.ker)]);
    if let Some(o) = res.order() {
        s.row(["order", &o.to_string()]);
    }
    s.note(res.to_string());
    if res.incomplete() {
        s.note("incomplete: a needed product is not tabulated");
    }
    r.section(s);
    let result = match (&res.resolution, res.group()) {
        (Resolution::OrdersOnly, _) | (_, None) => "orders-only".to_string(),
        (_, Some(g)) => g.to_string(),
    };
    r.machine(
        "cofiber",
        &[
            ("alpha", table.display(&a)),
            ("k", k.to_string()),
            ("coker", show(&res.coker)),
            ("ker", show(&res.ker)),
            ("result", result),
        ],
    );
    Ok((r, !res.incomplete()))
}

fn build(
    cli: &Cli,
    table: &StemsTable,
    target: &str,
    oracle: Option<&PathBuf>,
    cap: u32,
    core: bool,
) -> Outcome {
    let spec = table.target(target).map_err(|e| e.to_string())?;
    let overrides = match oracle {
        Some(p) => table.load_oracle(p).map_err(|e| e.to_string())?,
        None => Vec::new(),
    };
    let mode = if core { Mode::Core } else { Mode::Full };
    let diagram = builder::build(table, spec, &overrides, cap, mode).map_err(|e| e.to_string())?;
    let mut r = Report::default();
    let mut s = Section::new(format!("characteristic for {target} through degree {cap}"));
    s.row(["stage", "cells", "notes"]);
    for step in &diagram.steps {
        let cells: Vec<String> = step.cells.iter().map(|c| table.display(c)).collect();
        let mut notes = Vec::new();
        if step.assumption {
            notes.push("assumption: closure incomplete".to_string());
        }
        notes.extend(step.overrides.iter().map(|c| format!("override [{c}]")));
        if !step.is_minimal() {
            notes.push("NOT MINIMAL".to_string());
        }
        s.row([step.stage.to_string(), cells.join(", "), notes.join("; ")]);
    }
    s.note(format!("result: {}", diagram.name(table)));
    r.section(s);
    for line in diagram.machine_lines(table) {
        let fields: Vec<(&str, String)> = line.split_whitespace().skip(1).map(|t| ("", t.to_string())).collect();
        r.machine("cell", &fields);
    }

    if !diagram.ledger.is_empty() {
        let mut s = Section::new("oracle facts used");
        for l in &diagram.ledger {
            s.note(l.clone());
        }
        r.section(s);
    }

    let mut ok = true;
    if !diagram.required.is_empty() {
        ok = false;
        let mut s = Section::new("required overrides");
        for req in &diagram.required {
            let cite = req.cite.as_ref().map(|c| format!(" [{c}]")).unwrap_or_default();
            s.note(format!("stage {}: {}{cite}", req.stage, req.statement));
            r.machine(
                "required",
                &[("stage", req.stage.to_string()), ("statement", req.statement.clone()), ("cite", req.cite.clone().unwrap_or_default())],
            );
        }
        s.note("rerun with --oracle supplying these facts");
        r.section(s);
    }
    if diagram.has_assumptions() {
        let mut s = Section::new("assumptions");
        s.note("some steps rest on products missing from the table");
        if !cli.allow_assumptions {
            ok = false;
            s.note("refusing without --allow-assumptions");
        }
        r.section(s);
    }

    if mode == Mode::Full {
        let core_diagram = builder::build(table, spec, &[], cap, Mode::Core).map_err(|e| e.to_string())?;
        let diverging = builder::core_divergences(&diagram, &core_diagram);
        let mut s = Section::new("additive-only comparison");
        if spec.kernel(table, 0).order() != Order::Finite(1) {
            s.note("pi_0 is not torsion free in the kernel; no agreement expected");
        }
        if diverging.is_empty() {
            s.note(format!("core build agrees: {}", core_diagram.name(table)));
        } else {
            s.note(format!("core build gives {}", core_diagram.name(table)));
            s.note(format!(
                "diverges at stages {}",
                diverging.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(", ")
            ));
        }
        r.machine(
            "core",
            &[("cells", core_diagram.name(table)), ("diverging", diverging.len().to_string())],
        );
        r.section(s);

        for c in builder::conjecture_reports(table, spec, Some(&diagram)) {
            let cite = c.cite.as_ref().map(|c| format!(" [{c}]")).unwrap_or_default();
            let mut s = Section::new(format!("conjecture: {} is a characteristic for {}{cite}", c.object, c.target));
            for (label, check) in &c.fragments {
                let status = match check {
                    Check::Verified => "verified".to_string(),
                    Check::Failed(why) => format!("fails: {why}"),
                    Check::Open(None) => "open".to_string(),
                    Check::Open(Some(why)) => format!("open: {why}"),
                };
                s.row([status.as_str(), label.as_str()]);
            }
            r.section(s);
        }
    }

    r.machine(
        "build",
        &[
            ("target", target.to_string()),
            ("cap", cap.to_string()),
            ("result", diagram.name(table)),
            ("required", diagram.required.len().to_string()),
            ("assumptions", diagram.has_assumptions().to_string()),
        ],
    );
    Ok((r, ok))
}

fn compare(table: &StemsTable, a: &str, b: &str, cap: Option<u32>) -> Outcome {
    let sa = table.target(a).map_err(|e| e.to_string())?;
    let sb = table.target(b).map_err(|e| e.to_string())?;
    let cmp = builder::compare_kernels(table, sa, sb, cap.unwrap_or(table.range));
    let mut r = Report::default();
    let mut s = Section::new(format!("kernels of {a} and {b} through degree {}", cmp.cap));
    s.row(["degree", &format!("|ker {a}|"), &format!("|ker {b}|")]);
    for n in 0..=cmp.cap {
        s.row([
            n.to_string(),
            sa.kernel(table, n).order().to_string(),
            sb.kernel(table, n).order().to_string(),
        ]);
    }
    if let Some(n) = cmp.a_not_in_b {
        s.note(format!("ker {a} is not inside ker {b} in degree {n}"));
    }
    if let Some(n) = cmp.b_not_in_a {
        s.note(format!("ker {b} is not inside ker {a} in degree {n}"));
    }
    s.note(cmp.verdict.describe(a, b));
    r.section(s);
    r.machine(
        "compare",
        &[("a", a.to_string()), ("b", b.to_string()), ("cap", cmp.cap.to_string()), ("verdict", cmp.verdict.keyword().to_string())],
    );
    Ok((r, true))
}

fn bracket(table: &StemsTable, elems: &str, scope: Option<&str>) -> Outcome {
    let (a, b, c) = table.parse_triple(elems, scope).map_err(|e| e.to_string())?;
    let res = table.toda_bracket(&a, &b, &c, scope).map_err(|e| e.to_string())?;
    let groups = table.scope_groups(scope).map_err(|e| e.to_string())?;
    let where_ = scope.unwrap_or("S");
    let gens: Vec<String> = res
        .indeterminacy
        .generators()
        .into_iter()
        .map(|v| groups.display(&groups.from_vector(res.degree, v)))
        .collect();
    let gens_text = if gens.is_empty() { "0".to_string() } else { gens.join(", ") };
    let mut r = Report::default();
    let mut s = Section::new(format!("Toda bracket <{elems}> in pi_{}({where_})", res.degree));
    s.row(["representative", &groups.display(&res.representative)]);
    s.row(["indeterminacy generated by", &gens_text]);
    s.row(["indeterminacy order", &res.indeterminacy.order().to_string()]);
    if let Some(cite) = &res.cite {
        s.row(["source", cite]);
    }
    r.section(s);
    r.machine(
        "bracket",
        &[
            ("degree", res.degree.to_string()),
            ("scope", where_.to_string()),
            ("representative", groups.display(&res.representative)),
            ("indeterminacy", gens.join(",")),
        ],
    );
    Ok((r, true))
}
