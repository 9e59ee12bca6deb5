//! Tabulated p-local stable stems: cyclic summands with named generators, a
//! product table, Toda bracket records, and kernel data for target spectra.
//!
//! The text format is line oriented, `#` starts a comment:
//!
//! ```text
//! prime 2
//! range 20
//! group <n> <gen>:<order> ...          order 0 is Z_(p)
//! filtration <gen> <s>
//! prod <gen>*<gen> = <expr>
//! bracket <e>,<e>,<e> [@<target>] = <expr> [cite <text>]
//! extension <gen> <k> = <label>:<order> ... [cite <text>]
//! target <name> [through <N>]
//! tgroup <n> <gen>:<order> ...
//! kills <n|*> <expr|all>
//! maps <gen> = <texpr>
//! act <gen>*<tgen> = <texpr>
//! survives <n|*> <expr|all> order <k> after <e,e,...|none> [cite <text>]
//! conjecture cells <e,e,...|none> [cite <text>]
//! ```
//!
//! Records from `tgroup` down belong to the most recent `target`. An expression
//! is `0` or a `+`-separated sum of terms `k*gen`, `gen`, or a bare integer `k`
//! (a multiple of the unit in degree 0). In stored data every coefficient must
//! satisfy `0 < k < order`. Generator names are unique across the whole file.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::abelian::{CyclicSum, Subgroup};
use crate::error::TableError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Summand {
    pub name: String,
    pub order: u64,
}

/// An element of one graded group: a degree and coefficients on its summands.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Element {
    pub degree: u32,
    pub coeffs: Vec<i64>,
}

impl Element {
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProductValue {
    Known(Element),
    Unknown,
}

impl ProductValue {
    pub fn known(self) -> Option<Element> {
        match self {
            ProductValue::Known(e) => Some(e),
            ProductValue::Unknown => None,
        }
    }
}

/// Graded family of finitely generated abelian groups with named summands.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct GradedGroups {
    groups: BTreeMap<u32, Vec<Summand>>,
}

impl GradedGroups {
    pub fn summands(&self, n: u32) -> &[Summand] {
        self.groups.get(&n).map_or(&[], |v| v.as_slice())
    }

    pub fn cyclic(&self, n: u32) -> CyclicSum {
        CyclicSum::new(self.summands(n).iter().map(|s| s.order).collect())
    }

    pub fn tabulated_degrees(&self) -> impl Iterator<Item = u32> + '_ {
        self.groups.keys().copied()
    }

    pub fn locate(&self, name: &str) -> Option<(u32, usize)> {
        self.groups.iter().find_map(|(&n, v)| {
            v.iter().position(|s| s.name == name).map(|i| (n, i))
        })
    }

    pub fn unit(&self) -> Option<&Summand> {
        self.summands(0).first()
    }

    fn is_unit(&self, n: u32, i: usize) -> bool {
        n == 0 && i == 0
    }

    pub fn zero(&self, n: u32) -> Element {
        Element {
            degree: n,
            coeffs: vec![0; self.summands(n).len()],
        }
    }

    pub fn generator(&self, n: u32, i: usize) -> Element {
        let mut e = self.zero(n);
        e.coeffs[i] = 1;
        e
    }

    pub fn generators(&self, n: u32) -> Vec<Element> {
        (0..self.summands(n).len()).map(|i| self.generator(n, i)).collect()
    }

    pub fn from_vector(&self, n: u32, v: Vec<i64>) -> Element {
        let coeffs = self.cyclic(n).reduced(v);
        Element { degree: n, coeffs }
    }

    pub fn add(&self, a: &Element, b: &Element) -> Element {
        debug_assert_eq!(a.degree, b.degree);
        Element {
            degree: a.degree,
            coeffs: self.cyclic(a.degree).add(&a.coeffs, &b.coeffs),
        }
    }

    pub fn scale(&self, k: i64, a: &Element) -> Element {
        Element {
            degree: a.degree,
            coeffs: self.cyclic(a.degree).scale(k, &a.coeffs),
        }
    }

    pub fn subgroup(&self, n: u32, elements: &[Element]) -> Subgroup {
        let gens: Vec<Vec<i64>> = elements.iter().map(|e| e.coeffs.clone()).collect();
        self.cyclic(n).subgroup(&gens)
    }

    pub fn display(&self, e: &Element) -> String {
        let summands = self.summands(e.degree);
        let mut parts = Vec::new();
        for (i, &c) in e.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if self.is_unit(e.degree, i) {
                parts.push(c.to_string());
            } else if c == 1 {
                parts.push(summands[i].name.clone());
            } else {
                parts.push(format!("{c}*{}", summands[i].name));
            }
        }
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join(" + ")
        }
    }

    /// Parses an expression. `strict` enforces `0 < k < order` on coefficients;
    /// otherwise coefficients are reduced.
    pub fn parse_element(
        &self,
        text: &str,
        degree: Option<u32>,
        strict: bool,
    ) -> Result<Element, TableError> {
        let bad = || TableError::BadElement(text.to_string());
        let mut terms: Vec<(i64, u32, usize)> = Vec::new();
        for raw in text.split('+') {
            let term = raw.trim();
            if term.is_empty() {
                return Err(bad());
            }
            if term == "0" {
                continue;
            }
            let (k, name) = match term.split_once('*') {
                Some((k, name)) => (k.trim().parse::<i64>().map_err(|_| bad())?, name.trim()),
                None => match term.parse::<i64>() {
                    Ok(k) => {
                        self.unit().ok_or_else(bad)?;
                        terms.push((k, 0, 0));
                        continue;
                    }
                    Err(_) => (1, term),
                },
            };
            let (n, i) = self
                .locate(name)
                .ok_or_else(|| TableError::UnknownGenerator(name.to_string()))?;
            terms.push((k, n, i));
        }
        let n = match (terms.first(), degree) {
            (Some(&(_, n, _)), _) => n,
            (None, Some(d)) => d,
            (None, None) => return Err(bad()),
        };
        if let Some(d) = degree {
            if d != n {
                return Err(TableError::DegreeMismatch(n, d));
            }
        }
        let mut coeffs = vec![0i64; self.summands(n).len()];
        for &(k, m, i) in &terms {
            if m != n {
                return Err(TableError::DegreeMismatch(n, m));
            }
            if strict {
                let order = self.summands(m)[i].order;
                if k <= 0 || (order > 0 && k as u64 >= order) {
                    return Err(TableError::Inconsistent(format!(
                        "coefficient {k} on `{}` in `{text}` must lie strictly between 0 and the order {order}",
                        self.summands(m)[i].name
                    )));
                }
                if coeffs[i] != 0 {
                    return Err(TableError::BadElement(text.to_string()));
                }
            }
            coeffs[i] += k;
        }
        Ok(self.from_vector(n, coeffs))
    }
}

/// Degree selector: one degree or every positive degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Degrees {
    One(u32),
    Positive,
}

impl Degrees {
    pub fn contains(&self, n: u32) -> bool {
        match *self {
            Degrees::One(d) => d == n,
            Degrees::Positive => n > 0,
        }
    }
}

/// What a `kills` or `survives` record applies to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Selection {
    Element(Element),
    All(Degrees),
}

impl Selection {
    pub fn degrees(&self) -> Degrees {
        match self {
            Selection::Element(e) => Degrees::One(e.degree),
            Selection::All(d) => *d,
        }
    }

    /// Elements selected in degree `n`.
    pub fn in_degree(&self, groups: &GradedGroups, n: u32) -> Vec<Element> {
        match self {
            Selection::Element(e) if e.degree == n => vec![e.clone()],
            Selection::Element(_) => vec![],
            Selection::All(d) if d.contains(n) => groups.generators(n),
            Selection::All(_) => vec![],
        }
    }
}

/// Fate of an element once a given list of cells is attached: `order == 1`
/// means it dies, `order == k > 1` means its image has order exactly `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Survival {
    pub selection: Selection,
    pub order: u64,
    pub after: Vec<Element>,
    pub cite: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Conjecture {
    pub cells: Vec<Element>,
    pub cite: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BracketEntry {
    pub alpha: Element,
    pub beta: Element,
    pub gamma: Element,
    pub scope: Option<String>,
    pub representative: Element,
    pub cite: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Extension {
    pub alpha: Element,
    pub degree: u32,
    pub summands: Vec<(String, u64)>,
    pub cite: Option<String>,
}

/// Kernel data and homotopy of a target `R` of a unit map `S → R`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TargetSpec {
    pub name: String,
    pub through: Option<u32>,
    pub groups: GradedGroups,
    pub kills: Vec<Selection>,
    pub maps: BTreeMap<String, Element>,
    pub acts: BTreeMap<(String, String), Element>,
    pub survivals: Vec<Survival>,
    pub conjectures: Vec<Conjecture>,
}

impl TargetSpec {
    pub fn new(name: &str) -> Self {
        TargetSpec {
            name: name.to_string(),
            through: None,
            groups: GradedGroups::default(),
            kills: Vec::new(),
            maps: BTreeMap::new(),
            acts: BTreeMap::new(),
            survivals: Vec::new(),
            conjectures: Vec::new(),
        }
    }

    /// Top degree for which the kill data is asserted.
    pub fn data_limit(&self, table: &StemsTable) -> u32 {
        self.through.unwrap_or(table.range).min(table.range)
    }

    /// `ker(π_n S → π_n R)` as recorded.
    pub fn kernel(&self, table: &StemsTable, n: u32) -> Subgroup {
        let elements: Vec<Element> = self
            .kills
            .iter()
            .flat_map(|k| k.in_degree(&table.sphere, n))
            .collect();
        table.sphere.subgroup(n, &elements)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BracketResult {
    pub degree: u32,
    pub scope: Option<String>,
    pub representative: Element,
    pub indeterminacy: Subgroup,
    pub cite: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StemsTable {
    pub prime: u64,
    pub range: u32,
    pub sphere: GradedGroups,
    pub filtration: BTreeMap<String, u32>,
    pub products: BTreeMap<(String, String), Element>,
    pub brackets: Vec<BracketEntry>,
    pub extensions: Vec<Extension>,
    pub targets: Vec<TargetSpec>,
}

const REFERENCE: &str = include_str!("../../../data/stems_2local.txt");

struct Record {
    line: usize,
    tokens: Vec<String>,
    target: Option<usize>,
}

fn parse_err(line: usize, message: impl Into<String>) -> TableError {
    TableError::Parse {
        line,
        message: message.into(),
    }
}

fn at_line(line: usize, e: TableError) -> TableError {
    match e {
        TableError::Parse { .. } | TableError::Io { .. } => e,
        other => parse_err(line, other.to_string()),
    }
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..p).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

fn is_power_of(order: u64, p: u64) -> bool {
    let mut o = order;
    while o > 1 && o % p == 0 {
        o /= p;
    }
    o == 1
}

fn split_cite(tokens: &[String]) -> (&[String], Option<String>) {
    match tokens.iter().position(|t| t == "cite") {
        Some(i) => (&tokens[..i], Some(tokens[i + 1..].join(" "))),
        None => (tokens, None),
    }
}

fn split_eq(r: &Record, tokens: &[String]) -> Result<(String, String), TableError> {
    let i = tokens
        .iter()
        .position(|t| t == "=")
        .ok_or_else(|| parse_err(r.line, "expected `=`"))?;
    if i == 0 || i + 1 == tokens.len() {
        return Err(parse_err(r.line, "empty side of `=`"));
    }
    Ok((tokens[..i].join(" "), tokens[i + 1..].join(" ")))
}

fn parse_num<T: std::str::FromStr>(r: &Record, s: &str) -> Result<T, TableError> {
    s.parse()
        .map_err(|_| parse_err(r.line, format!("expected a number, found `{s}`")))
}

impl StemsTable {
    /// The shipped 2-local reference table.
    pub fn reference() -> Self {
        Self::parse(REFERENCE).expect("reference table is valid")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, TableError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| TableError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, TableError> {
        let mut records = Vec::new();
        let mut current: Option<usize> = None;
        let mut target_names: Vec<String> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("");
            let tokens: Vec<String> = body.split_whitespace().map(str::to_string).collect();
            if tokens.is_empty() {
                continue;
            }
            let kw = tokens[0].as_str();
            match kw {
                "target" => {
                    let name = tokens
                        .get(1)
                        .ok_or_else(|| parse_err(line, "target needs a name"))?;
                    if target_names.contains(name) {
                        return Err(parse_err(line, format!("duplicate target `{name}`")));
                    }
                    target_names.push(name.clone());
                    current = Some(target_names.len() - 1);
                }
                "tgroup" | "kills" | "maps" | "act" | "survives" | "conjecture" => {
                    if current.is_none() {
                        return Err(parse_err(line, format!("`{kw}` outside a target block")));
                    }
                }
                "prime" | "range" | "group" | "filtration" | "prod" | "bracket" | "extension" => {}
                _ => return Err(parse_err(line, format!("unknown record `{kw}`"))),
            }
            records.push(Record {
                line,
                tokens,
                target: current,
            });
        }

        let mut table = StemsTable {
            prime: 0,
            range: 0,
            sphere: GradedGroups::default(),
            filtration: BTreeMap::new(),
            products: BTreeMap::new(),
            brackets: Vec::new(),
            extensions: Vec::new(),
            targets: target_names.iter().map(|n| TargetSpec::new(n)).collect(),
        };

        let mut seen_prime = false;
        let mut seen_range = false;
        for r in &records {
            match r.tokens[0].as_str() {
                "prime" => {
                    if seen_prime || r.tokens.len() != 2 {
                        return Err(parse_err(r.line, "expected a single `prime <p>`"));
                    }
                    table.prime = parse_num(r, &r.tokens[1])?;
                    if !is_prime(table.prime) {
                        return Err(parse_err(r.line, format!("{} is not prime", table.prime)));
                    }
                    seen_prime = true;
                }
                "range" => {
                    if seen_range || r.tokens.len() != 2 {
                        return Err(parse_err(r.line, "expected a single `range <N>`"));
                    }
                    table.range = parse_num(r, &r.tokens[1])?;
                    seen_range = true;
                }
                _ => {}
            }
        }
        if !seen_prime {
            return Err(parse_err(0, "missing `prime` record"));
        }
        if !seen_range {
            return Err(parse_err(0, "missing `range` record"));
        }

        let mut names: BTreeMap<String, usize> = BTreeMap::new();
        for r in &records {
            let kw = r.tokens[0].as_str();
            if kw != "group" && kw != "tgroup" {
                continue;
            }
            let n: u32 = parse_num(r, r.tokens.get(1).ok_or_else(|| parse_err(r.line, "missing degree"))?)?;
            if n > table.range {
                return Err(at_line(
                    r.line,
                    TableError::OutOfRange {
                        degree: n as i64,
                        range: table.range,
                    },
                ));
            }
            let mut summands = Vec::new();
            for tok in &r.tokens[2..] {
                let (name, order) = tok
                    .split_once(':')
                    .ok_or_else(|| parse_err(r.line, format!("expected <gen>:<order>, found `{tok}`")))?;
                if name.is_empty() || name.parse::<i64>().is_ok() || name.contains(['*', '+', ',', '=', '@']) {
                    return Err(parse_err(r.line, format!("invalid generator name `{name}`")));
                }
                let order: u64 = parse_num(r, order)?;
                if order != 0 && (order == 1 || !is_power_of(order, table.prime)) {
                    return Err(parse_err(
                        r.line,
                        format!("order {order} of `{name}` is not a power of {}", table.prime),
                    ));
                }
                if let Some(prev) = names.insert(name.to_string(), r.line) {
                    return Err(parse_err(
                        r.line,
                        format!("generator `{name}` already declared on line {prev}"),
                    ));
                }
                summands.push(Summand {
                    name: name.to_string(),
                    order,
                });
            }
            let groups = match r.target {
                Some(t) if kw == "tgroup" => &mut table.targets[t].groups,
                _ => &mut table.sphere,
            };
            if groups.groups.insert(n, summands).is_some() {
                return Err(parse_err(r.line, format!("degree {n} declared twice")));
            }
        }
        if table.sphere.unit().is_none() {
            return Err(parse_err(0, "missing `group 0` (the unit)"));
        }

        for r in &records {
            table.parse_record(r).map_err(|e| at_line(r.line, e))?;
        }
        table.check_products()?;
        Ok(table)
    }

    fn parse_record(&mut self, r: &Record) -> Result<(), TableError> {
        let t = &r.tokens;
        match t[0].as_str() {
            "filtration" => {
                if t.len() != 3 {
                    return Err(parse_err(r.line, "expected `filtration <gen> <s>`"));
                }
                if self.sphere.locate(&t[1]).is_none() {
                    return Err(TableError::UnknownGenerator(t[1].clone()));
                }
                let s = parse_num(r, &t[2])?;
                if self.filtration.insert(t[1].clone(), s).is_some() {
                    return Err(parse_err(r.line, format!("filtration of `{}` given twice", t[1])));
                }
            }
            "prod" => {
                let (lhs, rhs) = split_eq(r, &t[1..])?;
                let (a, b) = lhs
                    .split_once('*')
                    .ok_or_else(|| parse_err(r.line, "expected `<gen>*<gen>`"))?;
                let (a, b) = (a.trim().to_string(), b.trim().to_string());
                let (da, _) = self.sphere.locate(&a).ok_or_else(|| TableError::UnknownGenerator(a.clone()))?;
                let (db, _) = self.sphere.locate(&b).ok_or_else(|| TableError::UnknownGenerator(b.clone()))?;
                let n = self.in_range(da as i64 + db as i64)?;
                let value = self.sphere.parse_element(&rhs, Some(n), true)?;
                if self.products.insert((a.clone(), b.clone()), value).is_some() {
                    return Err(parse_err(r.line, format!("product {a}*{b} given twice")));
                }
            }
            "bracket" => {
                let (body, cite) = split_cite(&t[1..]);
                let (lhs, rhs) = split_eq(r, body)?;
                let mut lhs_tokens = lhs.split_whitespace();
                let triple = lhs_tokens.next().unwrap_or("");
                let scope = match lhs_tokens.next() {
                    Some(s) => Some(
                        s.strip_prefix('@')
                            .ok_or_else(|| parse_err(r.line, "expected `@<target>`"))?
                            .to_string(),
                    ),
                    None => None,
                };
                let (alpha, beta, gamma) = self.parse_triple(triple, scope.as_deref())?;
                let degree = self.in_range(alpha.degree as i64 + beta.degree as i64 + gamma.degree as i64 + 1)?;
                let representative = self.scope_groups(scope.as_deref())?.parse_element(&rhs, Some(degree), true)?;
                self.brackets.push(BracketEntry {
                    alpha,
                    beta,
                    gamma,
                    scope,
                    representative,
                    cite,
                });
            }
            "extension" => {
                let (body, cite) = split_cite(&t[1..]);
                let i = body
                    .iter()
                    .position(|x| x == "=")
                    .ok_or_else(|| parse_err(r.line, "expected `=`"))?;
                if i != 2 || body.len() < 4 {
                    return Err(parse_err(r.line, "expected `extension <gen> <k> = <label>:<order> ...`"));
                }
                let alpha = self.sphere.parse_element(&body[0], None, true)?;
                let degree: u32 = parse_num(r, &body[1])?;
                self.in_range(degree as i64)?;
                let mut summands = Vec::new();
                for tok in &body[3..] {
                    let (label, order) = tok
                        .split_once(':')
                        .ok_or_else(|| parse_err(r.line, format!("expected <label>:<order>, found `{tok}`")))?;
                    summands.push((label.to_string(), parse_num(r, order)?));
                }
                self.extensions.push(Extension {
                    alpha,
                    degree,
                    summands,
                    cite,
                });
            }
            "kills" => {
                let ti = r.target.expect("checked in the first pass");
                if t.len() < 3 {
                    return Err(parse_err(r.line, "expected `kills <n|*> <expr|all>`"));
                }
                let sel = self.parse_selection(r, &t[1], &t[2..].join(" "))?;
                self.targets[ti].kills.push(sel);
            }
            "maps" => {
                let ti = r.target.expect("checked in the first pass");
                let (lhs, rhs) = split_eq(r, &t[1..])?;
                let (n, _) = self
                    .sphere
                    .locate(&lhs)
                    .ok_or_else(|| TableError::UnknownGenerator(lhs.clone()))?;
                let value = self.targets[ti].groups.parse_element(&rhs, Some(n), true)?;
                if self.targets[ti].maps.insert(lhs.clone(), value).is_some() {
                    return Err(parse_err(r.line, format!("image of `{lhs}` given twice")));
                }
            }
            "act" => {
                let ti = r.target.expect("checked in the first pass");
                let (lhs, rhs) = split_eq(r, &t[1..])?;
                let (a, b) = lhs
                    .split_once('*')
                    .ok_or_else(|| parse_err(r.line, "expected `<gen>*<tgen>`"))?;
                let (a, b) = (a.trim().to_string(), b.trim().to_string());
                let (da, _) = self.sphere.locate(&a).ok_or_else(|| TableError::UnknownGenerator(a.clone()))?;
                let (db, _) = self.targets[ti]
                    .groups
                    .locate(&b)
                    .ok_or_else(|| TableError::UnknownGenerator(b.clone()))?;
                let n = self.in_range(da as i64 + db as i64)?;
                let value = self.targets[ti].groups.parse_element(&rhs, Some(n), true)?;
                if self.targets[ti].acts.insert((a.clone(), b.clone()), value).is_some() {
                    return Err(parse_err(r.line, format!("action {a}*{b} given twice")));
                }
            }
            "survives" => {
                let ti = r.target.expect("checked in the first pass");
                let s = self.parse_survival(r, &t[1..])?;
                self.targets[ti].survivals.push(s);
            }
            "conjecture" => {
                let ti = r.target.expect("checked in the first pass");
                let (body, cite) = split_cite(&t[1..]);
                if body.len() != 2 || body[0] != "cells" {
                    return Err(parse_err(r.line, "expected `conjecture cells <list>`"));
                }
                let cells = self.parse_cells(&body[1])?;
                self.targets[ti].conjectures.push(Conjecture { cells, cite });
            }
            "target" => {
                let ti = r.target.expect("target line sets the block");
                match r.tokens.len() {
                    2 => {}
                    4 if r.tokens[2] == "through" => {
                        let n: u32 = parse_num(r, &r.tokens[3])?;
                        self.in_range(n as i64)?;
                        self.targets[ti].through = Some(n);
                    }
                    _ => return Err(parse_err(r.line, "expected `target <name> [through <N>]`")),
                }
            }
            _ => {}
        }
        Ok(())
    }

    fn parse_selection(&self, r: &Record, degree: &str, what: &str) -> Result<Selection, TableError> {
        let degrees = if degree == "*" {
            Degrees::Positive
        } else {
            let n: u32 = parse_num(r, degree)?;
            self.in_range(n as i64)?;
            Degrees::One(n)
        };
        if what == "all" {
            return Ok(Selection::All(degrees));
        }
        let Degrees::One(n) = degrees else {
            return Err(parse_err(r.line, "`*` may only be combined with `all`"));
        };
        Ok(Selection::Element(self.sphere.parse_element(what, Some(n), true)?))
    }

    fn parse_survival(&self, r: &Record, tokens: &[String]) -> Result<Survival, TableError> {
        let (body, cite) = split_cite(tokens);
        let oi = body
            .iter()
            .position(|x| x == "order")
            .ok_or_else(|| parse_err(r.line, "expected `order <k>`"))?;
        if oi < 2 || body.len() != oi + 4 || body[oi + 2] != "after" {
            return Err(parse_err(
                r.line,
                "expected `survives <n|*> <expr|all> order <k> after <cells|none>`",
            ));
        }
        let selection = self.parse_selection(r, &body[0], &body[1..oi].join(" "))?;
        let order: u64 = parse_num(r, &body[oi + 1])?;
        if order == 0 || !is_power_of(order, self.prime) {
            return Err(parse_err(r.line, format!("order {order} is not a power of {}", self.prime)));
        }
        if order > 1 {
            let Selection::Element(e) = &selection else {
                return Err(parse_err(r.line, "a survival order above 1 needs a single element"));
            };
            match self.sphere.cyclic(e.degree).element_order(&e.coeffs) {
                crate::abelian::Order::Finite(o) if o % order != 0 || o == order => {
                    return Err(TableError::Inconsistent(format!(
                        "`{}` has order {o}, so its image cannot have order {order} after attaching cells",
                        self.sphere.display(e)
                    )));
                }
                _ => {}
            }
        }
        let after = self.parse_cells(&body[oi + 3])?;
        Ok(Survival {
            selection,
            order,
            after,
            cite,
        })
    }

    fn parse_cells(&self, list: &str) -> Result<Vec<Element>, TableError> {
        if list == "none" {
            return Ok(Vec::new());
        }
        list.split(',')
            .map(|c| self.sphere.parse_element(c, None, true))
            .collect()
    }

    /// Parses `a,b,c`; `a` and `b` live in the sphere, `c` in the scope.
    pub fn parse_triple(
        &self,
        triple: &str,
        scope: Option<&str>,
    ) -> Result<(Element, Element, Element), TableError> {
        let parts: Vec<&str> = triple.split(',').collect();
        if parts.len() != 3 {
            return Err(TableError::BadElement(triple.to_string()));
        }
        let alpha = self.sphere.parse_element(parts[0], None, false)?;
        let beta = self.sphere.parse_element(parts[1], None, false)?;
        let gamma = self.scope_groups(scope)?.parse_element(parts[2], None, false)?;
        Ok((alpha, beta, gamma))
    }

    fn check_products(&self) -> Result<(), TableError> {
        for ((a, b), value) in &self.products {
            for g in [a, b] {
                let (n, i) = self.sphere.locate(g).expect("validated");
                let order = self.sphere.summands(n)[i].order;
                if order > 0 && !self.sphere.scale(order as i64, value).is_zero() {
                    return Err(TableError::Inconsistent(format!(
                        "prod {a}*{b} = {}: {order}*{g} = 0 but {order} times the product is not",
                        self.sphere.display(value)
                    )));
                }
            }
            if a != b {
                if let Some(other) = self.products.get(&(b.clone(), a.clone())) {
                    let sign = self.commutation_sign(a, b);
                    if self.sphere.scale(sign, other) != *value {
                        return Err(TableError::Inconsistent(format!(
                            "prod {a}*{b} and prod {b}*{a} disagree"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    fn commutation_sign(&self, a: &str, b: &str) -> i64 {
        let da = self.sphere.locate(a).map_or(0, |x| x.0);
        let db = self.sphere.locate(b).map_or(0, |x| x.0);
        if self.prime != 2 && da % 2 == 1 && db % 2 == 1 {
            -1
        } else {
            1
        }
    }

    pub fn in_range(&self, degree: i64) -> Result<u32, TableError> {
        if degree < 0 || degree > self.range as i64 {
            Err(TableError::OutOfRange {
                degree,
                range: self.range,
            })
        } else {
            Ok(degree as u32)
        }
    }

    pub fn target(&self, name: &str) -> Result<&TargetSpec, TableError> {
        self.targets
            .iter()
            .find(|t| t.name == name)
            .ok_or_else(|| TableError::UnknownTarget(name.to_string()))
    }

    pub fn scope_groups(&self, scope: Option<&str>) -> Result<&GradedGroups, TableError> {
        match scope {
            None => Ok(&self.sphere),
            Some(t) => Ok(&self.target(t)?.groups),
        }
    }

    pub fn element(&self, text: &str) -> Result<Element, TableError> {
        self.sphere.parse_element(text, None, false)
    }

    pub fn display(&self, e: &Element) -> String {
        self.sphere.display(e)
    }

    pub fn adams_filtration(&self, e: &Element) -> Option<u32> {
        let summands = self.sphere.summands(e.degree);
        e.coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .filter_map(|(i, _)| self.filtration.get(&summands[i].name).copied())
            .min()
    }

    fn generator_product(&self, (m, i): (u32, usize), (n, j): (u32, usize)) -> Option<Element> {
        if self.sphere.is_unit(m, i) {
            return Some(self.sphere.generator(n, j));
        }
        if self.sphere.is_unit(n, j) {
            return Some(self.sphere.generator(m, i));
        }
        if self.sphere.summands(m + n).is_empty() {
            return Some(self.sphere.zero(m + n));
        }
        let a = &self.sphere.summands(m)[i].name;
        let b = &self.sphere.summands(n)[j].name;
        if let Some(v) = self.products.get(&(a.clone(), b.clone())) {
            return Some(v.clone());
        }
        self.products
            .get(&(b.clone(), a.clone()))
            .map(|v| self.sphere.scale(self.commutation_sign(a, b), v))
    }

    /// Bilinear extension of the product table on `π₊(S)`.
    pub fn product(&self, a: &Element, b: &Element) -> Result<ProductValue, TableError> {
        let n = self.in_range(a.degree as i64 + b.degree as i64)?;
        bilinear(
            &self.sphere,
            &self.sphere,
            &self.sphere,
            a,
            b,
            n,
            |g, h| self.generator_product(g, h),
        )
    }

    /// Image of a sphere element under the unit `S → R`.
    pub fn unit_image(&self, target: &TargetSpec, x: &Element) -> Result<ProductValue, TableError> {
        let n = self.in_range(x.degree as i64)?;
        let groups = &target.groups;
        if groups.summands(n).is_empty() || target.kernel(self, n).contains(&x.coeffs) {
            return Ok(ProductValue::Known(groups.zero(n)));
        }
        let kernel = target.kernel(self, n);
        let mut acc = groups.zero(n);
        for (i, &c) in x.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let g = self.sphere.generator(n, i);
            let image = if kernel.contains(&g.coeffs) {
                groups.zero(n)
            } else if self.sphere.is_unit(n, i) {
                match groups.unit() {
                    Some(_) => groups.generator(0, 0),
                    None => groups.zero(0),
                }
            } else {
                match target.maps.get(&self.sphere.summands(n)[i].name) {
                    Some(v) => v.clone(),
                    None => return Ok(ProductValue::Unknown),
                }
            };
            acc = groups.add(&acc, &groups.scale(c, &image));
        }
        Ok(ProductValue::Known(acc))
    }

    /// Action `π₊(S) ⊗ π₊(R) → π₊(R)`.
    pub fn act(&self, target: &TargetSpec, x: &Element, y: &Element) -> Result<ProductValue, TableError> {
        let n = self.in_range(x.degree as i64 + y.degree as i64)?;
        let groups = &target.groups;
        let mut unit_images = BTreeMap::new();
        for (i, &c) in x.coeffs.iter().enumerate() {
            if c != 0 {
                let g = self.sphere.generator(x.degree, i);
                unit_images.insert(i, self.unit_image(target, &g)?);
            }
        }
        bilinear(&self.sphere, groups, groups, x, y, n, |(m, i), (k, j)| {
            if self.sphere.is_unit(m, i) {
                return Some(groups.generator(k, j));
            }
            if groups.summands(m + k).is_empty() {
                return Some(groups.zero(m + k));
            }
            if groups.is_unit(k, j) {
                return unit_images.get(&i).cloned().and_then(ProductValue::known);
            }
            let a = self.sphere.summands(m)[i].name.clone();
            let b = groups.summands(k)[j].name.clone();
            target.acts.get(&(a, b)).cloned()
        })
    }

    fn scoped_product(
        &self,
        scope: Option<&TargetSpec>,
        x: &Element,
        y: &Element,
    ) -> Result<ProductValue, TableError> {
        match scope {
            None => self.product(x, y),
            Some(t) => self.act(t, x, y),
        }
    }

    /// Stored representative of `⟨α, β, γ⟩` with indeterminacy
    /// `α·π_{|β|+|γ|+1}(scope) + π_{|α|+|β|+1}(S)·γ`.
    pub fn toda_bracket(
        &self,
        alpha: &Element,
        beta: &Element,
        gamma: &Element,
        scope: Option<&str>,
    ) -> Result<BracketResult, TableError> {
        let spec = scope.map(|s| self.target(s)).transpose()?;
        let groups = self.scope_groups(scope)?;
        let label = format!(
            "{},{},{}",
            self.display(alpha),
            self.display(beta),
            groups.display(gamma)
        );
        let undefined = |reason: String| TableError::BracketUndefined {
            bracket: label.clone(),
            reason,
        };
        match self.product(alpha, beta)? {
            ProductValue::Unknown => return Err(TableError::UnknownProduct(format!("<{label}>"))),
            ProductValue::Known(p) if !p.is_zero() => {
                return Err(undefined(format!("the first product is {}, not 0", self.display(&p))))
            }
            _ => {}
        }
        match self.scoped_product(spec, beta, gamma)? {
            ProductValue::Unknown => return Err(TableError::UnknownProduct(format!("<{label}>"))),
            ProductValue::Known(p) if !p.is_zero() => {
                return Err(undefined(format!("the second product is {}, not 0", groups.display(&p))))
            }
            _ => {}
        }
        let entry = self
            .brackets
            .iter()
            .find(|b| {
                b.alpha == *alpha && b.beta == *beta && b.gamma == *gamma && b.scope.as_deref() == scope
            })
            .ok_or_else(|| TableError::NoBracketData(label.clone()))?;
        let degree = self.in_range(alpha.degree as i64 + beta.degree as i64 + gamma.degree as i64 + 1)?;
        let mut gens = Vec::new();
        let right = beta.degree + gamma.degree + 1;
        for y in groups.generators(right) {
            match self.scoped_product(spec, alpha, &y)? {
                ProductValue::Known(v) => gens.push(v),
                ProductValue::Unknown => {
                    return Err(TableError::UnknownProduct(format!("indeterminacy of <{label}>")))
                }
            }
        }
        let left = alpha.degree + beta.degree + 1;
        for x in self.sphere.generators(left) {
            match self.scoped_product(spec, &x, gamma)? {
                ProductValue::Known(v) => gens.push(v),
                ProductValue::Unknown => {
                    return Err(TableError::UnknownProduct(format!("indeterminacy of <{label}>")))
                }
            }
        }
        Ok(BracketResult {
            degree,
            scope: scope.map(str::to_string),
            representative: entry.representative.clone(),
            indeterminacy: groups.subgroup(degree, &gens),
            cite: entry.cite.clone(),
        })
    }

    pub fn extension(&self, alpha: &Element, degree: u32) -> Option<&Extension> {
        self.extensions
            .iter()
            .find(|e| e.alpha == *alpha && e.degree == degree)
    }

    fn write_selection(&self, out: &mut String, sel: &Selection) {
        match sel {
            Selection::Element(e) => {
                let _ = write!(out, "{} {}", e.degree, self.display(e));
            }
            Selection::All(Degrees::One(n)) => {
                let _ = write!(out, "{n} all");
            }
            Selection::All(Degrees::Positive) => out.push_str("* all"),
        }
    }

    fn cells_text(&self, cells: &[Element]) -> String {
        if cells.is_empty() {
            "none".to_string()
        } else {
            cells.iter().map(|c| self.display(c)).collect::<Vec<_>>().join(",")
        }
    }

    pub fn survival_line(&self, s: &Survival) -> String {
        let mut out = String::from("survives ");
        self.write_selection(&mut out, &s.selection);
        let _ = write!(out, " order {} after {}", s.order, self.cells_text(&s.after));
        if let Some(c) = &s.cite {
            let _ = write!(out, " cite {c}");
        }
        out
    }

    /// Canonical text form; parsing it back gives an equal table.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "prime {}", self.prime);
        let _ = writeln!(out, "range {}", self.range);
        let groups_line = |out: &mut String, kw: &str, n: u32, summands: &[Summand]| {
            let _ = write!(out, "{kw} {n}");
            for s in summands {
                let _ = write!(out, " {}:{}", s.name, s.order);
            }
            out.push('\n');
        };
        for (&n, s) in &self.sphere.groups {
            groups_line(&mut out, "group", n, s);
        }
        for (g, s) in &self.filtration {
            let _ = writeln!(out, "filtration {g} {s}");
        }
        for ((a, b), v) in &self.products {
            let _ = writeln!(out, "prod {a}*{b} = {}", self.display(v));
        }
        let cite = |c: &Option<String>| c.as_ref().map(|c| format!(" cite {c}")).unwrap_or_default();
        for b in &self.brackets {
            let groups = self.scope_groups(b.scope.as_deref()).expect("validated scope");
            let scope = b.scope.as_ref().map(|s| format!(" @{s}")).unwrap_or_default();
            let _ = writeln!(
                out,
                "bracket {},{},{}{scope} = {}{}",
                self.display(&b.alpha),
                self.display(&b.beta),
                groups.display(&b.gamma),
                groups.display(&b.representative),
                cite(&b.cite)
            );
        }
        for e in &self.extensions {
            let parts: Vec<String> = e.summands.iter().map(|(l, o)| format!("{l}:{o}")).collect();
            let _ = writeln!(
                out,
                "extension {} {} = {}{}",
                self.display(&e.alpha),
                e.degree,
                parts.join(" "),
                cite(&e.cite)
            );
        }
        for t in &self.targets {
            match t.through {
                Some(n) => {
                    let _ = writeln!(out, "target {} through {n}", t.name);
                }
                None => {
                    let _ = writeln!(out, "target {}", t.name);
                }
            }
            for (&n, s) in &t.groups.groups {
                groups_line(&mut out, "tgroup", n, s);
            }
            for k in &t.kills {
                out.push_str("kills ");
                self.write_selection(&mut out, k);
                out.push('\n');
            }
            for (g, v) in &t.maps {
                let _ = writeln!(out, "maps {g} = {}", t.groups.display(v));
            }
            for ((a, b), v) in &t.acts {
                let _ = writeln!(out, "act {a}*{b} = {}", t.groups.display(v));
            }
            for s in &t.survivals {
                let _ = writeln!(out, "{}", self.survival_line(s));
            }
            for c in &t.conjectures {
                let _ = writeln!(out, "conjecture cells {}{}", self.cells_text(&c.cells), cite(&c.cite));
            }
        }
        out
    }

    /// Reads `survives` records (and comments) from an oracle file.
    pub fn parse_oracle(&self, text: &str) -> Result<Vec<Survival>, TableError> {
        let mut out = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("");
            let tokens: Vec<String> = body.split_whitespace().map(str::to_string).collect();
            if tokens.is_empty() {
                continue;
            }
            if tokens[0] != "survives" {
                return Err(parse_err(line, format!("oracle files hold only `survives` records, found `{}`", tokens[0])));
            }
            let r = Record {
                line,
                tokens,
                target: None,
            };
            out.push(self.parse_survival(&r, &r.tokens[1..]).map_err(|e| at_line(line, e))?);
        }
        Ok(out)
    }

    pub fn load_oracle(&self, path: impl AsRef<Path>) -> Result<Vec<Survival>, TableError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| TableError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        self.parse_oracle(&text)
    }
}

fn bilinear(
    left: &GradedGroups,
    right: &GradedGroups,
    out: &GradedGroups,
    a: &Element,
    b: &Element,
    n: u32,
    mut gen: impl FnMut((u32, usize), (u32, usize)) -> Option<Element>,
) -> Result<ProductValue, TableError> {
    let mut acc = out.zero(n);
    if out.summands(n).is_empty() {
        return Ok(ProductValue::Known(acc));
    }
    let mut unknown = false;
    for (i, &ca) in a.coeffs.iter().enumerate() {
        for (j, &cb) in b.coeffs.iter().enumerate() {
            let c = ca * cb;
            if c == 0 {
                continue;
            }
            let oa = left.summands(a.degree)[i].order as i64;
            let ob = right.summands(b.degree)[j].order as i64;
            if (oa > 0 && c % oa == 0) || (ob > 0 && c % ob == 0) {
                continue;
            }
            match gen((a.degree, i), (b.degree, j)) {
                Some(v) => acc = out.add(&acc, &out.scale(c, &v)),
                None => unknown = true,
            }
        }
    }
    Ok(if unknown {
        ProductValue::Unknown
    } else {
        ProductValue::Known(acc)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = "\
prime 2
range 7
group 0 iota:0
group 1 eta:2
group 2 eta2:2
group 3 nu:8
group 6 nu2:2
group 7 sigma:16
prod eta*eta = eta2
prod eta*eta2 = 4*nu
prod nu*nu = nu2
bracket eta,2,eta = 2*nu
target kU
tgroup 0 u:0
tgroup 2 beta:0
kills * all
bracket 2,eta,1 @kU = beta
";

    #[test]
    fn parses_and_multiplies() {
        let t = StemsTable::parse(SMALL).unwrap();
        let eta = t.element("eta").unwrap();
        let eta2 = t.element("eta2").unwrap();
        assert_eq!(t.product(&eta, &eta).unwrap(), ProductValue::Known(eta2.clone()));
        let p = t.product(&eta, &eta2).unwrap().known().unwrap();
        assert_eq!(t.display(&p), "4*nu");
        assert_eq!(t.product(&eta, &t.element("sigma").unwrap()), Err(TableError::OutOfRange { degree: 8, range: 7 }));
        let two = t.element("2").unwrap();
        assert!(t.product(&two, &eta).unwrap().known().unwrap().is_zero());
    }

    #[test]
    fn unknown_is_not_zero() {
        let t = StemsTable::parse(SMALL).unwrap();
        let eta2 = t.element("eta2").unwrap();
        assert_eq!(t.product(&eta2, &eta2).unwrap().known().map(|e| e.degree), Some(4));
        let nu = t.element("nu").unwrap();
        let s = StemsTable::parse(&SMALL.replace("prod nu*nu = nu2\n", "")).unwrap();
        assert_eq!(s.product(&nu, &nu).unwrap(), ProductValue::Unknown);
    }

    #[test]
    fn rejects_overlarge_coefficient() {
        let bad = SMALL.replace("group 3 nu:8", "group 3 nu:4");
        assert!(matches!(StemsTable::parse(&bad), Err(TableError::Parse { line: 10, .. })));
    }

    #[test]
    fn round_trip() {
        let t = StemsTable::parse(SMALL).unwrap();
        assert_eq!(StemsTable::parse(&t.serialize()).unwrap(), t);
    }

    #[test]
    fn brackets() {
        let t = StemsTable::parse(SMALL).unwrap();
        let (a, b, c) = t.parse_triple("eta,2,eta", None).unwrap();
        let r = t.toda_bracket(&a, &b, &c, None).unwrap();
        assert_eq!(t.display(&r.representative), "2*nu");
        assert_eq!(r.indeterminacy.generators(), vec![vec![4]]);
        let (a, b, c) = t.parse_triple("2,eta,1", Some("kU")).unwrap();
        let r = t.toda_bracket(&a, &b, &c, Some("kU")).unwrap();
        assert_eq!(r.indeterminacy.generators(), vec![vec![2]]);
        let (a, b, c) = t.parse_triple("eta,eta,2", None).unwrap();
        assert!(matches!(t.toda_bracket(&a, &b, &c, None), Err(TableError::BracketUndefined { .. })));
    }

    #[test]
    fn parse_errors_carry_lines() {
        let bad = SMALL.replace("group 6 nu2:2", "group 6 nu2:3");
        assert!(matches!(StemsTable::parse(&bad), Err(TableError::Parse { line: 7, .. })));
        let dup = SMALL.replace("group 6 nu2:2", "group 6 eta:2");
        assert!(matches!(StemsTable::parse(&dup), Err(TableError::Parse { line: 7, .. })));
        assert!(StemsTable::parse("prime 2\nrange 3\ngroup 0 1:0\nbogus 1\n").is_err());
    }
}
