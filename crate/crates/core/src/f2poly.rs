//! Graded commutative polynomial algebras over F₂ on named generators.
//!
//! A [`Universe`] fixes the generator set; polynomials over different
//! universes cannot be combined. Monomials are ordered canonically: first by
//! degree, then by the exponent sequence read in lexicographic generator
//! order. That order drives every serialized listing in reports.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::bitmat::BitVec;
use crate::error::AlgebraError;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Generator {
    pub name: String,
    pub degree: u32,
}

impl Generator {
    pub fn new(name: impl Into<String>, degree: u32) -> Self {
        Generator {
            name: name.into(),
            degree,
        }
    }
}

/// A generator set, indexed in lexicographic name order.
#[derive(Debug, PartialEq, Eq)]
pub struct Universe {
    gens: Vec<Generator>,
    by_name: HashMap<String, u32>,
}

impl Universe {
    pub fn new(mut gens: Vec<Generator>) -> Result<Arc<Self>, AlgebraError> {
        gens.sort_by(|a, b| a.name.cmp(&b.name));
        let mut by_name = HashMap::with_capacity(gens.len());
        for (i, g) in gens.iter().enumerate() {
            if by_name.insert(g.name.clone(), i as u32).is_some() {
                return Err(AlgebraError::DuplicateGenerator(g.name.clone()));
            }
        }
        Ok(Arc::new(Universe { gens, by_name }))
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn generators(&self) -> &[Generator] {
        &self.gens
    }

    pub fn generator(&self, id: u32) -> &Generator {
        &self.gens[id as usize]
    }

    pub fn id(&self, name: &str) -> Option<u32> {
        self.by_name.get(name).copied()
    }

    pub fn degree_of(&self, id: u32) -> u32 {
        self.gens[id as usize].degree
    }

    pub fn monomial(&self, exps: &[(u32, u32)]) -> Monomial {
        Monomial::from_pairs(self, exps.iter().copied())
    }

    pub fn gen_monomial(&self, id: u32) -> Monomial {
        Monomial::from_pairs(self, [(id, 1)])
    }

    /// Parses the `gen^exp*gen^exp` text form; `1` is the unit.
    pub fn parse_monomial(&self, text: &str) -> Result<Monomial, AlgebraError> {
        let text = text.trim();
        if text == "1" {
            return Ok(Monomial::one());
        }
        let mut pairs = Vec::new();
        for factor in text.split('*') {
            let (name, exp) = match factor.rsplit_once('^') {
                Some((n, e)) => (
                    n,
                    e.parse::<u32>()
                        .map_err(|_| AlgebraError::BadMonomial(text.to_string()))?,
                ),
                None => (factor, 1),
            };
            if exp == 0 {
                return Err(AlgebraError::BadMonomial(text.to_string()));
            }
            let id = self
                .id(name.trim())
                .ok_or_else(|| AlgebraError::UnknownGenerator(name.trim().to_string()))?;
            pairs.push((id, exp));
        }
        Ok(Monomial::from_pairs(self, pairs))
    }
}

/// A product of generators with positive exponents; the empty product is 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial {
    degree: u32,
    exps: Vec<(u32, u32)>,
}

fn cmp_exponents(a: &[(u32, u32)], b: &[(u32, u32)]) -> Ordering {
    let (mut i, mut j) = (0, 0);
    loop {
        match (a.get(i), b.get(j)) {
            (None, None) => return Ordering::Equal,
            (Some(_), None) => return Ordering::Greater,
            (None, Some(_)) => return Ordering::Less,
            (Some(&(ga, ea)), Some(&(gb, eb))) => match ga.cmp(&gb) {
                Ordering::Equal => {
                    if ea != eb {
                        return ea.cmp(&eb);
                    }
                    i += 1;
                    j += 1;
                }
                Ordering::Less => return Ordering::Greater,
                Ordering::Greater => return Ordering::Less,
            },
        }
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree
            .cmp(&other.degree)
            .then_with(|| cmp_exponents(&self.exps, &other.exps))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Monomial {
    pub fn one() -> Self {
        Monomial {
            degree: 0,
            exps: Vec::new(),
        }
    }

    /// Builds a monomial from (generator id, exponent) pairs; repeated ids add.
    pub fn from_pairs(universe: &Universe, pairs: impl IntoIterator<Item = (u32, u32)>) -> Self {
        let mut exps: Vec<(u32, u32)> = pairs.into_iter().filter(|&(_, e)| e > 0).collect();
        exps.sort_unstable();
        let mut merged: Vec<(u32, u32)> = Vec::with_capacity(exps.len());
        for (g, e) in exps {
            match merged.last_mut() {
                Some((lg, le)) if *lg == g => *le += e,
                _ => merged.push((g, e)),
            }
        }
        let degree = merged
            .iter()
            .map(|&(g, e)| universe.degree_of(g) * e)
            .sum();
        Monomial {
            degree,
            exps: merged,
        }
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_one(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn exponents(&self) -> &[(u32, u32)] {
        &self.exps
    }

    pub fn exponent(&self, id: u32) -> u32 {
        self.exps
            .binary_search_by_key(&id, |&(g, _)| g)
            .map(|k| self.exps[k].1)
            .unwrap_or(0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.exps.len() + other.exps.len());
        let (mut i, mut j) = (0, 0);
        while i < self.exps.len() || j < other.exps.len() {
            match (self.exps.get(i), other.exps.get(j)) {
                (Some(&a), Some(&b)) if a.0 == b.0 => {
                    out.push((a.0, a.1 + b.1));
                    i += 1;
                    j += 1;
                }
                (Some(&a), Some(&b)) if a.0 < b.0 => {
                    out.push(a);
                    i += 1;
                }
                (Some(_), Some(&b)) => {
                    out.push(b);
                    j += 1;
                }
                (Some(&a), None) => {
                    out.push(a);
                    i += 1;
                }
                (None, Some(&b)) => {
                    out.push(b);
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        Monomial {
            degree: self.degree + other.degree,
            exps: out,
        }
    }

    pub fn pow(&self, k: u32) -> Monomial {
        Monomial {
            degree: self.degree * k,
            exps: self.exps.iter().map(|&(g, e)| (g, e * k)).collect(),
        }
    }

    /// `Some(m)` with `m² = self` when every exponent is even.
    pub fn sqrt(&self) -> Option<Monomial> {
        if self.exps.iter().any(|&(_, e)| e % 2 == 1) {
            return None;
        }
        Some(Monomial {
            degree: self.degree / 2,
            exps: self.exps.iter().map(|&(g, e)| (g, e / 2)).collect(),
        })
    }

    /// Splits off one factor of a generator with odd exponent, if any.
    pub fn split_odd_factor(&self, universe: &Universe) -> Option<(u32, Monomial)> {
        let k = self.exps.iter().position(|&(_, e)| e % 2 == 1)?;
        let g = self.exps[k].0;
        let mut rest = self.exps.clone();
        if rest[k].1 == 1 {
            rest.remove(k);
        } else {
            rest[k].1 -= 1;
        }
        Some((
            g,
            Monomial {
                degree: self.degree - universe.degree_of(g),
                exps: rest,
            },
        ))
    }

    /// Splits off one factor of the first generator present.
    pub fn split_first(&self, universe: &Universe) -> Option<(u32, Monomial)> {
        let &(g, e) = self.exps.first()?;
        let mut rest = self.exps.clone();
        if e == 1 {
            rest.remove(0);
        } else {
            rest[0].1 -= 1;
        }
        Some((
            g,
            Monomial {
                degree: self.degree - universe.degree_of(g),
                exps: rest,
            },
        ))
    }

    pub fn display<'a>(&'a self, universe: &'a Universe) -> MonomialDisplay<'a> {
        MonomialDisplay {
            monomial: self,
            universe,
        }
    }
}

pub struct MonomialDisplay<'a> {
    monomial: &'a Monomial,
    universe: &'a Universe,
}

impl fmt::Display for MonomialDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.monomial.is_one() {
            return f.write_str("1");
        }
        for (k, &(g, e)) in self.monomial.exps.iter().enumerate() {
            if k > 0 {
                f.write_str("*")?;
            }
            f.write_str(&self.universe.generator(g).name)?;
            if e > 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

/// A sum of distinct monomials over F₂.
#[derive(Clone)]
pub struct F2Polynomial {
    universe: Arc<Universe>,
    terms: BTreeSet<Monomial>,
}

impl PartialEq for F2Polynomial {
    fn eq(&self, other: &Self) -> bool {
        same_universe(&self.universe, &other.universe) && self.terms == other.terms
    }
}

impl Eq for F2Polynomial {}

fn same_universe(a: &Arc<Universe>, b: &Arc<Universe>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl fmt::Debug for F2Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for F2Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, m) in self.terms.iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{}", m.display(&self.universe))?;
        }
        Ok(())
    }
}

impl F2Polynomial {
    pub fn zero(universe: &Arc<Universe>) -> Self {
        F2Polynomial {
            universe: Arc::clone(universe),
            terms: BTreeSet::new(),
        }
    }

    pub fn one(universe: &Arc<Universe>) -> Self {
        Self::from_monomial(universe, Monomial::one())
    }

    pub fn from_monomial(universe: &Arc<Universe>, m: Monomial) -> Self {
        let mut p = Self::zero(universe);
        p.terms.insert(m);
        p
    }

    pub fn from_monomials(universe: &Arc<Universe>, ms: impl IntoIterator<Item = Monomial>) -> Self {
        let mut p = Self::zero(universe);
        for m in ms {
            p.toggle(m);
        }
        p
    }

    pub fn generator(universe: &Arc<Universe>, name: &str) -> Result<Self, AlgebraError> {
        let id = universe
            .id(name)
            .ok_or_else(|| AlgebraError::UnknownGenerator(name.to_string()))?;
        Ok(Self::from_monomial(universe, universe.gen_monomial(id)))
    }

    /// Parses `m + m + ...` where each `m` is in `gen^exp*gen^exp` form; `0` is zero.
    pub fn parse(universe: &Arc<Universe>, text: &str) -> Result<Self, AlgebraError> {
        let text = text.trim();
        if text == "0" {
            return Ok(Self::zero(universe));
        }
        let mut p = Self::zero(universe);
        for term in text.split('+') {
            p.toggle(universe.parse_monomial(term)?);
        }
        Ok(p)
    }

    pub fn universe(&self) -> &Arc<Universe> {
        &self.universe
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = &Monomial> + ExactSizeIterator {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn contains(&self, m: &Monomial) -> bool {
        self.terms.contains(m)
    }

    /// Adds a monomial with F₂ cancellation.
    pub fn toggle(&mut self, m: Monomial) {
        if !self.terms.remove(&m) {
            self.terms.insert(m);
        }
    }

    pub fn add_assign(&mut self, other: &F2Polynomial) {
        debug_assert!(same_universe(&self.universe, &other.universe));
        for m in &other.terms {
            if !self.terms.remove(m) {
                self.terms.insert(m.clone());
            }
        }
    }

    pub fn add(&self, other: &F2Polynomial) -> Result<F2Polynomial, AlgebraError> {
        if !same_universe(&self.universe, &other.universe) {
            return Err(AlgebraError::UniverseMismatch);
        }
        let mut out = self.clone();
        out.add_assign(other);
        Ok(out)
    }

    pub fn multiply(&self, other: &F2Polynomial) -> Result<F2Polynomial, AlgebraError> {
        if !same_universe(&self.universe, &other.universe) {
            return Err(AlgebraError::UniverseMismatch);
        }
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, other: &F2Polynomial) -> F2Polynomial {
        let mut out = F2Polynomial::zero(&self.universe);
        for a in &self.terms {
            for b in &other.terms {
                out.toggle(a.mul(b));
            }
        }
        out
    }

    pub fn mul_monomial(&self, m: &Monomial) -> F2Polynomial {
        F2Polynomial {
            universe: Arc::clone(&self.universe),
            terms: self.terms.iter().map(|a| a.mul(m)).collect(),
        }
    }

    /// Frobenius: squaring is additive over F₂.
    pub fn square(&self) -> F2Polynomial {
        F2Polynomial {
            universe: Arc::clone(&self.universe),
            terms: self.terms.iter().map(|m| m.pow(2)).collect(),
        }
    }

    /// `self^(2^k)`.
    pub fn frobenius(&self, k: u32) -> F2Polynomial {
        let e = 1u32 << k;
        F2Polynomial {
            universe: Arc::clone(&self.universe),
            terms: self.terms.iter().map(|m| m.pow(e)).collect(),
        }
    }

    pub fn pow(&self, mut k: u32) -> F2Polynomial {
        let mut base = self.clone();
        let mut acc = F2Polynomial::one(&self.universe);
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul_unchecked(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.square();
            }
        }
        acc
    }

    /// The common degree of all terms; `None` for zero or mixed degrees.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let first = self.terms.first()?.degree;
        (self.terms.last()?.degree == first).then_some(first)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.is_zero() || self.homogeneous_degree().is_some()
    }

    pub fn homogeneous_part(&self, n: u32) -> F2Polynomial {
        F2Polynomial {
            universe: Arc::clone(&self.universe),
            terms: self.terms.iter().filter(|m| m.degree == n).cloned().collect(),
        }
    }

    /// Coordinates in a degree slice basis. Terms outside the basis are an error.
    pub fn to_bitvec(&self, basis: &SliceBasis) -> Option<BitVec> {
        let mut v = BitVec::zeros(basis.len());
        for m in &self.terms {
            v.flip(basis.index_of(m)?);
        }
        Some(v)
    }
}

/// A polynomial in `L ⊗ R`, as a set of monomial pairs.
#[derive(Clone)]
pub struct TensorPolynomial {
    left: Arc<Universe>,
    right: Arc<Universe>,
    terms: BTreeSet<(Monomial, Monomial)>,
}

impl PartialEq for TensorPolynomial {
    fn eq(&self, other: &Self) -> bool {
        same_universe(&self.left, &other.left)
            && same_universe(&self.right, &other.right)
            && self.terms == other.terms
    }
}

impl Eq for TensorPolynomial {}

impl TensorPolynomial {
    pub fn zero(left: &Arc<Universe>, right: &Arc<Universe>) -> Self {
        TensorPolynomial {
            left: Arc::clone(left),
            right: Arc::clone(right),
            terms: BTreeSet::new(),
        }
    }

    pub fn left_universe(&self) -> &Arc<Universe> {
        &self.left
    }

    pub fn right_universe(&self) -> &Arc<Universe> {
        &self.right
    }

    pub fn toggle(&mut self, l: Monomial, r: Monomial) {
        let key = (l, r);
        if !self.terms.remove(&key) {
            self.terms.insert(key);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = &(Monomial, Monomial)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_assign(&mut self, other: &TensorPolynomial) {
        for (l, r) in &other.terms {
            self.toggle(l.clone(), r.clone());
        }
    }

    /// `l ⊗ r` for polynomials `l`, `r`.
    pub fn simple(l: &F2Polynomial, r: &F2Polynomial) -> Self {
        let mut out = Self::zero(l.universe(), r.universe());
        for a in l.terms() {
            for b in r.terms() {
                out.toggle(a.clone(), b.clone());
            }
        }
        out
    }

    pub fn multiply(&self, other: &TensorPolynomial) -> Result<TensorPolynomial, AlgebraError> {
        if !same_universe(&self.left, &other.left) || !same_universe(&self.right, &other.right) {
            return Err(AlgebraError::UniverseMismatch);
        }
        let mut out = Self::zero(&self.left, &self.right);
        for (a, b) in &self.terms {
            for (c, d) in &other.terms {
                out.toggle(a.mul(c), b.mul(d));
            }
        }
        Ok(out)
    }

    /// Groups terms by right factor: `Σ_r (Σ l) ⊗ r`.
    pub fn by_right(&self) -> Vec<(Monomial, F2Polynomial)> {
        let mut grouped: Vec<(Monomial, F2Polynomial)> = Vec::new();
        let mut pairs: Vec<&(Monomial, Monomial)> = self.terms.iter().collect();
        pairs.sort_by(|x, y| x.1.cmp(&y.1).then_with(|| x.0.cmp(&y.0)));
        for (l, r) in pairs {
            match grouped.last_mut() {
                Some((rr, p)) if rr == r => p.toggle(l.clone()),
                _ => grouped.push((r.clone(), F2Polynomial::from_monomial(&self.left, l.clone()))),
            }
        }
        grouped
    }
}

impl fmt::Display for TensorPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (l, r)) in self.terms.iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{} ⊗ {}", l.display(&self.left), r.display(&self.right))?;
        }
        Ok(())
    }
}

impl fmt::Debug for TensorPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// All monomials of total degree exactly `n`, in canonical order.
pub fn slice_basis(universe: &Universe, n: u32) -> Result<Vec<Monomial>, AlgebraError> {
    if let Some(g) = universe.generators().iter().find(|g| g.degree == 0) {
        return Err(AlgebraError::DegreeZeroGenerator(g.name.clone()));
    }
    let gens: Vec<(u32, u32)> = universe
        .generators()
        .iter()
        .enumerate()
        .filter(|(_, g)| g.degree <= n)
        .map(|(i, g)| (i as u32, g.degree))
        .collect();
    let mut out = Vec::new();
    let mut current = Vec::new();
    enumerate(&gens, n, &mut current, &mut |pairs| {
        out.push(Monomial::from_pairs(universe, pairs.iter().copied()));
    });
    out.sort();
    Ok(out)
}

fn enumerate(
    gens: &[(u32, u32)],
    remaining: u32,
    current: &mut Vec<(u32, u32)>,
    emit: &mut dyn FnMut(&[(u32, u32)]),
) {
    if remaining == 0 {
        emit(current);
        return;
    }
    let Some((&(id, deg), rest)) = gens.split_first() else {
        return;
    };
    enumerate(rest, remaining, current, emit);
    let mut e = 1;
    while e * deg <= remaining {
        current.push((id, e));
        enumerate(rest, remaining - e * deg, current, emit);
        current.pop();
        e += 1;
    }
}

/// Number of monomials of degree `n` in generators of the given degrees.
///
/// Coin-change count; all degrees must be positive.
pub fn slice_count(degrees: &[u32], n: u32) -> u64 {
    let n = n as usize;
    let mut ways = vec![0u64; n + 1];
    ways[0] = 1;
    for &d in degrees {
        let d = d as usize;
        assert!(d > 0, "degree-0 generator");
        for k in d..=n {
            ways[k] += ways[k - d];
        }
    }
    ways[n]
}

/// A degree slice basis with reverse lookup.
#[derive(Clone, Debug)]
pub struct SliceBasis {
    degree: u32,
    monomials: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
}

impl SliceBasis {
    pub fn new(universe: &Universe, n: u32) -> Result<Self, AlgebraError> {
        Ok(Self::from_monomials(n, slice_basis(universe, n)?))
    }

    pub fn from_monomials(degree: u32, monomials: Vec<Monomial>) -> Self {
        let index = monomials
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i))
            .collect();
        SliceBasis {
            degree,
            monomials,
            index,
        }
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    pub fn index_of(&self, m: &Monomial) -> Option<usize> {
        self.index.get(m).copied()
    }

    pub fn to_polynomial(&self, universe: &Arc<Universe>, v: &BitVec) -> F2Polynomial {
        F2Polynomial::from_monomials(universe, v.ones().map(|i| self.monomials[i].clone()))
    }
}
