//! Mod-2 Dyer–Lashof operations in upper-index notation.
//!
//! Instability: `Q^i x = 0` for `i < |x|` and `Q^{|x|} x = x²`.
//! Sequences list the outermost operation first, so `(i₁, …, i_ℓ)` is
//! `Q^{i₁} ∘ … ∘ Q^{i_ℓ}`.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, RwLock};

use crate::error::AlgebraError;
use crate::f2poly::{F2Polynomial, Generator, Monomial, Universe};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct DLSequence(Vec<u32>);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Excess {
    Finite(i64),
    Infinite,
}

impl fmt::Display for Excess {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Excess::Finite(e) => write!(f, "{e}"),
            Excess::Infinite => f.write_str("inf"),
        }
    }
}

impl DLSequence {
    /// Panics on a zero entry; `Q^0` is never stored.
    pub fn new(entries: Vec<u32>) -> Self {
        assert!(entries.iter().all(|&i| i > 0), "zero entry in {entries:?}");
        DLSequence(entries)
    }

    pub fn empty() -> Self {
        DLSequence(Vec::new())
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn weight(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn excess(&self) -> Excess {
        match self.0.split_first() {
            None => Excess::Infinite,
            Some((&first, rest)) => {
                Excess::Finite(first as i64 - rest.iter().map(|&i| i as i64).sum::<i64>())
            }
        }
    }

    pub fn is_admissible(&self) -> bool {
        self.0.windows(2).all(|w| w[0] <= 2 * w[1])
    }

    /// Sequence with the outermost operation removed.
    pub fn tail(&self) -> DLSequence {
        DLSequence(self.0.get(1..).unwrap_or_default().to_vec())
    }

    pub fn prepend(&self, i: u32) -> DLSequence {
        let mut v = Vec::with_capacity(self.0.len() + 1);
        v.push(i);
        v.extend_from_slice(&self.0);
        DLSequence::new(v)
    }

    /// Entries divided by `2^d`, if all are divisible.
    pub fn divide(&self, d: u32) -> Option<DLSequence> {
        let m = 1u32 << d;
        self.0
            .iter()
            .all(|&i| i % m == 0)
            .then(|| DLSequence(self.0.iter().map(|&i| i / m).collect()))
    }

    /// `Σ j·i_j`, which strictly increases under each Adem rewrite.
    pub fn moment(&self) -> u64 {
        self.0
            .iter()
            .enumerate()
            .map(|(j, &i)| (j as u64 + 1) * i as u64)
            .sum()
    }

    /// Parses `4,2` or `(4,2)`; the empty string or `()` is the empty sequence.
    pub fn parse(text: &str) -> Option<DLSequence> {
        let t = text.trim().trim_start_matches('(').trim_end_matches(')').trim();
        if t.is_empty() {
            return Some(DLSequence::empty());
        }
        let entries: Option<Vec<u32>> = t.split(',').map(|s| s.trim().parse().ok()).collect();
        let entries = entries?;
        entries.iter().all(|&i| i > 0).then_some(DLSequence(entries))
    }
}

impl fmt::Display for DLSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (k, i) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{i}")?;
        }
        f.write_str(")")
    }
}

pub fn excess_and_degree(seq: &DLSequence, n: u32) -> (Excess, u32) {
    (seq.excess(), n + seq.weight())
}

/// `binom(n, k) mod 2` by Lucas.
pub fn binom2(n: u64, k: u64) -> bool {
    k <= n && (k & !n) == 0
}

/// `binom(n, k) mod 2` with `n` allowed negative: `binom(-m, k) = ±binom(m+k-1, k)`.
pub fn binom2_signed(n: i64, k: i64) -> bool {
    if k < 0 {
        return false;
    }
    if n >= 0 {
        binom2(n as u64, k as u64)
    } else {
        binom2((-n + k - 1) as u64, k as u64)
    }
}

/// Admissible terms of `Q^r Q^s` for `r > 2s`.
pub fn adem_terms(r: u32, s: u32) -> Vec<(u32, u32)> {
    debug_assert!(r > 2 * s);
    let lo = r.div_ceil(2);
    (lo..r - s)
        .filter(|&i| binom2((i - s - 1) as u64, (2 * i - r) as u64))
        .map(|i| (r + s - i, i))
        .collect()
}

fn toggle<T: Ord>(set: &mut BTreeSet<T>, x: T) {
    if !set.remove(&x) {
        set.insert(x);
    }
}

/// Rewrites a single sequence into a sum of admissible ones.
pub fn adem_reduce_sequence(seq: &DLSequence) -> BTreeSet<DLSequence> {
    let mut done = BTreeSet::new();
    let mut pending: BTreeSet<DLSequence> = BTreeSet::new();
    pending.insert(seq.clone());
    while let Some(s) = pending.pop_first() {
        let e = &s.0;
        let Some(j) = (0..e.len().saturating_sub(1)).find(|&j| e[j] > 2 * e[j + 1]) else {
            toggle(&mut done, s);
            continue;
        };
        for (a, b) in adem_terms(e[j], e[j + 1]) {
            let mut t = e.clone();
            t[j] = a;
            t[j + 1] = b;
            let t = DLSequence(t);
            debug_assert!(t.moment() > s.moment());
            toggle(&mut pending, t);
        }
    }
    done
}

/// F₂-sum of formal terms `Q^I m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DLExpression {
    universe: Arc<Universe>,
    terms: BTreeSet<(DLSequence, Monomial)>,
}

impl DLExpression {
    pub fn zero(universe: &Arc<Universe>) -> Self {
        DLExpression {
            universe: Arc::clone(universe),
            terms: BTreeSet::new(),
        }
    }

    pub fn term(universe: &Arc<Universe>, seq: DLSequence, m: Monomial) -> Self {
        let mut e = Self::zero(universe);
        e.toggle(seq, m);
        e
    }

    pub fn toggle(&mut self, seq: DLSequence, m: Monomial) {
        toggle(&mut self.terms, (seq, m));
    }

    pub fn terms(&self) -> impl Iterator<Item = &(DLSequence, Monomial)> {
        self.terms.iter()
    }

    pub fn universe(&self) -> &Arc<Universe> {
        &self.universe
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }
}

/// Normalizes every sequence into the admissible basis.
pub fn adem_reduce(expr: &DLExpression) -> DLExpression {
    let mut out = DLExpression::zero(&expr.universe);
    for (seq, m) in &expr.terms {
        for t in adem_reduce_sequence(seq) {
            out.toggle(t, m.clone());
        }
    }
    out
}

/// Conventions for the coefficient of `Q^{s-r+i} Sq^i_*` in `Sq^r_* Q^s`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NishidaConvention {
    /// `binom(s-r, r-2i)` with negative tops expanded as generalized binomials.
    Generalized,
    /// `binom(s-2i, r-2i)`.
    Shifted,
    /// `binom(s-r, r-2i)`, zero when `s < r`.
    Truncated,
}

impl NishidaConvention {
    pub fn coefficient(self, r: u32, s: u32, i: u32) -> bool {
        let (r, s, i) = (r as i64, s as i64, i as i64);
        match self {
            NishidaConvention::Generalized => binom2_signed(s - r, r - 2 * i),
            NishidaConvention::Shifted => s - 2 * i >= 0 && binom2_signed(s - 2 * i, r - 2 * i),
            NishidaConvention::Truncated => s >= r && binom2_signed(s - r, r - 2 * i),
        }
    }
}

pub fn generator_name(seq: &DLSequence, n: u32) -> String {
    if seq.is_empty() {
        format!("x{n}")
    } else {
        let inner: Vec<String> = seq.entries().iter().map(|i| i.to_string()).collect();
        format!("Q({})x{n}", inner.join(","))
    }
}

/// Admissible `I` with `exc(I) > n` and `n + |I| ≤ cap`, by degree then sequence.
pub fn admissible_generators(n: u32, cap: u32) -> Vec<DLSequence> {
    fn grow(seq: DLSequence, degree: u32, cap: u32, out: &mut Vec<(u32, DLSequence)>) {
        let hi = match seq.entries().first() {
            Some(&i1) => (2 * i1).min(cap - degree),
            None => cap - degree,
        };
        for i in (degree + 1)..=hi {
            grow(seq.prepend(i), degree + i, cap, out);
        }
        out.push((degree, seq));
    }
    if cap < n {
        return Vec::new();
    }
    let mut out = Vec::new();
    grow(DLSequence::empty(), n, cap, &mut out);
    out.sort();
    out.into_iter().map(|(_, s)| s).collect()
}

/// The homology of a free E∞ cone: polynomial on `Q^I x_n` (`I` admissible,
/// `exc(I) > n`) through a degree cap, with Dyer–Lashof and dual Steenrod
/// actions.
pub struct FreeDLAlgebra {
    bottom: u32,
    cap: u32,
    universe: Arc<Universe>,
    seq_of: Vec<DLSequence>,
    id_of: HashMap<DLSequence, u32>,
    bottom_detected: bool,
    nishida: NishidaConvention,
    q_cache: RwLock<HashMap<(i64, Monomial), F2Polynomial>>,
    sq_cache: RwLock<HashMap<(u32, Monomial), F2Polynomial>>,
}

impl fmt::Debug for FreeDLAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FreeDLAlgebra")
            .field("bottom", &self.bottom)
            .field("cap", &self.cap)
            .field("generators", &self.seq_of.len())
            .finish()
    }
}

impl FreeDLAlgebra {
    /// `Sq^n_* x_n = 1` is assumed exactly when `n` is a power of two.
    pub fn new(bottom: u32, cap: u32) -> Self {
        Self::with_convention(bottom, cap, bottom.is_power_of_two(), NishidaConvention::Generalized)
    }

    pub fn with_convention(
        bottom: u32,
        cap: u32,
        bottom_detected: bool,
        nishida: NishidaConvention,
    ) -> Self {
        assert!(bottom >= 1, "bottom class must have positive degree");
        let seqs = admissible_generators(bottom, cap);
        let gens = seqs
            .iter()
            .map(|s| Generator::new(generator_name(s, bottom), bottom + s.weight()))
            .collect();
        let universe = Universe::new(gens).expect("generator names are distinct");
        let mut seq_of = vec![DLSequence::empty(); seqs.len()];
        let mut id_of = HashMap::with_capacity(seqs.len());
        for s in seqs {
            let id = universe.id(&generator_name(&s, bottom)).unwrap();
            seq_of[id as usize] = s.clone();
            id_of.insert(s, id);
        }
        FreeDLAlgebra {
            bottom,
            cap,
            universe,
            seq_of,
            id_of,
            bottom_detected,
            nishida,
            q_cache: RwLock::new(HashMap::new()),
            sq_cache: RwLock::new(HashMap::new()),
        }
    }

    pub fn bottom(&self) -> u32 {
        self.bottom
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    pub fn nishida(&self) -> NishidaConvention {
        self.nishida
    }

    pub fn universe(&self) -> &Arc<Universe> {
        &self.universe
    }

    pub fn sequence_of(&self, id: u32) -> &DLSequence {
        &self.seq_of[id as usize]
    }

    pub fn generator_id(&self, seq: &DLSequence) -> Option<u32> {
        self.id_of.get(seq).copied()
    }

    /// The basis element `Q^I x_n` for a generator sequence `I`.
    pub fn generator(&self, seq: &DLSequence) -> Result<F2Polynomial, AlgebraError> {
        match self.generator_id(seq) {
            Some(id) => Ok(F2Polynomial::from_monomial(
                &self.universe,
                self.universe.gen_monomial(id),
            )),
            None => {
                let degree = self.bottom + seq.weight();
                if degree > self.cap {
                    Err(AlgebraError::BeyondCap {
                        degree,
                        cap: self.cap,
                    })
                } else {
                    Err(AlgebraError::UnknownGenerator(generator_name(seq, self.bottom)))
                }
            }
        }
    }

    pub fn bottom_class(&self) -> F2Polynomial {
        self.generator(&DLSequence::empty()).unwrap()
    }

    fn check_value(&self, value: &F2Polynomial) -> Result<u32, AlgebraError> {
        if !Arc::ptr_eq(value.universe(), &self.universe) && **value.universe() != *self.universe {
            return Err(AlgebraError::UniverseMismatch);
        }
        if value.is_zero() {
            return Ok(0);
        }
        value.homogeneous_degree().ok_or(AlgebraError::Inhomogeneous)
    }

    /// `Q^I value`, innermost operation first.
    pub fn apply_operation(
        &self,
        seq: &DLSequence,
        value: &F2Polynomial,
    ) -> Result<F2Polynomial, AlgebraError> {
        self.check_value(value)?;
        let mut v = value.clone();
        for &i in seq.entries().iter().rev() {
            v = self.apply_q(i as i64, &v)?;
        }
        Ok(v)
    }

    /// `Q^i` on a homogeneous value; negative `i` gives zero.
    pub fn apply_q(&self, i: i64, value: &F2Polynomial) -> Result<F2Polynomial, AlgebraError> {
        let mut out = F2Polynomial::zero(&self.universe);
        for m in value.terms() {
            out.add_assign(&self.q_monomial(i, m)?);
        }
        Ok(out)
    }

    fn q_monomial(&self, i: i64, m: &Monomial) -> Result<F2Polynomial, AlgebraError> {
        let d = m.degree() as i64;
        if i < d {
            return Ok(F2Polynomial::zero(&self.universe));
        }
        if i == d {
            return Ok(F2Polynomial::from_monomial(&self.universe, m.pow(2)));
        }
        let degree = (d + i) as u32;
        if degree > self.cap {
            return Err(AlgebraError::BeyondCap {
                degree,
                cap: self.cap,
            });
        }
        let key = (i, m.clone());
        if let Some(hit) = self.q_cache.read().unwrap().get(&key) {
            return Ok(hit.clone());
        }
        let result = if let Some(w) = m.sqrt() {
            if i % 2 == 0 {
                self.q_monomial(i / 2, &w)?.square()
            } else {
                F2Polynomial::zero(&self.universe)
            }
        } else {
            let (g, rest) = m.split_odd_factor(&self.universe).unwrap();
            if rest.is_one() {
                self.q_generator(i as u32, g)?
            } else {
                let gd = self.universe.degree_of(g) as i64;
                let rd = rest.degree() as i64;
                let gm = self.universe.gen_monomial(g);
                let mut acc = F2Polynomial::zero(&self.universe);
                for j in gd..=(i - rd) {
                    let a = self.q_monomial(j, &gm)?;
                    if a.is_zero() {
                        continue;
                    }
                    let b = self.q_monomial(i - j, &rest)?;
                    acc.add_assign(&a.mul_unchecked(&b));
                }
                acc
            }
        };
        self.q_cache.write().unwrap().insert(key, result.clone());
        Ok(result)
    }

    /// `Q^i` on a generator with `i > |g|`.
    fn q_generator(&self, i: u32, g: u32) -> Result<F2Polynomial, AlgebraError> {
        let seq = self.seq_of[g as usize].prepend(i);
        if seq.is_admissible() {
            return self.generator(&seq);
        }
        let mut acc = F2Polynomial::zero(&self.universe);
        for t in adem_reduce_sequence(&seq) {
            acc.add_assign(&self.apply_operation(&t, &self.bottom_class())?);
        }
        Ok(acc)
    }

    /// Evaluates `Q^J x_n` for an admissible `J` by instability alone.
    pub fn evaluate_admissible(&self, seq: &DLSequence) -> Result<F2Polynomial, AlgebraError> {
        debug_assert!(seq.is_admissible());
        let Some((&j1, _)) = seq.entries().split_first() else {
            return Ok(self.bottom_class());
        };
        let tail = seq.tail();
        let d = self.bottom + tail.weight();
        if j1 < d {
            return Ok(F2Polynomial::zero(&self.universe));
        }
        let inner = self.evaluate_admissible(&tail)?;
        if j1 == d {
            return Ok(inner.square());
        }
        self.generator(seq)
    }

    /// The dual Steenrod operation `Sq^a_*` via Nishida and Cartan.
    pub fn dual_steenrod_action(
        &self,
        a: u32,
        value: &F2Polynomial,
    ) -> Result<F2Polynomial, AlgebraError> {
        self.check_value(value)?;
        let mut out = F2Polynomial::zero(&self.universe);
        for m in value.terms() {
            out.add_assign(&self.sq_monomial(a, m)?);
        }
        Ok(out)
    }

    fn sq_monomial(&self, a: u32, m: &Monomial) -> Result<F2Polynomial, AlgebraError> {
        if a == 0 {
            return Ok(F2Polynomial::from_monomial(&self.universe, m.clone()));
        }
        if a > m.degree() {
            return Ok(F2Polynomial::zero(&self.universe));
        }
        let key = (a, m.clone());
        if let Some(hit) = self.sq_cache.read().unwrap().get(&key) {
            return Ok(hit.clone());
        }
        let result = if let Some(w) = m.sqrt() {
            if a % 2 == 0 {
                self.sq_monomial(a / 2, &w)?.square()
            } else {
                F2Polynomial::zero(&self.universe)
            }
        } else {
            let (g, rest) = m.split_odd_factor(&self.universe).unwrap();
            if rest.is_one() {
                self.sq_generator(a, g)?
            } else {
                let gm = self.universe.gen_monomial(g);
                let mut acc = F2Polynomial::zero(&self.universe);
                for b in 0..=a.min(gm.degree()) {
                    let x = self.sq_monomial(b, &gm)?;
                    if x.is_zero() {
                        continue;
                    }
                    let y = self.sq_monomial(a - b, &rest)?;
                    acc.add_assign(&x.mul_unchecked(&y));
                }
                acc
            }
        };
        self.sq_cache.write().unwrap().insert(key, result.clone());
        Ok(result)
    }

    fn sq_generator(&self, a: u32, g: u32) -> Result<F2Polynomial, AlgebraError> {
        let seq = &self.seq_of[g as usize];
        let Some((&s, _)) = seq.entries().split_first() else {
            return Ok(if a == self.bottom && self.bottom_detected {
                F2Polynomial::one(&self.universe)
            } else {
                F2Polynomial::zero(&self.universe)
            });
        };
        let tail = self.generator(&seq.tail())?;
        let mut acc = F2Polynomial::zero(&self.universe);
        for i in 0..=a / 2 {
            if !self.nishida.coefficient(a, s, i) {
                continue;
            }
            let inner = self.dual_steenrod_action(i, &tail)?;
            let k = s as i64 - a as i64 + i as i64;
            acc.add_assign(&self.apply_q(k, &inner)?);
        }
        Ok(acc)
    }

    /// `Sq^{a₁}_*` first, then `Sq^{a₂}_*`, and so on.
    pub fn dual_steenrod_composite(
        &self,
        ops: &[u32],
        value: &F2Polynomial,
    ) -> Result<F2Polynomial, AlgebraError> {
        let mut v = value.clone();
        for &a in ops {
            v = self.dual_steenrod_action(a, &v)?;
        }
        Ok(v)
    }

    /// Basis of the degree-`k` slice.
    pub fn slice(&self, k: u32) -> Result<Vec<Monomial>, AlgebraError> {
        if k > self.cap {
            return Err(AlgebraError::BeyondCap {
                degree: k,
                cap: self.cap,
            });
        }
        crate::f2poly::slice_basis(&self.universe, k)
    }
}
