//! The dual Steenrod algebra `A₊ = F₂[ζ₁, ζ₂, …]`, `|ζ_s| = 2^s − 1`, and
//! the identification of `H₊(S//2)` with it.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use crate::bitmat::{BitMatrix, BitVec, Solution};
use crate::dyer_lashof::{DLSequence, FreeDLAlgebra, NishidaConvention};
use crate::error::AlgebraError;
use crate::f2poly::{slice_count, F2Polynomial, Generator, Monomial, SliceBasis, TensorPolynomial, Universe};

/// Which factor of `ψ(ζ_n)` carries the Frobenius twist.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CoproductConvention {
    /// `ψ(ζ_n) = Σ ζ_{n-i}^{2^i} ⊗ ζ_i`.
    Conjugate,
    /// `ψ(ζ_n) = Σ ζ_i ⊗ ζ_{n-i}^{2^i}`.
    Swapped,
}

/// The functional `⟨Sq^a, −⟩` on monomials.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pairing {
    /// Every monomial of degree `a` pairs to 1.
    Degree,
    /// Only `ζ₁^a` pairs to 1.
    ZetaOnePower,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SteenrodConvention {
    pub coproduct: CoproductConvention,
    pub pairing: Pairing,
    pub nishida: NishidaConvention,
}

impl SteenrodConvention {
    /// Unconjugated Milnor generators: swapped coproduct, `Sq^a` dual to `ξ₁^a`.
    pub fn milnor_xi() -> Self {
        SteenrodConvention {
            coproduct: CoproductConvention::Swapped,
            pairing: Pairing::ZetaOnePower,
            nishida: NishidaConvention::Generalized,
        }
    }
}

impl Default for SteenrodConvention {
    fn default() -> Self {
        SteenrodConvention {
            coproduct: CoproductConvention::Conjugate,
            pairing: Pairing::Degree,
            nishida: NishidaConvention::Generalized,
        }
    }
}

pub fn zeta_name(s: u32) -> String {
    format!("z{s}")
}

/// `ζ_s` degrees up to the cap.
fn zeta_count(cap: u32) -> u32 {
    let mut s = 0;
    while (1u64 << (s + 1)) - 1 <= cap as u64 {
        s += 1;
    }
    s
}

/// Dimension of the degree-`n` slice of `F₂[ζ_s^{2^d}]`.
pub fn subalgebra_slice_dim(d: u32, n: u32) -> u64 {
    let mut degrees = Vec::new();
    let mut s = 1;
    loop {
        let deg = ((1u64 << s) - 1) << d;
        if deg > n as u64 {
            break;
        }
        degrees.push(deg as u32);
        s += 1;
    }
    slice_count(&degrees, n)
}

pub struct DualSteenrod {
    cap: u32,
    universe: Arc<Universe>,
    zetas: Vec<u32>,
    convention: SteenrodConvention,
    bases: RwLock<HashMap<u32, Arc<SliceBasis>>>,
    sq_cache: RwLock<HashMap<Monomial, Arc<Vec<F2Polynomial>>>>,
    action_matrices: RwLock<HashMap<u32, Arc<BitMatrix>>>,
}

impl std::fmt::Debug for DualSteenrod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DualSteenrod")
            .field("cap", &self.cap)
            .field("convention", &self.convention)
            .finish()
    }
}

impl DualSteenrod {
    pub fn new(cap: u32) -> Self {
        Self::with_convention(cap, SteenrodConvention::default())
    }

    pub fn with_convention(cap: u32, convention: SteenrodConvention) -> Self {
        let count = zeta_count(cap);
        let gens = (1..=count)
            .map(|s| Generator::new(zeta_name(s), (1 << s) - 1))
            .collect();
        let universe = Universe::new(gens).unwrap();
        let zetas = (1..=count)
            .map(|s| universe.id(&zeta_name(s)).unwrap())
            .collect();
        DualSteenrod {
            cap,
            universe,
            zetas,
            convention,
            bases: RwLock::new(HashMap::new()),
            sq_cache: RwLock::new(HashMap::new()),
            action_matrices: RwLock::new(HashMap::new()),
        }
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    pub fn convention(&self) -> SteenrodConvention {
        self.convention
    }

    pub fn universe(&self) -> &Arc<Universe> {
        &self.universe
    }

    /// Number of `ζ_s` below the cap.
    pub fn rank(&self) -> u32 {
        self.zetas.len() as u32
    }

    pub fn zeta_id(&self, s: u32) -> Option<u32> {
        self.zetas.get(s.checked_sub(1)? as usize).copied()
    }

    pub fn zeta(&self, s: u32) -> Result<F2Polynomial, AlgebraError> {
        let id = self.zeta_id(s).ok_or(AlgebraError::BeyondCap {
            degree: (1u32 << s.min(31)) - 1,
            cap: self.cap,
        })?;
        Ok(F2Polynomial::from_monomial(&self.universe, self.universe.gen_monomial(id)))
    }

    /// Index `s` of a generator id.
    fn zeta_index(&self, id: u32) -> u32 {
        self.zetas.iter().position(|&z| z == id).unwrap() as u32 + 1
    }

    pub fn slice(&self, k: u32) -> Result<Arc<SliceBasis>, AlgebraError> {
        if k > self.cap {
            return Err(AlgebraError::BeyondCap {
                degree: k,
                cap: self.cap,
            });
        }
        if let Some(b) = self.bases.read().unwrap().get(&k) {
            return Ok(Arc::clone(b));
        }
        let b = Arc::new(SliceBasis::new(&self.universe, k)?);
        self.bases.write().unwrap().insert(k, Arc::clone(&b));
        Ok(b)
    }

    fn zeta_monomial_pow(&self, s: u32, e: u32) -> Monomial {
        if s == 0 || e == 0 {
            Monomial::one()
        } else {
            self.universe.gen_monomial(self.zetas[s as usize - 1]).pow(e)
        }
    }

    fn coproduct_generator(&self, s: u32) -> TensorPolynomial {
        let mut t = TensorPolynomial::zero(&self.universe, &self.universe);
        for i in 0..=s {
            let twisted = self.zeta_monomial_pow(s - i, 1 << i);
            let plain = self.zeta_monomial_pow(i, 1);
            match self.convention.coproduct {
                CoproductConvention::Conjugate => t.toggle(twisted, plain),
                CoproductConvention::Swapped => t.toggle(plain, twisted),
            }
        }
        t
    }

    fn tensor_frobenius(t: &TensorPolynomial, k: u32) -> TensorPolynomial {
        let mut out = TensorPolynomial::zero(t.left_universe(), t.right_universe());
        let e = 1 << k;
        for (l, r) in t.terms() {
            out.toggle(l.pow(e), r.pow(e));
        }
        out
    }

    pub fn coproduct_monomial(&self, m: &Monomial) -> TensorPolynomial {
        let mut acc = TensorPolynomial::zero(&self.universe, &self.universe);
        acc.toggle(Monomial::one(), Monomial::one());
        for &(id, e) in m.exponents() {
            let base = self.coproduct_generator(self.zeta_index(id));
            let mut bit = 0;
            while (e >> bit) > 0 {
                if (e >> bit) & 1 == 1 {
                    acc = acc.multiply(&Self::tensor_frobenius(&base, bit)).unwrap();
                }
                bit += 1;
            }
        }
        acc
    }

    pub fn coproduct(&self, p: &F2Polynomial) -> TensorPolynomial {
        let mut out = TensorPolynomial::zero(&self.universe, &self.universe);
        for m in p.terms() {
            out.add_assign(&self.coproduct_monomial(m));
        }
        out
    }

    /// The coaction of `A₊` on itself dual to [`Self::dual_steenrod_action`]:
    /// the coproduct with its factors exchanged.
    pub fn left_coaction(&self, p: &F2Polynomial) -> TensorPolynomial {
        let mut out = TensorPolynomial::zero(&self.universe, &self.universe);
        for (l, r) in self.coproduct(p).terms() {
            out.toggle(r.clone(), l.clone());
        }
        out
    }

    /// The augmentation: the coefficient of 1.
    pub fn counit(&self, p: &F2Polynomial) -> bool {
        p.contains(&Monomial::one())
    }

    pub fn pairs(&self, a: u32, m: &Monomial) -> bool {
        match self.convention.pairing {
            Pairing::Degree => m.degree() == a,
            Pairing::ZetaOnePower => {
                m.degree() == a
                    && (a == 0
                        || (m.exponents().len() == 1 && m.exponents()[0].0 == self.zetas[0]))
            }
        }
    }

    /// `Sq^a_* m` for every `a ≤ |m|`, pairing `Sq^a` against the right-hand
    /// factor of `ψ(m)`.
    pub fn sq_all(&self, m: &Monomial) -> Arc<Vec<F2Polynomial>> {
        if let Some(hit) = self.sq_cache.read().unwrap().get(m) {
            return Arc::clone(hit);
        }
        let mut out = vec![F2Polynomial::zero(&self.universe); m.degree() as usize + 1];
        for (l, r) in self.coproduct_monomial(m).terms() {
            if self.pairs(r.degree(), r) {
                out[r.degree() as usize].toggle(l.clone());
            }
        }
        let out = Arc::new(out);
        self.sq_cache
            .write()
            .unwrap()
            .insert(m.clone(), Arc::clone(&out));
        out
    }

    pub fn dual_steenrod_action(&self, a: u32, p: &F2Polynomial) -> F2Polynomial {
        let mut out = F2Polynomial::zero(&self.universe);
        for m in p.terms() {
            if let Some(v) = self.sq_all(m).get(a as usize) {
                out.add_assign(v);
            }
        }
        out
    }

    pub fn dual_steenrod_composite(&self, ops: &[u32], p: &F2Polynomial) -> F2Polynomial {
        let mut v = p.clone();
        for &a in ops {
            v = self.dual_steenrod_action(a, &v);
        }
        v
    }

    /// Coordinates of `(Sq^1_* v, …, Sq^k_* v)` for `v` of degree `k`.
    pub fn action_coordinates(&self, k: u32, p: &F2Polynomial) -> Result<BitVec, AlgebraError> {
        let mut out = BitVec::zeros(0);
        for a in 1..=k {
            let basis = self.slice(k - a)?;
            let v = self.dual_steenrod_action(a, p);
            out = out.concat(&v.to_bitvec(&basis).ok_or(AlgebraError::Inhomogeneous)?);
        }
        Ok(out)
    }

    /// Matrix whose column `j` is the action vector of the `j`-th degree-`k` monomial.
    pub fn action_matrix(&self, k: u32) -> Result<Arc<BitMatrix>, AlgebraError> {
        if let Some(m) = self.action_matrices.read().unwrap().get(&k) {
            return Ok(Arc::clone(m));
        }
        let basis = self.slice(k)?;
        let cols = basis
            .monomials()
            .iter()
            .map(|m| {
                self.action_coordinates(k, &F2Polynomial::from_monomial(&self.universe, m.clone()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let width = (0..k).map(|j| self.slice(j).map(|b| b.len())).sum::<Result<usize, _>>()?;
        let matrix = Arc::new(BitMatrix::from_rows(width, cols).transpose());
        self.action_matrices
            .write()
            .unwrap()
            .insert(k, Arc::clone(&matrix));
        Ok(matrix)
    }
}

/// The comodule-algebra map `φ: H₊(S//2) → A₊` with `x₁ ↦ ζ₁`, built
/// generator by generator from the dual Steenrod action.
pub struct Identification {
    source: FreeDLAlgebra,
    target: Arc<DualSteenrod>,
    on_generators: RwLock<HashMap<u32, F2Polynomial>>,
    on_monomials: RwLock<HashMap<Monomial, F2Polynomial>>,
}

impl std::fmt::Debug for Identification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Identification")
            .field("cap", &self.source.cap())
            .finish()
    }
}

impl Identification {
    pub fn new(cap: u32) -> Self {
        Self::with_convention(cap, SteenrodConvention::default())
    }

    pub fn with_convention(cap: u32, convention: SteenrodConvention) -> Self {
        Identification {
            source: FreeDLAlgebra::with_convention(1, cap, true, convention.nishida),
            target: Arc::new(DualSteenrod::with_convention(cap, convention)),
            on_generators: RwLock::new(HashMap::new()),
            on_monomials: RwLock::new(HashMap::new()),
        }
    }

    pub fn cap(&self) -> u32 {
        self.source.cap()
    }

    pub fn source(&self) -> &FreeDLAlgebra {
        &self.source
    }

    pub fn target(&self) -> &Arc<DualSteenrod> {
        &self.target
    }

    /// `φ(Q^I x₁)` for a generator sequence.
    pub fn image_of_generator(&self, seq: &DLSequence) -> Result<F2Polynomial, AlgebraError> {
        let id = self
            .source
            .generator_id(seq)
            .ok_or_else(|| AlgebraError::UnknownGenerator(crate::dyer_lashof::generator_name(seq, 1)))?;
        self.image_of_id(id)
    }

    fn image_of_id(&self, id: u32) -> Result<F2Polynomial, AlgebraError> {
        if let Some(hit) = self.on_generators.read().unwrap().get(&id) {
            return Ok(hit.clone());
        }
        let u = self.source.universe();
        let g = F2Polynomial::from_monomial(u, u.gen_monomial(id));
        let k = u.degree_of(id);
        let mut rhs = BitVec::zeros(0);
        for a in 1..=k {
            let lower = self.source.dual_steenrod_action(a, &g)?;
            let image = self.apply(&lower)?;
            let basis = self.target.slice(k - a)?;
            rhs = rhs.concat(&image.to_bitvec(&basis).ok_or(AlgebraError::Inhomogeneous)?);
        }
        let matrix = self.target.action_matrix(k)?;
        let basis = self.target.slice(k)?;
        let context = format!("image of {}", u.generator(id).name);
        let value = match matrix.solve(&rhs) {
            Solution::Unique(x) => basis.to_polynomial(self.target.universe(), &x),
            Solution::Inconsistent => return Err(AlgebraError::NoSolution { degree: k, context }),
            Solution::Many { kernel, .. } => {
                return Err(AlgebraError::Ambiguous {
                    degree: k,
                    context,
                    ambiguity: kernel
                        .iter()
                        .map(|v| basis.to_polynomial(self.target.universe(), v).to_string())
                        .collect(),
                })
            }
        };
        self.on_generators.write().unwrap().insert(id, value.clone());
        Ok(value)
    }

    fn image_of_monomial(&self, m: &Monomial) -> Result<F2Polynomial, AlgebraError> {
        if m.is_one() {
            return Ok(F2Polynomial::one(self.target.universe()));
        }
        if let Some(hit) = self.on_monomials.read().unwrap().get(m) {
            return Ok(hit.clone());
        }
        let mut acc = F2Polynomial::one(self.target.universe());
        for &(id, e) in m.exponents() {
            acc = acc.mul_unchecked(&self.image_of_id(id)?.pow(e));
        }
        self.on_monomials.write().unwrap().insert(m.clone(), acc.clone());
        Ok(acc)
    }

    /// `φ` on an arbitrary element of `H₊(S//2)`.
    pub fn apply(&self, v: &F2Polynomial) -> Result<F2Polynomial, AlgebraError> {
        let mut out = F2Polynomial::zero(self.target.universe());
        for m in v.terms() {
            out.add_assign(&self.image_of_monomial(m)?);
        }
        Ok(out)
    }

    /// Some `v` with `φ(v) = z`, for homogeneous `z`.
    pub fn preimage(&self, z: &F2Polynomial) -> Result<F2Polynomial, AlgebraError> {
        let u = self.source.universe();
        let Some(k) = z.homogeneous_degree() else {
            return if z.is_zero() {
                Ok(F2Polynomial::zero(u))
            } else {
                Err(AlgebraError::Inhomogeneous)
            };
        };
        let monomials = self.source.slice(k)?;
        let basis = self.target.slice(k)?;
        let cols = monomials
            .iter()
            .map(|m| {
                self.image_of_monomial(m)?
                    .to_bitvec(&basis)
                    .ok_or(AlgebraError::Inhomogeneous)
            })
            .collect::<Result<Vec<_>, _>>()?;
        let matrix = BitMatrix::from_rows(basis.len(), cols).transpose();
        let rhs = z.to_bitvec(&basis).ok_or(AlgebraError::Inhomogeneous)?;
        let x = match matrix.solve(&rhs) {
            Solution::Unique(x) => x,
            Solution::Many { particular, .. } => particular,
            Solution::Inconsistent => return Err(AlgebraError::NotInImage(k)),
        };
        Ok(F2Polynomial::from_monomials(
            u,
            x.ones().map(|i| monomials[i].clone()),
        ))
    }

    /// `Q^i z = φ(Q^i v)` for any preimage `v` of `z`.
    pub fn dl_on_element(&self, i: u32, z: &F2Polynomial) -> Result<F2Polynomial, AlgebraError> {
        let v = self.preimage(z)?;
        self.apply(&self.source.apply_q(i as i64, &v)?)
    }

    /// `Q^i ζ_s`.
    pub fn dl_on_zeta(&self, i: u32, s: u32) -> Result<F2Polynomial, AlgebraError> {
        let degree = (1u32 << s) - 1 + i;
        if degree > self.cap() {
            return Err(AlgebraError::BeyondCap {
                degree,
                cap: self.cap(),
            });
        }
        self.dl_on_element(i, &self.target.zeta(s)?)
    }
}
