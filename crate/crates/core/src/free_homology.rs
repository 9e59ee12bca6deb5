//! `H₊(S//f) = F₂[Q^I x_n : I admissible, exc(I) > n]` for a cone on a
//! class detected by `Sq^n`, its `A₊`-coaction, and the image maps
//! `Q^I x_{2^d} ↦ (Q^{I/2^d} ζ₁)^{2^d}` into the dual Steenrod algebra.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use crate::bitmat::{BitMatrix, EchelonBasis};
use crate::dual_steenrod::{DualSteenrod, Identification};
use crate::dyer_lashof::{admissible_generators, DLSequence, FreeDLAlgebra};
use crate::error::AlgebraError;
use crate::f2poly::{slice_count, F2Polynomial, Monomial, TensorPolynomial};

pub fn generators_up_to(n: u32, cap: u32) -> Vec<DLSequence> {
    admissible_generators(n, cap)
}

pub fn slice_dim(n: u32, k: u32) -> u64 {
    let degrees: Vec<u32> = admissible_generators(n, k)
        .iter()
        .map(|s| n + s.weight())
        .collect();
    slice_count(&degrees, k)
}

/// Admissible Steenrod sequences `(a₁, …, a_ℓ)`, `a_j ≥ 2a_{j+1}`, of total degree `k`.
pub fn admissible_steenrod_sequences(k: u32) -> Vec<Vec<u32>> {
    fn grow(remaining: u32, max_next: u32, current: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if remaining == 0 {
            out.push(current.clone());
            return;
        }
        for a in (1..=remaining.min(max_next)).rev() {
            current.push(a);
            grow(remaining - a, a / 2, current, out);
            current.pop();
        }
    }
    let mut out = Vec::new();
    grow(k, k, &mut Vec::new(), &mut out);
    out
}

/// Recovers coactions from the dual Steenrod action by inverting the
/// pairing between admissible Steenrod sequences and monomials.
pub struct CoactionSolver {
    dual: Arc<DualSteenrod>,
    inverses: RwLock<HashMap<u32, Arc<(Vec<Vec<u32>>, BitMatrix)>>>,
}

impl CoactionSolver {
    pub fn new(dual: Arc<DualSteenrod>) -> Self {
        CoactionSolver {
            dual,
            inverses: RwLock::new(HashMap::new()),
        }
    }

    pub fn dual(&self) -> &Arc<DualSteenrod> {
        &self.dual
    }

    /// Operations of degree `j` and the inverse of their pairing matrix.
    fn pairing_inverse(&self, j: u32) -> Result<Arc<(Vec<Vec<u32>>, BitMatrix)>, AlgebraError> {
        if let Some(hit) = self.inverses.read().unwrap().get(&j) {
            return Ok(Arc::clone(hit));
        }
        let basis = self.dual.slice(j)?;
        let ops = admissible_steenrod_sequences(j);
        let u = self.dual.universe();
        let mut pairing = BitMatrix::new(basis.len());
        for op in &ops {
            let row = crate::bitmat::BitVec::from_indices(
                basis.len(),
                basis.monomials().iter().enumerate().filter_map(|(c, m)| {
                    let v = self
                        .dual
                        .dual_steenrod_composite(op, &F2Polynomial::from_monomial(u, m.clone()));
                    self.dual.counit(&v).then_some(c)
                }),
            );
            pairing.push_row(row);
        }
        let inverse = pairing.inverse().ok_or(AlgebraError::DegeneratePairing(j))?;
        let entry = Arc::new((ops, inverse));
        self.inverses.write().unwrap().insert(j, Arc::clone(&entry));
        Ok(entry)
    }

    /// `ψ(v) = Σ m ⊗ v_m` with `A₊` on the left.
    pub fn coaction(
        &self,
        algebra: &FreeDLAlgebra,
        v: &F2Polynomial,
    ) -> Result<TensorPolynomial, AlgebraError> {
        let mut out = TensorPolynomial::zero(self.dual.universe(), algebra.universe());
        let Some(k) = v.homogeneous_degree() else {
            return if v.is_zero() {
                Ok(out)
            } else {
                Err(AlgebraError::Inhomogeneous)
            };
        };
        if k > self.dual.cap() {
            return Err(AlgebraError::BeyondCap {
                degree: k,
                cap: self.dual.cap(),
            });
        }
        for j in 0..=k {
            let entry = self.pairing_inverse(j)?;
            let (ops, inverse) = (&entry.0, &entry.1);
            let basis = self.dual.slice(j)?;
            let images = ops
                .iter()
                .map(|op| algebra.dual_steenrod_composite(op, v))
                .collect::<Result<Vec<_>, _>>()?;
            for (c, m) in basis.monomials().iter().enumerate() {
                let mut vm = F2Polynomial::zero(algebra.universe());
                for r in inverse.row(c).ones() {
                    vm.add_assign(&images[r]);
                }
                for w in vm.terms() {
                    out.toggle(m.clone(), w.clone());
                }
            }
        }
        Ok(out)
    }

    /// The coaction of `A₊` on an element of `A₊`, recovered the same way.
    pub fn coaction_on_dual(&self, z: &F2Polynomial) -> Result<TensorPolynomial, AlgebraError> {
        let u = self.dual.universe();
        let mut out = TensorPolynomial::zero(u, u);
        let Some(k) = z.homogeneous_degree() else {
            return if z.is_zero() {
                Ok(out)
            } else {
                Err(AlgebraError::Inhomogeneous)
            };
        };
        for j in 0..=k {
            let entry = self.pairing_inverse(j)?;
            let basis = self.dual.slice(j)?;
            let images: Vec<F2Polynomial> = entry
                .0
                .iter()
                .map(|op| self.dual.dual_steenrod_composite(op, z))
                .collect();
            for (c, m) in basis.monomials().iter().enumerate() {
                let mut zm = F2Polynomial::zero(u);
                for r in entry.1.row(c).ones() {
                    zm.add_assign(&images[r]);
                }
                for w in zm.terms() {
                    out.toggle(m.clone(), w.clone());
                }
            }
        }
        Ok(out)
    }
}

/// `H₊(S//f)` with bottom class `x_n` through a degree cap.
pub struct FreeConePresentation {
    algebra: FreeDLAlgebra,
    coactions: CoactionSolver,
}

impl FreeConePresentation {
    pub fn new(n: u32, cap: u32) -> Self {
        FreeConePresentation {
            algebra: FreeDLAlgebra::new(n, cap),
            coactions: CoactionSolver::new(Arc::new(DualSteenrod::new(cap))),
        }
    }

    pub fn bottom(&self) -> u32 {
        self.algebra.bottom()
    }

    pub fn cap(&self) -> u32 {
        self.algebra.cap()
    }

    pub fn algebra(&self) -> &FreeDLAlgebra {
        &self.algebra
    }

    pub fn dual(&self) -> &Arc<DualSteenrod> {
        self.coactions.dual()
    }

    pub fn generators(&self) -> Vec<DLSequence> {
        generators_up_to(self.bottom(), self.cap())
    }

    pub fn coaction(&self, v: &F2Polynomial) -> Result<TensorPolynomial, AlgebraError> {
        self.coactions.coaction(&self.algebra, v)
    }

    pub fn coaction_of_generator(&self, seq: &DLSequence) -> Result<TensorPolynomial, AlgebraError> {
        self.coaction(&self.algebra.generator(seq)?)
    }
}

/// One-shot form of [`FreeConePresentation::coaction_of_generator`].
pub fn coaction_of_generator(
    n: u32,
    seq: &DLSequence,
    cap: u32,
) -> Result<TensorPolynomial, AlgebraError> {
    FreeConePresentation::new(n, cap).coaction_of_generator(seq)
}

/// The ring map `ρ_d: H₊(S//f) → A₊` for bottom class `x_{2^d}`.
pub struct ImageMap {
    d: u32,
    source: FreeConePresentation,
    phi: Arc<Identification>,
    on_generators: RwLock<HashMap<u32, F2Polynomial>>,
}

impl ImageMap {
    pub fn new(d: u32, cap: u32) -> Self {
        Self::with_identification(d, cap, Arc::new(Identification::new(cap)))
    }

    pub fn with_identification(d: u32, cap: u32, phi: Arc<Identification>) -> Self {
        assert!(phi.cap() >= cap, "identification cap below image cap");
        ImageMap {
            d,
            source: FreeConePresentation::new(1 << d, cap),
            phi,
            on_generators: RwLock::new(HashMap::new()),
        }
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn cap(&self) -> u32 {
        self.source.cap()
    }

    pub fn source(&self) -> &FreeConePresentation {
        &self.source
    }

    pub fn identification(&self) -> &Arc<Identification> {
        &self.phi
    }

    pub fn target(&self) -> &Arc<DualSteenrod> {
        self.phi.target()
    }

    fn image_of_id(&self, id: u32) -> Result<F2Polynomial, AlgebraError> {
        if let Some(hit) = self.on_generators.read().unwrap().get(&id) {
            return Ok(hit.clone());
        }
        let seq = self.source.algebra().sequence_of(id);
        let value = match seq.divide(self.d) {
            Some(reduced) => self.phi.image_of_generator(&reduced)?.frobenius(self.d),
            None => F2Polynomial::zero(self.target().universe()),
        };
        self.on_generators.write().unwrap().insert(id, value.clone());
        Ok(value)
    }

    pub fn image_of_generator(&self, seq: &DLSequence) -> Result<F2Polynomial, AlgebraError> {
        let id = self
            .source
            .algebra()
            .generator_id(seq)
            .ok_or_else(|| AlgebraError::UnknownGenerator(seq.to_string()))?;
        self.image_of_id(id)
    }

    fn image_of_monomial(&self, m: &Monomial) -> Result<F2Polynomial, AlgebraError> {
        let mut acc = F2Polynomial::one(self.target().universe());
        for &(id, e) in m.exponents() {
            let g = self.image_of_id(id)?;
            if g.is_zero() {
                return Ok(g);
            }
            acc = acc.mul_unchecked(&g.pow(e));
        }
        Ok(acc)
    }

    pub fn rho(&self, v: &F2Polynomial) -> Result<F2Polynomial, AlgebraError> {
        if v.universe() != self.source.algebra().universe() {
            return Err(AlgebraError::UniverseMismatch);
        }
        let mut out = F2Polynomial::zero(self.target().universe());
        for m in v.terms() {
            out.add_assign(&self.image_of_monomial(m)?);
        }
        Ok(out)
    }

    /// `Q^I (ζ₁^{2^d})` computed with the Dyer–Lashof action on `A₊`.
    pub fn rho_via_operations(&self, seq: &DLSequence) -> Result<F2Polynomial, AlgebraError> {
        let mut z = self.phi.target().zeta(1)?.frobenius(self.d);
        for &i in seq.entries().iter().rev() {
            if z.is_zero() {
                break;
            }
            z = self.phi.dl_on_element(i, &z)?;
        }
        Ok(z)
    }

    /// `Σ m ⊗ ρ(v_m) + ψ_{A₊}(ρ(v))`, zero exactly when `ρ` commutes with coactions at `v`.
    pub fn comodule_defect(&self, v: &F2Polynomial) -> Result<TensorPolynomial, AlgebraError> {
        let dual = self.target();
        let mut out = dual.left_coaction(&self.rho(v)?);
        for (m, w) in self.source.coaction(v)?.terms() {
            let image = self.image_of_monomial(w)?;
            for t in image.terms() {
                out.toggle(m.clone(), t.clone());
            }
        }
        Ok(out)
    }

    pub fn verify_epi(&self) -> Result<EpiReport, AlgebraError> {
        let cap = self.cap();
        let alg = self.source.algebra();
        let u = alg.universe();
        let gens: Vec<(u32, F2Polynomial)> = (0..u.len() as u32)
            .map(|id| Ok((u.degree_of(id), self.image_of_id(id)?)))
            .collect::<Result<_, AlgebraError>>()?;
        let power = 1u32 << self.d;
        let mut image_bases: Vec<Vec<F2Polynomial>> =
            vec![vec![F2Polynomial::one(self.target().universe())]];
        let mut rows = Vec::new();
        for k in 1..=cap {
            let basis = self.target().slice(k)?;
            let mut echelon = EchelonBasis::new(basis.len());
            let mut spanning = Vec::new();
            for (gd, g) in &gens {
                if *gd > k || g.is_zero() {
                    continue;
                }
                for lower in &image_bases[(k - gd) as usize] {
                    let p = g.mul_unchecked(lower);
                    if let Some(vec) = p.to_bitvec(&basis) {
                        if echelon.insert(&vec) {
                            spanning.push(p);
                        }
                    }
                }
            }
            let in_subalgebra = spanning.iter().all(|p| {
                p.terms()
                    .all(|m| m.exponents().iter().all(|&(_, e)| e % power == 0))
            });
            let source_dim = slice_dim(self.source.bottom(), k);
            let image_dim = echelon.rank() as u64;
            let target_dim = crate::dual_steenrod::subalgebra_slice_dim(self.d, k);
            rows.push(EpiRow {
                degree: k,
                source_dim,
                image_dim,
                target_dim,
                in_subalgebra,
            });
            image_bases.push(spanning);
        }
        Ok(EpiReport { d: self.d, rows })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EpiRow {
    pub degree: u32,
    pub source_dim: u64,
    pub image_dim: u64,
    pub target_dim: u64,
    pub in_subalgebra: bool,
}

impl EpiRow {
    pub fn surjective(&self) -> bool {
        self.in_subalgebra && self.image_dim == self.target_dim
    }

    pub fn injective(&self) -> bool {
        self.image_dim == self.source_dim
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EpiReport {
    pub d: u32,
    pub rows: Vec<EpiRow>,
}

impl EpiReport {
    pub fn surjective_degrees(&self) -> usize {
        self.rows.iter().filter(|r| r.surjective()).count()
    }

    pub fn all_surjective(&self) -> bool {
        self.rows.iter().all(EpiRow::surjective)
    }

    pub fn all_injective(&self) -> bool {
        self.rows.iter().all(EpiRow::injective)
    }

    pub fn first_kernel_degree(&self) -> Option<u32> {
        self.rows.iter().find(|r| !r.injective()).map(|r| r.degree)
    }

    /// Surjectivity everywhere, plus injectivity when `d = 0`.
    pub fn passed(&self) -> bool {
        self.all_surjective() && (self.d != 0 || self.all_injective())
    }
}

pub fn verify_epi(d: u32, cap: u32) -> Result<EpiReport, AlgebraError> {
    ImageMap::new(d, cap).verify_epi()
}

/// Degreewise dimensions of `H₊(S//2)` and `A₊`.
pub fn poincare_comparison(cap: u32) -> Vec<(u32, u64, u64)> {
    (0..=cap)
        .map(|k| (k, slice_dim(1, k), crate::dual_steenrod::subalgebra_slice_dim(0, k)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_slices() {
        assert_eq!(slice_dim(1, 3), 2);
        assert_eq!(slice_dim(2, 4), 1);
        assert_eq!(slice_dim(5, 0), 1);
    }

    #[test]
    fn steenrod_sequences_count_like_dual() {
        for k in 0..20 {
            assert_eq!(
                admissible_steenrod_sequences(k).len() as u64,
                crate::dual_steenrod::subalgebra_slice_dim(0, k)
            );
        }
    }

    #[test]
    fn bottom_coactions() {
        for d in 0..=3u32 {
            let n = 1 << d;
            let pres = FreeConePresentation::new(n, n);
            let psi = pres.coaction_of_generator(&DLSequence::empty()).unwrap();
            let a = pres.dual().universe();
            let h = pres.algebra().universe();
            let mut want = TensorPolynomial::zero(a, h);
            want.toggle(a.parse_monomial("z1").unwrap().pow(n), Monomial::one());
            want.toggle(Monomial::one(), h.parse_monomial(&format!("x{n}")).unwrap());
            assert_eq!(psi, want, "d = {d}");
        }
    }

    #[test]
    fn rho_examples() {
        let rho = ImageMap::new(1, 12);
        let z = |s: &str| F2Polynomial::parse(rho.target().universe(), s).unwrap();
        let seq = |v: &[u32]| DLSequence::new(v.to_vec());
        assert_eq!(rho.image_of_generator(&DLSequence::empty()).unwrap(), z("z1^2"));
        assert!(rho.image_of_generator(&seq(&[3])).unwrap().is_zero());
        assert_eq!(rho.image_of_generator(&seq(&[4])).unwrap(), z("z2^2"));
    }

    #[test]
    fn eta_image_is_onto_squares() {
        let report = verify_epi(1, 12).unwrap();
        assert!(report.all_surjective());
        assert_eq!(report.surjective_degrees(), 12);
        assert_eq!(report.first_kernel_degree(), Some(5));
    }
}
