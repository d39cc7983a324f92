//! Hilbert A-modules `M = ⊕_{i=1..n} q_i A` over a finite-dimensional
//! C*-algebra, with the A-valued inner product `⟨x,y⟩ = Σ_i x_i·y_i*`.
//!
//! Components live in central ideals: the mask q_i pins which algebra blocks
//! component i may touch. The module is full when every block is active in at
//! least one component; structure algorithms restrict to the support ideal
//! otherwise.

use num_complex::Complex64;
use rand::Rng;

use crate::algebra::{AlgebraElement, AlgebraSignature, CentralProjection};
use crate::error::{Error, Result};
use crate::linalg::{solve_real_linear, RealLinearConstraint};
use crate::rng::seeded_rng;

/// Components may carry this much relative mass outside their ideal.
pub const SUPPORT_RTOL: f64 = 1e-12;

/// Module shape: the coefficient algebra plus one central projection per
/// component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModuleSignature {
    algebra: AlgebraSignature,
    components: Vec<CentralProjection>,
}

impl ModuleSignature {
    pub fn new(algebra: AlgebraSignature, components: Vec<CentralProjection>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::BadShape {
                context: "module needs at least one component".into(),
            });
        }
        for (i, q) in components.iter().enumerate() {
            if q.signature() != &algebra {
                return Err(Error::SignatureMismatch {
                    context: format!("component {i} projection built over a different algebra"),
                });
            }
        }
        Ok(Self {
            algebra,
            components,
        })
    }

    /// Free module Aⁿ: every component active on every block.
    pub fn free(algebra: AlgebraSignature, rank: usize) -> Result<Self> {
        let full = CentralProjection::full(&algebra);
        Self::new(algebra, vec![full; rank])
    }

    pub fn algebra(&self) -> &AlgebraSignature {
        &self.algebra
    }

    pub fn rank(&self) -> usize {
        self.components.len()
    }

    pub fn component(&self, i: usize) -> &CentralProjection {
        &self.components[i]
    }

    pub fn components(&self) -> &[CentralProjection] {
        &self.components
    }

    /// Number of components active on block m.
    pub fn multiplicity(&self, m: usize) -> usize {
        self.components.iter().filter(|q| q.is_active(m)).count()
    }

    /// Union of the component ideals.
    pub fn support(&self) -> CentralProjection {
        let mut acc = self.components[0].clone();
        for q in &self.components[1..] {
            acc = acc.or(q);
        }
        acc
    }

    /// Full means the inner product values generate all of A: every block is
    /// active somewhere.
    pub fn is_full(&self) -> bool {
        (0..self.algebra.num_blocks()).all(|m| self.multiplicity(m) > 0)
    }
}

/// Module vector: one algebra element per component, each supported on its
/// component ideal.
#[derive(Debug, Clone, PartialEq)]
pub struct ModuleVector {
    signature: ModuleSignature,
    components: Vec<AlgebraElement>,
}

impl ModuleVector {
    pub fn new(signature: ModuleSignature, components: Vec<AlgebraElement>) -> Result<Self> {
        if components.len() != signature.rank() {
            return Err(Error::BadShape {
                context: format!(
                    "expected {} components, got {}",
                    signature.rank(),
                    components.len()
                ),
            });
        }
        for (i, x) in components.iter().enumerate() {
            if x.signature() != signature.algebra() {
                return Err(Error::SignatureMismatch {
                    context: format!("component {i} built over a different algebra"),
                });
            }
            let q = signature.component(i);
            let bound = SUPPORT_RTOL * (1.0 + x.norm());
            for m in 0..signature.algebra().num_blocks() {
                if !q.is_active(m) {
                    let mass = x.block(m).frobenius_norm();
                    if mass > bound {
                        return Err(Error::SupportViolation {
                            component: i,
                            block: m,
                            mass,
                        });
                    }
                }
            }
        }
        // Snap the (within-tolerance) off-support residue to exact zero.
        let components = components
            .into_iter()
            .enumerate()
            .map(|(i, x)| x.masked(signature.component(i)))
            .collect();
        Ok(Self {
            signature,
            components,
        })
    }

    pub fn zeros(signature: &ModuleSignature) -> Self {
        let components = (0..signature.rank())
            .map(|_| AlgebraElement::zeros(signature.algebra()))
            .collect();
        Self {
            signature: signature.clone(),
            components,
        }
    }

    /// Gaussian vector clipped to the component ideals.
    pub fn random_gaussian<R: Rng + ?Sized>(signature: &ModuleSignature, rng: &mut R) -> Self {
        let components = (0..signature.rank())
            .map(|i| {
                AlgebraElement::random_gaussian(signature.algebra(), rng)
                    .masked(signature.component(i))
            })
            .collect();
        Self {
            signature: signature.clone(),
            components,
        }
    }

    pub fn signature(&self) -> &ModuleSignature {
        &self.signature
    }

    pub fn component(&self, i: usize) -> &AlgebraElement {
        &self.components[i]
    }

    pub fn components(&self) -> &[AlgebraElement] {
        &self.components
    }

    pub fn component_mut(&mut self, i: usize) -> &mut AlgebraElement {
        &mut self.components[i]
    }

    /// A-valued inner product `⟨x,y⟩ = Σ_i x_i·y_i*`, A-linear in the first
    /// variable.
    pub fn inner_product(&self, other: &Self) -> Result<AlgebraElement> {
        if self.signature != other.signature {
            return Err(Error::SignatureMismatch {
                context: "inner product of vectors from different modules".into(),
            });
        }
        let mut acc = AlgebraElement::zeros(self.signature.algebra());
        for (x, y) in self.components.iter().zip(&other.components) {
            acc = acc.add(&x.mul(&y.adjoint()));
        }
        Ok(acc)
    }

    /// Norm `‖x‖ = ‖⟨x,x⟩‖^{1/2}`.
    pub fn norm(&self) -> f64 {
        self.inner_product(self)
            .expect("same signature")
            .norm()
            .sqrt()
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.signature, other.signature);
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.add(b))
            .collect();
        Self {
            signature: self.signature.clone(),
            components,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.signature, other.signature);
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.sub(b))
            .collect();
        Self {
            signature: self.signature.clone(),
            components,
        }
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            signature: self.signature.clone(),
            components: self.components.iter().map(|c| c.scale(factor)).collect(),
        }
    }

    /// Left action a·x, multiplying every component on the left.
    pub fn left_mul(&self, a: &AlgebraElement) -> Self {
        let components = self
            .components
            .iter()
            .enumerate()
            .map(|(i, x)| a.mul(x).masked(self.signature.component(i)))
            .collect();
        Self {
            signature: self.signature.clone(),
            components,
        }
    }

    /// Seeded unit vector orthogonal to `self`, or `None` when the solution
    /// space of `⟨self, y⟩ = 0` is trivial.
    ///
    /// The orthogonality condition is conjugate-linear in y, hence real-
    /// linear; the sample is a gaussian combination over a real-orthonormal
    /// basis of the solution space, normalized to module norm 1.
    pub fn orthogonal_sample(&self, seed: u64) -> Result<Option<ModuleVector>> {
        if self.norm() == 0.0 {
            return Err(Error::ZeroInput);
        }
        let layout = UnknownLayout::new(&self.signature);
        if layout.len() == 0 {
            return Ok(None);
        }

        let algebra = self.signature.algebra();
        let mut constraints = Vec::new();
        for m in 0..algebra.num_blocks() {
            let n = algebra.block_dim(m);
            let block_mass: f64 = self
                .components
                .iter()
                .map(|x| x.block(m).frobenius_norm())
                .sum();
            if block_mass == 0.0 {
                continue;
            }
            // Entry (r, c) of Σ_i x_i·y_i* is Σ_{i,k} x_i[r,k]·conj(y_i[c,k]).
            for r in 0..n {
                for c in 0..n {
                    let mut coeffs = vec![Complex64::ZERO; layout.len()];
                    for (i, x) in self.components.iter().enumerate() {
                        if !self.signature.component(i).is_active(m) {
                            continue;
                        }
                        for k in 0..n {
                            coeffs[layout.index(i, m, c, k)] = x.block(m)[(r, k)];
                        }
                    }
                    constraints.push(RealLinearConstraint::conjugate_only(coeffs));
                }
            }
        }

        let basis = solve_real_linear(&constraints, layout.len());
        if basis.is_empty() {
            return Ok(None);
        }

        let mut rng = seeded_rng(seed);
        for _ in 0..16 {
            let mut flat = vec![Complex64::ZERO; layout.len()];
            for b in &basis {
                // Real coefficients: the solution set is only a real subspace.
                let coeff: f64 = rng.sample(rand_distr::StandardNormal);
                for (acc, z) in flat.iter_mut().zip(b) {
                    *acc += coeff * z;
                }
            }
            let y = layout.assemble(&self.signature, &flat);
            let norm = y.norm();
            if norm > 1e-8 {
                return Ok(Some(y.scale(Complex64::new(1.0 / norm, 0.0))));
            }
        }
        unreachable!("gaussian combination over an orthonormal basis collapsed 16 times");
    }
}

/// Flat indexing of the free complex entries of a module vector: component by
/// component, active blocks in order, entries row-major.
struct UnknownLayout {
    offsets: Vec<Vec<Option<usize>>>,
    block_dims: Vec<usize>,
    total: usize,
}

impl UnknownLayout {
    fn new(sig: &ModuleSignature) -> Self {
        let k = sig.algebra().num_blocks();
        let mut offsets = vec![vec![None; k]; sig.rank()];
        let mut total = 0;
        for (i, row) in offsets.iter_mut().enumerate() {
            for (m, slot) in row.iter_mut().enumerate() {
                if sig.component(i).is_active(m) {
                    *slot = Some(total);
                    total += sig.algebra().block_dim(m).pow(2);
                }
            }
        }
        Self {
            offsets,
            block_dims: sig.algebra().block_dims().to_vec(),
            total,
        }
    }

    fn len(&self) -> usize {
        self.total
    }

    fn index(&self, component: usize, block: usize, row: usize, col: usize) -> usize {
        let base = self.offsets[component][block].expect("inactive block has no unknowns");
        base + row * self.block_dims[block] + col
    }

    fn assemble(&self, sig: &ModuleSignature, flat: &[Complex64]) -> ModuleVector {
        let mut y = ModuleVector::zeros(sig);
        for i in 0..sig.rank() {
            for m in 0..sig.algebra().num_blocks() {
                if self.offsets[i][m].is_none() {
                    continue;
                }
                let n = self.block_dims[m];
                for r in 0..n {
                    for c in 0..n {
                        y.components[i].block_mut(m)[(r, c)] = flat[self.index(i, m, r, c)];
                    }
                }
            }
        }
        y
    }
}
