//! Bounded A-linear operators on a module `M = ⊕ q_i A`, stored as kernels:
//! `T(x)_j = Σ_i x_i·t_{ij}` with `t_{ij} ∈ q_i A q_j`.
//!
//! The kernel realizes End_A(M) as a compressed matrix algebra over A, so
//! adjoints, Gram kernels and operator norms reduce to exact block linear
//! algebra. Per algebra block m the kernel embeds as one complex matrix over
//! the components active on m; its largest singular value is the operator
//! norm contribution of that block and its smallest one decides injectivity.

use num_complex::Complex64;
use rand::Rng;

use crate::algebra::{AlgebraElement, CentralElement};
use crate::error::{Error, Result};
use crate::linalg::{qr_unitary, spectral_norm, ComplexMatrix};
use crate::module::{ModuleSignature, ModuleVector, SUPPORT_RTOL};
use crate::rng::{complex_gaussian, seeded_rng};

/// Bounded module operator in kernel form.
#[derive(Debug, Clone, PartialEq)]
pub struct ModuleOperator {
    signature: ModuleSignature,
    /// Row-major n×n kernel; entry (i, j) maps component i into component j.
    kernel: Vec<AlgebraElement>,
}

impl ModuleOperator {
    /// Validate ideal compatibility (`q_i·t_{ij}·q_j = t_{ij}`) and build.
    ///
    /// Entries carrying mass on blocks outside `q_i ∧ q_j` are rejected; the
    /// flat kernel position i·n + j is reported as the offending component.
    pub fn from_kernel(signature: ModuleSignature, kernel: Vec<AlgebraElement>) -> Result<Self> {
        let n = signature.rank();
        if kernel.len() != n * n {
            return Err(Error::BadShape {
                context: format!("kernel needs {} entries, got {}", n * n, kernel.len()),
            });
        }
        for (pos, t) in kernel.iter().enumerate() {
            if t.signature() != signature.algebra() {
                return Err(Error::SignatureMismatch {
                    context: format!("kernel entry {pos} built over a different algebra"),
                });
            }
            let (i, j) = (pos / n, pos % n);
            let ideal = signature.component(i).and(signature.component(j));
            let bound = SUPPORT_RTOL * (1.0 + t.norm());
            for m in 0..signature.algebra().num_blocks() {
                if !ideal.is_active(m) {
                    let mass = t.block(m).frobenius_norm();
                    if mass > bound {
                        return Err(Error::SupportViolation {
                            component: pos,
                            block: m,
                            mass,
                        });
                    }
                }
            }
        }
        let kernel = kernel
            .into_iter()
            .enumerate()
            .map(|(pos, t)| {
                let (i, j) = (pos / n, pos % n);
                t.masked(&signature.component(i).and(signature.component(j)))
            })
            .collect();
        Ok(Self { signature, kernel })
    }

    pub fn zero(signature: &ModuleSignature) -> Self {
        let n = signature.rank();
        Self {
            signature: signature.clone(),
            kernel: vec![AlgebraElement::zeros(signature.algebra()); n * n],
        }
    }

    /// Identity pattern `t_{ij} = δ_{ij}·q_i`.
    pub fn identity(signature: &ModuleSignature) -> Self {
        let mut op = Self::zero(signature);
        for i in 0..signature.rank() {
            op.set_entry(i, i, signature.component(i).embed());
        }
        op
    }

    /// Componentwise right multiplication x ↦ x·a.
    pub fn right_multiplication(signature: &ModuleSignature, a: &AlgebraElement) -> Self {
        assert_eq!(a.signature(), signature.algebra());
        let mut op = Self::zero(signature);
        for i in 0..signature.rank() {
            op.set_entry(i, i, a.masked(signature.component(i)));
        }
        op
    }

    /// Multiplication by a central element.
    pub fn central_multiplication(signature: &ModuleSignature, c: &CentralElement) -> Self {
        Self::right_multiplication(signature, &c.embed())
    }

    /// Gaussian kernel clipped to the ideal pattern.
    pub fn random_gaussian<R: Rng + ?Sized>(signature: &ModuleSignature, rng: &mut R) -> Self {
        let n = signature.rank();
        let mut op = Self::zero(signature);
        for i in 0..n {
            for j in 0..n {
                let e = AlgebraElement::random_gaussian(signature.algebra(), rng)
                    .masked(&signature.component(i).and(signature.component(j)));
                op.set_entry(i, j, e);
            }
        }
        op
    }

    /// Unit-norm random perturbation direction.
    pub fn random_direction<R: Rng + ?Sized>(signature: &ModuleSignature, rng: &mut R) -> Self {
        loop {
            let e = Self::random_gaussian(signature, rng);
            let norm = e.norm();
            if norm > 1e-6 {
                return e.scale(Complex64::new(1.0 / norm, 0.0));
            }
        }
    }

    pub fn signature(&self) -> &ModuleSignature {
        &self.signature
    }

    pub fn entry(&self, i: usize, j: usize) -> &AlgebraElement {
        &self.kernel[i * self.signature.rank() + j]
    }

    pub fn set_entry(&mut self, i: usize, j: usize, value: AlgebraElement) {
        let n = self.signature.rank();
        self.kernel[i * n + j] = value;
    }

    pub fn kernel(&self) -> &[AlgebraElement] {
        &self.kernel
    }

    /// Apply the operator: `T(x)_j = Σ_i x_i·t_{ij}`.
    pub fn apply(&self, x: &ModuleVector) -> Result<ModuleVector> {
        if x.signature() != &self.signature {
            return Err(Error::SignatureMismatch {
                context: "operator applied to a vector from another module".into(),
            });
        }
        let n = self.signature.rank();
        let mut out = ModuleVector::zeros(&self.signature);
        for j in 0..n {
            let mut acc = AlgebraElement::zeros(self.signature.algebra());
            for i in 0..n {
                acc = acc.add(&x.component(i).mul(self.entry(i, j)));
            }
            *out.component_mut(j) = acc;
        }
        Ok(out)
    }

    /// Adjoint kernel `(t*)_{ij} = q_i·t_{ji}*·q_j`; always exists here.
    pub fn adjoint(&self) -> Self {
        let n = self.signature.rank();
        let mut out = Self::zero(&self.signature);
        for i in 0..n {
            for j in 0..n {
                let ideal = self.signature.component(i).and(self.signature.component(j));
                out.set_entry(i, j, self.entry(j, i).adjoint().masked(&ideal));
            }
        }
        out
    }

    /// Composition `self` then `next` (i.e. next ∘ self); kernels multiply.
    pub fn then(&self, next: &Self) -> Self {
        assert_eq!(self.signature, next.signature);
        let n = self.signature.rank();
        let mut out = Self::zero(&self.signature);
        for i in 0..n {
            for j in 0..n {
                let mut acc = AlgebraElement::zeros(self.signature.algebra());
                for k in 0..n {
                    acc = acc.add(&self.entry(i, k).mul(next.entry(k, j)));
                }
                out.set_entry(i, j, acc);
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.signature, other.signature);
        let kernel = self
            .kernel
            .iter()
            .zip(&other.kernel)
            .map(|(a, b)| a.add(b))
            .collect();
        Self {
            signature: self.signature.clone(),
            kernel,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.signature, other.signature);
        let kernel = self
            .kernel
            .iter()
            .zip(&other.kernel)
            .map(|(a, b)| a.sub(b))
            .collect();
        Self {
            signature: self.signature.clone(),
            kernel,
        }
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            signature: self.signature.clone(),
            kernel: self.kernel.iter().map(|t| t.scale(factor)).collect(),
        }
    }

    /// Scale by a central element: `T' = c·T` acting as x ↦ T(x)·c.
    pub fn scale_central(&self, c: &CentralElement) -> Self {
        let embedded = c.embed();
        Self {
            signature: self.signature.clone(),
            kernel: self.kernel.iter().map(|t| t.mul(&embedded)).collect(),
        }
    }

    /// The kernel of block m as one complex matrix over the components active
    /// on m, together with those component indices. `None` when the block is
    /// inactive in the whole module.
    pub fn embed_block(&self, m: usize) -> Option<(ComplexMatrix, Vec<usize>)> {
        let active: Vec<usize> = (0..self.signature.rank())
            .filter(|&i| self.signature.component(i).is_active(m))
            .collect();
        if active.is_empty() {
            return None;
        }
        let nm = self.signature.algebra().block_dim(m);
        let dim = active.len() * nm;
        let mut big = ComplexMatrix::zeros(dim, dim);
        for (r, &i) in active.iter().enumerate() {
            for (c, &j) in active.iter().enumerate() {
                big.set_block(r * nm, c * nm, self.entry(i, j).block(m));
            }
        }
        Some((big, active))
    }

    /// Operator norm, exact: the largest spectral norm over the per-block
    /// embedded kernels; equals `sup{‖Tx‖ : ‖x‖ ≤ 1}`.
    pub fn norm(&self) -> f64 {
        (0..self.signature.algebra().num_blocks())
            .filter_map(|m| self.embed_block(m))
            .map(|(big, _)| spectral_norm(&big))
            .fold(0.0, f64::max)
    }

    /// Smallest singular value over the active embedded blocks; positive iff
    /// the operator is injective on the module.
    pub fn min_singular_value(&self) -> f64 {
        let mut min = f64::INFINITY;
        for m in 0..self.signature.algebra().num_blocks() {
            if let Some((big, _)) = self.embed_block(m) {
                let gram = big.adjoint().mul(&big);
                let eig = crate::linalg::hermitian_eigen(&gram);
                let low = eig.values.first().copied().unwrap_or(0.0).max(0.0).sqrt();
                min = min.min(low);
            }
        }
        if min.is_finite() {
            min
        } else {
            0.0
        }
    }

    /// Gram kernel `G_{il} = Σ_j t_{ij}·t_{lj}*`, the finite carrier of T*T:
    /// `⟨Tx,Ty⟩ = Σ_{il} x_i·G_{il}·y_l*`.
    pub fn gram(&self) -> GramKernel {
        let n = self.signature.rank();
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for l in 0..n {
                let mut acc = AlgebraElement::zeros(self.signature.algebra());
                for j in 0..n {
                    acc = acc.add(&self.entry(i, j).mul(&self.entry(l, j).adjoint()));
                }
                entries.push(acc);
            }
        }
        GramKernel {
            signature: self.signature.clone(),
            entries,
        }
    }

    /// True iff `⟨Tx,Ty⟩ = ⟨x,y⟩` for all x, y, i.e. the Gram kernel matches
    /// the identity pattern within `tol·(1+‖T‖²)`.
    pub fn is_isometry(&self, tol: f64) -> bool {
        let scale = tol * (1.0 + self.norm().powi(2));
        self.gram().deviation_from_identity() <= scale
    }
}

/// Hermitian kernel of the quadratic form `(x, y) ↦ ⟨Tx,Ty⟩`.
#[derive(Debug, Clone)]
pub struct GramKernel {
    signature: ModuleSignature,
    entries: Vec<AlgebraElement>,
}

impl GramKernel {
    pub fn signature(&self) -> &ModuleSignature {
        &self.signature
    }

    pub fn entry(&self, i: usize, l: usize) -> &AlgebraElement {
        &self.entries[i * self.signature.rank() + l]
    }

    /// Evaluate the form `Σ_{il} x_i·G_{il}·y_l*`.
    pub fn evaluate(&self, x: &ModuleVector, y: &ModuleVector) -> Result<AlgebraElement> {
        if x.signature() != &self.signature || y.signature() != &self.signature {
            return Err(Error::SignatureMismatch {
                context: "gram kernel evaluated on foreign vectors".into(),
            });
        }
        let n = self.signature.rank();
        let mut acc = AlgebraElement::zeros(self.signature.algebra());
        for i in 0..n {
            for l in 0..n {
                acc = acc.add(&x.component(i).mul(self.entry(i, l)).mul(&y.component(l).adjoint()));
            }
        }
        Ok(acc)
    }

    /// Largest hermitian defect `‖G_{il}* − G_{li}‖` over entry pairs.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.signature.rank();
        let mut worst = 0.0_f64;
        for i in 0..n {
            for l in 0..n {
                let defect = self.entry(i, l).adjoint().sub(self.entry(l, i)).norm();
                worst = worst.max(defect);
            }
        }
        worst
    }

    /// Distance to the identity pattern `δ_{il}·q_i` in the entrywise C*-norm.
    pub fn deviation_from_identity(&self) -> f64 {
        let n = self.signature.rank();
        let mut worst = 0.0_f64;
        for i in 0..n {
            for l in 0..n {
                let target = if i == l {
                    self.signature.component(i).embed()
                } else {
                    AlgebraElement::zeros(self.signature.algebra())
                };
                worst = worst.max(self.entry(i, l).sub(&target).norm());
            }
        }
        worst
    }
}

/// Seeded scaled isometry `T = λ·V` built blockwise: per algebra block the
/// kernel over the active components is a Haar-ish unitary from a QR
/// orthonormalization of a gaussian matrix, with the R-diagonal phases fixed
/// so the construction is deterministic in the seed.
///
/// Fails with `DimensionObstruction` when some algebra block has no active
/// component: no isometry on the module can then witness that block's λ.
pub fn make_scaled_isometry(
    signature: &ModuleSignature,
    lambda: &CentralElement,
    seed: u64,
) -> Result<ModuleOperator> {
    if lambda.signature() != signature.algebra() {
        return Err(Error::SignatureMismatch {
            context: "λ built over a different algebra".into(),
        });
    }
    if !lambda.is_positive(crate::algebra::CENTRAL_SQRT_ATOL) {
        let min = lambda
            .scalars()
            .iter()
            .map(|z| z.re.min(-z.im.abs()))
            .fold(f64::INFINITY, f64::min);
        return Err(Error::NotPositive {
            min,
            tolerance: crate::algebra::CENTRAL_SQRT_ATOL,
        });
    }
    for m in 0..signature.algebra().num_blocks() {
        if signature.multiplicity(m) == 0 {
            return Err(Error::DimensionObstruction { block: m });
        }
    }

    let mut rng = seeded_rng(seed);
    let mut op = ModuleOperator::zero(signature);
    for m in 0..signature.algebra().num_blocks() {
        let active: Vec<usize> = (0..signature.rank())
            .filter(|&i| signature.component(i).is_active(m))
            .collect();
        let nm = signature.algebra().block_dim(m);
        let dim = active.len() * nm;
        let gaussian = ComplexMatrix::from_fn(dim, dim, |_, _| complex_gaussian(&mut rng));
        let unitary = qr_unitary(&gaussian);
        let factor = Complex64::new(lambda.scalar(m).re, 0.0);
        for (r, &i) in active.iter().enumerate() {
            for (c, &j) in active.iter().enumerate() {
                let sub = unitary.block(r * nm, c * nm, nm, nm).scale(factor);
                let mut entry = op.entry(i, j).clone();
                entry.block_mut(m).set_block(0, 0, &sub);
                op.set_entry(i, j, entry);
            }
        }
    }
    Ok(op)
}
