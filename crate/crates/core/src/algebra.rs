//! Finite-dimensional C*-algebras `A = ⊕_{m=1..k} M_{n_m}(ℂ)`.
//!
//! Only unital algebras are modeled; the multiplier algebra of such an A is A
//! itself, so central multipliers are plain central elements: one scalar per
//! matrix block. Ideals are cut out by central projections (per-block masks).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, spectral_norm, ComplexMatrix};

/// Absolute tolerance accepted when clamping central square-root inputs.
pub const CENTRAL_SQRT_ATOL: f64 = 1e-12;
/// Default relative tolerance for positivity checks.
pub const POSITIVITY_TOL: f64 = 1e-10;
/// Default relative tolerance for centrality checks.
pub const CENTRALITY_TOL: f64 = 1e-10;

/// Block dimensions (n_1, …, n_k) of a direct sum of full matrix algebras.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraSignature {
    block_dims: Vec<usize>,
}

impl AlgebraSignature {
    pub fn new(block_dims: Vec<usize>) -> Result<Self> {
        if block_dims.is_empty() {
            return Err(Error::BadShape {
                context: "algebra needs at least one block".into(),
            });
        }
        if let Some(pos) = block_dims.iter().position(|&n| n == 0) {
            return Err(Error::BadShape {
                context: format!("block {pos} has dimension 0"),
            });
        }
        Ok(Self { block_dims })
    }

    pub fn block_dims(&self) -> &[usize] {
        &self.block_dims
    }

    pub fn num_blocks(&self) -> usize {
        self.block_dims.len()
    }

    pub fn block_dim(&self, m: usize) -> usize {
        self.block_dims[m]
    }

    /// Scalar algebra ℂ^k: k one-dimensional blocks.
    pub fn commutative(k: usize) -> Result<Self> {
        Self::new(vec![1; k])
    }
}

/// Element of the algebra: one complex matrix per block.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraElement {
    signature: AlgebraSignature,
    blocks: Vec<ComplexMatrix>,
}

impl AlgebraElement {
    pub fn from_blocks(signature: AlgebraSignature, blocks: Vec<ComplexMatrix>) -> Result<Self> {
        if blocks.len() != signature.num_blocks() {
            return Err(Error::BadShape {
                context: format!(
                    "expected {} blocks, got {}",
                    signature.num_blocks(),
                    blocks.len()
                ),
            });
        }
        for (m, b) in blocks.iter().enumerate() {
            let n = signature.block_dim(m);
            if b.rows() != n || b.cols() != n {
                return Err(Error::BadShape {
                    context: format!(
                        "block {m} must be {n}x{n}, got {}x{}",
                        b.rows(),
                        b.cols()
                    ),
                });
            }
        }
        Ok(Self { signature, blocks })
    }

    pub fn zeros(signature: &AlgebraSignature) -> Self {
        let blocks = signature
            .block_dims()
            .iter()
            .map(|&n| ComplexMatrix::zeros(n, n))
            .collect();
        Self {
            signature: signature.clone(),
            blocks,
        }
    }

    pub fn unit(signature: &AlgebraSignature) -> Self {
        let blocks = signature
            .block_dims()
            .iter()
            .map(|&n| ComplexMatrix::identity(n))
            .collect();
        Self {
            signature: signature.clone(),
            blocks,
        }
    }

    pub fn random_gaussian<R: rand::Rng + ?Sized>(
        signature: &AlgebraSignature,
        rng: &mut R,
    ) -> Self {
        let blocks = signature
            .block_dims()
            .iter()
            .map(|&n| ComplexMatrix::from_fn(n, n, |_, _| crate::rng::complex_gaussian(rng)))
            .collect();
        Self {
            signature: signature.clone(),
            blocks,
        }
    }

    pub fn signature(&self) -> &AlgebraSignature {
        &self.signature
    }

    pub fn block(&self, m: usize) -> &ComplexMatrix {
        &self.blocks[m]
    }

    pub fn blocks(&self) -> &[ComplexMatrix] {
        &self.blocks
    }

    pub fn block_mut(&mut self, m: usize) -> &mut ComplexMatrix {
        &mut self.blocks[m]
    }

    fn zip(&self, other: &Self, f: impl Fn(&ComplexMatrix, &ComplexMatrix) -> ComplexMatrix) -> Self {
        assert_eq!(
            self.signature, other.signature,
            "algebra elements with different signatures"
        );
        let blocks = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| f(a, b))
            .collect();
        Self {
            signature: self.signature.clone(),
            blocks,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a.add(b))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a.sub(b))
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a.mul(b))
    }

    pub fn adjoint(&self) -> Self {
        Self {
            signature: self.signature.clone(),
            blocks: self.blocks.iter().map(|b| b.adjoint()).collect(),
        }
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            signature: self.signature.clone(),
            blocks: self.blocks.iter().map(|b| b.scale(factor)).collect(),
        }
    }

    /// C*-norm: the largest spectral norm over blocks.
    pub fn norm(&self) -> f64 {
        self.blocks.iter().map(spectral_norm).fold(0.0, f64::max)
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.norm() <= tol
    }

    /// Positivity: every block hermitian within tol and with spectrum above
    /// `-tol·(1+‖a‖)`.
    pub fn is_positive(&self, tol: f64) -> bool {
        let scale = tol * (1.0 + self.norm());
        for b in &self.blocks {
            if b.hermitian_deviation() > scale {
                return false;
            }
            let eig = hermitian_eigen(b);
            if let Some(&min) = eig.values.first() {
                if min < -scale {
                    return false;
                }
            }
        }
        true
    }

    /// Projection onto the center, or a certificate of the failure.
    ///
    /// Block m is compared against `(tr/n_m)·I`; the normalized trace is the
    /// conditional expectation onto the scalars, so the reported deviation is
    /// the spectral distance to the nearest scalar block.
    pub fn central_part(&self, tol: f64) -> std::result::Result<CentralElement, NotCentral> {
        let scale = tol * (1.0 + self.norm());
        let mut scalars = Vec::with_capacity(self.blocks.len());
        for (m, b) in self.blocks.iter().enumerate() {
            let n = self.signature.block_dim(m);
            // Exactly scalar blocks short-circuit, keeping embed ∘ project
            // the identity down to the last bit.
            if let Some(exact) = exactly_scalar(b) {
                scalars.push(exact);
                continue;
            }
            let scalar = b.trace() / n as f64;
            let mut centered = b.clone();
            for i in 0..n {
                centered[(i, i)] -= scalar;
            }
            let deviation = spectral_norm(&centered);
            if deviation > scale {
                return Err(NotCentral {
                    block: m,
                    deviation,
                });
            }
            scalars.push(scalar);
        }
        Ok(CentralElement {
            signature: self.signature.clone(),
            scalars,
        })
    }

    /// Zero out the blocks a central projection masks off.
    pub fn masked(&self, q: &CentralProjection) -> Self {
        assert_eq!(self.signature, q.signature);
        let blocks = self
            .blocks
            .iter()
            .enumerate()
            .map(|(m, b)| {
                if q.is_active(m) {
                    b.clone()
                } else {
                    ComplexMatrix::zeros(b.rows(), b.cols())
                }
            })
            .collect();
        Self {
            signature: self.signature.clone(),
            blocks,
        }
    }

    /// Frobenius mass sitting on blocks outside the projection.
    pub fn mass_outside(&self, q: &CentralProjection) -> f64 {
        assert_eq!(self.signature, q.signature);
        self.blocks
            .iter()
            .enumerate()
            .filter(|(m, _)| !q.is_active(*m))
            .map(|(_, b)| b.frobenius_norm())
            .fold(0.0, f64::max)
    }
}

fn exactly_scalar(b: &ComplexMatrix) -> Option<Complex64> {
    let first = b[(0, 0)];
    for i in 0..b.rows() {
        for j in 0..b.cols() {
            let want = if i == j { first } else { Complex64::ZERO };
            if b[(i, j)] != want {
                return None;
            }
        }
    }
    Some(first)
}

/// Failure certificate of a centrality check.
#[derive(Debug, Clone, PartialEq)]
pub struct NotCentral {
    pub block: usize,
    pub deviation: f64,
}

impl std::fmt::Display for NotCentral {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "block {} deviates from scalar by {:.3e}",
            self.block, self.deviation
        )
    }
}

/// Element of the center Z(A): one scalar per block.
#[derive(Debug, Clone, PartialEq)]
pub struct CentralElement {
    signature: AlgebraSignature,
    scalars: Vec<Complex64>,
}

impl CentralElement {
    pub fn new(signature: AlgebraSignature, scalars: Vec<Complex64>) -> Result<Self> {
        if scalars.len() != signature.num_blocks() {
            return Err(Error::BadShape {
                context: format!(
                    "expected {} scalars, got {}",
                    signature.num_blocks(),
                    scalars.len()
                ),
            });
        }
        for (i, z) in scalars.iter().enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFinite { position: i });
            }
        }
        Ok(Self { signature, scalars })
    }

    pub fn from_real(signature: AlgebraSignature, values: Vec<f64>) -> Result<Self> {
        let scalars = values.into_iter().map(|v| Complex64::new(v, 0.0)).collect();
        Self::new(signature, scalars)
    }

    pub fn unit(signature: &AlgebraSignature) -> Self {
        Self {
            signature: signature.clone(),
            scalars: vec![Complex64::ONE; signature.num_blocks()],
        }
    }

    pub fn signature(&self) -> &AlgebraSignature {
        &self.signature
    }

    pub fn scalars(&self) -> &[Complex64] {
        &self.scalars
    }

    pub fn scalar(&self, m: usize) -> Complex64 {
        self.scalars[m]
    }

    /// Embed as the algebra element with block m equal to `scalar_m·I`.
    pub fn embed(&self) -> AlgebraElement {
        let blocks = self
            .signature
            .block_dims()
            .iter()
            .zip(&self.scalars)
            .map(|(&n, &z)| ComplexMatrix::identity(n).scale(z))
            .collect();
        AlgebraElement {
            signature: self.signature.clone(),
            blocks,
        }
    }

    pub fn is_positive(&self, tol: f64) -> bool {
        self.scalars
            .iter()
            .all(|z| z.re >= -tol && z.im.abs() <= tol)
    }

    /// Scalar-wise nonnegative square root. Scalars may undershoot zero (or
    /// stray off the real axis) by at most `CENTRAL_SQRT_ATOL`; they are
    /// clamped before the root is taken.
    pub fn sqrt(&self) -> Result<CentralElement> {
        let mut out = Vec::with_capacity(self.scalars.len());
        for z in &self.scalars {
            if z.re < -CENTRAL_SQRT_ATOL || z.im.abs() > CENTRAL_SQRT_ATOL {
                return Err(Error::NotPositive {
                    min: z.re.min(-z.im.abs()),
                    tolerance: CENTRAL_SQRT_ATOL,
                });
            }
            out.push(Complex64::new(z.re.max(0.0).sqrt(), 0.0));
        }
        Ok(CentralElement {
            signature: self.signature.clone(),
            scalars: out,
        })
    }

    pub fn norm(&self) -> f64 {
        self.scalars.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Projection in the center: a 0/1 mask over blocks, cutting out the
/// two-sided ideal qA.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CentralProjection {
    signature: AlgebraSignature,
    mask: Vec<bool>,
}

impl CentralProjection {
    pub fn new(signature: AlgebraSignature, mask: Vec<bool>) -> Result<Self> {
        if mask.len() != signature.num_blocks() {
            return Err(Error::BadShape {
                context: format!(
                    "expected {} mask entries, got {}",
                    signature.num_blocks(),
                    mask.len()
                ),
            });
        }
        Ok(Self { signature, mask })
    }

    /// The unit projection (the whole algebra).
    pub fn full(signature: &AlgebraSignature) -> Self {
        Self {
            signature: signature.clone(),
            mask: vec![true; signature.num_blocks()],
        }
    }

    pub fn signature(&self) -> &AlgebraSignature {
        &self.signature
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn is_active(&self, m: usize) -> bool {
        self.mask[m]
    }

    pub fn active_blocks(&self) -> impl Iterator<Item = usize> + '_ {
        self.mask
            .iter()
            .enumerate()
            .filter_map(|(m, &on)| on.then_some(m))
    }

    pub fn or(&self, other: &Self) -> Self {
        assert_eq!(self.signature, other.signature);
        Self {
            signature: self.signature.clone(),
            mask: self
                .mask
                .iter()
                .zip(&other.mask)
                .map(|(&a, &b)| a || b)
                .collect(),
        }
    }

    pub fn and(&self, other: &Self) -> Self {
        assert_eq!(self.signature, other.signature);
        Self {
            signature: self.signature.clone(),
            mask: self
                .mask
                .iter()
                .zip(&other.mask)
                .map(|(&a, &b)| a && b)
                .collect(),
        }
    }

    pub fn embed_central(&self) -> CentralElement {
        CentralElement {
            signature: self.signature.clone(),
            scalars: self
                .mask
                .iter()
                .map(|&on| if on { Complex64::ONE } else { Complex64::ZERO })
                .collect(),
        }
    }

    pub fn embed(&self) -> AlgebraElement {
        self.embed_central().embed()
    }
}
