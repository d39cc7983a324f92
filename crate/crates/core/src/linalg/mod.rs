//! Dense complex-matrix primitives: spectral norm, PSD square root, polar
//! decomposition, and real-linear solving. Everything here is pure and
//! deterministic; the polar completion rule is pinned so rank-deficient
//! inputs reproduce bit-identical factors across runs.

mod eigen;
mod matrix;
mod solve;

pub use eigen::{complete_orthonormal_basis, fix_phase, hermitian_eigen, qr_unitary, HermitianEigen};
pub use matrix::ComplexMatrix;
pub use solve::{solve_real_linear, RealLinearConstraint, NULLSPACE_RTOL};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative hermiticity tolerance for inputs declared hermitian.
pub const HERMITIAN_RTOL: f64 = 1e-12;
/// Eigenvalues of a PSD candidate may undershoot zero by this times its norm.
pub const PSD_EIG_RTOL: f64 = 1e-10;
/// Singular values at or below this times the largest one count as kernel.
pub const POLAR_RANK_RTOL: f64 = 1e-12;

/// Largest singular value. Empty matrices have norm 0.
pub fn spectral_norm(m: &ComplexMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    // Work on the smaller Gram matrix of the two.
    let gram = if m.rows() <= m.cols() {
        m.mul(&m.adjoint())
    } else {
        m.adjoint().mul(m)
    };
    let eig = hermitian_eigen(&gram);
    eig.values.last().copied().unwrap_or(0.0).max(0.0).sqrt()
}

/// Hermitian PSD square root.
///
/// Eigenvalues within `PSD_EIG_RTOL·‖m‖` below zero are clamped; anything
/// lower is rejected as `NotPositive`.
pub fn psd_sqrt(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    psd_sqrt_with_tol(m, PSD_EIG_RTOL)
}

pub fn psd_sqrt_with_tol(m: &ComplexMatrix, eig_rtol: f64) -> Result<ComplexMatrix> {
    if !m.is_square() {
        return Err(Error::BadShape {
            context: format!("psd_sqrt needs a square matrix, got {}x{}", m.rows(), m.cols()),
        });
    }
    if m.is_empty() {
        return Ok(m.clone());
    }
    let scale = m.frobenius_norm();
    let dev = m.hermitian_deviation();
    let herm_tol = HERMITIAN_RTOL * (1.0 + scale);
    if dev > herm_tol {
        return Err(Error::NotHermitian {
            deviation: dev,
            tolerance: herm_tol,
        });
    }
    let eig = hermitian_eigen(m);
    let norm = eig
        .values
        .iter()
        .map(|v| v.abs())
        .fold(0.0, f64::max);
    let floor = -eig_rtol * norm;
    if let Some(&min) = eig.values.first() {
        if min < floor {
            return Err(Error::NotPositive {
                min,
                tolerance: -floor,
            });
        }
    }
    let n = m.rows();
    let mut d = ComplexMatrix::zeros(n, n);
    for (i, &v) in eig.values.iter().enumerate() {
        d[(i, i)] = Complex64::new(v.max(0.0).sqrt(), 0.0);
    }
    Ok(eig.vectors.mul(&d).mul(&eig.vectors.adjoint()).hermitize())
}

/// Polar factors (u, p) with m = u·p, u unitary, p = (m*m)^{1/2}.
///
/// On ker(p) the partial isometry is completed to a unitary by pairing the
/// kernel's right singular vectors, in index order, with a Gram-Schmidt
/// completion of the range over the standard basis; vector phases are fixed
/// so the first significant coordinate is positive real. The zero matrix
/// therefore yields (I, 0).
pub fn polar_decompose(m: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    assert!(m.is_square(), "polar decomposition needs a square matrix");
    let n = m.rows();
    if n == 0 {
        return (m.clone(), m.clone());
    }

    let gram = m.adjoint().mul(m);
    let eig = hermitian_eigen(&gram);

    // Descending singular values; stable order keeps degenerate cases pinned.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.values[j].partial_cmp(&eig.values[i]).unwrap());
    let sigmas: Vec<f64> = order
        .iter()
        .map(|&i| eig.values[i].max(0.0).sqrt())
        .collect();
    let right: Vec<Vec<Complex64>> = order.iter().map(|&i| eig.vectors.column(i)).collect();

    let sigma_max = sigmas.first().copied().unwrap_or(0.0);
    let cutoff = sigma_max * POLAR_RANK_RTOL;

    // Range vectors u_i = m·w_i/σ_i, re-orthonormalized in order.
    let mut left: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    let mut rank = 0;
    for (w, &sigma) in right.iter().zip(&sigmas) {
        if sigma <= cutoff {
            break;
        }
        let mut u = vec![Complex64::ZERO; n];
        for i in 0..n {
            let mut acc = Complex64::ZERO;
            for (k, &wk) in w.iter().enumerate() {
                acc += m[(i, k)] * wk;
            }
            u[i] = acc / sigma;
        }
        for _ in 0..2 {
            for prev in &left {
                let dot: Complex64 = prev.iter().zip(&u).map(|(p, x)| p.conj() * x).sum();
                for (p, x) in prev.iter().zip(u.iter_mut()) {
                    *x -= dot * p;
                }
            }
        }
        let norm = u.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.0 {
            for z in u.iter_mut() {
                *z /= norm;
            }
        }
        left.push(u);
        rank += 1;
    }
    let completion = complete_orthonormal_basis(&left, n, n - rank);
    left.extend(completion);

    let mut u = ComplexMatrix::zeros(n, n);
    for (ui, wi) in left.iter().zip(&right) {
        for r in 0..n {
            for c in 0..n {
                u[(r, c)] += ui[r] * wi[c].conj();
            }
        }
    }

    let mut p = ComplexMatrix::zeros(n, n);
    for (wi, &sigma) in right.iter().zip(&sigmas) {
        for r in 0..n {
            for c in 0..n {
                p[(r, c)] += sigma * wi[r] * wi[c].conj();
            }
        }
    }
    (u, p.hermitize())
}
