//! Hermitian eigendecomposition (cyclic Jacobi) and unitary QR factors.
//!
//! Jacobi is chosen over Householder tridiagonalization because the block
//! dimensions here stay small (≤ ~64) and Jacobi delivers eigenvectors with
//! excellent orthogonality and a fully deterministic rotation order.

use num_complex::Complex64;

use super::matrix::ComplexMatrix;

const MAX_SWEEPS: usize = 100;

/// Eigendecomposition of a hermitian matrix: `m = V diag(values) V*`.
///
/// Eigenvalues ascend; `vectors` holds the eigenvectors as columns, each with
/// its first significant coordinate rotated to the positive real axis.
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

/// Cyclic-by-row complex Jacobi. The input is hermitized first; callers that
/// care about hermiticity validate it before calling.
pub fn hermitian_eigen(m: &ComplexMatrix) -> HermitianEigen {
    assert!(m.is_square(), "eigendecomposition needs a square matrix");
    let n = m.rows();
    let mut a = m.hermitize();
    let mut v = ComplexMatrix::identity(n);

    let scale = a.frobenius_norm();
    if n > 1 && scale > 0.0 {
        let stop = scale * (n as f64) * f64::EPSILON;
        for _ in 0..MAX_SWEEPS {
            if off_diagonal_norm(&a) <= stop {
                break;
            }
            for p in 0..n - 1 {
                for q in p + 1..n {
                    rotate(&mut a, &mut v, p, q);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.partial_cmp(&a[(j, j)].re).unwrap());

    let values: Vec<f64> = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = v.column(src);
        fix_phase(&mut col);
        vectors.set_column(dst, &col);
    }
    HermitianEigen { values, vectors }
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut acc = 0.0;
    for p in 0..n {
        for q in p + 1..n {
            acc += 2.0 * a[(p, q)].norm_sqr();
        }
    }
    acc.sqrt()
}

/// One Jacobi rotation annihilating a[(p, q)]: a ← J* a J, v ← v J, where the
/// unitary J mixes a real Givens rotation with the phase of a[(p, q)].
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let b = a[(p, q)];
    let babs = b.norm();
    if babs == 0.0 {
        return;
    }
    let u = b / babs;
    let tau = (a[(q, q)].re - a[(p, p)].re) / (2.0 * babs);
    let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    let n = a.rows();
    let ubar_s = u.conj() * s;
    let ubar_c = u.conj() * c;

    // Column update: a ← a·J and v ← v·J.
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c - akq * ubar_s;
        a[(k, q)] = akp * s + akq * ubar_c;

        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c - vkq * ubar_s;
        v[(k, q)] = vkp * s + vkq * ubar_c;
    }
    // Row update: a ← J*·a.
    let u_s = u * s;
    let u_c = u * c;
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c - aqk * u_s;
        a[(q, k)] = apk * s + aqk * u_c;
    }
    // Clean the rotated pair so round-off cannot accumulate off the diagonal.
    a[(p, q)] = Complex64::ZERO;
    a[(q, p)] = Complex64::ZERO;
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
}

/// Rotate a vector so its first significant coordinate is positive real.
pub fn fix_phase(col: &mut [Complex64]) {
    let max = col.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return;
    }
    let lead = col.iter().find(|z| z.norm() > 1e-12 * max).copied();
    if let Some(z) = lead {
        let phase = z.conj() / z.norm();
        for entry in col.iter_mut() {
            *entry *= phase;
        }
    }
}

/// Unitary factor of a Householder QR, with phases chosen so the diagonal of
/// R is nonnegative real. For full-rank input this pins Q uniquely.
pub fn qr_unitary(m: &ComplexMatrix) -> ComplexMatrix {
    assert!(m.is_square());
    let n = m.rows();
    let mut r = m.clone();
    let mut q = ComplexMatrix::identity(n);

    for j in 0..n {
        // Householder vector for column j below the diagonal.
        let mut x: Vec<Complex64> = (j..n).map(|i| r[(i, j)]).collect();
        let xnorm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if xnorm == 0.0 {
            continue;
        }
        let x0 = x[0];
        let phase = if x0.norm() > 0.0 {
            x0 / x0.norm()
        } else {
            Complex64::ONE
        };
        let alpha = -phase * xnorm;
        x[0] -= alpha;
        let vnorm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        for z in x.iter_mut() {
            *z /= vnorm;
        }
        // r ← (I − 2vv*) r on the trailing block, q ← q (I − 2vv*).
        for col in j..n {
            let dot: Complex64 = x
                .iter()
                .enumerate()
                .map(|(i, z)| z.conj() * r[(j + i, col)])
                .sum();
            for (i, z) in x.iter().enumerate() {
                let val = r[(j + i, col)] - 2.0 * z * dot;
                r[(j + i, col)] = val;
            }
        }
        for row in 0..n {
            let dot: Complex64 = x
                .iter()
                .enumerate()
                .map(|(i, z)| q[(row, j + i)] * z)
                .sum();
            for (i, z) in x.iter().enumerate() {
                let val = q[(row, j + i)] - 2.0 * dot * z.conj();
                q[(row, j + i)] = val;
            }
        }
    }

    // Absorb the diagonal phases of R into Q.
    for j in 0..n {
        let d = r[(j, j)];
        if d.norm() > 0.0 {
            let phase = d / d.norm();
            for i in 0..n {
                q[(i, j)] *= phase;
            }
        }
    }
    q
}

/// Extend `existing` (orthonormal columns) to an orthonormal basis of ℂⁿ by
/// Gram-Schmidt over the standard basis in index order. Returns the `count`
/// appended vectors.
pub fn complete_orthonormal_basis(
    existing: &[Vec<Complex64>],
    n: usize,
    count: usize,
) -> Vec<Vec<Complex64>> {
    let mut basis: Vec<Vec<Complex64>> = existing.to_vec();
    let mut appended = Vec::with_capacity(count);
    for j in 0..n {
        if appended.len() == count {
            break;
        }
        let mut v = vec![Complex64::ZERO; n];
        v[j] = Complex64::ONE;
        // Project twice so near-parallel candidates still come out orthogonal.
        for _ in 0..2 {
            for b in &basis {
                let dot: Complex64 = b.iter().zip(&v).map(|(bi, vi)| bi.conj() * vi).sum();
                for (bi, vi) in b.iter().zip(v.iter_mut()) {
                    *vi -= dot * bi;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-3 {
            for z in v.iter_mut() {
                *z /= norm;
            }
            fix_phase(&mut v);
            basis.push(v.clone());
            appended.push(v);
        }
    }
    assert_eq!(
        appended.len(),
        count,
        "orthonormal completion ran out of candidates"
    );
    appended
}
