//! Homogeneous systems that are real-linear in complex unknowns.
//!
//! A constraint here is a complex equation Σ_j a_j·y_j + b_j·conj(y_j) = 0.
//! Such equations are not ℂ-linear in y, but they are ℝ-linear, so the
//! solution set is a real subspace of ℂ^dim. We realify (two real unknowns
//! and two real equations per complex one) and extract the nullspace with a
//! column-pivoted QR, which keeps rank decisions stable when constraints are
//! ℂ-multiples of each other.

use num_complex::Complex64;

/// Complex equation Σ_j linear[j]·y_j + conjugate[j]·conj(y_j) = 0.
#[derive(Debug, Clone)]
pub struct RealLinearConstraint {
    pub linear: Vec<Complex64>,
    pub conjugate: Vec<Complex64>,
}

impl RealLinearConstraint {
    pub fn linear_only(coeffs: Vec<Complex64>) -> Self {
        let dim = coeffs.len();
        Self {
            linear: coeffs,
            conjugate: vec![Complex64::ZERO; dim],
        }
    }

    pub fn conjugate_only(coeffs: Vec<Complex64>) -> Self {
        let dim = coeffs.len();
        Self {
            linear: vec![Complex64::ZERO; dim],
            conjugate: coeffs,
        }
    }
}

/// Relative cutoff deciding which pivots count as rank.
pub const NULLSPACE_RTOL: f64 = 1e-12;

/// Real-orthonormal basis of the solution space, as complex vectors.
///
/// The real span of the returned vectors is the full solution set; a trivial
/// space yields an empty basis. Residual per basis vector stays below
/// 1e-10 times the constraint scale.
pub fn solve_real_linear(constraints: &[RealLinearConstraint], dim: usize) -> Vec<Vec<Complex64>> {
    let d = 2 * dim;
    let m = 2 * constraints.len();
    // Realified layout: z[2j] = Re y_j, z[2j+1] = Im y_j.
    let mut c = vec![0.0_f64; m * d];
    for (row, con) in constraints.iter().enumerate() {
        assert_eq!(con.linear.len(), dim, "constraint width mismatch");
        assert_eq!(con.conjugate.len(), dim, "constraint width mismatch");
        for j in 0..dim {
            let a = con.linear[j];
            let b = con.conjugate[j];
            // Real part of the equation.
            c[(2 * row) * d + 2 * j] = a.re + b.re;
            c[(2 * row) * d + 2 * j + 1] = -a.im + b.im;
            // Imaginary part.
            c[(2 * row + 1) * d + 2 * j] = a.im + b.im;
            c[(2 * row + 1) * d + 2 * j + 1] = a.re - b.re;
        }
    }

    let real_basis = real_nullspace(&mut c, m, d, NULLSPACE_RTOL);
    real_basis
        .into_iter()
        .map(|z| {
            (0..dim)
                .map(|j| Complex64::new(z[2 * j], z[2 * j + 1]))
                .collect()
        })
        .collect()
}

/// Orthonormal nullspace basis of an m×d real matrix (row-major, consumed).
fn real_nullspace(c: &mut [f64], m: usize, d: usize, rtol: f64) -> Vec<Vec<f64>> {
    let mut perm: Vec<usize> = (0..d).collect();
    let steps = m.min(d);
    let mut rank = 0;
    let mut first_pivot = 0.0_f64;

    for k in 0..steps {
        // Pivot: trailing column with the largest norm below row k.
        let mut best = k;
        let mut best_norm = 0.0;
        for j in k..d {
            let norm: f64 = (k..m).map(|i| c[i * d + j] * c[i * d + j]).sum::<f64>();
            if norm > best_norm {
                best_norm = norm;
                best = j;
            }
        }
        let pivot = best_norm.sqrt();
        if k == 0 {
            first_pivot = pivot;
        }
        if pivot <= rtol * first_pivot || pivot == 0.0 {
            break;
        }
        if best != k {
            for i in 0..m {
                c.swap(i * d + k, i * d + best);
            }
            perm.swap(k, best);
        }
        // Householder zeroing column k below row k.
        let mut v: Vec<f64> = (k..m).map(|i| c[i * d + k]).collect();
        let alpha = -v[0].signum() * pivot;
        v[0] -= alpha;
        let vnorm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if vnorm > 0.0 {
            for x in v.iter_mut() {
                *x /= vnorm;
            }
            for j in k..d {
                let dot: f64 = v
                    .iter()
                    .enumerate()
                    .map(|(i, x)| x * c[(k + i) * d + j])
                    .sum();
                for (i, x) in v.iter().enumerate() {
                    c[(k + i) * d + j] -= 2.0 * x * dot;
                }
            }
        }
        c[k * d + k] = alpha;
        for i in k + 1..m {
            c[i * d + k] = 0.0;
        }
        rank = k + 1;
    }

    // Back-substitute one basis vector per free (permuted) column.
    let mut basis = Vec::with_capacity(d - rank);
    for f in rank..d {
        let mut zp = vec![0.0_f64; d];
        zp[f] = 1.0;
        for i in (0..rank).rev() {
            let mut acc = c[i * d + f];
            for j in i + 1..rank {
                acc += c[i * d + j] * zp[j];
            }
            zp[i] = -acc / c[i * d + i];
        }
        let mut z = vec![0.0_f64; d];
        for (t, &col) in perm.iter().enumerate() {
            z[col] = zp[t];
        }
        basis.push(z);
    }

    // Modified Gram-Schmidt, two passes.
    let mut ortho: Vec<Vec<f64>> = Vec::with_capacity(basis.len());
    for mut z in basis {
        for _ in 0..2 {
            for b in &ortho {
                let dot: f64 = b.iter().zip(&z).map(|(x, y)| x * y).sum();
                for (x, y) in b.iter().zip(z.iter_mut()) {
                    *y -= dot * x;
                }
            }
        }
        let norm = z.iter().map(|x| x * x).sum::<f64>().sqrt();
        // Free columns of a rank-revealed system stay independent; the norm
        // cannot collapse unless the rank cut was wrong.
        assert!(norm > 1e-8, "nullspace basis degenerated");
        for x in z.iter_mut() {
            *x /= norm;
        }
        ortho.push(z);
    }
    ortho
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn constraint_residual(cons: &[RealLinearConstraint], y: &[Complex64]) -> f64 {
        cons.iter()
            .map(|con| {
                let val: Complex64 = con
                    .linear
                    .iter()
                    .zip(y)
                    .map(|(a, yj)| a * yj)
                    .sum::<Complex64>()
                    + con
                        .conjugate
                        .iter()
                        .zip(y)
                        .map(|(b, yj)| b * yj.conj())
                        .sum::<Complex64>();
                val.norm()
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn unconstrained_dim_one_gives_one_and_i() {
        let basis = solve_real_linear(&[], 1);
        assert_eq!(basis.len(), 2);
        assert_eq!(basis[0], vec![c(1.0, 0.0)]);
        assert_eq!(basis[1], vec![c(0.0, 1.0)]);
    }

    #[test]
    fn single_coordinate_constraint() {
        // y₁ = 0 over dim 2: solutions are (0, α).
        let cons = vec![RealLinearConstraint::linear_only(vec![
            c(1.0, 0.0),
            c(0.0, 0.0),
        ])];
        let basis = solve_real_linear(&cons, 2);
        assert_eq!(basis.len(), 2);
        for v in &basis {
            assert!(v[0].norm() < 1e-12);
            assert!(v[1].norm() > 0.99);
        }
    }

    #[test]
    fn complex_dependent_pair_keeps_real_dimension_two() {
        // y₁ + y₂ = 0 together with its ℂ-multiple i·(y₁ + y₂) = 0: the
        // realified 4×4 system has rank 2, so the solution set {(α, −α)}
        // keeps real dimension 2.
        let cons = vec![
            RealLinearConstraint::linear_only(vec![c(1.0, 0.0), c(1.0, 0.0)]),
            RealLinearConstraint::linear_only(vec![c(0.0, 1.0), c(0.0, 1.0)]),
        ];
        let basis = solve_real_linear(&cons, 2);
        assert_eq!(basis.len(), 2);
        for v in &basis {
            assert!((v[0] + v[1]).norm() < 1e-12, "not of the form (α, −α)");
            assert!(constraint_residual(&cons, v) < 1e-10);
        }
    }

    #[test]
    fn conjugate_constraint_is_honored() {
        // conj(y₁) = y₂ has real solution dimension 2 in ℂ².
        let cons = vec![RealLinearConstraint {
            linear: vec![c(0.0, 0.0), c(-1.0, 0.0)],
            conjugate: vec![c(1.0, 0.0), c(0.0, 0.0)],
        }];
        let basis = solve_real_linear(&cons, 2);
        assert_eq!(basis.len(), 2);
        for v in &basis {
            assert!((v[0].conj() - v[1]).norm() < 1e-12);
        }
    }

    #[test]
    fn full_rank_system_has_trivial_space() {
        let cons = vec![
            RealLinearConstraint::linear_only(vec![c(1.0, 0.0)]),
            RealLinearConstraint::conjugate_only(vec![c(1.0, 0.0)]),
        ];
        let basis = solve_real_linear(&cons, 1);
        assert!(basis.is_empty());
    }

    #[test]
    fn random_system_residuals_stay_small() {
        // Fixed pseudo-random but deterministic coefficients.
        let mut state = 0x9e3779b97f4a7c15_u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        for _ in 0..20 {
            let dim = 4;
            let cons: Vec<RealLinearConstraint> = (0..2)
                .map(|_| RealLinearConstraint {
                    linear: (0..dim).map(|_| c(next(), next())).collect(),
                    conjugate: (0..dim).map(|_| c(next(), next())).collect(),
                })
                .collect();
            let basis = solve_real_linear(&cons, dim);
            assert_eq!(basis.len(), 2 * dim - 4);
            for v in &basis {
                assert!(constraint_residual(&cons, v) < 1e-10);
            }
        }
    }
}
