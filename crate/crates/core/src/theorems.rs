//! Structural decisions for module operators: orthogonality preservation
//! with its central multiplier κ, the scaled-isometry decomposition T = λV,
//! and the C*-conformal / conformal characterizations.
//!
//! The orthogonality decision uses the equality form: T preserves
//! orthogonality exactly when its Gram kernel is the identity kernel scaled
//! by a central positive κ, so that `⟨Tx,Ty⟩ = κ·⟨x,y⟩` for all x, y. That
//! form is finitely checkable blockwise. The definitional quantifier over
//! orthogonal pairs is exercised independently by the sampled oracles below,
//! and the test batteries verify that both routes agree.

use num_complex::Complex64;
use rand::Rng;

use crate::algebra::{AlgebraElement, AlgebraSignature, CentralElement, CentralProjection};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, spectral_norm, ComplexMatrix};
use crate::module::{ModuleSignature, ModuleVector};
use crate::operator::ModuleOperator;
use crate::rng::trial_rng;

/// Default relative tolerance of the structural decisions.
pub const DEFAULT_TOL: f64 = 1e-8;
/// Deviation ceiling for the sampled definitional checks.
pub const SAMPLED_TOL: f64 = 1e-8;
/// An operator is injective when its smallest singular value exceeds this
/// times its norm.
pub const INJECTIVITY_RTOL: f64 = 1e-8;

const DIV_GUARD: f64 = 1e-30;

/// How a Gram kernel fails the scaled-identity pattern.
#[derive(Debug, Clone, PartialEq)]
pub enum ViolationKind {
    /// `G_{il} ≠ 0` for components i ≠ l.
    OffDiagonal { row: usize, col: usize, block: usize },
    /// A diagonal entry is not a scalar on some block.
    NonCentralDiagonal { component: usize, block: usize },
    /// Two components see different scalars on a shared block.
    ScalarMismatch {
        block: usize,
        component_a: usize,
        component_b: usize,
    },
    /// A candidate scalar dipped below the tolerance floor.
    NegativeScalar { block: usize },
}

/// Concrete orthogonal pair witnessing a violation: `⟨x,y⟩ ≈ 0` while
/// `⟨Tx,Ty⟩` stays away from zero.
#[derive(Debug, Clone)]
pub struct WitnessPair {
    pub x: ModuleVector,
    pub y: ModuleVector,
    /// `‖⟨x,y⟩‖`, numerically zero.
    pub input_overlap: f64,
    /// `‖⟨Tx,Ty⟩‖`, bounded away from zero.
    pub output_overlap: f64,
}

#[derive(Debug, Clone)]
pub struct OpViolation {
    pub kind: ViolationKind,
    /// Magnitude of the offending Gram defect.
    pub defect: f64,
    pub witness: Option<WitnessPair>,
}

/// Outcome of the orthogonality-preservation decision.
#[derive(Debug, Clone)]
pub struct OpCertificate {
    pub verdict: bool,
    /// Central positive multiplier with `⟨Tx,Ty⟩ = κ⟨x,y⟩`; zero on blocks
    /// outside the module support. Present iff the verdict is true.
    pub kappa: Option<CentralElement>,
    pub violation: Option<OpViolation>,
    /// True when the module is not full and the decision was restricted to
    /// the support ideal.
    pub restricted: bool,
}

impl OpCertificate {
    fn refused(restricted: bool, violation: OpViolation) -> Self {
        Self {
            verdict: false,
            kappa: None,
            violation: Some(violation),
            restricted,
        }
    }
}

/// Gram-centrality decision: verdict true iff the off-diagonal Gram entries
/// vanish, every diagonal entry is a scalar per active block, and the scalars
/// agree across components sharing a block — all within `tol·(1+‖T‖²)`.
/// Failures come with a concrete orthogonal witness pair.
pub fn decide_orthogonality_preserving(op: &ModuleOperator, tol: f64) -> OpCertificate {
    let sig = op.signature();
    let algebra = sig.algebra();
    let scale = tol * (1.0 + op.norm().powi(2));
    let restricted = !sig.is_full();
    let gram = op.gram();
    let n = sig.rank();

    for i in 0..n {
        for l in 0..n {
            if i == l {
                continue;
            }
            let g = gram.entry(i, l);
            let defect = g.norm();
            if defect > scale {
                let block = (0..algebra.num_blocks())
                    .max_by(|&a, &b| {
                        spectral_norm(g.block(a))
                            .partial_cmp(&spectral_norm(g.block(b)))
                            .unwrap()
                    })
                    .unwrap();
                let witness = off_diagonal_witness(op, i, l, block);
                return OpCertificate::refused(
                    restricted,
                    OpViolation {
                        kind: ViolationKind::OffDiagonal { row: i, col: l, block },
                        defect,
                        witness,
                    },
                );
            }
        }
    }

    let mut kappa = vec![0.0_f64; algebra.num_blocks()];
    for (m, kappa_slot) in kappa.iter_mut().enumerate() {
        let active: Vec<usize> = (0..n)
            .filter(|&i| sig.component(i).is_active(m))
            .collect();
        if active.is_empty() {
            continue;
        }
        let nm = algebra.block_dim(m);
        let mut scalars: Vec<Complex64> = Vec::with_capacity(active.len());
        for &i in &active {
            let g = gram.entry(i, i).block(m);
            let scalar = g.trace() / nm as f64;
            let mut centered = g.clone();
            for d in 0..nm {
                centered[(d, d)] -= scalar;
            }
            let defect = spectral_norm(&centered);
            if defect > scale {
                let witness = non_central_witness(op, i, m, g);
                return OpCertificate::refused(
                    restricted,
                    OpViolation {
                        kind: ViolationKind::NonCentralDiagonal { component: i, block: m },
                        defect,
                        witness,
                    },
                );
            }
            scalars.push(scalar);
        }

        let mut hi = 0usize;
        let mut lo = 0usize;
        for (pos, s) in scalars.iter().enumerate() {
            if s.re > scalars[hi].re {
                hi = pos;
            }
            if s.re < scalars[lo].re {
                lo = pos;
            }
        }
        let spread = (scalars[hi] - scalars[lo]).norm();
        if spread > scale {
            let witness = scalar_mismatch_witness(op, active[hi], active[lo], m);
            return OpCertificate::refused(
                restricted,
                OpViolation {
                    kind: ViolationKind::ScalarMismatch {
                        block: m,
                        component_a: active[hi],
                        component_b: active[lo],
                    },
                    defect: spread,
                    witness,
                },
            );
        }

        let mean = scalars.iter().map(|s| s.re).sum::<f64>() / scalars.len() as f64;
        if mean < -scale {
            return OpCertificate::refused(
                restricted,
                OpViolation {
                    kind: ViolationKind::NegativeScalar { block: m },
                    defect: -mean,
                    witness: None,
                },
            );
        }
        *kappa_slot = mean.max(0.0);
    }

    let kappa = CentralElement::from_real(algebra.clone(), kappa).expect("finite scalars");
    OpCertificate {
        verdict: true,
        kappa: Some(kappa),
        violation: None,
        restricted,
    }
}

/// Algebra element equal to the identity on block m, zero elsewhere.
fn unit_at_block(algebra: &AlgebraSignature, m: usize) -> AlgebraElement {
    let mut e = AlgebraElement::zeros(algebra);
    let nm = algebra.block_dim(m);
    e.block_mut(m).set_block(0, 0, &ComplexMatrix::identity(nm));
    e
}

fn checked_witness(op: &ModuleOperator, x: ModuleVector, y: ModuleVector) -> Option<WitnessPair> {
    let input = x.inner_product(&y).ok()?.norm();
    let tx = op.apply(&x).ok()?;
    let ty = op.apply(&y).ok()?;
    let output = tx.inner_product(&ty).ok()?.norm();
    Some(WitnessPair {
        x,
        y,
        input_overlap: input,
        output_overlap: output,
    })
}

/// Witness for `G_{il} ≠ 0`: units of block m planted in components i and l.
fn off_diagonal_witness(
    op: &ModuleOperator,
    i: usize,
    l: usize,
    block: usize,
) -> Option<WitnessPair> {
    let sig = op.signature();
    let e = unit_at_block(sig.algebra(), block);
    let mut x = ModuleVector::zeros(sig);
    *x.component_mut(i) = e.clone().masked(sig.component(i));
    let mut y = ModuleVector::zeros(sig);
    *y.component_mut(l) = e.masked(sig.component(l));
    checked_witness(op, x, y)
}

/// Witness for a non-scalar diagonal block g: orthogonal vectors u ± v built
/// from extreme eigenvectors of g satisfy `u ⊥ v` while `u*·g·v ≠ 0`.
fn non_central_witness(
    op: &ModuleOperator,
    component: usize,
    block: usize,
    g: &ComplexMatrix,
) -> Option<WitnessPair> {
    let sig = op.signature();
    let nm = sig.algebra().block_dim(block);
    if nm < 2 {
        return None;
    }
    let eig = hermitian_eigen(g);
    let w_lo = eig.vectors.column(0);
    let w_hi = eig.vectors.column(nm - 1);
    // Rows of the component matrices carry the pairing, so plant u* and v*
    // as first rows.
    let mut xm = ComplexMatrix::zeros(nm, nm);
    let mut ym = ComplexMatrix::zeros(nm, nm);
    for c in 0..nm {
        xm[(0, c)] = (w_hi[c] + w_lo[c]).conj();
        ym[(0, c)] = (w_hi[c] - w_lo[c]).conj();
    }
    let mut xe = AlgebraElement::zeros(sig.algebra());
    xe.block_mut(block).set_block(0, 0, &xm);
    let mut ye = AlgebraElement::zeros(sig.algebra());
    ye.block_mut(block).set_block(0, 0, &ym);
    let mut x = ModuleVector::zeros(sig);
    *x.component_mut(component) = xe;
    let mut y = ModuleVector::zeros(sig);
    *y.component_mut(component) = ye;
    checked_witness(op, x, y)
}

/// Witness for diverging scalars on a shared block: the pair
/// x = (e, e), y = (e, −e) planted in the two components.
fn scalar_mismatch_witness(
    op: &ModuleOperator,
    comp_a: usize,
    comp_b: usize,
    block: usize,
) -> Option<WitnessPair> {
    let sig = op.signature();
    let mut e = AlgebraElement::zeros(sig.algebra());
    e.block_mut(block)[(0, 0)] = Complex64::ONE;
    let mut x = ModuleVector::zeros(sig);
    *x.component_mut(comp_a) = e.clone();
    *x.component_mut(comp_b) = e.clone();
    let mut y = ModuleVector::zeros(sig);
    *y.component_mut(comp_a) = e.clone();
    *y.component_mut(comp_b) = e.scale(-Complex64::ONE);
    checked_witness(op, x, y)
}

/// Central multiplier κ of an orthogonality-preserving operator.
pub fn extract_kappa(op: &ModuleOperator) -> Result<CentralElement> {
    let cert = decide_orthogonality_preserving(op, DEFAULT_TOL);
    match cert.kappa {
        Some(kappa) if cert.verdict => Ok(kappa),
        _ => Err(Error::NotOrthogonalityPreserving {
            reason: cert
                .violation
                .map(|v| format!("{:?}, defect {:.3e}", v.kind, v.defect))
                .unwrap_or_else(|| "no certificate".into()),
        }),
    }
}

/// Scaled-isometry decomposition `T = λ·V`.
#[derive(Debug, Clone)]
pub struct LambdaVDecomposition {
    pub lambda: CentralElement,
    pub isometry: ModuleOperator,
    /// Blocks where λ exceeds the tolerance; V is pinned to the identity
    /// pattern on the others.
    pub support: CentralProjection,
}

impl LambdaVDecomposition {
    pub fn reconstruct(&self) -> ModuleOperator {
        self.isometry.scale_central(&self.lambda)
    }
}

/// Factor an orthogonality-preserving T as λ·V with λ = √κ central positive
/// and V an isometry.
///
/// On blocks with `λ_m > tol` the isometry kernel is `t_{ij}/λ_m`; on the
/// rest it is completed with the identity pattern `δ_{ij}·q_i`, which keeps V
/// isometric on the whole module while `T = λV` still holds there because T
/// itself is negligible on those blocks.
pub fn decompose_lambda_v(op: &ModuleOperator, tol: f64) -> Result<LambdaVDecomposition> {
    let cert = decide_orthogonality_preserving(op, tol);
    let kappa = match cert.kappa {
        Some(kappa) if cert.verdict => kappa,
        _ => {
            return Err(Error::NotOrthogonalityPreserving {
                reason: cert
                    .violation
                    .map(|v| format!("{:?}, defect {:.3e}", v.kind, v.defect))
                    .unwrap_or_else(|| "no certificate".into()),
            })
        }
    };
    let lambda = kappa.sqrt()?;

    let sig = op.signature();
    let algebra = sig.algebra();
    let support_mask: Vec<bool> = lambda.scalars().iter().map(|z| z.re > tol).collect();
    let support = CentralProjection::new(algebra.clone(), support_mask)?;

    let n = sig.rank();
    let mut v = ModuleOperator::zero(sig);
    for i in 0..n {
        for j in 0..n {
            let ideal = sig.component(i).and(sig.component(j));
            let mut entry = AlgebraElement::zeros(algebra);
            for m in 0..algebra.num_blocks() {
                if support.is_active(m) {
                    if ideal.is_active(m) {
                        let scaled = op.entry(i, j).block(m).scale(Complex64::new(
                            1.0 / lambda.scalar(m).re,
                            0.0,
                        ));
                        entry.block_mut(m).set_block(0, 0, &scaled);
                    }
                } else if i == j && sig.component(i).is_active(m) {
                    let nm = algebra.block_dim(m);
                    entry.block_mut(m).set_block(0, 0, &ComplexMatrix::identity(nm));
                }
            }
            v.set_entry(i, j, entry);
        }
    }
    Ok(LambdaVDecomposition {
        lambda,
        isometry: v,
        support,
    })
}

/// Verdict of a conformality decision, with the isometry scale when true.
#[derive(Debug, Clone)]
pub struct ConformalDecision {
    pub verdict: bool,
    /// The positive real t with T = t·(isometry), when conformal.
    pub scale: Option<f64>,
    pub injective: bool,
    pub certificate: OpCertificate,
}

/// Structural C*-conformality: T is a positive real multiple of an isometry
/// iff it preserves orthogonality, κ is one strictly positive scalar across
/// the supported blocks, and T is injective.
pub fn decide_cstar_conformal(op: &ModuleOperator, tol: f64) -> ConformalDecision {
    let cert = decide_orthogonality_preserving(op, tol);
    let norm = op.norm();
    let injective = norm > 0.0 && op.min_singular_value() > INJECTIVITY_RTOL * norm;
    let scalar = cert
        .kappa
        .as_ref()
        .and_then(|kappa| scalar_kappa(kappa, op.signature(), tol));
    let verdict = cert.verdict && injective && scalar.is_some();
    ConformalDecision {
        verdict,
        scale: if verdict { scalar.map(f64::sqrt) } else { None },
        injective,
        certificate: cert,
    }
}

/// Structural conformality. The criterion coincides with the C*-conformal
/// one: both properties hold exactly for positive real multiples of
/// isometries, so one decision procedure serves both. The sampled checks
/// below keep the two definitions distinguishable.
pub fn decide_conformal(op: &ModuleOperator, tol: f64) -> ConformalDecision {
    decide_cstar_conformal(op, tol)
}

/// The single scalar value of κ across supported blocks, if it is one.
fn scalar_kappa(kappa: &CentralElement, sig: &ModuleSignature, tol: f64) -> Option<f64> {
    let values: Vec<f64> = (0..sig.algebra().num_blocks())
        .filter(|&m| sig.multiplicity(m) > 0)
        .map(|m| kappa.scalar(m).re)
        .collect();
    let hi = values.iter().cloned().fold(f64::MIN, f64::max);
    let lo = values.iter().cloned().fold(f64::MAX, f64::min);
    if hi - lo <= tol * (1.0 + hi) && lo > tol {
        Some(values.iter().sum::<f64>() / values.len() as f64)
    } else {
        None
    }
}

/// Result of a sampled definitional orthogonality check.
#[derive(Debug, Clone)]
pub struct SampledOpCheck {
    pub verdict: bool,
    pub worst_deviation: f64,
    pub violating_trials: usize,
    pub first_violation: Option<usize>,
    pub trials: usize,
}

/// Definitional oracle: draw random x, sample y ⊥ x, and measure
/// `‖⟨Tx,Ty⟩‖ / (‖T‖²‖x‖‖y‖)`. Verdict true iff the worst deviation stays
/// below `SAMPLED_TOL`. Entirely independent of the Gram-centrality route.
pub fn sampled_op_check(op: &ModuleOperator, trials: usize, seed: u64) -> SampledOpCheck {
    assert!(trials >= 1, "need at least one trial");
    let sig = op.signature();
    let norm = op.norm();
    let mut worst = 0.0_f64;
    let mut violating = 0usize;
    let mut first = None;
    for trial in 0..trials {
        let mut rng = trial_rng(seed, trial as u64);
        let x = probe_vector(sig, &mut rng);
        if x.norm() < 1e-12 {
            continue;
        }
        let y_seed: u64 = rng.random();
        let y = match x.orthogonal_sample(y_seed) {
            Ok(Some(y)) => y,
            _ => continue,
        };
        let tx = op.apply(&x).expect("same signature");
        let ty = op.apply(&y).expect("same signature");
        let overlap = tx.inner_product(&ty).expect("same signature").norm();
        let deviation = overlap / (norm.powi(2) * x.norm() * y.norm() + DIV_GUARD);
        if deviation > worst {
            worst = deviation;
        }
        if deviation > SAMPLED_TOL {
            violating += 1;
            if first.is_none() {
                first = Some(trial);
            }
        }
    }
    SampledOpCheck {
        verdict: worst <= SAMPLED_TOL,
        worst_deviation: worst,
        violating_trials: violating,
        first_violation: first,
        trials,
    }
}

/// Probe distribution for the definitional oracle: mostly plain gaussians,
/// with a third of the draws row-compressed on one active component block.
/// The compression makes the orthogonal complement nontrivial even on
/// multiplicity-one blocks, where a generic vector has full row rank and no
/// orthogonal partner at all.
fn probe_vector<R: Rng + ?Sized>(sig: &ModuleSignature, rng: &mut R) -> ModuleVector {
    let mut x = ModuleVector::random_gaussian(sig, rng);
    if rng.random_range(0..3) == 0 {
        let active: Vec<(usize, usize)> = (0..sig.rank())
            .flat_map(|i| {
                (0..sig.algebra().num_blocks())
                    .filter(move |&m| sig.component(i).is_active(m))
                    .map(move |m| (i, m))
            })
            .collect();
        if !active.is_empty() {
            let (i, m) = active[rng.random_range(0..active.len())];
            let nm = sig.algebra().block_dim(m);
            let mut w: Vec<Complex64> = (0..nm).map(|_| crate::rng::complex_gaussian(rng)).collect();
            let wn = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if wn > 0.0 {
                for z in w.iter_mut() {
                    *z /= wn;
                }
                // Right-multiply by (I − w·w*): removes w from the row space.
                let block = x.component(i).block(m).clone();
                let mut compressed = block.clone();
                for r in 0..nm {
                    let dot: Complex64 = (0..nm).map(|c| block[(r, c)] * w[c].conj()).sum();
                    for c in 0..nm {
                        compressed[(r, c)] -= dot * w[c];
                    }
                }
                x.component_mut(i).block_mut(m).set_block(0, 0, &compressed);
            }
        }
    }
    x
}

/// Result of a sampled conformality check.
#[derive(Debug, Clone)]
pub struct SampledConformalCheck {
    pub verdict: bool,
    pub injective: bool,
    /// Worst deviation seen; `None` when the injectivity gate already failed.
    pub worst_deviation: Option<f64>,
    pub trials: usize,
}

/// Sampled check of the C*-conformal identity
/// `⟨Tx,Ty⟩/(‖Tx‖‖Ty‖) = ⟨x,y⟩/(‖x‖‖y‖)`.
pub fn sampled_cstar_conformal_check(
    op: &ModuleOperator,
    trials: usize,
    seed: u64,
) -> SampledConformalCheck {
    sampled_conformal_impl(op, trials, seed, |txty, tx_n, ty_n, xy, x_n, y_n| {
        let lhs = txty.scale(Complex64::new(1.0 / (tx_n * ty_n), 0.0));
        let rhs = xy.scale(Complex64::new(1.0 / (x_n * y_n), 0.0));
        lhs.sub(&rhs).norm()
    })
}

/// Sampled check of the conformal identity
/// `‖⟨Tx,Ty⟩‖/(‖Tx‖‖Ty‖) = ‖⟨x,y⟩‖/(‖x‖‖y‖)`.
pub fn sampled_conformal_check(
    op: &ModuleOperator,
    trials: usize,
    seed: u64,
) -> SampledConformalCheck {
    sampled_conformal_impl(op, trials, seed, |txty, tx_n, ty_n, xy, x_n, y_n| {
        (txty.norm() / (tx_n * ty_n) - xy.norm() / (x_n * y_n)).abs()
    })
}

fn sampled_conformal_impl(
    op: &ModuleOperator,
    trials: usize,
    seed: u64,
    deviation: impl Fn(&AlgebraElement, f64, f64, &AlgebraElement, f64, f64) -> f64,
) -> SampledConformalCheck {
    let sig = op.signature();
    let norm = op.norm();
    // Conformality is defined for injective maps only.
    let injective = norm > 0.0 && op.min_singular_value() > INJECTIVITY_RTOL * norm;
    if !injective {
        return SampledConformalCheck {
            verdict: false,
            injective,
            worst_deviation: None,
            trials: 0,
        };
    }

    let mut worst = 0.0_f64;
    let mut measure = |x: &ModuleVector, y: &ModuleVector| {
        let (x_n, y_n) = (x.norm(), y.norm());
        if x_n < 1e-12 || y_n < 1e-12 {
            return;
        }
        let tx = op.apply(x).expect("same signature");
        let ty = op.apply(y).expect("same signature");
        let (tx_n, ty_n) = (tx.norm(), ty.norm());
        if tx_n < DIV_GUARD || ty_n < DIV_GUARD {
            worst = f64::INFINITY;
            return;
        }
        let xy = x.inner_product(y).expect("same signature");
        let txty = tx.inner_product(&ty).expect("same signature");
        let d = deviation(&txty, tx_n, ty_n, &xy, x_n, y_n);
        if d > worst {
            worst = d;
        }
    };

    // Structured detection pairs: x mixes units of two blocks, y keeps one.
    // When κ differs across blocks these pairs are guaranteed detectors.
    let blocks: Vec<usize> = (0..sig.algebra().num_blocks())
        .filter(|&m| sig.multiplicity(m) > 0)
        .collect();
    for &m1 in &blocks {
        for &m2 in &blocks {
            if m1 == m2 {
                continue;
            }
            let z1 = block_unit_vector(sig, m1);
            let z2 = block_unit_vector(sig, m2);
            let x = z1.add(&z2);
            measure(&x, &z1);
        }
    }

    for trial in 0..trials {
        let mut rng = trial_rng(seed, trial as u64);
        let x = ModuleVector::random_gaussian(sig, &mut rng);
        let y = ModuleVector::random_gaussian(sig, &mut rng);
        measure(&x, &y);
    }

    SampledConformalCheck {
        verdict: worst <= SAMPLED_TOL,
        injective,
        worst_deviation: Some(worst),
        trials,
    }
}

/// Unit vector supported on one algebra block: the identity of that block
/// planted in its first active component.
fn block_unit_vector(sig: &ModuleSignature, m: usize) -> ModuleVector {
    let component = (0..sig.rank())
        .find(|&i| sig.component(i).is_active(m))
        .expect("block active in the module");
    let mut v = ModuleVector::zeros(sig);
    *v.component_mut(component) = unit_at_block(sig.algebra(), m);
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::make_scaled_isometry;
    use crate::rng::seeded_rng;

    fn free_module(dims: &[usize], rank: usize) -> ModuleSignature {
        ModuleSignature::free(AlgebraSignature::new(dims.to_vec()).unwrap(), rank).unwrap()
    }

    fn central(sig: &ModuleSignature, values: &[f64]) -> CentralElement {
        CentralElement::from_real(sig.algebra().clone(), values.to_vec()).unwrap()
    }

    #[test]
    fn zero_operator_is_op_with_zero_kappa() {
        let sig = free_module(&[2, 1], 2);
        let cert = decide_orthogonality_preserving(&ModuleOperator::zero(&sig), DEFAULT_TOL);
        assert!(cert.verdict);
        assert!(!cert.restricted);
        assert!(cert.kappa.unwrap().norm() == 0.0);
    }

    #[test]
    fn noncentral_unitary_multiplication_is_op_with_unit_kappa() {
        let sig = free_module(&[2], 1);
        let u = AlgebraElement::from_blocks(
            sig.algebra().clone(),
            vec![ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[-1.0, 0.0]])],
        )
        .unwrap();
        let t = ModuleOperator::right_multiplication(&sig, &u);
        let cert = decide_orthogonality_preserving(&t, DEFAULT_TOL);
        assert!(cert.verdict);
        let kappa = cert.kappa.unwrap();
        assert!((kappa.scalar(0).re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn shift_kernel_is_rejected_with_the_expected_witness() {
        // Over A = ℂ, M = A², the kernel t_{10} = 1 maps (x₀,x₁) ↦ (x₁,0).
        let sig = free_module(&[1], 2);
        let mut t = ModuleOperator::zero(&sig);
        t.set_entry(1, 0, AlgebraElement::unit(sig.algebra()));
        let cert = decide_orthogonality_preserving(&t, DEFAULT_TOL);
        assert!(!cert.verdict);
        let violation = cert.violation.unwrap();
        assert!(matches!(
            violation.kind,
            ViolationKind::ScalarMismatch { block: 0, .. }
        ));
        let w = violation.witness.unwrap();
        assert!(w.input_overlap < 1e-12);
        assert!((w.output_overlap - 1.0).abs() < 1e-12, "⟨Tx,Ty⟩ = ±1");
        // The constructed witness is x = (1,1), y = (1,−1) up to ordering.
        assert!((w.x.component(0).norm() - 1.0).abs() < 1e-12);
        assert!((w.y.component(1).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constructed_instances_round_trip_kappa() {
        let sig = free_module(&[1, 1], 2);
        let t = make_scaled_isometry(&sig, &central(&sig, &[1.0, 3.0]), 5).unwrap();
        let kappa = extract_kappa(&t).unwrap();
        assert!((kappa.scalar(0).re - 1.0).abs() < 1e-9);
        assert!((kappa.scalar(1).re - 9.0).abs() < 1e-9);

        let doubled = ModuleOperator::identity(&sig).scale(Complex64::new(2.0, 0.0));
        let kappa = extract_kappa(&doubled).unwrap();
        assert!((kappa.scalar(0).re - 4.0).abs() < 1e-12);
        assert!((kappa.scalar(1).re - 4.0).abs() < 1e-12);
    }

    #[test]
    fn extract_kappa_refuses_non_op_operators() {
        let sig = free_module(&[1], 2);
        let mut t = ModuleOperator::zero(&sig);
        t.set_entry(1, 0, AlgebraElement::unit(sig.algebra()));
        assert!(matches!(
            extract_kappa(&t),
            Err(Error::NotOrthogonalityPreserving { .. })
        ));
    }

    #[test]
    fn theorem_identity_holds_on_constructed_instances() {
        let sig = free_module(&[2, 1], 2);
        let t = make_scaled_isometry(&sig, &central(&sig, &[0.7, 1.9]), 12).unwrap();
        let kappa = extract_kappa(&t).unwrap().embed();
        let mut rng = seeded_rng(99);
        for _ in 0..50 {
            let x = ModuleVector::random_gaussian(&sig, &mut rng);
            let y = ModuleVector::random_gaussian(&sig, &mut rng);
            let lhs = t
                .apply(&x)
                .unwrap()
                .inner_product(&t.apply(&y).unwrap())
                .unwrap();
            let rhs = kappa.mul(&x.inner_product(&y).unwrap());
            let bound = 1e-8 * (1.0 + t.norm().powi(2) * x.norm() * y.norm());
            assert!(lhs.sub(&rhs).norm() <= bound);
        }
    }

    #[test]
    fn decompose_recovers_lambda_and_reconstructs() {
        let sig = free_module(&[2, 2], 2);
        let lambda0 = central(&sig, &[0.5, 2.0]);
        let t = make_scaled_isometry(&sig, &lambda0, 31).unwrap();
        let dec = decompose_lambda_v(&t, DEFAULT_TOL).unwrap();
        for m in 0..2 {
            assert!((dec.lambda.scalar(m).re - lambda0.scalar(m).re).abs() <= 1e-9);
            assert!(dec.support.is_active(m));
        }
        assert!(dec.isometry.is_isometry(1e-8));
        let err = dec.reconstruct().sub(&t).norm();
        assert!(err <= 1e-9 * (1.0 + t.norm()));
    }

    #[test]
    fn decompose_degenerate_block_completes_with_identity() {
        // T = multiplication by (3, 0) over A = ℂ², M = A¹.
        let sig = free_module(&[1, 1], 1);
        let t = ModuleOperator::central_multiplication(&sig, &central(&sig, &[3.0, 0.0]));
        let dec = decompose_lambda_v(&t, DEFAULT_TOL).unwrap();
        assert!((dec.lambda.scalar(0).re - 3.0).abs() < 1e-12);
        assert!(dec.lambda.scalar(1).norm() < 1e-12);
        assert!(dec.support.is_active(0));
        assert!(!dec.support.is_active(1));
        // V is the identity pattern on both blocks here.
        let id = ModuleOperator::identity(&sig);
        assert!(dec.isometry.sub(&id).norm() < 1e-12);
        assert!(dec.isometry.is_isometry(1e-10));
        assert!(dec.reconstruct().sub(&t).norm() < 1e-12);
    }

    #[test]
    fn decompose_identity_is_trivial() {
        let sig = free_module(&[2], 2);
        let id = ModuleOperator::identity(&sig);
        let dec = decompose_lambda_v(&id, DEFAULT_TOL).unwrap();
        assert!((dec.lambda.scalar(0).re - 1.0).abs() < 1e-12);
        assert!(dec.isometry.sub(&id).norm() < 1e-12);
    }

    #[test]
    fn sampled_oracle_agrees_on_constructed_and_shifted() {
        let sig = free_module(&[1], 2);
        let t = make_scaled_isometry(&sig, &central(&sig, &[1.3]), 7).unwrap();
        let check = sampled_op_check(&t, 60, 2024);
        assert!(check.verdict, "worst {:.3e}", check.worst_deviation);
        assert!(check.worst_deviation <= 1e-9);

        let mut shift = ModuleOperator::zero(&sig);
        shift.set_entry(1, 0, AlgebraElement::unit(sig.algebra()));
        let check = sampled_op_check(&shift, 200, 2025);
        assert!(!check.verdict);
        assert!(check.first_violation.is_some());

        let id = ModuleOperator::identity(&sig);
        let check = sampled_op_check(&id, 60, 2026);
        assert!(check.verdict);
        assert!(check.worst_deviation == 0.0 || check.worst_deviation < 1e-14);
    }

    #[test]
    fn sampled_oracle_detects_on_multiplicity_one_matrix_block() {
        // M = A¹ over M₂: generic vectors have no orthogonal partner, so the
        // compressed probes must carry the detection.
        let sig = free_module(&[2], 1);
        let u = AlgebraElement::from_blocks(
            sig.algebra().clone(),
            vec![ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 2.0]])],
        )
        .unwrap();
        let t = ModuleOperator::right_multiplication(&sig, &u);
        assert!(!decide_orthogonality_preserving(&t, DEFAULT_TOL).verdict);
        let check = sampled_op_check(&t, 200, 77);
        assert!(!check.verdict, "worst {:.3e}", check.worst_deviation);
    }

    #[test]
    fn perturbed_instances_are_rejected() {
        let sig = free_module(&[1, 2], 2);
        let t = make_scaled_isometry(&sig, &central(&sig, &[1.0, 1.5]), 3).unwrap();
        let mut rng = seeded_rng(8);
        let e = ModuleOperator::random_direction(&sig, &mut rng);
        for eps in [1e-3, 1e-2, 1e-1] {
            let perturbed = t.add(&e.scale(Complex64::new(eps, 0.0)));
            assert!(
                !decide_orthogonality_preserving(&perturbed, DEFAULT_TOL).verdict,
                "eps {eps}"
            );
        }
    }

    #[test]
    fn cstar_conformal_cases() {
        let sig = free_module(&[1, 1], 2);
        // 2 · isometry: conformal with scale 2.
        let t = make_scaled_isometry(&sig, &central(&sig, &[2.0, 2.0]), 4).unwrap();
        let d = decide_cstar_conformal(&t, DEFAULT_TOL);
        assert!(d.verdict && d.injective);
        assert!((d.scale.unwrap() - 2.0).abs() < 1e-9);

        // Non-scalar κ = (1, 4).
        let t = make_scaled_isometry(&sig, &central(&sig, &[1.0, 2.0]), 4).unwrap();
        let d = decide_cstar_conformal(&t, DEFAULT_TOL);
        assert!(!d.verdict);
        assert!(d.injective);
        assert!(d.certificate.verdict, "still orthogonality-preserving");

        // Multiplication by (3, 0) kills a block: not injective.
        let sig1 = free_module(&[1, 1], 1);
        let t = ModuleOperator::central_multiplication(&sig1, &central(&sig1, &[3.0, 0.0]));
        let d = decide_cstar_conformal(&t, DEFAULT_TOL);
        assert!(!d.verdict);
        assert!(!d.injective);
    }

    #[test]
    fn conformal_equals_cstar_conformal_structurally() {
        let sig = free_module(&[1, 2], 2);
        let mut rng = seeded_rng(21);
        for trial in 0..40 {
            let t = match trial % 3 {
                0 => make_scaled_isometry(&sig, &central(&sig, &[1.2, 1.2]), trial).unwrap(),
                1 => make_scaled_isometry(&sig, &central(&sig, &[0.5, 2.5]), trial).unwrap(),
                _ => ModuleOperator::random_gaussian(&sig, &mut rng),
            };
            let a = decide_cstar_conformal(&t, DEFAULT_TOL);
            let b = decide_conformal(&t, DEFAULT_TOL);
            assert_eq!(a.verdict, b.verdict);
        }
    }

    #[test]
    fn structured_pair_detects_non_scalar_kappa_in_both_samplers() {
        // Multiplication by (1, 2) over A = ℂ², M = A¹: the pair
        // x = q₁ + q₂, y = q₁ gives deviation 1/2 in both metrics.
        let sig = free_module(&[1, 1], 1);
        let t = ModuleOperator::central_multiplication(&sig, &central(&sig, &[1.0, 2.0]));

        // With zero random trials only the structured pairs contribute, so
        // the worst deviation is exactly the hand value 1/2.
        let c = sampled_cstar_conformal_check(&t, 0, 1);
        assert!(!c.verdict && c.injective);
        let worst = c.worst_deviation.unwrap();
        assert!(worst > 0.1);
        assert!((worst - 0.5).abs() < 1e-12, "hand value is exactly 1/2, got {worst}");

        let c = sampled_conformal_check(&t, 0, 1);
        assert!(!c.verdict && c.injective);
        let worst = c.worst_deviation.unwrap();
        assert!(worst > 0.1);
        assert!((worst - 0.5).abs() < 1e-12);

        // Random trials on top still reject.
        assert!(!sampled_cstar_conformal_check(&t, 20, 1).verdict);
        assert!(!sampled_conformal_check(&t, 20, 1).verdict);
    }

    #[test]
    fn samplers_accept_scaled_isometries() {
        let sig = free_module(&[2, 1], 2);
        let t = make_scaled_isometry(&sig, &central(&sig, &[3.0, 3.0]), 16).unwrap();
        let c = sampled_cstar_conformal_check(&t, 40, 5);
        assert!(c.verdict, "worst {:?}", c.worst_deviation);
        let c = sampled_conformal_check(&t, 40, 5);
        assert!(c.verdict);

        let id = ModuleOperator::identity(&sig);
        let c = sampled_conformal_check(&id, 40, 6);
        assert!(c.verdict);
        assert!(c.worst_deviation.unwrap() < 1e-14);
    }

    #[test]
    fn kappa_is_invariant_under_isometries_and_covariant_under_scaling() {
        let sig = free_module(&[1, 2], 2);
        let lambda = central(&sig, &[0.8, 1.7]);
        let t = make_scaled_isometry(&sig, &lambda, 40).unwrap();
        let base = extract_kappa(&t).unwrap();

        let w = make_scaled_isometry(&sig, &central(&sig, &[1.0, 1.0]), 41).unwrap();
        let pre = extract_kappa(&w.then(&t)).unwrap();
        let post = extract_kappa(&t.then(&w)).unwrap();
        for m in 0..2 {
            assert!((pre.scalar(m) - base.scalar(m)).norm() <= 1e-9);
            assert!((post.scalar(m) - base.scalar(m)).norm() <= 1e-9);
        }

        let c = Complex64::new(-0.3, 1.1);
        let scaled = extract_kappa(&t.scale(c)).unwrap();
        for m in 0..2 {
            assert!((scaled.scalar(m).re - c.norm_sqr() * base.scalar(m).re).abs() <= 1e-9);
        }
    }

    #[test]
    fn non_full_module_certificates_are_restricted() {
        let algebra = AlgebraSignature::new(vec![1, 1]).unwrap();
        let q1 = CentralProjection::new(algebra.clone(), vec![true, false]).unwrap();
        let sig = ModuleSignature::new(algebra.clone(), vec![q1.clone()]).unwrap();
        let two = CentralElement::from_real(algebra, vec![2.0, 7.0]).unwrap();
        let t = ModuleOperator::central_multiplication(&sig, &two);
        let cert = decide_orthogonality_preserving(&t, DEFAULT_TOL);
        assert!(cert.verdict);
        assert!(cert.restricted);
        let kappa = cert.kappa.unwrap();
        assert!((kappa.scalar(0).re - 4.0).abs() < 1e-12);
        // κ vanishes off the support ideal even though the data had a 7.
        assert!(kappa.scalar(1).norm() == 0.0);
    }

    #[test]
    fn non_central_diagonal_witness_is_orthogonal_and_violating() {
        let sig = free_module(&[2], 1);
        let u = AlgebraElement::from_blocks(
            sig.algebra().clone(),
            vec![ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 3.0]])],
        )
        .unwrap();
        let t = ModuleOperator::right_multiplication(&sig, &u);
        let cert = decide_orthogonality_preserving(&t, DEFAULT_TOL);
        assert!(!cert.verdict);
        let v = cert.violation.unwrap();
        assert!(matches!(v.kind, ViolationKind::NonCentralDiagonal { .. }));
        let w = v.witness.unwrap();
        let scale = 1.0 + t.norm().powi(2) * w.x.norm() * w.y.norm();
        assert!(w.input_overlap <= 1e-10 * scale);
        assert!(w.output_overlap > 1e-3 * scale);
    }
}
