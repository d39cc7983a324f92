//! Seeded acceptance battery: one function per criterion, each returning a
//! pass/fail outcome with counters. The `acceptance` integration test asserts
//! every outcome; the CLI `suite` command renders the same outcomes as JSON.

use std::time::Instant;

use num_complex::Complex64;
use rand::Rng;

use crate::algebra::{AlgebraSignature, CentralElement, CentralProjection};
use crate::module::{ModuleSignature, ModuleVector};
use crate::operator::{make_scaled_isometry, ModuleOperator};
use crate::rng::trial_rng;
use crate::theorems::{
    decide_cstar_conformal, decide_conformal, decide_orthogonality_preserving,
    decompose_lambda_v, extract_kappa, sampled_conformal_check, sampled_cstar_conformal_check,
    sampled_op_check, DEFAULT_TOL, INJECTIVITY_RTOL,
};

/// Result of one acceptance criterion.
#[derive(Debug, Clone)]
pub struct CriterionOutcome {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    /// Wall-clock seconds; informational, not serialized by the CLI.
    pub elapsed: f64,
    /// Budget in seconds when the criterion carries one.
    pub budget: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub outcomes: Vec<CriterionOutcome>,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed)
    }
}

/// Run all acceptance criteria with instance streams derived from `seed`.
pub fn run_acceptance_suite(seed: u64) -> SuiteReport {
    let outcomes = vec![
        criterion_gram_identity(seed),
        criterion_decomposition_roundtrip(seed),
        criterion_perturbation_discrimination(seed),
        criterion_conformality_equivalence(seed),
        criterion_grid_multiplication_lab(),
        criterion_phase_winding_lab(),
        criterion_kappa_invariance(seed),
    ];
    SuiteReport { outcomes }
}

fn outcome(
    id: usize,
    name: &'static str,
    started: Instant,
    budget: Option<f64>,
    failures: Vec<String>,
    detail: String,
) -> CriterionOutcome {
    let elapsed = started.elapsed().as_secs_f64();
    let mut passed = failures.is_empty();
    let mut detail = detail;
    if let Some(limit) = budget {
        if elapsed >= limit {
            passed = false;
            detail = format!("{detail}; exceeded {limit:.0}s budget");
        }
    }
    if !failures.is_empty() {
        let shown = failures.len().min(3);
        detail = format!("{detail}; {} failures, e.g. {}", failures.len(), failures[..shown].join(" | "));
    }
    CriterionOutcome {
        id,
        name,
        passed,
        detail,
        elapsed,
        budget,
    }
}

/// Random module shape within the given bounds. Every algebra block keeps at
/// least `min_multiplicity` active components so constructed isometries exist
/// (and, at 2, so random vectors admit orthogonal partners on every block).
fn random_shape<R: Rng + ?Sized>(
    rng: &mut R,
    max_blocks: usize,
    max_dim: usize,
    max_rank: usize,
    min_multiplicity: usize,
) -> ModuleSignature {
    let blocks = rng.random_range(1..=max_blocks);
    let dims: Vec<usize> = (0..blocks).map(|_| rng.random_range(1..=max_dim)).collect();
    let algebra = AlgebraSignature::new(dims).expect("valid dims");
    let rank = rng.random_range(min_multiplicity.max(1)..=max_rank.max(min_multiplicity));
    let mut masks: Vec<Vec<bool>> = (0..rank)
        .map(|_| (0..blocks).map(|_| rng.random_range(0..4) > 0).collect())
        .collect();
    for m in 0..blocks {
        let mut covered = (0..rank).filter(|&i| masks[i][m]).count();
        while covered < min_multiplicity {
            let i = rng.random_range(0..rank);
            if !masks[i][m] {
                masks[i][m] = true;
                covered += 1;
            }
        }
    }
    let components = masks
        .into_iter()
        .map(|mask| CentralProjection::new(algebra.clone(), mask).expect("mask fits"))
        .collect();
    ModuleSignature::new(algebra, components).expect("valid module")
}

fn random_lambda<R: Rng + ?Sized>(
    sig: &ModuleSignature,
    rng: &mut R,
    lo: f64,
    hi: f64,
) -> CentralElement {
    let values: Vec<f64> = (0..sig.algebra().num_blocks())
        .map(|_| rng.random_range(lo..hi))
        .collect();
    CentralElement::from_real(sig.algebra().clone(), values).expect("finite")
}

/// Criterion 1: for constructed T = λV the identity ⟨Tx,Ty⟩ = κ⟨x,y⟩ holds
/// with κ = extract_kappa(T), on 100 instances × 50 pairs.
pub fn criterion_gram_identity(seed: u64) -> CriterionOutcome {
    let started = Instant::now();
    let mut failures = Vec::new();
    let mut worst = 0.0_f64;
    for instance in 0..100 {
        let mut rng = trial_rng(seed ^ 0x11, instance);
        let sig = random_shape(&mut rng, 4, 4, 4, 1);
        let lambda = random_lambda(&sig, &mut rng, 0.2, 2.0);
        let isometry_seed: u64 = rng.random();
        let t = match make_scaled_isometry(&sig, &lambda, isometry_seed) {
            Ok(t) => t,
            Err(e) => {
                failures.push(format!("instance {instance}: construction failed: {e}"));
                continue;
            }
        };
        let kappa = match extract_kappa(&t) {
            Ok(k) => k.embed(),
            Err(e) => {
                failures.push(format!("instance {instance}: {e}"));
                continue;
            }
        };
        let t_norm_sq = t.norm().powi(2);
        for _ in 0..50 {
            let x = ModuleVector::random_gaussian(&sig, &mut rng);
            let y = ModuleVector::random_gaussian(&sig, &mut rng);
            let lhs = t
                .apply(&x)
                .unwrap()
                .inner_product(&t.apply(&y).unwrap())
                .unwrap();
            let rhs = kappa.mul(&x.inner_product(&y).unwrap());
            let bound = 1e-8 * (1.0 + t_norm_sq * x.norm() * y.norm());
            let dev = lhs.sub(&rhs).norm() / bound;
            worst = worst.max(dev);
            if dev > 1.0 {
                failures.push(format!("instance {instance}: deviation {:.3e}×bound", dev));
            }
        }
    }
    outcome(
        1,
        "gram-identity",
        started,
        Some(10.0),
        failures,
        format!("100 instances × 50 pairs, worst deviation {worst:.3e}×bound"),
    )
}

/// Criterion 2: 500 constructed instances round-trip through
/// decompose_lambda_v with λ recovered to 1e-8 relative on the support.
pub fn criterion_decomposition_roundtrip(seed: u64) -> CriterionOutcome {
    let started = Instant::now();
    let mut failures = Vec::new();
    let mut worst_lambda = 0.0_f64;
    let mut worst_recon = 0.0_f64;
    for instance in 0..500 {
        let mut rng = trial_rng(seed ^ 0x22, instance);
        let sig = random_shape(&mut rng, 4, 4, 4, 1);
        let mut lambda = random_lambda(&sig, &mut rng, 0.2, 2.0);
        if instance % 7 == 0 {
            // Exercise the degenerate-block completion path.
            let blocks = sig.algebra().num_blocks();
            let mut values: Vec<f64> = lambda.scalars().iter().map(|z| z.re).collect();
            values[rng.random_range(0..blocks)] = 0.0;
            lambda = CentralElement::from_real(sig.algebra().clone(), values).unwrap();
        }
        let isometry_seed: u64 = rng.random();
        let t = make_scaled_isometry(&sig, &lambda, isometry_seed).expect("full module");
        let dec = match decompose_lambda_v(&t, DEFAULT_TOL) {
            Ok(d) => d,
            Err(e) => {
                failures.push(format!("instance {instance}: {e}"));
                continue;
            }
        };
        for m in 0..sig.algebra().num_blocks() {
            let truth = lambda.scalar(m).re;
            if truth > 2.0 * DEFAULT_TOL {
                if !dec.support.is_active(m) {
                    failures.push(format!("instance {instance}: block {m} dropped from support"));
                    continue;
                }
                let rel = (dec.lambda.scalar(m).re - truth).abs() / truth;
                worst_lambda = worst_lambda.max(rel);
                if rel > 1e-8 {
                    failures.push(format!("instance {instance}: λ relative error {rel:.3e}"));
                }
            }
        }
        if !dec.isometry.is_isometry(1e-8) {
            failures.push(format!("instance {instance}: V fails the isometry test"));
        }
        let recon = dec.reconstruct().sub(&t).norm() / (1.0 + t.norm());
        worst_recon = worst_recon.max(recon);
        if recon > 1e-8 {
            failures.push(format!("instance {instance}: reconstruction error {recon:.3e}"));
        }
    }
    outcome(
        2,
        "scaled-isometry-roundtrip",
        started,
        Some(30.0),
        failures,
        format!(
            "500 instances, worst λ error {worst_lambda:.3e}, worst reconstruction {worst_recon:.3e}"
        ),
    )
}

/// Criterion 3: ε-perturbations of constructed instances are rejected by the
/// structural decision at every ε, and the definitional sampler also finds a
/// violating orthogonal pair at ε = 0.1 in at least 95% of the instances.
pub fn criterion_perturbation_discrimination(seed: u64) -> CriterionOutcome {
    let started = Instant::now();
    let mut failures = Vec::new();
    let mut sampler_hits = 0usize;
    let instances = 100usize;
    for instance in 0..instances {
        let mut rng = trial_rng(seed ^ 0x33, instance as u64);
        // Multiplicity ≥ 2 keeps orthogonal pairs plentiful for the sampler.
        let sig = random_shape(&mut rng, 3, 3, 3, 2);
        let lambda = random_lambda(&sig, &mut rng, 0.5, 1.5);
        let isometry_seed: u64 = rng.random();
        let t = make_scaled_isometry(&sig, &lambda, isometry_seed).expect("full module");
        let direction = ModuleOperator::random_direction(&sig, &mut rng);
        for eps in [1e-3, 1e-2, 1e-1] {
            let perturbed = t.add(&direction.scale(Complex64::new(eps, 0.0)));
            if decide_orthogonality_preserving(&perturbed, DEFAULT_TOL).verdict {
                failures.push(format!("instance {instance}: eps {eps} escaped the decision"));
            }
        }
        let perturbed = t.add(&direction.scale(Complex64::new(1e-1, 0.0)));
        let sampler_seed: u64 = rng.random();
        let check = sampled_op_check(&perturbed, 200, sampler_seed);
        if !check.verdict {
            sampler_hits += 1;
        }
    }
    if sampler_hits * 100 < instances * 95 {
        failures.push(format!(
            "sampler found witnesses in only {sampler_hits}/{instances} instances"
        ));
    }
    outcome(
        3,
        "perturbation-discrimination",
        started,
        None,
        failures,
        format!("{instances} instances × 3 ε-levels; sampler hits {sampler_hits}/{instances} at ε=0.1"),
    )
}

/// Criterion 4: C*-conformal, conformal, and (κ scalar ∧ positive ∧
/// injective) agree literally on 300 mixed instances, and the samplers agree
/// with the structural verdicts.
pub fn criterion_conformality_equivalence(seed: u64) -> CriterionOutcome {
    let started = Instant::now();
    let mut failures = Vec::new();
    let mut true_count = 0usize;
    let instances = 300usize;
    for instance in 0..instances {
        let mut rng = trial_rng(seed ^ 0x44, instance as u64);
        let sig = random_shape(&mut rng, 3, 3, 3, 2);
        let blocks = sig.algebra().num_blocks();
        let t = match instance % 4 {
            0 => {
                // Positive real multiple of an isometry.
                let c = rng.random_range(0.5..2.0);
                let lambda =
                    CentralElement::from_real(sig.algebra().clone(), vec![c; blocks]).unwrap();
                let s: u64 = rng.random();
                make_scaled_isometry(&sig, &lambda, s).expect("full module")
            }
            1 => {
                // Deliberately non-scalar λ (needs ≥ 2 blocks to matter).
                let mut values: Vec<f64> =
                    (0..blocks).map(|_| rng.random_range(0.4..1.0)).collect();
                if blocks > 1 {
                    values[0] += 1.0;
                }
                let lambda = CentralElement::from_real(sig.algebra().clone(), values).unwrap();
                let s: u64 = rng.random();
                make_scaled_isometry(&sig, &lambda, s).expect("full module")
            }
            2 => {
                // Kill one block: stays OP, loses injectivity (or, with a
                // single block, degenerates to the zero operator).
                let mut values: Vec<f64> =
                    (0..blocks).map(|_| rng.random_range(0.5..1.5)).collect();
                values[rng.random_range(0..blocks)] = 0.0;
                let lambda = CentralElement::from_real(sig.algebra().clone(), values).unwrap();
                let s: u64 = rng.random();
                make_scaled_isometry(&sig, &lambda, s).expect("full module")
            }
            _ => {
                // Perturbed: not orthogonality-preserving at all.
                let lambda = random_lambda(&sig, &mut rng, 0.5, 1.5);
                let s: u64 = rng.random();
                let t = make_scaled_isometry(&sig, &lambda, s).expect("full module");
                let e = ModuleOperator::random_direction(&sig, &mut rng);
                t.add(&e.scale(Complex64::new(1e-2, 0.0)))
            }
        };

        let a = decide_cstar_conformal(&t, DEFAULT_TOL);
        let b = decide_conformal(&t, DEFAULT_TOL);

        // Third boolean, recomputed from raw parts: κ scalar ∧ κ > 0 ∧ injective.
        let cert = decide_orthogonality_preserving(&t, DEFAULT_TOL);
        let third = cert.verdict
            && cert
                .kappa
                .as_ref()
                .map(|kappa| {
                    let values: Vec<f64> = (0..blocks)
                        .filter(|&m| sig.multiplicity(m) > 0)
                        .map(|m| kappa.scalar(m).re)
                        .collect();
                    let hi = values.iter().cloned().fold(f64::MIN, f64::max);
                    let lo = values.iter().cloned().fold(f64::MAX, f64::min);
                    hi - lo <= DEFAULT_TOL * (1.0 + hi) && lo > DEFAULT_TOL
                })
                .unwrap_or(false)
            && t.norm() > 0.0
            && t.min_singular_value() > INJECTIVITY_RTOL * t.norm();

        if a.verdict != b.verdict || a.verdict != third {
            failures.push(format!(
                "instance {instance}: decisions disagree ({}, {}, {})",
                a.verdict, b.verdict, third
            ));
        }
        if a.verdict {
            true_count += 1;
        }

        let sampler_seed: u64 = rng.random();
        let sc = sampled_cstar_conformal_check(&t, 30, sampler_seed);
        let sn = sampled_conformal_check(&t, 30, sampler_seed ^ 1);
        if sc.verdict != a.verdict {
            failures.push(format!(
                "instance {instance}: C*-conformal sampler {} vs structural {}",
                sc.verdict, a.verdict
            ));
        }
        if sn.verdict != a.verdict {
            failures.push(format!(
                "instance {instance}: conformal sampler {} vs structural {}",
                sn.verdict, a.verdict
            ));
        }
    }
    outcome(
        4,
        "conformality-equivalence",
        started,
        None,
        failures,
        format!("{instances} mixed instances, {true_count} conformal"),
    )
}

/// Criterion 5: the N = 64 grid multiplication by t is orthogonality-
/// preserving with κ exactly t², and not conformal.
pub fn criterion_grid_multiplication_lab() -> CriterionOutcome {
    let started = Instant::now();
    let mut failures = Vec::new();
    match crate::lab::example1_report(64) {
        Ok(report) => {
            if !report.op_verdict {
                failures.push("multiplication by t not recognized as orthogonality-preserving".into());
            }
            if report.conformal_verdict {
                failures.push("multiplication by t wrongly declared conformal".into());
            }
            if report.witness.is_none() {
                failures.push("missing conformality witness pair".into());
            }
            for (j, (&k, &t)) in report.kappa.iter().zip(&report.grid).enumerate() {
                if (k - t * t).abs() > 1e-12 {
                    failures.push(format!("κ[{j}] = {k} vs t² = {}", t * t));
                }
            }
            let expect_min = (1.0 / 64.0_f64).powi(2);
            if (report.min_kappa - expect_min).abs() > 1e-15 {
                failures.push(format!("min κ {} vs (1/N)² {}", report.min_kappa, expect_min));
            }
        }
        Err(e) => failures.push(format!("report failed: {e}")),
    }
    outcome(
        5,
        "grid-multiplication-lab",
        started,
        Some(1.0),
        failures,
        "N = 64 grid, κ compared entry-wise with t²".into(),
    )
}

/// Criterion 6: the winding of the oscillating multiplier matches
/// (1/ε − 1)/2π within 0.51 at ε = 1e-3, N = 1e5, and the halving table is
/// monotone with ratio → 2 within 5%.
pub fn criterion_phase_winding_lab() -> CriterionOutcome {
    let started = Instant::now();
    let mut failures = Vec::new();
    let mut summary = String::new();
    match crate::lab::example2_polar_report(100_000, 1e-3) {
        Ok(report) => {
            let err = (report.winding - report.predicted).abs();
            summary = format!(
                "winding {:.4} vs predicted {:.4} (|Δ| = {:.2e})",
                report.winding, report.predicted, err
            );
            if err > 0.51 {
                failures.push(format!("winding off by {err:.3}"));
            }
            for pair in report.divergence.windows(2) {
                if pair[1].winding <= pair[0].winding {
                    failures.push(format!(
                        "table not monotone: {:.3} then {:.3}",
                        pair[0].winding, pair[1].winding
                    ));
                }
            }
            let ratio = report.divergence[1].winding / report.divergence[0].winding;
            if (ratio - 2.0).abs() > 0.1 {
                failures.push(format!("halving ratio {ratio:.4} not within 5% of 2"));
            }
            if (report.modulus_min - 1e-3).abs() > 1e-15 {
                failures.push(format!("modulus floor {} vs ε", report.modulus_min));
            }
        }
        Err(e) => failures.push(format!("report failed: {e}")),
    }
    outcome(
        6,
        "phase-winding-lab",
        started,
        Some(5.0),
        failures,
        summary,
    )
}

/// Criterion 7: κ is invariant under pre/post-composition with isometries and
/// covariant (|c|²) under complex scaling — 100 instances each.
pub fn criterion_kappa_invariance(seed: u64) -> CriterionOutcome {
    let started = Instant::now();
    let mut failures = Vec::new();
    let mut worst = 0.0_f64;
    for instance in 0..100 {
        let mut rng = trial_rng(seed ^ 0x77, instance);
        let sig = random_shape(&mut rng, 3, 3, 3, 1);
        let lambda = random_lambda(&sig, &mut rng, 0.3, 1.8);
        let s1: u64 = rng.random();
        let s2: u64 = rng.random();
        let t = make_scaled_isometry(&sig, &lambda, s1).expect("full module");
        let unit = CentralElement::from_real(
            sig.algebra().clone(),
            vec![1.0; sig.algebra().num_blocks()],
        )
        .unwrap();
        let w = make_scaled_isometry(&sig, &unit, s2).expect("full module");

        let base = extract_kappa(&t).expect("constructed OP");
        let pre = extract_kappa(&w.then(&t)).expect("still OP");
        let post = extract_kappa(&t.then(&w)).expect("still OP");
        let c = Complex64::new(rng.random_range(-1.5..1.5), rng.random_range(-1.5..1.5));
        let scaled = extract_kappa(&t.scale(c)).expect("still OP");

        for m in 0..sig.algebra().num_blocks() {
            let b = base.scalar(m).re;
            let d1 = (pre.scalar(m).re - b).abs();
            let d2 = (post.scalar(m).re - b).abs();
            let d3 = (scaled.scalar(m).re - c.norm_sqr() * b).abs();
            let bound = 1e-9 * (1.0 + b.max(c.norm_sqr() * b));
            worst = worst.max(d1.max(d2) / bound).max(d3 / bound);
            if d1 > bound || d2 > bound {
                failures.push(format!("instance {instance}: composition moved κ by {:.3e}", d1.max(d2)));
            }
            if d3 > bound {
                failures.push(format!("instance {instance}: scaling κ error {d3:.3e}"));
            }
        }
    }
    outcome(
        7,
        "kappa-invariance",
        started,
        None,
        failures,
        format!("100 composition + 100 scaling instances, worst {worst:.3e}×bound"),
    )
}
