//! Cross-module invariants: agreement of the structural decision with the
//! definitional sampler on a 500-instance mix, soundness of constructed
//! instances, and the winding-density guarantee.

use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;

use cstarmod::algebra::{AlgebraSignature, CentralElement, CentralProjection};
use cstarmod::module::{ModuleSignature, ModuleVector};
use cstarmod::operator::{make_scaled_isometry, ModuleOperator};
use cstarmod::rng::trial_rng;
use cstarmod::theorems::{
    decide_orthogonality_preserving, sampled_op_check, DEFAULT_TOL,
};

fn small_rich_shape<R: Rng + ?Sized>(rng: &mut R) -> ModuleSignature {
    let blocks = rng.random_range(1..=2usize);
    let dims: Vec<usize> = (0..blocks).map(|_| rng.random_range(1..=2)).collect();
    let algebra = AlgebraSignature::new(dims).unwrap();
    let rank = rng.random_range(2..=3usize);
    let full = CentralProjection::full(&algebra);
    ModuleSignature::new(algebra, vec![full; rank]).unwrap()
}

/// Structural decision and definitional sampler agree on 500 seeded
/// instances: 250 constructed scaled isometries (also checking κ = λ²) and
/// 250 perturbed ones. Perturbed instances get an escalating trial budget;
/// the sampler must land on a violating orthogonal pair within it.
#[test]
fn decision_and_sampler_agree_on_five_hundred_instances() {
    let seed = 0xA9EE;
    for instance in 0..500u64 {
        let mut rng = trial_rng(seed, instance);
        let sig = small_rich_shape(&mut rng);
        let blocks = sig.algebra().num_blocks();
        let lambda_values: Vec<f64> = (0..blocks).map(|_| rng.random_range(0.4..1.6)).collect();
        let lambda =
            CentralElement::from_real(sig.algebra().clone(), lambda_values.clone()).unwrap();
        let iso_seed: u64 = rng.random();
        let constructed = make_scaled_isometry(&sig, &lambda, iso_seed).unwrap();

        let perturbed = instance % 2 == 1;
        let op = if perturbed {
            let e = ModuleOperator::random_direction(&sig, &mut rng);
            constructed.add(&e.scale(Complex64::new(0.1, 0.0)))
        } else {
            constructed
        };

        let cert = decide_orthogonality_preserving(&op, DEFAULT_TOL);
        assert_eq!(cert.verdict, !perturbed, "instance {instance}");

        if !perturbed {
            // Soundness: κ = λ² to 1e-8 relative.
            let kappa = cert.kappa.as_ref().unwrap();
            for (m, lv) in lambda_values.iter().enumerate() {
                let expect = lv * lv;
                assert!(
                    (kappa.scalar(m).re - expect).abs() <= 1e-8 * expect,
                    "instance {instance}: κ[{m}]"
                );
            }
        }

        let sampler_seed: u64 = rng.random();
        let sampled_verdict = if perturbed {
            // Escalate until the (deterministic) sampler finds the witness.
            let mut verdict = true;
            for trials in [10, 50, 200] {
                if !sampled_op_check(&op, trials, sampler_seed).verdict {
                    verdict = false;
                    break;
                }
            }
            verdict
        } else {
            sampled_op_check(&op, 40, sampler_seed).verdict
        };
        assert_eq!(
            sampled_verdict, cert.verdict,
            "instance {instance}: sampler disagrees with the decision"
        );
    }
}

/// A non-central ε-perturbation on a module with distinct block structure is
/// rejected at every ε down to 1e-3.
#[test]
fn soundness_of_the_perturbation_boundary() {
    let algebra = AlgebraSignature::new(vec![1, 2]).unwrap();
    let sig = ModuleSignature::new(
        algebra.clone(),
        vec![CentralProjection::full(&algebra); 2],
    )
    .unwrap();
    let lambda = CentralElement::from_real(algebra, vec![1.0, 1.3]).unwrap();
    for trial in 0..50u64 {
        let mut rng = trial_rng(0xB0B, trial);
        let s: u64 = rng.random();
        let t = make_scaled_isometry(&sig, &lambda, s).unwrap();
        let e = ModuleOperator::random_direction(&sig, &mut rng);
        for eps in [1e-3, 1e-2, 1e-1] {
            let p = t.add(&e.scale(Complex64::new(eps, 0.0)));
            assert!(
                !decide_orthogonality_preserving(&p, DEFAULT_TOL).verdict,
                "trial {trial}, eps {eps}"
            );
        }
    }
}

/// Winding stays within 0.51 of (1/ε − 1)/2π whenever the grid carries at
/// least ~20 samples per oscillation.
#[test]
fn winding_density_guarantee() {
    for eps in [0.1, 0.02, 4e-3] {
        let predicted = (1.0 / eps - 1.0) / (2.0 * std::f64::consts::PI);
        let min_n = (20.0 * (1.0 / eps) / (2.0 * std::f64::consts::PI)).ceil() as usize;
        for n in [min_n.max(2), 4 * min_n] {
            let f = cstarmod::lab::sample_example2(n, eps).unwrap();
            let w = cstarmod::lab::winding_count(&f).unwrap();
            assert!(
                (w - predicted).abs() <= 0.51,
                "eps {eps}, n {n}: winding {w} vs {predicted}"
            );
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Cauchy–Schwarz and inner-product positivity across random shapes.
    #[test]
    fn cauchy_schwarz_everywhere(
        dims in prop::collection::vec(1usize..=3, 1..=3),
        rank in 1usize..=3,
        seed in any::<u64>(),
    ) {
        let algebra = AlgebraSignature::new(dims).unwrap();
        let sig = ModuleSignature::new(
            algebra.clone(),
            vec![CentralProjection::full(&algebra); rank],
        )
        .unwrap();
        let mut rng = trial_rng(seed, 0);
        let x = ModuleVector::random_gaussian(&sig, &mut rng);
        let y = ModuleVector::random_gaussian(&sig, &mut rng);
        let ip = x.inner_product(&y).unwrap();
        prop_assert!(ip.norm() <= x.norm() * y.norm() + 1e-9);
        prop_assert!(x.inner_product(&x).unwrap().is_positive(1e-10));
    }

    /// Every sampled orthogonal pair is orthogonal and unit-normalized, on
    /// random shapes and seeds.
    #[test]
    fn orthogonal_samples_are_valid(
        dims in prop::collection::vec(1usize..=2, 1..=2),
        rank in 1usize..=3,
        seed in any::<u64>(),
    ) {
        let algebra = AlgebraSignature::new(dims).unwrap();
        let sig = ModuleSignature::new(
            algebra.clone(),
            vec![CentralProjection::full(&algebra); rank],
        )
        .unwrap();
        let mut rng = trial_rng(seed, 1);
        let x = ModuleVector::random_gaussian(&sig, &mut rng);
        if x.norm() > 0.0 {
            if let Some(y) = x.orthogonal_sample(seed).unwrap() {
                prop_assert!(x.inner_product(&y).unwrap().norm() <= 1e-10 * x.norm() * y.norm());
                prop_assert!((y.norm() - 1.0).abs() <= 1e-10);
            }
        }
    }
}
