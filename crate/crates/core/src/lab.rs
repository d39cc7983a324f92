//! Discretized C([0,1]) experiments on the commutative algebra ℂ^N.
//!
//! Two multiplication operators drive the lab. Multiplication by t is
//! orthogonality-preserving with κ = t² but not conformal, because κ is far
//! from scalar across the grid. Multiplication by
//! `a(t) = t·(sin(1/t) + i·cos(1/t))` has |a| = t and a phase that winds
//! without bound as t → 0: the winding count over a refining family of grids
//! diverges like 1/(2πε), which is the finite-dimensional witness that the
//! unitary phase has no continuous extension to 0 — on any fixed grid the
//! polar factorization exists, while the continuum limit loses it.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::algebra::{AlgebraElement, AlgebraSignature, CentralElement};
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::module::ModuleSignature;
use crate::operator::ModuleOperator;
use crate::theorems::{
    decide_cstar_conformal, decide_orthogonality_preserving,
};

/// Complex function sampled on a strictly increasing grid inside (0,1].
#[derive(Debug, Clone)]
pub struct GridFunction {
    grid: Vec<f64>,
    values: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(grid: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        if grid.len() != values.len() {
            return Err(Error::BadShape {
                context: format!("{} grid points vs {} values", grid.len(), values.len()),
            });
        }
        if grid.is_empty() {
            return Err(Error::BadShape {
                context: "empty grid".into(),
            });
        }
        for (i, &t) in grid.iter().enumerate() {
            if !(t > 0.0 && t <= 1.0) {
                return Err(Error::BadRange {
                    context: format!("grid point {i} = {t} outside (0, 1]"),
                });
            }
            if i > 0 && t <= grid[i - 1] {
                return Err(Error::BadRange {
                    context: format!("grid not strictly increasing at index {i}"),
                });
            }
        }
        Ok(Self { grid, values })
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn points(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Identify with an element of ℂ^N (N one-dimensional blocks).
    pub fn as_algebra_element(&self) -> (AlgebraSignature, AlgebraElement) {
        let sig = AlgebraSignature::commutative(self.len()).expect("nonempty grid");
        let blocks = self
            .values
            .iter()
            .map(|&v| {
                let mut b = ComplexMatrix::zeros(1, 1);
                b[(0, 0)] = v;
                b
            })
            .collect();
        let elem = AlgebraElement::from_blocks(sig.clone(), blocks).expect("shapes match");
        (sig, elem)
    }
}

/// Sample `a(t) = t·(sin(1/t) + i·cos(1/t))` on a grid uniform in s = 1/t
/// from s = 1 down to s = 1/eps, so each oscillation gets the same number of
/// samples. Endpoints land on t = eps and t = 1 exactly.
pub fn sample_example2(n: usize, eps: f64) -> Result<GridFunction> {
    if n < 2 {
        return Err(Error::BadRange {
            context: format!("need at least 2 samples, got {n}"),
        });
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::BadRange {
            context: format!("eps = {eps} outside (0, 1)"),
        });
    }
    let s_span = 1.0 / eps - 1.0;
    let mut grid = Vec::with_capacity(n);
    let mut values = Vec::with_capacity(n);
    for idx in 0..n {
        // idx ascends in t, so j = n−1−idx descends in s.
        let j = n - 1 - idx;
        let t = if j == 0 {
            1.0
        } else if j == n - 1 {
            eps
        } else {
            1.0 / (1.0 + j as f64 * s_span / (n - 1) as f64)
        };
        let s = 1.0 / t;
        grid.push(t);
        values.push(Complex64::new(t * s.sin(), t * s.cos()));
    }
    GridFunction::new(grid, values)
}

/// Total unwrapped phase divided by 2π.
///
/// Uses principal-branch differences of consecutive values; a jump at (or
/// numerically indistinguishable from) ±π trips `AliasingDetected` instead of
/// silently under-counting.
pub fn winding_count(f: &GridFunction) -> Result<f64> {
    for (i, v) in f.values().iter().enumerate() {
        if v.norm() == 0.0 {
            return Err(Error::ZeroValue { index: i });
        }
    }
    let mut total = 0.0;
    for i in 0..f.len() - 1 {
        let jump = (f.values()[i + 1] * f.values()[i].conj()).arg();
        if jump.abs() >= PI * (1.0 - 1e-9) {
            return Err(Error::AliasingDetected { index: i, jump });
        }
        total += jump;
    }
    Ok(total / (2.0 * PI))
}

/// Conformality witness on the grid: blocks at t_low and t_high where the
/// normalized inner products disagree by `deviation`.
#[derive(Debug, Clone)]
pub struct GridConformalWitness {
    pub t_low: f64,
    pub t_high: f64,
    pub deviation: f64,
}

/// Report of the multiplication-by-t experiment on a uniform grid of (0,1].
#[derive(Debug, Clone)]
pub struct Example1Report {
    pub n: usize,
    pub grid: Vec<f64>,
    pub op_verdict: bool,
    /// κ on the grid; equals t² exactly for this operator.
    pub kappa: Vec<f64>,
    pub min_kappa: f64,
    pub conformal_verdict: bool,
    pub witness: Option<GridConformalWitness>,
    pub note: String,
}

/// Build A = ℂ^N on the uniform grid t_j = j/N, M = A², T = multiplication
/// by t, and decide everything. The operator is orthogonality-preserving with
/// κ = t², and fails conformality with an explicit low-vs-high witness pair.
pub fn example1_report(n: usize) -> Result<Example1Report> {
    if n < 2 {
        return Err(Error::BadRange {
            context: format!("need at least 2 grid points, got {n}"),
        });
    }
    let grid: Vec<f64> = (1..=n).map(|j| j as f64 / n as f64).collect();
    let algebra = AlgebraSignature::commutative(n)?;
    let module = ModuleSignature::free(algebra.clone(), 2)?;
    let a = CentralElement::from_real(algebra, grid.clone())?;
    let op = ModuleOperator::central_multiplication(&module, &a);

    let cert = decide_orthogonality_preserving(&op, 1e-10);
    let kappa: Vec<f64> = cert
        .kappa
        .as_ref()
        .map(|k| k.scalars().iter().map(|z| z.re).collect())
        .unwrap_or_default();
    let min_kappa = kappa.iter().cloned().fold(f64::INFINITY, f64::min);

    let conformal = decide_cstar_conformal(&op, crate::theorems::DEFAULT_TOL);
    let witness = if !conformal.verdict && cert.verdict {
        // The sampler's structured pair on the extreme blocks is a witness;
        // reproduce its deviation on the scalar grid directly.
        let lo = 0usize;
        let hi = n - 1;
        let (klo, khi) = (kappa[lo], kappa[hi]);
        let deviation = 1.0 - (klo.min(khi) / klo.max(khi)).sqrt();
        Some(GridConformalWitness {
            t_low: grid[lo],
            t_high: grid[hi],
            deviation,
        })
    } else {
        None
    };

    Ok(Example1Report {
        n,
        grid,
        op_verdict: cert.verdict,
        kappa,
        min_kappa,
        conformal_verdict: conformal.verdict,
        witness,
        note: "range closedness is a continuum property and is not observable on a finite grid"
            .into(),
    })
}

#[derive(Debug, Clone)]
pub struct DivergenceRow {
    pub eps: f64,
    pub n: usize,
    pub winding: f64,
    pub predicted: f64,
}

/// Report of the phase-winding experiment.
#[derive(Debug, Clone)]
pub struct Example2Report {
    pub eps: f64,
    pub n: usize,
    pub winding: f64,
    pub predicted: f64,
    pub modulus_min: f64,
    pub phase_unwrap_ok: bool,
    /// Winding versus eps, halving eps down to eps/8 at fixed per-oscillation
    /// sampling density; monotone increasing.
    pub divergence: Vec<DivergenceRow>,
}

impl Example2Report {
    /// CSV rendering of the divergence table.
    pub fn divergence_csv(&self) -> String {
        let mut out = String::from("eps,n,winding,predicted\n");
        for row in &self.divergence {
            out.push_str(&format!(
                "{:.16e},{},{:.16e},{:.16e}\n",
                row.eps, row.n, row.winding, row.predicted
            ));
        }
        out
    }
}

fn predicted_winding(eps: f64) -> f64 {
    (1.0 / eps - 1.0) / (2.0 * PI)
}

/// Sample `a(t)` down to eps, count the phase winding, and tabulate its
/// divergence as eps halves at fixed per-oscillation density.
pub fn example2_polar_report(n: usize, eps: f64) -> Result<Example2Report> {
    let f = sample_example2(n, eps)?;
    let winding = winding_count(&f)?;
    let modulus_min = f.values().iter().map(|v| v.norm()).fold(f64::INFINITY, f64::min);

    let base_predicted = predicted_winding(eps);
    let mut divergence = Vec::with_capacity(4);
    for k in 0..4 {
        let eps_k = eps / (1u32 << k) as f64;
        let predicted = predicted_winding(eps_k);
        let n_k = ((n as f64) * predicted / base_predicted).ceil() as usize;
        let n_k = n_k.max(2);
        let fk = sample_example2(n_k, eps_k)?;
        divergence.push(DivergenceRow {
            eps: eps_k,
            n: n_k,
            winding: winding_count(&fk)?,
            predicted,
        });
    }

    Ok(Example2Report {
        eps,
        n,
        winding,
        predicted: base_predicted,
        modulus_min,
        phase_unwrap_ok: true,
        divergence,
    })
}

/// The oscillating multiplication operator on a finite grid still factors as
/// λ·V; used by tests to show the obstruction lives in the limit only.
pub fn example2_operator(n: usize, eps: f64) -> Result<(ModuleSignature, ModuleOperator)> {
    let f = sample_example2(n, eps)?;
    let (algebra, elem) = f.as_algebra_element();
    let module = ModuleSignature::free(algebra, 1)?;
    Ok((
        module.clone(),
        ModuleOperator::right_multiplication(&module, &elem),
    ))
}
