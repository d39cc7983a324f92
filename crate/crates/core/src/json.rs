//! JSON schemas (v1) for algebras, modules, operators, certificates, and lab
//! reports.
//!
//! - algebra signature: array of block dimensions, `[2, 3]`
//! - algebra element: array of blocks; block = array of rows; entry = [re, im]
//! - module signature: `{"algebra": [...], "masks": [[true, ...], ...]}`
//! - module vector: array of elements
//! - operator: `{"signature": {...}, "kernel": [[element, ...], ...]}`
//! - certificate: `{"schema": "v1", "verdict": ..., "kappa"?, "violation"?,
//!   "restricted"}`
//!
//! Emission goes through [`to_json_string`], which renders every float with
//! 17 significant digits; that pins byte-identical output for identical runs
//! and survives the round trip bit-exactly.

use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::algebra::{AlgebraElement, AlgebraSignature, CentralProjection};
use crate::error::{Error, Result};
use crate::lab::{Example1Report, Example2Report};
use crate::linalg::ComplexMatrix;
use crate::module::{ModuleSignature, ModuleVector};
use crate::operator::ModuleOperator;
use crate::theorems::{OpCertificate, SampledConformalCheck, SampledOpCheck, ViolationKind, WitnessPair};

pub const SCHEMA_VERSION: &str = "v1";

struct SigFigFormatter;

impl serde_json::ser::Formatter for SigFigFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W>(&mut self, writer: &mut W, value: f32) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        write!(writer, "{value:.16e}")
    }
}

/// Serialize with all floats at 17 significant digits.
pub fn to_json_string(value: &Value) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SigFigFormatter);
    value
        .serialize(&mut ser)
        .expect("in-memory serialization cannot fail");
    String::from_utf8(out).expect("serializer emits utf8")
}

pub fn parse(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::Schema {
        context: format!("invalid json: {e}"),
    })
}

fn schema_err(context: impl Into<String>) -> Error {
    Error::Schema {
        context: context.into(),
    }
}

fn as_array<'v>(v: &'v Value, what: &str) -> Result<&'v Vec<Value>> {
    v.as_array().ok_or_else(|| schema_err(format!("{what}: expected array")))
}

fn as_f64(v: &Value, what: &str) -> Result<f64> {
    v.as_f64().ok_or_else(|| schema_err(format!("{what}: expected number")))
}

// ---- algebra ----------------------------------------------------------

pub fn algebra_signature_to_value(sig: &AlgebraSignature) -> Value {
    Value::Array(
        sig.block_dims()
            .iter()
            .map(|&n| Value::from(n as u64))
            .collect(),
    )
}

pub fn algebra_signature_from_value(v: &Value) -> Result<AlgebraSignature> {
    let dims = as_array(v, "algebra signature")?
        .iter()
        .map(|d| {
            d.as_u64()
                .map(|n| n as usize)
                .ok_or_else(|| schema_err("algebra signature: expected positive integer"))
        })
        .collect::<Result<Vec<_>>>()?;
    AlgebraSignature::new(dims)
}

fn matrix_to_value(m: &ComplexMatrix) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|i| {
                Value::Array(
                    (0..m.cols())
                        .map(|j| json!([m[(i, j)].re, m[(i, j)].im]))
                        .collect(),
                )
            })
            .collect(),
    )
}

fn matrix_from_value(v: &Value, n: usize) -> Result<ComplexMatrix> {
    let rows = as_array(v, "matrix block")?;
    if rows.len() != n {
        return Err(schema_err(format!("block: expected {n} rows, got {}", rows.len())));
    }
    let mut entries = Vec::with_capacity(n * n);
    for row in rows {
        let cols = as_array(row, "matrix row")?;
        if cols.len() != n {
            return Err(schema_err(format!("block: expected {n} columns, got {}", cols.len())));
        }
        for entry in cols {
            let pair = as_array(entry, "matrix entry")?;
            if pair.len() != 2 {
                return Err(schema_err("matrix entry: expected [re, im]"));
            }
            entries.push(Complex64::new(
                as_f64(&pair[0], "re")?,
                as_f64(&pair[1], "im")?,
            ));
        }
    }
    ComplexMatrix::new(n, n, entries)
}

pub fn algebra_element_to_value(e: &AlgebraElement) -> Value {
    Value::Array(e.blocks().iter().map(matrix_to_value).collect())
}

pub fn algebra_element_from_value(v: &Value, sig: &AlgebraSignature) -> Result<AlgebraElement> {
    let blocks = as_array(v, "algebra element")?;
    if blocks.len() != sig.num_blocks() {
        return Err(schema_err(format!(
            "element: expected {} blocks, got {}",
            sig.num_blocks(),
            blocks.len()
        )));
    }
    let parsed = blocks
        .iter()
        .enumerate()
        .map(|(m, b)| matrix_from_value(b, sig.block_dim(m)))
        .collect::<Result<Vec<_>>>()?;
    AlgebraElement::from_blocks(sig.clone(), parsed)
}

// ---- module ------------------------------------------------------------

pub fn module_signature_to_value(sig: &ModuleSignature) -> Value {
    json!({
        "algebra": algebra_signature_to_value(sig.algebra()),
        "masks": sig
            .components()
            .iter()
            .map(|q| Value::Array(q.mask().iter().map(|&b| Value::from(b)).collect()))
            .collect::<Vec<_>>(),
    })
}

pub fn module_signature_from_value(v: &Value) -> Result<ModuleSignature> {
    let obj = v
        .as_object()
        .ok_or_else(|| schema_err("module signature: expected object"))?;
    let algebra = algebra_signature_from_value(
        obj.get("algebra")
            .ok_or_else(|| schema_err("module signature: missing 'algebra'"))?,
    )?;
    let masks = as_array(
        obj.get("masks")
            .ok_or_else(|| schema_err("module signature: missing 'masks'"))?,
        "masks",
    )?;
    let components = masks
        .iter()
        .map(|mask| {
            let bits = as_array(mask, "mask")?
                .iter()
                .map(|b| b.as_bool().ok_or_else(|| schema_err("mask: expected booleans")))
                .collect::<Result<Vec<_>>>()?;
            CentralProjection::new(algebra.clone(), bits)
        })
        .collect::<Result<Vec<_>>>()?;
    ModuleSignature::new(algebra, components)
}

pub fn module_vector_to_value(x: &ModuleVector) -> Value {
    Value::Array(x.components().iter().map(algebra_element_to_value).collect())
}

pub fn module_vector_from_value(v: &Value, sig: &ModuleSignature) -> Result<ModuleVector> {
    let comps = as_array(v, "module vector")?
        .iter()
        .map(|c| algebra_element_from_value(c, sig.algebra()))
        .collect::<Result<Vec<_>>>()?;
    ModuleVector::new(sig.clone(), comps)
}

// ---- operator ----------------------------------------------------------

pub fn operator_to_value(op: &ModuleOperator) -> Value {
    let n = op.signature().rank();
    let kernel: Vec<Value> = (0..n)
        .map(|i| {
            Value::Array(
                (0..n)
                    .map(|j| algebra_element_to_value(op.entry(i, j)))
                    .collect(),
            )
        })
        .collect();
    json!({
        "signature": module_signature_to_value(op.signature()),
        "kernel": kernel,
    })
}

pub fn operator_from_value(v: &Value) -> Result<ModuleOperator> {
    let obj = v
        .as_object()
        .ok_or_else(|| schema_err("operator: expected object"))?;
    let sig = module_signature_from_value(
        obj.get("signature")
            .ok_or_else(|| schema_err("operator: missing 'signature'"))?,
    )?;
    let rows = as_array(
        obj.get("kernel")
            .ok_or_else(|| schema_err("operator: missing 'kernel'"))?,
        "kernel",
    )?;
    let n = sig.rank();
    if rows.len() != n {
        return Err(schema_err(format!("kernel: expected {n} rows, got {}", rows.len())));
    }
    let mut kernel = Vec::with_capacity(n * n);
    for row in rows {
        let cols = as_array(row, "kernel row")?;
        if cols.len() != n {
            return Err(schema_err(format!("kernel: expected {n} columns, got {}", cols.len())));
        }
        for entry in cols {
            kernel.push(algebra_element_from_value(entry, sig.algebra())?);
        }
    }
    ModuleOperator::from_kernel(sig, kernel)
}

// ---- certificates and reports -----------------------------------------

fn witness_to_value(w: &WitnessPair) -> Value {
    json!({
        "x": module_vector_to_value(&w.x),
        "y": module_vector_to_value(&w.y),
        "input_overlap": w.input_overlap,
        "output_overlap": w.output_overlap,
    })
}

fn violation_kind_to_value(kind: &ViolationKind) -> Value {
    match kind {
        ViolationKind::OffDiagonal { row, col, block } => json!({
            "kind": "off_diagonal",
            "row": *row as u64,
            "col": *col as u64,
            "block": *block as u64,
        }),
        ViolationKind::NonCentralDiagonal { component, block } => json!({
            "kind": "non_central_diagonal",
            "component": *component as u64,
            "block": *block as u64,
        }),
        ViolationKind::ScalarMismatch {
            block,
            component_a,
            component_b,
        } => json!({
            "kind": "scalar_mismatch",
            "block": *block as u64,
            "component_a": *component_a as u64,
            "component_b": *component_b as u64,
        }),
        ViolationKind::NegativeScalar { block } => json!({
            "kind": "negative_scalar",
            "block": *block as u64,
        }),
    }
}

pub fn certificate_to_value(cert: &OpCertificate) -> Value {
    let mut obj = Map::new();
    obj.insert("schema".into(), Value::from(SCHEMA_VERSION));
    obj.insert("verdict".into(), Value::from(cert.verdict));
    obj.insert("restricted".into(), Value::from(cert.restricted));
    if let Some(kappa) = &cert.kappa {
        obj.insert(
            "kappa".into(),
            Value::Array(kappa.scalars().iter().map(|z| Value::from(z.re)).collect()),
        );
    }
    if let Some(violation) = &cert.violation {
        let mut v = Map::new();
        v.insert("defect".into(), Value::from(violation.defect));
        v.insert("cause".into(), violation_kind_to_value(&violation.kind));
        if let Some(w) = &violation.witness {
            v.insert("witness".into(), witness_to_value(w));
        }
        obj.insert("violation".into(), Value::Object(v));
    }
    Value::Object(obj)
}

pub fn sampled_op_check_to_value(check: &SampledOpCheck) -> Value {
    json!({
        "verdict": check.verdict,
        "worst_deviation": check.worst_deviation,
        "violating_trials": check.violating_trials as u64,
        "first_violation": check.first_violation.map(|t| t as u64),
        "trials": check.trials as u64,
    })
}

pub fn sampled_conformal_to_value(check: &SampledConformalCheck) -> Value {
    json!({
        "verdict": check.verdict,
        "injective": check.injective,
        "worst_deviation": check.worst_deviation,
        "trials": check.trials as u64,
    })
}

pub fn example1_report_to_value(report: &Example1Report) -> Value {
    json!({
        "schema": SCHEMA_VERSION,
        "n": report.n as u64,
        "grid": report.grid,
        "op_verdict": report.op_verdict,
        "kappa": report.kappa,
        "min_kappa": report.min_kappa,
        "conformal_verdict": report.conformal_verdict,
        "witness": report.witness.as_ref().map(|w| json!({
            "t_low": w.t_low,
            "t_high": w.t_high,
            "deviation": w.deviation,
        })),
        "note": report.note,
    })
}

pub fn example2_report_to_value(report: &Example2Report) -> Value {
    json!({
        "schema": SCHEMA_VERSION,
        "eps": report.eps,
        "n": report.n as u64,
        "winding": report.winding,
        "predicted": report.predicted,
        "modulus_min": report.modulus_min,
        "phase_unwrap_ok": report.phase_unwrap_ok,
        "divergence": report.divergence.iter().map(|row| json!({
            "eps": row.eps,
            "n": row.n as u64,
            "winding": row.winding,
            "predicted": row.predicted,
        })).collect::<Vec<_>>(),
    })
}
