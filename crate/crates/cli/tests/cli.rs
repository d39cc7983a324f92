//! End-to-end tests through the binary: exit codes, schema shape, and
//! byte-level determinism.

use std::process::{Command, Output};

fn cstarmod(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cstarmod"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is json")
}

#[test]
fn gen_then_check_recovers_the_declared_lambda() {
    let dir = std::env::temp_dir().join("cstarmod-gen-check");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("instance.json");
    let gen = cstarmod(&[
        "gen",
        "--blocks",
        "1,2",
        "--lambda",
        "1,2",
        "--seed",
        "7",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(gen.status.code(), Some(0));

    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(doc["schema"], "v1");
    assert_eq!(doc["ground_truth"]["kind"], "scaled_isometry");

    let check = cstarmod(&["check", "--input", path.to_str().unwrap()]);
    assert_eq!(check.status.code(), Some(0));
    let cert = stdout_json(&check);
    assert_eq!(cert["verdict"], true);
    let kappa = cert["kappa"].as_array().unwrap();
    assert!((kappa[0].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert!((kappa[1].as_f64().unwrap() - 4.0).abs() < 1e-9);
}

#[test]
fn check_rejects_the_shift_kernel_with_exit_one() {
    // Hand-built fixture: A = ℂ, M = A², kernel t_{10} = 1, everything else 0.
    let zero = "[[[[0.0,0.0]]]]";
    let unit = "[[[[1.0,0.0]]]]";
    let operator = format!(
        r#"{{"signature":{{"algebra":[1],"masks":[[true],[true]]}},"kernel":[[{zero},{zero}],[{unit},{zero}]]}}"#
    );
    let dir = std::env::temp_dir().join("cstarmod-shift");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("shift.json");
    std::fs::write(&path, operator).unwrap();

    let check = cstarmod(&["check", "--input", path.to_str().unwrap(), "--trials", "50"]);
    assert_eq!(check.status.code(), Some(1), "verdict failure exits 1");
    let cert = stdout_json(&check);
    assert_eq!(cert["verdict"], false);
    let witness = &cert["violation"]["witness"];
    assert!(witness.is_object(), "violation carries a witness pair");
    assert!(cert["violation"]["defect"].as_f64().unwrap() > 0.5);
    assert_eq!(cert["sampled"]["verdict"], false, "definitional oracle agrees");
}

#[test]
fn decompose_emits_lambda_support_and_small_reconstruction_error() {
    let dir = std::env::temp_dir().join("cstarmod-decompose");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("instance.json");
    let gen = cstarmod(&[
        "gen",
        "--blocks",
        "2,1",
        "--lambda",
        "1.5,0",
        "--seed",
        "11",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(gen.status.code(), Some(0));

    let out = cstarmod(&["decompose", "--input", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let doc = stdout_json(&out);
    let lambda = doc["lambda"].as_array().unwrap();
    assert!((lambda[0].as_f64().unwrap() - 1.5).abs() < 1e-9);
    assert!(lambda[1].as_f64().unwrap().abs() < 1e-9);
    assert_eq!(doc["support"], serde_json::json!([true, false]));
    assert!(doc["reconstruction_error"].as_f64().unwrap() < 1e-9);
}

#[test]
fn conformal_flags_non_scalar_kappa_and_exits_one() {
    let dir = std::env::temp_dir().join("cstarmod-conformal");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("instance.json");
    cstarmod(&[
        "gen",
        "--blocks",
        "1,1",
        "--lambda",
        "1,2",
        "--seed",
        "3",
        "--output",
        path.to_str().unwrap(),
    ]);
    let out = cstarmod(&["conformal", "--input", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let doc = stdout_json(&out);
    assert_eq!(doc["cstar_conformal"], false);
    assert_eq!(doc["conformal"], false);
    assert_eq!(doc["injective"], true);
    assert_eq!(doc["certificate"]["verdict"], true);
    assert_eq!(doc["sampled_cstar"]["verdict"], false);
    assert_eq!(doc["sampled_conformal"]["verdict"], false);

    // A scalar multiple of an isometry passes with the right scale.
    let path2 = dir.join("scalar.json");
    cstarmod(&[
        "gen",
        "--blocks",
        "1,1",
        "--lambda",
        "2,2",
        "--seed",
        "3",
        "--output",
        path2.to_str().unwrap(),
    ]);
    let out = cstarmod(&["conformal", "--input", path2.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let doc = stdout_json(&out);
    assert_eq!(doc["cstar_conformal"], true);
    assert!((doc["scale"].as_f64().unwrap() - 2.0).abs() < 1e-9);
}

#[test]
fn example_reports_have_the_documented_shape() {
    let out = cstarmod(&["example1", "--n", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = stdout_json(&out);
    assert_eq!(doc["schema"], "v1");
    assert_eq!(doc["op_verdict"], true);
    assert_eq!(doc["conformal_verdict"], false);
    let kappa: Vec<f64> = doc["kappa"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    assert_eq!(kappa, vec![0.0625, 0.25, 0.5625, 1.0]);

    let out = cstarmod(&["example2", "--eps", "0.5", "--n", "4000"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = stdout_json(&out);
    let winding = doc["winding"].as_f64().unwrap();
    assert!((winding - 0.159) .abs() < 0.01);
    let rows = doc["divergence"].as_array().unwrap();
    assert_eq!(rows.len(), 4);

    let csv = cstarmod(&[
        "example2", "--eps", "0.5", "--n", "4000", "--format", "csv",
    ]);
    let text = String::from_utf8(csv.stdout).unwrap();
    assert!(text.starts_with("eps,n,winding,predicted\n"));
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn example2_default_resolution_matches_the_analytic_winding() {
    let out = cstarmod(&["example2", "--eps", "1e-3", "--n", "100000"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = stdout_json(&out);
    let winding = doc["winding"].as_f64().unwrap();
    // (1/ε − 1)/2π ≈ 158.99 full turns down to t = 1e-3.
    assert!((winding - 158.9958).abs() < 0.51, "winding {winding}");
    assert!((doc["modulus_min"].as_f64().unwrap() - 1e-3).abs() < 1e-15);
}

#[test]
fn identical_configs_produce_byte_identical_reports() {
    for args in [
        vec!["example2", "--eps", "1e-2", "--n", "5000"],
        vec!["gen", "--blocks", "2,2", "--seed", "99"],
        vec!["example1", "--n", "16"],
    ] {
        let a = cstarmod(&args);
        let b = cstarmod(&args);
        assert_eq!(a.stdout, b.stdout, "non-deterministic output for {args:?}");
        assert!(!a.stdout.is_empty());
    }
}

#[test]
fn parse_errors_exit_two() {
    let dir = std::env::temp_dir().join("cstarmod-bad");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.json");
    std::fs::write(&path, "{ not json").unwrap();
    let out = cstarmod(&["check", "--input", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    let missing = dir.join("does-not-exist.json");
    let out = cstarmod(&["check", "--input", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    let out = cstarmod(&["gen", "--blocks", "0"]);
    assert_eq!(out.status.code(), Some(2));

    let out = cstarmod(&["example2", "--eps", "2.0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn suite_runs_every_criterion_and_passes() {
    let out = cstarmod(&["suite", "--seed", "2024"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = stdout_json(&out);
    assert_eq!(doc["all_passed"], true);
    let criteria = doc["criteria"].as_array().unwrap();
    assert_eq!(criteria.len(), 7);
    for c in criteria {
        assert_eq!(c["passed"], true, "criterion {} failed", c["id"]);
    }
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert_eq!(stderr.lines().filter(|l| l.starts_with("PASS")).count(), 7);
}
