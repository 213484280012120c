//! CLI behavior: pinned constant dumps, table shapes, config handling and
//! exit codes for the documented error cases.

use std::process::{Command, Output};

fn qem(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qem")).args(args).output().unwrap()
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("bad JSON ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

#[test]
fn constants_match_pinned_values() {
    let out = qem(&["constants", "--n", "3", "--m", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["P"].as_f64(), Some(5.0));
    assert_eq!(v["Q"].as_f64(), Some(6.0));
    assert_eq!(v["R"].as_f64(), Some(2.0));
    assert!(v["a"].is_null() && v["a1"].is_null() && v["a2"].is_null());

    let v = stdout_json(&qem(&["constants", "--n", "3", "--m", "2"]));
    assert!((v["b"].as_f64().unwrap() - 24.0).abs() < 1e-12);
    assert!((v["a2"].as_f64().unwrap() - (-8.0 - 4.0 * 6.0f64.sqrt())).abs() < 1e-10);
    assert!((v["a"].as_f64().unwrap() - v["a2"].as_f64().unwrap()).abs() == 0.0);

    let v = stdout_json(&qem(&["constants", "--n", "4", "--m", "5"]));
    assert!((v["b"].as_f64().unwrap() - 100.0).abs() < 1e-12);

    let out = qem(&["constants", "--n", "3", "--m", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn solve_writes_fifty_rows_with_definitional_f_column() {
    let out = qem(&["solve", "--family", "thm11", "--n", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("xi,phi,dphi,d2phi,u,du,d2u,f,mu"));
    let rows: Vec<&str> = lines.filter(|l| !l.is_empty()).collect();
    assert_eq!(rows.len(), 50);
    // m = 2 - n = -1 for this family: f = -m ln u = ln u
    for row in rows {
        let cells: Vec<f64> = row.split(',').map(|c| c.parse().unwrap()).collect();
        let (u, f) = (cells[4], cells[7]);
        assert!((f - u.ln()).abs() < 1e-12 * (1.0 + f.abs()), "row {row}");
    }
}

#[test]
fn solve_json_format_parses() {
    let out = qem(&["solve", "--family", "homothetic", "--m", "2", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 50);
    assert!(rows[0]["u"].as_f64().unwrap() > 0.0);
}

#[test]
fn missing_required_constant_is_a_usage_error() {
    let out = qem(&["solve", "--family", "quad_mgt1", "--n", "3", "--m", "2"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("C1"), "stderr: {err}");
}

#[test]
fn unknown_constant_and_family_are_usage_errors() {
    let out = qem(&["verify", "--family", "thm11", "--n", "3", "--const", "C9=1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = qem(&["verify", "--family", "nope", "--n", "3"]);
    assert_eq!(out.status.code(), Some(2));
    let out = qem(&["verify", "--family", "thm11", "--n", "3", "--m", "4"]);
    assert_eq!(out.status.code(), Some(2), "thm11 forces m = 2 - n");
}

#[test]
fn verify_reports_homothetic_mu() {
    let out = qem(&["verify", "--family", "homothetic", "--m", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert!((v["mu_mean"].as_f64().unwrap() - 2.0).abs() < 1e-10);
    assert_eq!(v["samples"].as_u64(), Some(50));
}

#[test]
fn sweep_marks_out_of_scope_points_without_aborting() {
    let out = qem(&[
        "sweep", "--family", "quad_mgt1", "--n-list", "3", "--m-list", "0.5,2", "--draws", "1",
        "--seed", "7", "--const", "corrected=1",
    ]);
    let v = stdout_json(&out);
    let points = v["points"].as_array().unwrap();
    assert_eq!(points.len(), 2);
    assert_eq!(points[0]["status"], "error");
    assert_eq!(points[1]["status"], "pass");
    assert_eq!(v["summary"]["error"].as_u64(), Some(1));
    assert_eq!(out.status.code(), Some(0), "errors are recorded, not fatal");
}

#[test]
fn empty_sweep_is_a_clean_noop() {
    let out = qem(&["sweep", "--family", "thm11", "--n-list", "3", "--draws", "0", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["summary"]["total"].as_u64(), Some(0));
    assert_eq!(v["points"].as_array().unwrap().len(), 0);
}

#[test]
fn config_file_round_trip_with_flag_overrides() {
    let dir = std::path::Path::new(env!("CARGO_TARGET_TMPDIR"));
    let cfg_path = dir.join("job.json");
    std::fs::write(
        &cfg_path,
        r#"{
            "family": "thm11",
            "n": 4,
            "constants": {"C1": 0.5, "C2": 1.0, "C3": 0.8, "C4": 1.2, "branch": 1},
            "xi_grid": {"min": -0.4, "max": 1.5, "count": 40, "margin": 0.05},
            "tolerances": {"fundamental": 1e-8}
        }"#,
    )
    .unwrap();
    let out = qem(&["verify", "--config", cfg_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));

    // a flag override that breaks the pair flips the verdict
    let out = qem(&[
        "verify", "--config", cfg_path.to_str().unwrap(), "--const", "C3_u=1.3",
    ]);
    assert_eq!(out.status.code(), Some(1));

    // malformed config is a usage error
    let bad = dir.join("bad.json");
    std::fs::write(&bad, "{\"family\": 7}").unwrap();
    let out = qem(&["verify", "--config", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn alpha_flag_accepts_any_nonzero_direction() {
    let out = qem(&[
        "verify", "--family", "thm11", "--n", "3", "--alpha", "1,1,1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let out = qem(&["verify", "--family", "thm11", "--n", "3", "--alpha", "1,1"]);
    assert_eq!(out.status.code(), Some(2), "dimension mismatch");
    let out = qem(&["verify", "--family", "thm11", "--n", "3", "--alpha", "-0.3,0.4,-1.2"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}
