use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use traceineq::catalog::traces::updown1;
use traceineq::ensembles::{sample, EnsembleKind, EnsembleSpec};
use traceineq::linalg::{ComplexMatrix, PsdMatrix};

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_traceineq"))
        .args(args)
        .current_dir(dir)
        .env("TRACEINEQ_OUT_DIR", dir.join("out"))
        .output()
        .expect("binary runs")
}

fn write_matrix(dir: &Path, name: &str, m: &ComplexMatrix) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, m.to_json()).unwrap();
    path
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn eval_ordered_diagonal_pair_is_equality() {
    let dir = tempfile::tempdir().unwrap();
    let a = write_matrix(dir.path(), "a.json", &ComplexMatrix::diag(&[2.0, 1.0]));
    let b = write_matrix(dir.path(), "b.json", &ComplexMatrix::diag(&[1.0, 0.0]));
    let out = run(
        dir.path(),
        &["eval", "conjecture1", "--A", s(&a), "--B", s(&b), "--p", "1.5"],
    );
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_json(&out);
    assert!(report["slack"].as_f64().unwrap().abs() < 1e-12);
    assert!(dir
        .path()
        .join("out/eval-conjecture1.json.manifest.json")
        .exists());
}

#[test]
fn eval_non_hermitian_names_operand() {
    let dir = tempfile::tempdir().unwrap();
    let a = write_matrix(
        dir.path(),
        "a.json",
        &ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[0.0, 1.0]]).unwrap(),
    );
    let b = write_matrix(dir.path(), "b.json", &ComplexMatrix::diag(&[0.5, 0.0]));
    let out = run(
        dir.path(),
        &["eval", "lemma_otherway", "--A", s(&a), "--B", s(&b), "--p", "1.5"],
    );
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("NotHermitian") && err.contains("--A"), "{err}");
}

#[test]
fn eval_updown1_matches_library() {
    let dir = tempfile::tempdir().unwrap();
    let pair = sample(&EnsembleSpec::new(EnsembleKind::Psd, 5, 31).with_count(2)).unwrap();
    let a = write_matrix(dir.path(), "a.json", &pair.matrices[0]);
    let b = write_matrix(dir.path(), "b.json", &pair.matrices[1]);
    let out = run(
        dir.path(),
        &[
            "eval",
            "updown1",
            "--A",
            s(&a),
            "--B",
            s(&b),
            "--r",
            "0.7",
            "--s",
            "1.5",
        ],
    );
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_json(&out);
    let lib = updown1(
        &PsdMatrix::new(pair.matrices[0].clone()).unwrap(),
        &PsdMatrix::new(pair.matrices[1].clone()).unwrap(),
        0.7,
        1.5,
    )
    .unwrap();
    assert!(lib.slack >= 0.0);
    assert_eq!(report["slack"].as_f64().unwrap(), lib.slack);
}

#[test]
fn eval_conjecture_violation_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let a = write_matrix(dir.path(), "a.json", &ComplexMatrix::diag(&[1.0, 1.0]));
    let b = write_matrix(
        dir.path(),
        "b.json",
        &ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap(),
    );
    let out = run(
        dir.path(),
        &["eval", "conjecture2", "--A", s(&a), "--B", s(&b), "--p", "1.5"],
    );
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout_json(&out)["verdict"], "violated");
}

#[test]
fn eval_usage_errors_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let a = write_matrix(dir.path(), "a.json", &ComplexMatrix::diag(&[1.0, 1.0]));
    std::fs::write(
        dir.path().join("bad.json"),
        r#"{"dim": 2, "entries": [[[1, 0]]]}"#,
    )
    .unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["eval", "conjecture1", "--A", s(&a), "--p", "1.5"],
        vec![
            "eval",
            "conjecture1",
            "--A",
            s(&a),
            "--B",
            "bad.json",
            "--p",
            "1.5",
        ],
        vec!["eval", "conjecture1", "--A", s(&a), "--B", s(&a)],
        vec!["eval", "conjecture1", "--A", s(&a), "--B", s(&a), "--p", "x"],
        vec!["eval", "no_such", "--A", s(&a)],
        vec!["frobnicate"],
    ];
    for args in cases {
        assert_eq!(run(dir.path(), &args).status.code(), Some(3), "{args:?}");
    }
}

#[test]
fn verify_writes_sections_summary_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        dir.path(),
        &[
            "verify",
            "all",
            "--dims",
            "2..6",
            "--samples",
            "20",
            "--seed",
            "1",
        ],
    );
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(dir.path().join("out/verify-all.ndjson")).unwrap();
    let lines: Vec<serde_json::Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 13);
    assert!(lines[..12].iter().all(|l| l["suite"].is_string()));
    assert_eq!(lines[12]["summary"]["exit_code"], 0);
    let manifest: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("out/verify-all.ndjson.manifest.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(manifest["command"], "verify");
    assert_eq!(manifest["effective_config"]["samples"], 20);
    assert_eq!(manifest["overrides"]["seed"], "1");
}

#[test]
fn verify_hanner_p2_collapses() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        dir.path(),
        &["verify", "hanner-matrix", "--p", "2", "--samples", "100"],
    );
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(dir.path().join("out/verify-hanner-matrix.ndjson")).unwrap();
    let section: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    for (key, check) in section["checks"].as_object().unwrap() {
        let margin = check["min_margin"].as_f64().unwrap();
        if key.ends_with("equality") {
            assert!(margin >= 0.0, "{key}");
        } else {
            assert!(margin.abs() <= 1e-10, "{key}: {margin}");
        }
    }
}

#[test]
fn verify_config_errors_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["verify", "updown2", "--s", "1.5"],
        vec!["verify", "no-such-suite"],
        vec!["verify", "theorem1", "--dims", "6..2"],
        vec!["verify", "theorem1", "--samples", "0"],
    ] {
        assert_eq!(run(dir.path(), &args).status.code(), Some(3), "{args:?}");
    }
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("run.toml"),
        "[ensembles]\ndims = [2, 3]\nsamples = 7\nseed = 4\n[tolerances]\nverdict = 1e-9\n",
    )
    .unwrap();
    let out = run(
        dir.path(),
        &["verify", "resolvent", "--config", "run.toml", "--seed", "9"],
    );
    assert_eq!(out.status.code(), Some(0));
    let manifest: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("out/verify-resolvent.ndjson.manifest.json")).unwrap(),
    )
    .unwrap();
    let cfg = &manifest["effective_config"];
    assert_eq!(cfg["samples"], 7);
    assert_eq!(cfg["seed"], 9);
    assert_eq!(cfg["tolerance"], 1e-9);
    assert_eq!(cfg["dims"], serde_json::json!([2, 3]));
}

fn hunt_config(dir: &Path, body: &str) -> PathBuf {
    let path = dir.join("hunt.toml");
    std::fs::write(&path, format!("[hunt]\n{body}")).unwrap();
    path
}

#[test]
fn hunt_planted_exits_one_with_record() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = hunt_config(
        dir.path(),
        "inequality_id = \"planted_reverse_lt\"\nparam_grid = { s = [2.0] }\ndims = [3]\nrestarts = 6\nensemble_kind = \"psd\"\n",
    );
    let out = run(dir.path(), &["hunt", "--config", s(&cfg)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(
        String::from_utf8_lossy(&out.stderr)
            .lines()
            .filter(|l| l.starts_with("restart"))
            .count()
            == 6
    );
    let text = std::fs::read_to_string(dir.path().join("out/hunt-planted_reverse_lt.ndjson")).unwrap();
    let record: traceineq::hunter::HuntRecord = serde_json::from_str(text.lines().last().unwrap()).unwrap();
    assert!(record.found_violation());
    assert!(traceineq::hunter::verify_replay(&record).unwrap());
}

#[test]
fn hunt_proved_target_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = hunt_config(
        dir.path(),
        "inequality_id = \"updown1\"\nparam_grid = { r = [0.5], s = [2.0] }\ndims = [2, 3]\nrestarts = 4\nensemble_kind = \"psd\"\n",
    );
    let out = run(
        dir.path(),
        &["hunt", "--config", s(&cfg), "--restarts", "3", "--seed", "8"],
    );
    assert_eq!(out.status.code(), Some(0));
    let manifest: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("out/hunt-updown1.ndjson.manifest.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(manifest["effective_config"]["restarts"], 3);
    assert_eq!(manifest["effective_config"]["seed"], 8);
}

#[test]
fn hunt_incompatible_ensemble_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = hunt_config(
        dir.path(),
        "inequality_id = \"lemma_otherway\"\nparam_grid = { p = [1.5] }\ndims = [2]\nensemble_kind = \"general_complex\"\n",
    );
    assert_eq!(
        run(dir.path(), &["hunt", "--config", s(&cfg)]).status.code(),
        Some(3)
    );
    std::fs::write(dir.path().join("empty.toml"), "").unwrap();
    assert_eq!(
        run(dir.path(), &["hunt", "--config", "empty.toml"]).status.code(),
        Some(3)
    );
}

#[test]
fn registry_listing_and_lookup() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["registry"]);
    assert_eq!(out.status.code(), Some(0));
    let entries = stdout_json(&out);
    let entries = entries.as_array().unwrap();
    assert_eq!(entries.len(), 16);
    assert!(entries.iter().all(|e| e["status"].is_string()));
    let one = stdout_json(&run(dir.path(), &["registry", "--id", "conjecture1"]));
    assert_eq!(one["status"], "conjecture");
    assert_eq!(
        run(dir.path(), &["registry", "--id", "nope"]).status.code(),
        Some(3)
    );
}
