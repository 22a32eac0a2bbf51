use std::path::Path;
use std::process::{Command, Output};

use flaf_cli::bundled;

fn flaf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_flaf"))
        .args(args)
        .env_remove("FLAF_OUT_DIR")
        .output()
        .expect("spawn flaf")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("exp.cfg");
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

fn list(dir: &Path) -> Vec<String> {
    let mut names: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    names
}

#[test]
fn run_writes_curves_chart_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), bundled::MEMORYLESS_2);
    let out = dir.path().join("out");
    let result = flaf(&[
        "run",
        "--config",
        &cfg,
        "--out",
        out.to_str().unwrap(),
        "--runs",
        "1",
        "--iterations",
        "300",
    ]);
    assert!(result.status.success(), "{}", stderr(&result));
    assert_eq!(
        list(&out),
        [
            "hbo_tflaf.csv",
            "hsaf.csv",
            "learning_curves.svg",
            "lms.csv",
            "manifest.txt",
            "single_phi_tflaf.csv",
            "tflaf.csv"
        ]
    );
    let manifest = std::fs::read_to_string(out.join("manifest.txt")).unwrap();
    assert!(manifest.contains("base_seed = 2024"), "{manifest}");
    assert!(manifest.contains("m_taps = 512"), "{manifest}");
    let csv = std::fs::read_to_string(out.join("tflaf.csv")).unwrap();
    assert!(csv.starts_with("iteration,mse_db_raw,mse_db_smoothed\n0,"));
    assert_eq!(csv.lines().count(), 301);
}

#[test]
fn reruns_are_byte_identical_and_seed_matters() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), bundled::MEMORY);
    let run = |name: &str, seed: &str| {
        let out = dir.path().join(name);
        let result = flaf(&[
            "run",
            "--config",
            &cfg,
            "--out",
            out.to_str().unwrap(),
            "--seed",
            seed,
            "--runs",
            "9",
            "--iterations",
            "2000",
        ]);
        assert!(result.status.success(), "{}", stderr(&result));
        out
    };
    let a = run("a", "5");
    let b = run("b", "5");
    let c = run("c", "6");
    for file in [
        "lms.csv",
        "tflaf.csv",
        "single_phi_tflaf.csv",
        "hbo_tflaf.csv",
        "hsaf.csv",
    ] {
        let bytes = |d: &Path| std::fs::read(d.join(file)).unwrap();
        assert_eq!(bytes(&a), bytes(&b), "{file}");
        assert_ne!(bytes(&a), bytes(&c), "{file}");
    }
    let hash = |d: &Path| {
        std::fs::read_to_string(d.join("manifest.txt"))
            .unwrap()
            .lines()
            .next()
            .unwrap()
            .to_string()
    };
    assert_eq!(hash(&a), hash(&b));
    assert_ne!(hash(&a), hash(&c));
}

#[test]
fn malformed_config_names_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &bundled::MEMORY.replace("mu_tflaf", "mu_tflfa"));
    let result = flaf(&["run", "--config", &cfg, "--out", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(result.status.code(), Some(2));
    let err = stderr(&result);
    assert!(err.contains("config") && err.contains("mu_tflfa"), "{err}");
    assert!(!dir.path().join("o").exists());
}

#[test]
fn divergence_is_reported_as_its_own_stage() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &bundled::MEMORY.replace("mu_lms = 0.003", "mu_lms = 50.0"));
    let result = flaf(&[
        "run",
        "--config",
        &cfg,
        "--out",
        dir.path().join("o").to_str().unwrap(),
        "--runs",
        "2",
        "--iterations",
        "1000",
    ]);
    assert_eq!(result.status.code(), Some(3));
    assert!(stderr(&result).contains("divergence"), "{}", stderr(&result));
}

#[test]
fn unwritable_output_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), bundled::MEMORY);
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "").unwrap();
    let result = flaf(&[
        "run",
        "--config",
        &cfg,
        "--out",
        blocker.to_str().unwrap(),
        "--runs",
        "1",
        "--iterations",
        "50",
    ]);
    assert_eq!(result.status.code(), Some(5));
    assert!(stderr(&result).contains("io"), "{}", stderr(&result));
}

#[test]
fn output_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let result = Command::new(env!("CARGO_BIN_EXE_flaf"))
        .args(["reproduce", "3c", "--runs", "1", "--iterations", "100"])
        .env("FLAF_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(result.status.success(), "{}", stderr(&result));
    assert!(dir.path().join("summary.txt").exists());
    assert!(dir.path().join("manifest.txt").exists());
}

fn cost_rows(args: &[&str]) -> Vec<Vec<String>> {
    let mut full = vec!["cost", "--format", "csv"];
    full.extend_from_slice(args);
    let result = flaf(&full);
    assert!(result.status.success(), "{}", stderr(&result));
    stdout(&result)
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn cost_rows_for_worked_example() {
    let row = |alg: &str| cost_rows(&["--algorithm", alg, "--m", "1024", "--qt", "7"]).remove(0);
    assert_eq!(row("tflaf")[4..7], ["17409", "14336", "6144"]);
    assert_eq!(row("hbo_tflaf")[4..7], ["9234", "9222", "6"]);
    assert_eq!(row("lms")[4..6], ["2049", "2048"]);
}

#[test]
fn cost_validate_reports_deltas() {
    let rows = cost_rows(&["--m", "8,32", "--validate"]);
    assert_eq!(rows.len(), 10);
    for row in rows {
        assert_eq!(row.len(), 14);
        assert_eq!(row[12], "0", "trig delta for {row:?}");
        assert_eq!(row[13], "true", "{row:?}");
    }
}

#[test]
fn inconsistent_cost_parameters_fail() {
    for args in [
        &["cost", "--qt", "4"][..],
        &["cost", "--qh", "1"],
        &["cost", "--m", "0"],
        &["cost", "--algorithm", "nlms"],
        &["cost", "--qh", "5", "--validate"],
    ] {
        let result = flaf(args);
        assert!(!result.status.success(), "{args:?}");
        assert!(stderr(&result).contains("config"), "{args:?}: {}", stderr(&result));
    }
}

#[test]
fn unknown_figure_rejected() {
    assert!(!flaf(&["reproduce", "4a"]).status.success());
}
