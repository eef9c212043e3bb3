//! End-to-end tests of the `tqkd` binary: exit codes, output files, and
//! the stability guarantees of the serialization contract.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tqkd_cli::output::report_from_json;

fn tqkd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tqkd"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path
}

fn honest_config(dir: &Path, n_pulses: u64, seed: u64) -> PathBuf {
    write_config(
        dir,
        "honest.json",
        &format!(r#"{{"n_pulses": {n_pulses}, "seed": {seed}}}"#),
    )
}

#[test]
fn run_honest_reports_zero_qber() {
    let dir = tempfile::tempdir().unwrap();
    let config = honest_config(dir.path(), 20_000, 1);
    let out = dir.path().join("report.json");
    let result = tqkd(&[
        "run",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(result.status.success(), "{result:?}");
    let report = report_from_json(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report.qber.unwrap().qber, 0.0);
    assert!(!report.verdict.is_attack_suspected());
}

#[test]
fn run_resend_full_reports_quarter_qber() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "attack.json",
        r#"{
            "n_pulses": 40000,
            "seed": 2,
            "eve": {"resend_full": {"ambiguous_policy": "guess_uniform"}},
            "reveal_fraction": 0.5
        }"#,
    );
    let out = dir.path().join("report.json");
    let result = tqkd(&[
        "run",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(result.status.success(), "{result:?}");
    let report = report_from_json(&fs::read_to_string(&out).unwrap()).unwrap();
    let qber = report.qber.unwrap().qber;
    assert!((0.23..=0.27).contains(&qber), "qber {qber}");
}

#[test]
fn run_rejects_bad_config_and_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "bad.json",
        r#"{"n_pulses": 10, "channel": {"transmittance": 1.5}}"#,
    );
    let out = dir.path().join("report.json");
    let result = tqkd(&[
        "run",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(!result.status.success());
    let stderr = String::from_utf8_lossy(&result.stderr);
    assert!(stderr.contains("channel.transmittance"), "{stderr}");
    assert!(!out.exists(), "failed runs must not leave partial output");
}

#[test]
fn run_rejects_missing_config_file() {
    let result = tqkd(&["run", "--config", "/nonexistent/config.json"]);
    assert!(!result.status.success());
    let stderr = String::from_utf8_lossy(&result.stderr);
    assert!(stderr.contains("config"), "{stderr}");
}

#[test]
fn identical_invocations_produce_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let config = honest_config(dir.path(), 5_000, 9);
    let out_a = dir.path().join("a.json");
    let out_b = dir.path().join("b.json");
    for out in [&out_a, &out_b] {
        let result = tqkd(&[
            "run",
            "--config",
            config.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(result.status.success());
    }
    assert_eq!(fs::read(&out_a).unwrap(), fs::read(&out_b).unwrap());
}

#[test]
fn seed_override_changes_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let config = honest_config(dir.path(), 5_000, 9);
    let base = tqkd(&["run", "--config", config.to_str().unwrap()]);
    let overridden = tqkd(&["run", "--config", config.to_str().unwrap(), "--seed", "10"]);
    assert!(base.status.success() && overridden.status.success());
    assert_ne!(base.stdout, overridden.stdout);
}

#[test]
fn eve_override_trips_the_attack_test() {
    let dir = tempfile::tempdir().unwrap();
    let config = honest_config(dir.path(), 20_000, 4);
    let result = tqkd(&[
        "run",
        "--config",
        config.to_str().unwrap(),
        "--eve",
        "resend-short=0.01",
    ]);
    assert!(result.status.success());
    let report = report_from_json(&String::from_utf8_lossy(&result.stdout)).unwrap();
    assert!(report.verdict.is_attack_suspected());
}

#[test]
fn csv_format_emits_the_fixed_summary() {
    let dir = tempfile::tempdir().unwrap();
    let config = honest_config(dir.path(), 2_000, 5);
    let result = tqkd(&[
        "run",
        "--config",
        config.to_str().unwrap(),
        "--format",
        "csv",
    ]);
    assert!(result.status.success());
    let stdout = String::from_utf8_lossy(&result.stdout);
    let mut lines = stdout.lines();
    assert_eq!(
        lines.next().unwrap(),
        "seed,sifted_len,qber,qber_lo,qber_hi,portA_frac,p_value,verdict"
    );
    assert!(lines.next().unwrap().starts_with("5,"));
}

#[test]
fn sweep_tracks_the_affine_disturbance_law() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "base.json",
        r#"{
            "n_pulses": 20000,
            "seed": 6,
            "eve": {"resend_full": {"ambiguous_policy": "guess_uniform"}},
            "reveal_fraction": 0.5
        }"#,
    );
    let out = dir.path().join("sweep.csv");
    let result = tqkd(&[
        "sweep",
        "--config",
        config.to_str().unwrap(),
        "--param",
        "intercept_fraction",
        "--from",
        "0",
        "--to",
        "1",
        "--steps",
        "3",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(result.status.success(), "{result:?}");
    let text = fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "parameter_value,seed,sifted_len,qber,qber_lo,qber_hi,portA_frac,p_value,verdict"
    );
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 3);
    for (row, f) in rows.iter().zip([0.0f64, 0.5, 1.0]) {
        let value: f64 = row[0].parse().unwrap();
        assert_eq!(value, f);
        let qber: f64 = row[3].parse().unwrap();
        assert!(
            (qber - f / 4.0).abs() < 0.05,
            "intercept fraction {f}: qber {qber}"
        );
    }
}

#[test]
fn shipped_sample_configs_run_cleanly() {
    let configs = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in fs::read_dir(&configs).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) != Some("json") {
            continue;
        }
        seen += 1;
        let result = tqkd(&["run", "--config", path.to_str().unwrap()]);
        assert!(result.status.success(), "{path:?}: {result:?}");
        report_from_json(&String::from_utf8_lossy(&result.stdout)).unwrap();
    }
    assert!(
        seen >= 3,
        "expected the sample configs to exist, saw {seen}"
    );
}

#[test]
fn sweep_rejects_single_step() {
    let dir = tempfile::tempdir().unwrap();
    let config = honest_config(dir.path(), 100, 0);
    let out = dir.path().join("sweep.csv");
    let result = tqkd(&[
        "sweep",
        "--config",
        config.to_str().unwrap(),
        "--param",
        "intercept_fraction",
        "--from",
        "0",
        "--to",
        "1",
        "--steps",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(!result.status.success());
    let stderr = String::from_utf8_lossy(&result.stderr);
    assert!(stderr.contains("steps"), "{stderr}");
    assert!(!out.exists());
}

#[test]
fn sweep_rejects_unknown_parameter() {
    let dir = tempfile::tempdir().unwrap();
    let config = honest_config(dir.path(), 100, 0);
    let result = tqkd(&[
        "sweep",
        "--config",
        config.to_str().unwrap(),
        "--param",
        "qber",
        "--from",
        "0",
        "--to",
        "1",
        "--steps",
        "2",
        "--out",
        dir.path().join("s.csv").to_str().unwrap(),
    ]);
    assert!(!result.status.success());
}
