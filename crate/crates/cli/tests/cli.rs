//! End-to-end tests of the `wiretap` binary: file formats, verbs, exit
//! codes, and output determinism.

use std::path::Path;
use std::process::{Command, Output};

fn wiretap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wiretap"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

const SCALAR_CHANNEL: &str = r#"{"H_r": [[[2.0, 0.0]]], "H_e": [[[1.0, 0.0]]]}"#;

#[test]
fn rate_evaluates_scalar_channel() {
    let dir = tempfile::tempdir().unwrap();
    let ch = dir.path().join("channel.json");
    let cov = dir.path().join("cov.json");
    write(&ch, SCALAR_CHANNEL);
    write(&cov, r#"{"K": [[[1.0, 0.0]]]}"#);
    let out = wiretap(&[
        "rate",
        "--channel",
        ch.to_str().unwrap(),
        "--covariance",
        cov.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    // ln 5 - ln 2 = 0.9162907...
    assert!(text.contains("proper_rate,0.916290731874"), "{text}");
    assert!(text.contains("nats"), "{text}");
}

#[test]
fn rate_converts_to_bits() {
    let dir = tempfile::tempdir().unwrap();
    let ch = dir.path().join("channel.json");
    let cov = dir.path().join("cov.json");
    write(&ch, SCALAR_CHANNEL);
    write(&cov, r#"{"K": [[[1.0, 0.0]]]}"#);
    let out = wiretap(&[
        "rate",
        "--channel",
        ch.to_str().unwrap(),
        "--covariance",
        cov.to_str().unwrap(),
        "--unit",
        "bits",
    ]);
    assert!(out.status.success());
    // 0.9162907 / ln 2 = 1.3219280...
    assert!(stdout(&out).contains("proper_rate,1.321928094887"), "{}", stdout(&out));
}

#[test]
fn rate_accepts_improper_covariance() {
    let dir = tempfile::tempdir().unwrap();
    let ch = dir.path().join("channel.json");
    let cov = dir.path().join("cov.json");
    write(&ch, SCALAR_CHANNEL);
    write(&cov, r#"{"K": [[[1.0, 0.0]]], "K_tilde": [[[1.0, 0.0]]]}"#);
    let out = wiretap(&[
        "rate",
        "--channel",
        ch.to_str().unwrap(),
        "--covariance",
        cov.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    // 0.5 (ln 9 - ln 3) = 0.5493061...
    assert!(text.contains("general_rate,0.549306144334"), "{text}");
    assert!(!text.contains("proper_rate"), "{text}");
}

#[test]
fn missing_channel_file_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cov = dir.path().join("cov.json");
    write(&cov, r#"{"K": [[[1.0, 0.0]]]}"#);
    let out = wiretap(&[
        "rate",
        "--channel",
        dir.path().join("nope.json").to_str().unwrap(),
        "--covariance",
        cov.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1), "{}", stderr(&out));
}

#[test]
fn empty_channel_file_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let ch = dir.path().join("channel.json");
    let cov = dir.path().join("cov.json");
    write(&ch, "");
    write(&cov, r#"{"K": [[[1.0, 0.0]]]}"#);
    let out = wiretap(&[
        "rate",
        "--channel",
        ch.to_str().unwrap(),
        "--covariance",
        cov.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("parse"), "{}", stderr(&out));
}

#[test]
fn transmit_dimension_mismatch_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let ch = dir.path().join("channel.json");
    let cov = dir.path().join("cov.json");
    write(
        &ch,
        r#"{"H_r": [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]],
            "H_e": [[[1.0, 0.0], [0.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0], [0.0, 0.0]]]}"#,
    );
    write(&cov, r#"{"K": [[[1.0, 0.0]]]}"#);
    let out = wiretap(&[
        "rate",
        "--channel",
        ch.to_str().unwrap(),
        "--covariance",
        cov.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("dimension"), "{}", stderr(&out));
}

#[test]
fn infeasible_covariance_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let ch = dir.path().join("channel.json");
    let cov = dir.path().join("cov.json");
    write(&ch, SCALAR_CHANNEL);
    write(&cov, r#"{"K": [[[1.0, 0.0]]], "K_tilde": [[[1.1, 0.0]]]}"#);
    let out = wiretap(&[
        "rate",
        "--channel",
        ch.to_str().unwrap(),
        "--covariance",
        cov.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("infeasible"), "{}", stderr(&out));
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let out = wiretap(&["rate", "--bogus"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn help_is_success() {
    let out = wiretap(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn optimize_writes_trace_with_unit_header() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.csv");
    let out = wiretap(&[
        "optimize",
        "--builtin",
        "--snr-db",
        "6",
        "--mode",
        "proper",
        "--trace-out",
        trace.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = std::fs::read_to_string(&trace).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "iteration,objective_nats");
    assert!(lines.next().unwrap().starts_with("0,"));
    // summary row on stdout with the stable header
    let so = stdout(&out);
    assert!(so.contains("mode,solver,snr_db,rate,unit,iterations,converged"), "{so}");
    assert!(so.contains("proper,pg,6,1.936"), "{so}");
}

#[test]
fn sweep_writes_one_trace_per_point_and_a_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("runs");
    let out = wiretap(&[
        "sweep",
        "--builtin",
        "--snr-db",
        "6",
        "--mode",
        "proper",
        "--out-dir",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let entries: Vec<_> = std::fs::read_dir(&out_dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    assert_eq!(entries.len(), 2, "{entries:?}"); // one trace + summary.csv
    assert!(entries.contains(&"summary.csv".to_string()));
    assert!(entries.contains(&"trace_proper_pg_snr6_seed0.csv".to_string()));
    let summary = std::fs::read_to_string(out_dir.join("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 2); // header + one row
}

#[test]
fn sweep_traces_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let d1 = dir.path().join("a");
    let d2 = dir.path().join("b");
    for d in [&d1, &d2] {
        let out = wiretap(&[
            "sweep",
            "--builtin",
            "--snr-db",
            "6",
            "--mode",
            "general",
            "--seeds",
            "3",
            "--out-dir",
            d.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", stderr(&out));
    }
    let name = "trace_general_pg_snr6_seed3.csv";
    let a = std::fs::read(d1.join(name)).unwrap();
    let b = std::fs::read(d2.join(name)).unwrap();
    assert_eq!(a, b, "trace files differ between identical runs");
}

#[test]
fn sweep_both_modes_agree_on_builtin_channel() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("runs");
    let out = wiretap(&[
        "sweep",
        "--builtin",
        "--snr-db",
        "6",
        "12",
        "--mode",
        "both",
        "--out-dir",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let summary = std::fs::read_to_string(out_dir.join("summary.csv")).unwrap();
    let mut by_key = std::collections::HashMap::new();
    for line in summary.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        by_key.insert((f[0].to_string(), f[2].to_string()), f[3].parse::<f64>().unwrap());
    }
    for snr in ["6", "12"] {
        let p = by_key[&("proper".to_string(), snr.to_string())];
        let g = by_key[&("general".to_string(), snr.to_string())];
        assert!((p - g).abs() <= 1e-4, "snr {snr}: proper {p} vs general {g}");
    }
}

#[test]
fn reproduce_table_passes_and_resolves_unit() {
    let out = wiretap(&["reproduce-table"]);
    let text = stdout(&out);
    assert_eq!(out.status.code(), Some(0), "{text}");
    assert!(text.contains("resolved rate unit: nats"), "{text}");
    assert!(text.contains("verdict: PASS"), "{text}");
    assert!(text.contains("channel gap eigenvalues"), "{text}");
}

#[test]
fn check_properties_passes_on_small_runs() {
    let out = wiretap(&["check-properties", "--instances", "25", "--seed", "5"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let text = stdout(&out);
    assert!(text.contains("determinant-inequality"), "{text}");
    assert!(!text.contains("FAIL"), "{text}");
}

#[test]
fn check_properties_single_scope() {
    let out = wiretap(&[
        "check-properties",
        "--scope",
        "sylvester",
        "--instances",
        "50",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).lines().count(), 1);
}

#[test]
fn unknown_scope_is_a_config_error() {
    let out = wiretap(&["check-properties", "--scope", "nonsense"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn injected_fault_fails_with_exit_2() {
    let out = wiretap(&[
        "check-properties",
        "--scope",
        "sylvester",
        "--instances",
        "10",
        "--inject-fault",
    ]);
    assert_eq!(out.status.code(), Some(2), "{}", stdout(&out));
    assert!(stdout(&out).contains("FAIL"));
}
