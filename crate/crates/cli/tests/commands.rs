//! End-to-end runs of the binary.

use std::fs;
use std::process::{Command, Output};

fn kdsqnm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kdsqnm")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Value after `key = ` in the summary line.
fn field(summary: &str, key: &str) -> f64 {
    let start = summary.find(&format!("{key} = ")).expect("key present") + key.len() + 3;
    summary[start..].split(',').next().unwrap().trim().parse().unwrap()
}

#[test]
fn metric_info_reports_horizons() {
    let o = kdsqnm(&["metric", "info", "--M0", "0.1", "--Lambda", "3", "--a", "0"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let summary = stdout(&o).lines().last().unwrap().to_string();
    let delta = |r: f64| -r.powi(4) + r * r - 0.2 * r;
    let ddelta = |r: f64| -4.0 * r.powi(3) + 2.0 * r - 0.2;
    let (rm, rp) = (field(&summary, "r_-"), field(&summary, "r_+"));
    assert!(delta(rm).abs() < 1e-14 && delta(rp).abs() < 1e-14);
    assert!(rm < rp && delta(0.5 * (rm + rp)) > 0.0);
    assert!((field(&summary, "A_-") - ddelta(rm)).abs() < 1e-12);
    assert!((field(&summary, "A_+") + ddelta(rp)).abs() < 1e-12);
}

#[test]
fn malformed_box_is_a_usage_error() {
    let o = kdsqnm(&["qnm", "scan", "--box", "1,2,3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--box"), "{}", stderr(&o));
}

#[test]
fn unknown_config_key_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.ini");
    fs::write(&path, "[params]\nM0 = 0.1\nspin = 0.2\n").unwrap();
    let o = kdsqnm(&["--config", path.to_str().unwrap(), "metric", "info"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("spin"), "{}", stderr(&o));
}

#[test]
fn domain_errors_carry_the_error_name() {
    let o = kdsqnm(&["metric", "info", "--M0", "-1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("InvalidParameter"), "{}", stderr(&o));
    let o = kdsqnm(&["tdwave", "run", "--a", "0.01", "--t-final", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("NonzeroSpinUnsupported"), "{}", stderr(&o));
}

#[test]
fn config_values_are_used_and_echoed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.ini");
    fs::write(&cfg, "[params]\nM0 = 0.1\nLambda = 3\n[qnm]\nl = 2\nk = 0\n").unwrap();
    let out = dir.path().join("out");
    let o = kdsqnm(&["--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "qnm", "find"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(out.join("qnm.jsonl")).unwrap();
    let mut lines = text.lines();
    let head: serde_json::Value = serde_json::from_str(lines.next().unwrap()).unwrap();
    assert_eq!(head["config"]["qnm.l"], "2");
    assert_eq!(head["config"]["params.Lambda"], "3.0");
    let rec: serde_json::Value = serde_json::from_str(lines.next().unwrap()).unwrap();
    let w = (rec["omega"][0].as_f64().unwrap(), rec["omega"][1].as_f64().unwrap());
    assert!((w.0 - 4.083950603339175).abs() < 1e-8 && (w.1 + 0.8389689868092967).abs() < 1e-8, "{w:?}");
}

#[test]
fn identical_runs_write_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["angular", "table", "--a", "0.01", "--omega", "2,-0.5", "--k", "1", "--l-max", "5"];
    for name in ["one", "two"] {
        let out = dir.path().join(name);
        let mut full = vec!["--out", out.to_str().unwrap()];
        full.extend_from_slice(&args);
        assert!(kdsqnm(&full).status.success());
    }
    let one = fs::read_to_string(dir.path().join("one/angular.csv")).unwrap();
    let two = fs::read_to_string(dir.path().join("two/angular.csv")).unwrap();
    // the out directory is echoed, so compare everything else
    let strip = |s: &str| s.lines().filter(|l| !l.starts_with("# run.out")).collect::<Vec<_>>().join("\n");
    assert_eq!(strip(&one), strip(&two));
    assert_eq!(one.lines().filter(|l| !l.starts_with('#')).count(), 6);
}

#[test]
fn scan_reports_counts_per_mode() {
    let o = kdsqnm(&["qnm", "scan", "--box", "-3,3,0.1,0.8", "--ks", "0", "--ls", "0..1", "--grid", "1x1"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let counts: Vec<serde_json::Value> = out
        .lines()
        .filter_map(|l| serde_json::from_str::<serde_json::Value>(l).ok())
        .filter(|v| v["kind"] == "count")
        .collect();
    assert_eq!(counts.len(), 2);
    assert!(counts.iter().all(|c| c["zeros"] == 0));
}

#[test]
fn tdwave_run_fits_the_ringdown() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("td");
    let o = kdsqnm(&["--out", out.to_str().unwrap(), "tdwave", "run", "--l", "2", "--t-final", "12"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let fit: serde_json::Value =
        serde_json::from_str(fs::read_to_string(out.join("ringdown.jsonl")).unwrap().lines().nth(1).unwrap()).unwrap();
    let w = (fit["omega"][0].as_f64().unwrap(), fit["omega"][1].as_f64().unwrap());
    assert!((w.0 - 4.08395).abs() < 0.02 * 4.08395 && (w.1 + 0.83897).abs() < 0.02 * 0.83897, "{w:?}");
    let csv = fs::read_to_string(out.join("tdwave.csv")).unwrap();
    assert!(csv.lines().any(|l| l.starts_with("t,u(x=0)")));
}

#[test]
fn verify_passes_on_defaults() {
    let o = kdsqnm(&["verify"]);
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("PASS ")).count(), 8);
}
