use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hardy-ground"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("HARDY_GROUND_WORKERS")
        .output()
        .expect("binary runs")
}

fn report(out: &Path) -> Value {
    let text = std::fs::read_to_string(out.join("report.json")).unwrap();
    serde_json::from_str(&text).unwrap()
}

#[test]
fn constants_match_known_values() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["constants", "--N", "4", "--lambda1", "0.5", "--lambda2", "0.5"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("Lambda_N"));
    let table = std::fs::read_to_string(dir.path().join("table.csv")).unwrap();
    assert!(table.starts_with("constant,quantity,value"));
    let r = report(dir.path());
    assert_eq!(r["command"], "constants");
    assert_eq!(r["exit_code"], 0);
}

#[test]
fn identity_suite_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["verify", "--suite", "identities"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    assert!(!String::from_utf8_lossy(&o.stdout).contains("FAIL"));
}

#[test]
fn synchronized_solve_hits_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["solve", "--N", "4", "--lambda1", "0.5", "--lambda2", "0.5", "--nu", "1"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let r = report(dir.path());
    let e = r["result"]["report"]["energy"].as_f64().unwrap();
    // S(1/2)^2 / 6 with S(λ) = S·(1 − λ)^{3/4} in dimension 4
    let s = 10.260398641294858_f64 * 0.5_f64.powf(0.75);
    assert!((e - s * s / 6.0).abs() < 1e-6 * e, "{e}");
    let profile = std::fs::read_to_string(dir.path().join("profile.csv")).unwrap();
    assert!(profile.starts_with("s,w1,w2\n"));
}

#[test]
fn exit_codes_distinguish_failures() {
    let dir = tempfile::tempdir().unwrap();
    let bad = run(&["solve", "--N", "4", "--lambda1", "1.5"], dir.path());
    assert_eq!(bad.status.code(), Some(2));
    let regime = run(&["exact", "--N", "4", "--lambda1", "0.2", "--lambda2", "0.5"], dir.path());
    assert_eq!(regime.status.code(), Some(3));
    assert!(report(dir.path())["result"]["error"].is_string());

    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "bogus = 1\n").unwrap();
    let malformed = run(&["run", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(malformed.status.code(), Some(2));
}

#[test]
fn flags_override_config_and_rerun_reproduces() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(
        &cfg,
        "command = \"solve\"\n[params]\nN = 4\nlambda1 = 0.5\nlambda2 = 0.5\nnu = 2.0\n",
    )
    .unwrap();
    let first = dir.path().join("first");
    let o = run(&["run", "--config", cfg.to_str().unwrap(), "--nu", "1.0"], &first);
    assert_eq!(o.status.code(), Some(0));
    let r1 = report(&first);
    assert_eq!(r1["config"]["params"]["nu"], 1.0);

    let second = dir.path().join("second");
    let saved = first.join("config.json");
    let o = run(&["run", "--config", saved.to_str().unwrap()], &second);
    assert_eq!(o.status.code(), Some(0));
    let r2 = report(&second);
    assert_eq!(r1["result"], r2["result"]);
    assert_eq!(
        std::fs::read_to_string(first.join("profile.csv")).unwrap(),
        std::fs::read_to_string(second.join("profile.csv")).unwrap()
    );
}
