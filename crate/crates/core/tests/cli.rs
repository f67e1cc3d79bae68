//! End-to-end checks of the `hamloop` binary: artifacts and exit codes.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const CIRCULAR: &str = "dim = 2\nh = 0.5\nroute = \"both\"\n[potential]\nterms = [{ a = 1.0, alpha = 3.0 }]\n[solver]\nrestarts = 4\n";

fn hamloop(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hamloop"))
        .args(args)
        .env("HAMLOOP_OUTPUT_DIR", out)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn write_config(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn solve_shipped_config_writes_artifacts() {
    let tmp = TempDir::new().unwrap();
    let cfg = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/circular.toml");
    let o = hamloop(&["solve", cfg.to_str().unwrap()], tmp.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    for f in [
        "solution.json",
        "verification.json",
        "trace.csv",
        "orbit.csv",
    ] {
        assert!(tmp.path().join(f).is_file(), "{f} missing");
    }
    let sol = read_json(&tmp.path().join("solution.json"));
    let t_star = 2.0 * std::f64::consts::PI / 3f64.sqrt();
    let entries = sol["solutions"].as_array().unwrap();
    assert_eq!(entries.len(), 2);
    for s in entries {
        assert!((s["period"].as_f64().unwrap() - t_star).abs() < 1e-6, "{s}");
        assert!((s["min_radius"].as_f64().unwrap() - 1.0).abs() < 1e-6);
        let f = s["f_value"].as_f64().unwrap();
        assert!((f - 3.0 * std::f64::consts::PI.powi(2)).abs() < 1e-6);
    }
    let ver = read_json(&tmp.path().join("verification.json"));
    assert_eq!(ver["verdict"], Value::Bool(true));

    let trace = std::fs::read_to_string(tmp.path().join("trace.csv")).unwrap();
    assert!(trace.starts_with("route,start,iteration,f,grad_norm"));
    let orbit = std::fs::read_to_string(tmp.path().join("orbit.csv")).unwrap();
    assert!(orbit.lines().count() > 100);
}

#[test]
fn verify_roundtrip_and_tamper() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(&tmp, "run.toml", CIRCULAR);
    let run = tmp.path().join("run");
    assert_eq!(code(&hamloop(&["solve", cfg.to_str().unwrap()], &run)), 0);
    let sol = run.join("solution.json");

    let o = hamloop(
        &[
            "verify",
            "--orbit",
            sol.to_str().unwrap(),
            "--config",
            cfg.to_str().unwrap(),
        ],
        &run,
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));

    let mut doc = read_json(&sol);
    let c = &mut doc["solutions"][0]["loop"]["cos"][2][0];
    *c = Value::from(c.as_f64().unwrap() + 1e-2);
    let bad = tmp.path().join("tampered.json");
    std::fs::write(&bad, serde_json::to_string(&doc).unwrap()).unwrap();
    let o = hamloop(
        &[
            "verify",
            "--orbit",
            bad.to_str().unwrap(),
            "--config",
            cfg.to_str().unwrap(),
        ],
        &run,
    );
    assert_eq!(code(&o), 1, "{}", stderr(&o));
    let rep = read_json(&tmp.path().join("verification.json"));
    assert_eq!(rep["verdict"], Value::Bool(false));

    let missing = tmp.path().join("nope.json");
    let o = hamloop(
        &[
            "verify",
            "--orbit",
            missing.to_str().unwrap(),
            "--config",
            cfg.to_str().unwrap(),
        ],
        &run,
    );
    assert_eq!(code(&o), 3);
}

#[test]
fn config_errors_exit_3() {
    let tmp = TempDir::new().unwrap();
    let zero_h = write_config(&tmp, "zero.toml", &CIRCULAR.replace("h = 0.5", "h = 0.0"));
    let o = hamloop(&["solve", zero_h.to_str().unwrap()], tmp.path());
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("mu2/alpha"), "{}", stderr(&o));

    let typo = write_config(
        &tmp,
        "typo.toml",
        &CIRCULAR.replace("alpha = 3.0", "alpha = \"two\""),
    );
    let o = hamloop(&["solve", typo.to_str().unwrap()], tmp.path());
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("alpha"), "{}", stderr(&o));

    let o = hamloop(
        &["solve", tmp.path().join("absent.toml").to_str().unwrap()],
        tmp.path(),
    );
    assert_eq!(code(&o), 3);

    let o = hamloop(&["frobnicate"], tmp.path());
    assert_eq!(code(&o), 3);
    assert!(!tmp.path().join("solution.json").exists());
}

#[test]
fn unreachable_floor_exits_2() {
    let tmp = TempDir::new().unwrap();
    let body = CIRCULAR.replace(
        "route = \"both\"\n",
        "route = \"free\"\nmin_radius_floor = 1000.0\n",
    );
    let cfg = write_config(&tmp, "floor.toml", &body);
    let o = hamloop(&["solve", cfg.to_str().unwrap()], tmp.path());
    assert_eq!(code(&o), 2, "{}", stderr(&o));
}

#[test]
fn audit_verdicts() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(&tmp, "a.toml", CIRCULAR);
    let o = hamloop(&["audit", cfg.to_str().unwrap()], tmp.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rep = read_json(&tmp.path().join("audit.json"));
    assert_eq!(rep["energy_threshold"].as_f64(), Some(0.0));

    let neg = write_config(&tmp, "neg.toml", &CIRCULAR.replace("h = 0.5", "h = -1.0"));
    assert_eq!(
        code(&hamloop(&["audit", neg.to_str().unwrap()], tmp.path())),
        1
    );

    let kepler = write_config(
        &tmp,
        "kepler.toml",
        &CIRCULAR.replace("alpha = 3.0", "alpha = 1.0"),
    );
    assert_eq!(
        code(&hamloop(&["audit", kepler.to_str().unwrap()], tmp.path())),
        1
    );
}

#[test]
fn certificate_verdicts() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().to_str().unwrap();
    let args = [
        "certificate",
        "--h",
        "0.5",
        "--R",
        "1",
        "--beta",
        "3",
        "--output-dir",
        out,
    ];
    let o = hamloop(&args, tmp.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let c = read_json(&tmp.path().join("certificate.json"));
    assert_eq!(c["separated"], Value::Bool(true));
    assert_eq!(c["big_m_r"].as_f64(), Some(1.0 + 12f64.powf(-0.5)));

    let o = hamloop(
        &[
            "certificate",
            "--h",
            "0.5",
            "--R",
            "1",
            "--beta",
            "2",
            "--output-dir",
            out,
        ],
        tmp.path(),
    );
    assert_eq!(code(&o), 3);
    let o = hamloop(
        &[
            "certificate",
            "--h",
            "-0.5",
            "--R",
            "1",
            "--beta",
            "3",
            "--output-dir",
            out,
        ],
        tmp.path(),
    );
    assert_eq!(code(&o), 3);
}

#[test]
fn help_exits_0() {
    let tmp = TempDir::new().unwrap();
    let o = hamloop(&["--help"], tmp.path());
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("Exit codes"));
}
