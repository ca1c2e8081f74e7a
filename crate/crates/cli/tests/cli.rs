use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lineporous"))
}

fn run(args: &[&str], out: &Path) -> Output {
    bin().args(args).arg("--out").arg(out).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn json(p: &Path) -> Value {
    serde_json::from_slice(&std::fs::read(p).unwrap()).unwrap()
}

/// Small and quick: h = 1/16, 16×16 certification grid.
const SMALL: [&str; 4] = ["--h-exponent", "4", "--grid", "16"];

fn small(cmd: &str, extra: &[&str], out: &Path) -> Output {
    let mut a = vec![cmd];
    a.extend(SMALL);
    a.extend(extra);
    run(&a, out)
}

fn strip_timing(mut v: Value) -> Value {
    if let Some(o) = v.as_object_mut() {
        o.remove("elapsed_ms");
    }
    v
}

#[test]
fn same_seed_gives_identical_artifacts() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [&a, &b] {
        let o = small("pipeline", &["--seed", "3"], d.path());
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    for f in ["set.csv", "set.json", "weight.json", "modified.json", "certificate.json", "sinogram.csv"] {
        assert_eq!(
            std::fs::read(a.path().join(f)).unwrap(),
            std::fs::read(b.path().join(f)).unwrap(),
            "{f} differs"
        );
    }
    for s in ["gen-set", "build-weight", "modify-weight", "certify"] {
        let f = format!("{s}.report.json");
        assert_eq!(strip_timing(json(&a.path().join(&f))), strip_timing(json(&b.path().join(&f))));
    }
    let cert = json(&a.path().join("certificate.json"));
    assert_eq!(cert["pass"], true);
    assert_eq!(cert["pi_sigma_covers_c_gr"], true);

    let o = small("report", &[], a.path());
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("overall            PASS"));
}

#[test]
fn empty_set_needs_no_sigma() {
    let d = tempfile::tempdir().unwrap();
    let cfg = d.path().join("empty.toml");
    std::fs::write(&cfg, "[set]\ngenerator = \"empty\"\n").unwrap();
    let o = small("pipeline", &["--config", cfg.to_str().unwrap()], d.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let cert = json(&d.path().join("certificate.json"));
    assert_eq!(cert["sigma"], 0.0);
    assert_eq!(cert["pass"], true);
}

#[test]
fn line_set_is_not_line_porous() {
    let d = tempfile::tempdir().unwrap();
    let cfg = d.path().join("line.toml");
    std::fs::write(&cfg, "[set]\ngenerator = \"line_set\"\n").unwrap();
    let o = run(&["gen-set", "--config", cfg.to_str().unwrap()], d.path());
    assert_eq!(code(&o), 0);
    let meta = json(&d.path().join("set.json"));
    assert!(meta["porosity"]["nu_line"].as_f64().unwrap() < 1e-3);
    assert_eq!(meta["line_porous"], false);
}

#[test]
fn sigma_below_the_minimum_fails_certification() {
    let d = tempfile::tempdir().unwrap();
    let o = small("pipeline", &["--sigma", "10"], d.path());
    assert_eq!(code(&o), 16);
    let r = json(&d.path().join("certify.report.json"));
    assert_eq!(r["pass"], false);
    let rep = json(&d.path().join("report.json"));
    assert_eq!(rep["pass"], false);
}

#[test]
fn changed_artifacts_are_refused() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(code(&small("gen-set", &[], d.path())), 0);
    let set = d.path().join("set.csv");
    let mut body = std::fs::read_to_string(&set).unwrap();
    body.push_str("0.5,0.5\n");
    std::fs::write(&set, body).unwrap();
    let o = small("build-weight", &[], d.path());
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("stale artifact set.csv"));
    assert_eq!(code(&small("report", &[], d.path())), 3);
}

#[test]
fn usage_errors_exit_two() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(code(&run(&["frobnicate"], d.path())), 2);
    assert_eq!(code(&run(&["gen-set", "--nu", "0.5"], d.path())), 2);
    assert_eq!(code(&run(&["gen-set", "--grid", "48"], d.path())), 2);
    let cfg = d.path().join("bad.toml");
    std::fs::write(&cfg, "nuu = 0.05\n").unwrap();
    assert_eq!(code(&run(&["gen-set", "--config", cfg.to_str().unwrap()], d.path())), 2);
    // a stage whose input was never produced
    assert_eq!(code(&run(&["certify"], d.path())), 1);
    let o = bin().env("LINEPOROUS_THREADS", "zero").arg("gen-set").arg("--out").arg(d.path()).output().unwrap();
    assert_eq!(code(&o), 2);
}
