//! End-to-end checks of the afc-sim binary: exit codes, error lines, output
//! layout, and byte-level determinism.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_afc-sim"))
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    bin()
        .args(args)
        .env("AFCSIM_OUT_ROOT", dir)
        .current_dir(dir)
        .output()
        .expect("spawn afc-sim")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn selftest_passes_and_writes_report() {
    let tmp = tempdir();
    let out = run_in(tmp.path(), &["selftest", "--seed", "1"]);
    let text = stdout(&out);
    assert!(out.status.success(), "{text}");
    assert!(text.lines().filter(|l| l.starts_with("PASS")).count() >= 5, "{text}");
    assert!(!text.contains("FAIL"), "{text}");
    assert!(tmp.path().join("selftest-1/selftest.json").exists());
    assert!(tmp.path().join("selftest-1/manifest.json").exists());
}

#[test]
fn missing_seed_is_a_config_error() {
    let tmp = tempdir();
    let out = run_in(tmp.path(), &["comb"]);
    assert_eq!(out.status.code(), Some(3));
    let text = stdout(&out);
    assert!(text.contains("error code=config"), "{text}");
    assert!(text.contains("seed"), "{text}");
}

#[test]
fn unknown_config_key_is_a_parse_error() {
    let tmp = tempdir();
    std::fs::write(tmp.path().join("bad.toml"), "seed = 1\n[comb]\nfineese = 2.0\n").unwrap();
    let out = run_in(tmp.path(), &["comb", "--config", "bad.toml"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(stdout(&out).contains("error code=parse"));
}

#[test]
fn invalid_finesse_is_rejected_by_name() {
    let tmp = tempdir();
    std::fs::write(tmp.path().join("cfg.toml"), "seed = 1\n[comb]\nfinesse = 0.5\n").unwrap();
    let out = run_in(tmp.path(), &["comb", "--config", "cfg.toml"]);
    assert_eq!(out.status.code(), Some(3));
    let text = stdout(&out);
    assert!(text.contains("error code=config"), "{text}");
    assert!(text.contains("finesse"), "{text}");
}

#[test]
fn unknown_preset_is_a_config_error() {
    let tmp = tempdir();
    let out = run_in(tmp.path(), &["comb", "--seed", "1", "--preset", "nope"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stdout(&out).contains("error code=config"));
}

#[test]
fn unknown_figure_is_invalid_input() {
    let tmp = tempdir();
    let out = run_in(tmp.path(), &["figure", "9z", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout(&out).contains("error code=invalid_input"));
}

#[test]
fn comb_run_is_byte_deterministic() {
    let tmp = tempdir();
    let cfg = "seed = 42\n[comb]\nbandwidth_ghz = 0.5\n";
    std::fs::write(tmp.path().join("cfg.toml"), cfg).unwrap();
    for d in ["a", "b"] {
        let out = run_in(tmp.path(), &["comb", "--config", "cfg.toml", "--out", d]);
        assert!(out.status.success(), "{}", stdout(&out));
    }
    for name in ["comb.csv", "comb_report.json", "manifest.json"] {
        let a = std::fs::read(tmp.path().join("a").join(name)).unwrap();
        let b = std::fs::read(tmp.path().join("b").join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between identical runs");
    }
}

#[test]
fn figure_2b_exports_slope_fits() {
    let tmp = tempdir();
    let out = run_in(tmp.path(), &["figure", "2b", "--seed", "5"]);
    assert!(out.status.success(), "{}", stdout(&out));
    let dir = tmp.path().join("figure2b-5");
    let fits: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.join("slope_fits.json")).unwrap()).unwrap();
    assert_eq!(fits.as_array().map(Vec::len), Some(3));
}

fn tempdir() -> tempfile::TempDir {
    tempfile::tempdir().unwrap()
}
