use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use symcartan::actions::palatini_action;
use symcartan::calculus::FieldFile;
use symcartan::commands::{eval_fields, holonomy_of, ActionName, EvalOptions, EvalOutput};
use symcartan::report::Report;
use symcartan::Q;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_symcartan")).args(args).env_remove("SYMCARTAN_OUT_DIR").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn eval_json(args: &[&str]) -> EvalOutput {
    let o = run(args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_str(stdout(&o).lines().last().unwrap()).unwrap()
}

#[test]
fn default_verify_matches_golden_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let cfg = data("default_verify.json");
    let o = run(&["verify", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let got = std::fs::read_to_string(&out).unwrap();
    let golden = include_str!("golden/default_report.json");
    assert_eq!(got, golden);
    let r = Report::from_json(&got).unwrap();
    assert!(r.all_passed() && r.summary.total == 900);
}

#[test]
fn verify_honors_out_dir_and_seed_override() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_symcartan"))
        .args(["verify", "--seeds", "0..2"])
        .env("SYMCARTAN_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let r = Report::from_json(&std::fs::read_to_string(dir.path().join("symcartan-report.json")).unwrap()).unwrap();
    assert_eq!(r.config.seeds.len(), 2);
    assert_eq!(r.summary.total, 90);

    let timed = dir.path().join("timed.json");
    let o = run(&["verify", "--seeds", "0..1", "--timings", "--out", timed.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(std::fs::read_to_string(timed).unwrap().contains("wall_time_ms"));
}

#[test]
fn corrupted_structure_constant_fails_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let cfg = data("fault_verify.json");
    let o = run(&["verify", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.lines().any(|l| l.starts_with("FAILED ALGEBRA_STRUCTURE:so31")), "{err}");
    let r = Report::from_json(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert!(r.summary.failed > 0);
}

#[test]
fn bad_configs_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"suites": ["CS_NULL"], "algebras": ["so41"]}"#).unwrap();
    let o = run(&["verify", "--config", cfg.to_str().unwrap(), "--out", dir.path().join("r.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("CS_NULL") && err.contains("so41"), "{err}");
    assert!(!dir.path().join("r.json").exists());

    std::fs::write(&cfg, r#"{"suites": []"#).unwrap();
    assert_eq!(run(&["verify", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--seeds", "4..2"]).status.code(), Some(2));

    std::fs::write(&cfg, r#"{"suites": []}"#).unwrap();
    let out = dir.path().join("empty.json");
    let o = run(&["verify", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(Report::from_json(&std::fs::read_to_string(out).unwrap()).unwrap().summary.total, 0);
}

#[test]
fn eval_prints_exact_values() {
    let zero = data("zero_so31.json");
    let o = run(&["eval", "--fields", zero.to_str().unwrap(), "--action", "cs"]);
    assert_eq!(stdout(&o).lines().next(), Some("0"));

    let sample = data("sample_so31.json");
    let got = eval_json(&["eval", "--fields", sample.to_str().unwrap(), "--action", "palatini"]);
    let file = FieldFile::load(&sample).unwrap();
    let alg = file.algebra_descriptor().unwrap();
    let direct = palatini_action(&file.form("omega", &alg).unwrap(), &file.form("e", &alg).unwrap()).unwrap();
    assert_eq!(got.value, direct);
    assert_eq!(got.value.numeric_value.to_bits(), direct.numeric_value.to_bits());
    let first = stdout(&run(&["eval", "--fields", sample.to_str().unwrap(), "--action", "palatini"]));
    assert!(first.lines().next().unwrap().ends_with(" × (2π)^3"), "{first}");

    let cs = eval_json(&["eval", "--fields", sample.to_str().unwrap(), "--action", "cs", "--c0", "1/3", "--c1", "-1"]);
    let lib = eval_fields(
        &file,
        ActionName::Cs,
        &EvalOptions { c0: Some(Q::new(1, 3)), c1: Some(-Q::ONE), ..EvalOptions::default() },
    )
    .unwrap();
    assert_eq!(cs, lib);

    let t4 = data("sample_so41_t4.json");
    let mm = eval_json(&["eval", "--fields", t4.to_str().unwrap(), "--action", "mm", "--gamma", "3"]);
    assert_eq!(mm.couplings.unwrap().c0, Q::new(2, 3));
    assert_eq!(mm.value.torus_dim, 4);
}

#[test]
fn tmg_eval_refines_the_grid() {
    for name in ["tmg_coframe_so31.json", "tmg_coframe_so22.json"] {
        let f = data(name);
        let out = eval_json(&["eval", "--fields", f.to_str().unwrap(), "--action", "tmg", "--mu", "5"]);
        let r = out.refinement.unwrap();
        assert_eq!((r.coarse.quadrature_grid, r.fine.quadrature_grid), (Some(32), Some(64)));
        assert!(r.relative_change < 1e-8, "{name}: {}", r.relative_change);
    }
}

#[test]
fn eval_errors() {
    let sample = data("sample_so31.json");
    let s = sample.to_str().unwrap();
    assert_eq!(run(&["eval", "--fields", s, "--action", "tmg"]).status.code(), Some(2));
    assert_eq!(run(&["eval", "--fields", s, "--action", "bogus"]).status.code(), Some(2));
    assert_eq!(run(&["eval", "--fields", s, "--action", "mm"]).status.code(), Some(2));
    assert_eq!(run(&["eval", "--fields", s, "--action", "cs", "--c0", "x"]).status.code(), Some(2));
    let zero = data("zero_so31.json");
    assert_eq!(run(&["eval", "--fields", zero.to_str().unwrap(), "--action", "palatini"]).status.code(), Some(2));
    assert_eq!(run(&["eval", "--fields", "/nonexistent.json", "--action", "cs"]).status.code(), Some(2));
}

#[test]
fn holonomy_command() {
    let square = data("square_path.json");
    let o = run(&["holonomy", "--model", "sphere", "--path", square.to_str().unwrap(), "--steps", "10000"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let angle: f64 = text.lines().find_map(|l| l.strip_prefix("rotation angle: ")).unwrap().parse().unwrap();
    assert!((angle - 0.04).abs() < 1e-4, "{angle}");
    assert!(text.contains("group defect"));
    // 12 significant digits
    assert!(text.contains("9.99200106659e-1"), "{text}");

    let empty = data("empty_path.json");
    let lib = holonomy_of("sphere-cartan", &symcartan::cartan::PathSpec::load(&empty).unwrap(), 10).unwrap();
    assert_eq!(lib.matrix, vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]]);
    let o = run(&["holonomy", "--model", "sphere-cartan", "--path", empty.to_str().unwrap(), "--steps", "10"]);
    assert_eq!(o.status.code(), Some(0));

    let sq = square.to_str().unwrap();
    assert_eq!(run(&["holonomy", "--model", "sphere", "--path", sq, "--steps", "0"]).status.code(), Some(2));
    assert_eq!(run(&["holonomy", "--model", "torus", "--path", sq, "--steps", "10"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"segments": [{"type": "line", "from": [0, 0], "to": [0, 0]}]}"#).unwrap();
    assert_eq!(
        run(&["holonomy", "--model", "sphere", "--path", bad.to_str().unwrap(), "--steps", "10"]).status.code(),
        Some(2)
    );
}
