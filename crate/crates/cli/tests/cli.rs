use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_spiral-erw");

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .arg("--out")
        .arg(dir)
        .env_remove("SPIRAL_ERW_SEED")
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("config.toml");
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

const CRITICAL: &str = "law = { type = \"constant\", theta = 1.0471975511965976 }\n";

#[test]
fn regime_reports_critical_rotation() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), CRITICAL);
    let out = run(dir.path(), &["regime", "--config", &cfg]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["regime"], "critical");
    assert!(v["sigma_squared"].is_null());
    assert_eq!(v["config_sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn figure_writes_three_thousand_step_paths() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["figure"]);
    assert!(out.status.success());
    for stem in ["figure_below", "figure_critical", "figure_above"] {
        let text = std::fs::read_to_string(dir.path().join(format!("{stem}.csv"))).unwrap();
        let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
        assert_eq!(rows.len(), 1000, "{stem}");
        assert!(rows[0].starts_with("1,1.0000000000000000e0,"));
        assert!(rows[999].starts_with("1000,"));
    }
}

#[test]
fn degenerate_law_is_rejected_with_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "paths = 100\nlaw = { type = \"discrete\", atoms = [[0.0, 0.3], [3.141592653589793, 0.7]] }\n");
    let out = run(dir.path(), &["verify", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("nondegeneracy"), "{err}");
    assert!(!dir.path().join("report.json").exists());
}

#[test]
fn config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "colour = 1\n");
    assert_eq!(run(dir.path(), &["simulate", "--config", &cfg]).status.code(), Some(2));
    assert_eq!(run(dir.path(), &["simulate", "--config", "/nonexistent.toml"]).status.code(), Some(2));
    assert_eq!(run(dir.path(), &["simulate", "--bogus"]).status.code(), Some(2));
    assert_eq!(run(dir.path(), &["oracle"]).status.code(), Some(2));
}

#[test]
fn repeated_invocations_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let body = "n = 50\npaths = 3\nseed = 11\nlaw = { type = \"uniform\", lo = 0.0, hi = 6.283185307179586 }\n";
    for dir in [&a, &b] {
        let cfg = write_config(dir.path(), body);
        for cmd in ["simulate", "oracle", "branching"] {
            assert!(run(dir.path(), &[cmd, "--config", &cfg]).status.success(), "{cmd}");
        }
    }
    for file in ["paths.csv", "moments.csv", "branching.jsonl"] {
        let x = std::fs::read(a.path().join(file)).unwrap();
        let y = std::fs::read(b.path().join(file)).unwrap();
        assert_eq!(x, y, "{file}");
    }
}

#[test]
fn outputs_carry_hash_and_seed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "n = 8\npaths = 2\nseed = 5\nlaw = { type = \"constant\", theta = 0.5 }\n");
    assert!(run(dir.path(), &["simulate", "--config", &cfg, "--seed", "6"]).status.success());
    let text = std::fs::read_to_string(dir.path().join("paths.csv")).unwrap();
    let header = text.lines().next().unwrap();
    assert!(header.starts_with("# config_sha256="));
    assert!(header.ends_with(" seed=6"));

    let with_env = Command::new(BIN)
        .args(["simulate", "--config", &cfg, "--seed", "6", "--out"])
        .arg(dir.path())
        .env("SPIRAL_ERW_SEED", "9")
        .output()
        .unwrap();
    assert!(with_env.status.success());
    let text = std::fs::read_to_string(dir.path().join("paths.csv")).unwrap();
    assert!(text.lines().next().unwrap().ends_with(" seed=9"));
}

#[test]
fn branching_records_have_w_only_when_superdiffusive() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["branching", "--n", "16", "--paths", "2", "--set", "law={type=\"uniform\",lo=0.0,hi=3.0}"]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(dir.path().join("branching.jsonl")).unwrap();
    for line in text.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(v["w_re"].is_null());
        assert_eq!(v["n"], 16);
    }
}

#[test]
fn verify_failure_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    // Too few paths for the variance to land within a 0.1% band.
    let out = run(
        dir.path(),
        &["verify", "--n", "64", "--paths", "1000", "--set", "law={type=\"uniform\",lo=0.0,hi=6.283185307179586}", "--set", "tolerances.variance=0.001"],
    );
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["passed"], false);
    assert!(dir.path().join("summary.csv").exists());
}

#[test]
fn shipped_configs_classify_as_named() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let dir = tempfile::tempdir().unwrap();
    for (file, regime) in [
        ("diffusive.toml", "diffusive"),
        ("critical.toml", "critical"),
        ("superdiffusive.toml", "superdiffusive"),
        ("lattice.toml", "diffusive"),
    ] {
        let cfg = root.join(file);
        let out = run(dir.path(), &["regime", "--config", cfg.to_str().unwrap()]);
        assert!(out.status.success(), "{file}");
        let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(v["regime"], regime, "{file}");
    }
}
