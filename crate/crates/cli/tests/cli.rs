use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fusion-game"))
}

fn write(dir: &TempDir, name: &str, json: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, json).unwrap();
    path
}

fn run(args: &[&str], config: &Path) -> Output {
    bin()
        .args(args)
        .arg("--config")
        .arg(config)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const SCALAR: &str = r#"{"y_hat": [1.0], "mu": [0.0], "y_attack": [-0.2], "y_bar_0": [-0.5]}"#;

#[test]
fn run_converges_to_mixed_weight() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "c.json", SCALAR);
    let o = run(&["run"], &cfg);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.lines().next().unwrap().contains("alpha"));
    assert!(text.contains("0.333333333"));
    let last = text.lines().last().unwrap();
    assert!(
        last.starts_with("outcome: ConvergedMixed alpha*=0.2"),
        "{last}"
    );
}

#[test]
fn run_exit_codes() {
    let dir = TempDir::new().unwrap();
    let trivial = write(
        &dir,
        "t.json",
        r#"{"y_hat": [1.0], "mu": [0.0], "y_attack": [-0.2], "y_bar_0": [2.0]}"#,
    );
    assert_eq!(run(&["run"], &trivial).status.code(), Some(2));
    let away = write(
        &dir,
        "d.json",
        r#"{"y_hat": [1.0], "mu": [0.0], "y_attack": [-2.0], "y_bar_0": [-0.5]}"#,
    );
    assert_eq!(run(&["run"], &away).status.code(), Some(3));
    let cfg = write(&dir, "c.json", SCALAR);
    let o = run(&["run", "--max-iter", "3"], &cfg);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("MaxIterNoConvergence"));
}

#[test]
fn config_errors_exit_64() {
    let dir = TempDir::new().unwrap();
    let bad = write(
        &dir,
        "bad.json",
        r#"{"y_hat": [1.0], "mu": [0.0], "typo": 3}"#,
    );
    let o = run(&["sweep"], &bad);
    assert_eq!(o.status.code(), Some(64));
    assert!(String::from_utf8_lossy(&o.stderr).contains("typo"));
    let cfg = write(&dir, "c.json", SCALAR);
    assert_eq!(
        run(&["run", "--alpha-tol", "2"], &cfg).status.code(),
        Some(64)
    );
    assert_eq!(
        run(&["sweep", "--mode", "sometimes"], &cfg).status.code(),
        Some(64)
    );
    assert_eq!(run(&["regions"], &cfg).status.code(), Some(64));
    assert_eq!(
        run(&["run"], &dir.path().join("missing.json"))
            .status
            .code(),
        Some(64)
    );
    assert_eq!(
        bin().arg("frobnicate").output().unwrap().status.code(),
        Some(64)
    );
}

#[test]
fn equilibria_report_and_degenerate_game() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "c.json", SCALAR);
    let o = run(&["equilibria"], &cfg);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("mixed_equilibria: 1"));

    let o = run(&["equilibria", "--json"], &cfg);
    let json: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(json["mixed_equilibria"], 1);
    let accepted: Vec<_> = json["candidates"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["accepted"] == true)
        .collect();
    assert!((accepted[0]["alpha"].as_f64().unwrap() - 0.2).abs() < 1e-9);
    assert_eq!(accepted[0]["nash_verified"], true);

    let zero = write(
        &dir,
        "z.json",
        r#"{"y_hat": [1.0, 0.0], "mu": [0.0, 0.0], "y_attack": [0.4, 0.0]}"#,
    );
    assert!(stdout(&run(&["equilibria"], &zero)).contains("zero_equilibrium_exists: true"));

    let degenerate = write(
        &dir,
        "g.json",
        r#"{"y_hat": [1.0], "mu": [0.0], "zeta": [1.0], "y_attack": [0.4]}"#,
    );
    assert_eq!(run(&["equilibria"], &degenerate).status.code(), Some(65));
}

#[test]
fn sweep_writes_deterministic_csv() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "s.json",
        r#"{"y_hat": [0.8, 0.0], "mu": [0.0, 0.0], "zeta": [0.3, -0.2], "grid_step": 0.25, "seed": 11}"#,
    );
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    for out in [&a, &b] {
        let o = bin()
            .args(["sweep", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(out)
            .output()
            .unwrap();
        assert_eq!(o.status.code(), Some(0));
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    assert!(text.starts_with("yA_1,yA_2,empirical,"));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 81 + 1);
    assert!(text.contains("# mode=weak"));
    assert!(text.contains("necessary_violated=0"));

    let strong = stdout(&run(&["sweep", "--mode", "strong", "--seed", "11"], &cfg));
    assert!(strong.contains("# mode=strong"));
    assert!(strong.contains("sufficient_violated=0"));
}

#[test]
fn regions_writes_one_block_per_radius() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "r.json",
        r#"{"y_hat": [1.0, 0.0], "mu": [0.0, 0.0], "grid_step": 0.5,
            "zeta_set": {"radii": [0.0, 0.2, 0.4], "sample_count": 100, "seed": 4}}"#,
    );
    let o = run(&["regions"], &cfg);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(
        text.lines().next().unwrap(),
        "radius,yA_1,yA_2,union_necessary,intersection_sufficient"
    );
    assert_eq!(
        text.lines().filter(|l| !l.starts_with('#')).count(),
        3 * 25 + 1
    );
    assert_eq!(
        text.lines().filter(|l| l.starts_with("# radius=")).count(),
        3
    );
}
