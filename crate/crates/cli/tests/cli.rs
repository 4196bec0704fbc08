use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn erratic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_erratic"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn analytic(args: &[&str]) -> String {
    let mut full = vec!["analytic"];
    full.extend_from_slice(args);
    let o = erratic(&full);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    stdout(&o).trim().to_string()
}

#[test]
fn analytic_values() {
    assert_eq!(analytic(&["expected-steps", "--epsilon", "0.1"]), "1.25");
    assert_eq!(analytic(&["pi", "--epsilon", "0.1", "--k", "1"]), "0.8888888888888888");
    assert_eq!(analytic(&["catalan", "--k", "0"]), "1");
    assert_eq!(analytic(&["catalan", "--k", "4"]), "14");
    assert_eq!(analytic(&["hit-minus-one", "--epsilon", "0.3"]), "1");
    let q: f64 = analytic(&["hit-plus-one", "--epsilon", "0.2"]).parse().unwrap();
    assert!((q - 0.25).abs() < 1e-15);
}

#[test]
fn analytic_chain_oracle_prints_three_lines() {
    let out = analytic(&["chain-oracle", "--epsilon", "0.1", "--barrier", "1", "--floor", "-1"]);
    let lines: Vec<_> = out.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[0].starts_with("prob_barrier "));
}

#[test]
fn analytic_rejects_bad_input() {
    assert_eq!(code(&erratic(&["analytic", "no-such-formula"])), 1);
    assert_eq!(code(&erratic(&["analytic", "pi", "--epsilon", "0.6", "--k", "1"])), 1);
    assert_eq!(code(&erratic(&["analytic", "pi", "--k", "1"])), 1);
    assert_eq!(code(&erratic(&["analytic", "catalan", "--k", "37"])), 1);
}

fn sim1d(dir: &Path, extra: &[&str]) -> Output {
    let mut args = vec![
        "sim1d",
        "--positions",
        "0.25,0.5,2.75,4.9",
        "--out",
        dir.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    erratic(&args)
}

#[test]
fn sim1d_hand_example_gathers_at_three() {
    let tmp = tempfile::tempdir().unwrap();
    let o = sim1d(tmp.path(), &["--epsilon", "0"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.contains("T = 3\n"), "{out}");
    assert!(out.contains("reached = true"));
    for f in ["trajectory.csv", "config.json", "manifest.json"] {
        assert!(tmp.path().join(f).exists(), "{f}");
    }
    let csv = fs::read_to_string(tmp.path().join("trajectory.csv")).unwrap();
    let lines: Vec<_> = csv.lines().collect();
    assert_eq!(lines[0], "t,centroid,core_span,total_span,x_min,x_max");
    assert_eq!(lines.len(), 5);
    assert!(lines[4].starts_with("3,"));
}

#[test]
fn sim1d_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let o = erratic(&[
            "sim1d", "--uniform", "30,20", "--epsilon", "0.2", "--seed", "11", "--stride", "5", "--out",
            d.path().to_str().unwrap(),
        ]);
        assert_eq!(code(&o), 0);
    }
    let read = |d: &tempfile::TempDir, f: &str| fs::read(d.path().join(f)).unwrap();
    assert_eq!(read(&a, "trajectory.csv"), read(&b, "trajectory.csv"));
    assert_eq!(read(&a, "config.json"), read(&b, "config.json"));
}

#[test]
fn sim1d_rerun_from_echoed_config_matches() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let o = erratic(&[
        "sim1d", "--uniform", "12,6", "--epsilon", "0.15", "--seed", "3", "--mode", "unilateral-right",
        "--out", a.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let cfg = a.path().join("config.json");
    let o = erratic(&["sim1d", "--config", cfg.to_str().unwrap(), "--out", b.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert_eq!(
        fs::read(a.path().join("trajectory.csv")).unwrap(),
        fs::read(b.path().join("trajectory.csv")).unwrap()
    );
    let manifest: serde_json::Value =
        serde_json::from_slice(&fs::read(a.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 3);
    assert_eq!(manifest["config"]["mode"], "unilateral-right");
}

#[test]
fn sim1d_budget_exhaustion_still_succeeds() {
    let tmp = tempfile::tempdir().unwrap();
    let o = sim1d(tmp.path(), &["--epsilon", "0", "--max-steps", "1"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("reached = false"));
}

#[test]
fn sim1d_rejects_bad_epsilon() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(code(&sim1d(tmp.path(), &["--epsilon", "0.6"])), 1);
    assert_eq!(code(&erratic(&["sim1d", "--epsilon", "0.1"])), 1);
}

#[test]
fn flags_override_config_file() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("in.json");
    fs::write(&cfg, r#"{"positions":[0.25,0.5,2.75,4.9],"epsilon":0.4,"seed":5}"#).unwrap();
    let out = tmp.path().join("run");
    let o = erratic(&[
        "sim1d", "--config", cfg.to_str().unwrap(), "--epsilon", "0", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("T = 3\n"));
    let echoed: serde_json::Value = serde_json::from_slice(&fs::read(out.join("config.json")).unwrap()).unwrap();
    assert_eq!(echoed["epsilon"], 0.0);
    assert_eq!(echoed["seed"], 5);

    fs::write(&cfg, r#"{"epsilon":0.1,"bogus":1}"#).unwrap();
    assert_eq!(code(&erratic(&["sim1d", "--config", cfg.to_str().unwrap()])), 1);
}

#[test]
fn sim2d_runs_and_writes_rows() {
    let tmp = tempfile::tempdir().unwrap();
    let o = erratic(&[
        "sim2d", "--uniform-square", "20,10", "--epsilon", "0.1", "--steps", "50", "--stride", "10", "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(tmp.path().join("trajectory.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "t,cx,cy,diameter,hull_count");
    assert_eq!(csv.lines().count(), 7);
    assert_eq!(code(&erratic(&["sim2d", "--points", "0,0,1", "--epsilon", "0.1"])), 1);
}

fn experiment(dir: &Path, extra: &[&str]) -> Output {
    let mut args = vec![
        "experiment",
        "--kind",
        "convergence-vs-epsilon",
        "--epsilons",
        "0.05,0.2",
        "--ns",
        "8",
        "--s0s",
        "4",
        "--seed",
        "2",
        "--out",
        dir.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    erratic(&args)
}

#[test]
fn experiment_trial_minimum() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(code(&experiment(tmp.path(), &["--trials", "1"])), 1);
    let o = experiment(tmp.path(), &["--trials", "2", "--threads", "2"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(tmp.path().join("results.csv").exists());
}

#[test]
fn experiment_thread_count_does_not_change_results() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert_eq!(code(&experiment(a.path(), &["--trials", "6", "--threads", "1"])), 0);
    assert_eq!(code(&experiment(b.path(), &["--trials", "6", "--threads", "3"])), 0);
    assert_eq!(
        fs::read(a.path().join("results.csv")).unwrap(),
        fs::read(b.path().join("results.csv")).unwrap()
    );
}

#[test]
fn experiment_jsonl_output() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(code(&experiment(tmp.path(), &["--trials", "3", "--format", "jsonl"])), 0);
    let text = fs::read_to_string(tmp.path().join("results.jsonl")).unwrap();
    assert_eq!(text.lines().count(), 2);
    for line in text.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["kind"], "convergence-vs-epsilon");
    }
}

fn bundled_config() -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../figures/convergence_vs_epsilon.json")
}

#[test]
fn bundled_config_schema_and_monotone_curve() {
    let tmp = tempfile::tempdir().unwrap();
    let o = erratic(&[
        "experiment",
        "--config",
        bundled_config().to_str().unwrap(),
        "--trials",
        "20",
        "--ns",
        "20",
        "--s0s",
        "20",
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(tmp.path().join("results.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "kind,epsilon,N,S0,trials,mean,stddev,stderr,bound,ratio"
    );
    let means: Vec<(f64, f64)> = lines
        .map(|l| {
            let f: Vec<_> = l.split(',').collect();
            assert_eq!(f[0], "convergence-vs-epsilon");
            assert_eq!(f[4], "20");
            (f[1].parse().unwrap(), f[5].parse().unwrap())
        })
        .collect();
    assert_eq!(means.len(), 7);
    assert!(means.windows(2).all(|w| w[0].0 < w[1].0));
    // Neighbouring grid points may be within noise of each other; the ends may not.
    assert!(means[6].1 > means[0].1);
    assert!(means.windows(3).all(|w| w[2].1 > w[0].1), "{means:?}");

    let manifest: serde_json::Value =
        serde_json::from_slice(&fs::read(tmp.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 1);
    assert_eq!(manifest["config"]["trials"], 20);
    assert!(manifest["wall_time_s"].as_f64().unwrap() >= 0.0);
    assert!(manifest["version"].is_string());
}

#[test]
fn help_for_every_subcommand() {
    for sub in [&["--help"][..], &["analytic", "--help"], &["sim1d", "--help"], &["sim2d", "--help"], &["experiment", "--help"]] {
        let o = erratic(sub);
        assert_eq!(code(&o), 0, "{sub:?}");
        assert!(stdout(&o).contains("Usage"));
    }
    let help = stdout(&erratic(&["experiment", "--help"]));
    for flag in [
        "--config", "--kind", "--epsilons", "--ns", "--s0s", "--trials", "--seed", "--max-steps", "--warmup",
        "--samples", "--stride", "--format", "--out", "--threads",
    ] {
        assert!(help.contains(flag), "{flag}");
    }
    assert_eq!(code(&erratic(&["--version"])), 0);
    assert_eq!(code(&erratic(&[])), 1);
}
