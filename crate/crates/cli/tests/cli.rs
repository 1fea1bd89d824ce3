use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const SMALL_PSO: &str = "[pso]\nswarm_size = 4\nmax_iterations = 2\n";

fn depthtune(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_depthtune"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let path = dir.join("run.toml");
    fs::write(&path, text).unwrap();
    path
}

fn listing(dir: &Path) -> Vec<String> {
    let mut names: Vec<_> = fs::read_dir(dir)
        .map(|it| it.map(|e| e.unwrap().file_name().into_string().unwrap()).collect())
        .unwrap_or_default();
    names.sort();
    names
}

#[test]
fn plant_show_prints_coefficients() {
    let tmp = TempDir::new().unwrap();
    let out = depthtune(tmp.path(), &["plant", "show"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["numerator"], serde_json::json!([0.3559, 5.226, 35.2459]));
    assert_eq!(v["denominator"], serde_json::json!([1.0, 10.0997, 8.3879, 0.0, 0.0]));
    assert_eq!(v["order"], 4);
}

#[test]
fn simulate_pid_writes_trace_and_metrics() {
    let tmp = TempDir::new().unwrap();
    let out = depthtune(tmp.path(), &["simulate", "--mode", "pid", "--out", "res"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let res = tmp.path().join("res");
    assert_eq!(listing(&res), ["metrics_pid.json", "trace_pid.csv"]);

    let metrics: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(res.join("metrics_pid.json")).unwrap()).unwrap();
    assert!(metrics["overshoot"].as_f64().unwrap() > 0.0);
    assert!(metrics["itae"].as_f64().unwrap() > 0.0);
    assert_eq!(metrics.as_object().unwrap().len(), 9);

    let trace = fs::read_to_string(res.join("trace_pid.csv")).unwrap();
    let mut lines = trace.lines();
    assert_eq!(lines.next(), Some("t,r,z,e,u"));
    assert_eq!(lines.count(), 10_001);
    assert!(!trace.contains('\r'));
}

#[test]
fn simulate_is_byte_reproducible() {
    let tmp = TempDir::new().unwrap();
    for dir in ["a", "b"] {
        let out = depthtune(tmp.path(), &["simulate", "--mode", "fuzzy", "--out", dir]);
        assert!(out.status.success());
    }
    for file in ["trace_fuzzy.csv", "metrics_fuzzy.json"] {
        let a = fs::read(tmp.path().join("a").join(file)).unwrap();
        let b = fs::read(tmp.path().join("b").join(file)).unwrap();
        assert_eq!(a, b, "{file}");
    }
}

#[test]
fn zero_amplitude_fails_without_output() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "[sim]\namplitude = 0.0\n");
    let out = depthtune(
        tmp.path(),
        &["--config", cfg.to_str().unwrap(), "simulate", "--out", "res"],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(!tmp.path().join("res").exists());
}

#[test]
fn divergence_exits_with_three() {
    let tmp = TempDir::new().unwrap();
    // the baseline step peaks near 1.25, past this bound
    let cfg = write_config(tmp.path(), "[sim]\ndivergence_bound = 1.1\n");
    let out = depthtune(
        tmp.path(),
        &["--config", cfg.to_str().unwrap(), "simulate", "--mode", "pid", "--out", "res"],
    );
    assert_eq!(out.status.code(), Some(3));
    assert!(listing(&tmp.path().join("res")).is_empty());
}

#[test]
fn invalid_config_exits_with_two() {
    let tmp = TempDir::new().unwrap();
    for text in ["[sim]\ndt = -1.0\n", "[pso]\nswarm = 3\n", "not toml ["] {
        let cfg = write_config(tmp.path(), text);
        let out = depthtune(tmp.path(), &["--config", cfg.to_str().unwrap(), "plant", "show"]);
        assert_eq!(out.status.code(), Some(2), "{text}");
    }
    let out = depthtune(tmp.path(), &[]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn dump_config_round_trips() {
    let tmp = TempDir::new().unwrap();
    let first = depthtune(tmp.path(), &["--seed", "7", "--dump-config"]);
    assert!(first.status.success());
    let text = String::from_utf8(first.stdout).unwrap();
    assert!(text.contains("seed = 7"));
    let cfg = write_config(tmp.path(), &text);
    let second = depthtune(tmp.path(), &["--config", cfg.to_str().unwrap(), "--dump-config"]);
    assert_eq!(String::from_utf8(second.stdout).unwrap(), text);
}

#[test]
fn flags_override_file() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "[pso]\nseed = 5\n[output]\ndir = \"from_file\"\n");
    let cfg = cfg.to_str().unwrap();
    let file_only = String::from_utf8(depthtune(tmp.path(), &["--config", cfg, "--dump-config"]).stdout).unwrap();
    assert!(file_only.contains("seed = 5") && file_only.contains("from_file"));
    let flagged = String::from_utf8(
        depthtune(tmp.path(), &["--config", cfg, "--seed", "9", "--out", "flag", "--dump-config"]).stdout,
    )
    .unwrap();
    assert!(flagged.contains("seed = 9") && flagged.contains("\"flag\""));
}

#[test]
fn tune_then_compare() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), SMALL_PSO);
    let cfg = cfg.to_str().unwrap();

    let out = depthtune(tmp.path(), &["--config", cfg, "tune", "--out", "t"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let dir = tmp.path().join("t");
    assert_eq!(
        listing(&dir),
        ["convergence.csv", "theta_best.json", "tune_summary.json"]
    );
    let conv = fs::read_to_string(dir.join("convergence.csv")).unwrap();
    let mut rows = conv.lines();
    assert_eq!(rows.next(), Some("iteration,best_fitness"));
    let best: Vec<f64> = rows
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(best.len(), 3);
    assert!(best.windows(2).all(|w| w[1] <= w[0]));

    let theta = dir.join("theta_best.json");
    let out = depthtune(
        tmp.path(),
        &["--config", cfg, "compare", "--theta", theta.to_str().unwrap(), "--out", "c"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let dir = tmp.path().join("c");
    assert_eq!(
        listing(&dir),
        ["comparison.csv", "trace_fuzzy.csv", "trace_pid.csv", "trace_pso_fuzzy.csv"]
    );
    let table = fs::read_to_string(dir.join("comparison.csv")).unwrap();
    let arms: Vec<_> = table.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(table.lines().next(), Some("arm,itae,ts,os,eu,sr"));
    assert_eq!(arms, ["pid", "fuzzy", "pso_fuzzy"]);

    let columns = |name: &str| -> Vec<String> {
        fs::read_to_string(dir.join(name))
            .unwrap()
            .lines()
            .map(|l| l.splitn(3, ',').take(2).collect::<Vec<_>>().join(","))
            .collect()
    };
    let reference = columns("trace_pid.csv");
    assert_eq!(columns("trace_fuzzy.csv"), reference);
    assert_eq!(columns("trace_pso_fuzzy.csv"), reference);
}

#[test]
fn compare_without_theta_tunes_inline() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), SMALL_PSO);
    let out = depthtune(tmp.path(), &["--config", cfg.to_str().unwrap(), "compare", "--out", "c"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let files = listing(&tmp.path().join("c"));
    for f in ["comparison.csv", "convergence.csv", "theta_best.json", "trace_pso_fuzzy.csv"] {
        assert!(files.iter().any(|x| x == f), "{f} missing from {files:?}");
    }
}

#[test]
fn missing_theta_file_is_an_io_error() {
    let tmp = TempDir::new().unwrap();
    let out = depthtune(tmp.path(), &["simulate", "--theta", "nope.json"]);
    assert_eq!(out.status.code(), Some(1));
}
