use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

fn bench(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_bench")).args(args).output().expect("bench runs")
}

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("cfg.json");
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

const SMALL: &str = r#"{"d": 3, "chains": 4, "k": 200}"#;

#[test]
fn sample_csv_layout() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out = dir.path().join("out.csv");
    let o = bench(&["--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# config: "));
    assert!(lines[0].contains("\"seed\":1"));
    assert_eq!(lines[1], "algorithm,seed,min_ess,mean_ess,cov_error");
    assert_eq!(lines.len(), 2 + 16);
    assert!(lines[2].starts_with("chebyshev,1,"));
    let pos = fs::read_to_string(dir.path().join("out.positions.csv")).unwrap();
    assert_eq!(pos.lines().nth(1), Some("algorithm,seed,index,x0,x1,x2"));
    assert_eq!(pos.lines().count(), 2 + 16 * 200);
}

#[test]
fn same_seed_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let a = bench(&["sample", "--config", &cfg, "--seed", "7"]);
    let b = bench(&["sample", "--config", &cfg, "--seed", "7"]);
    let c = bench(&["sample", "--config", &cfg, "--seed", "8"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn config_errors_exit_2() {
    let o = bench(&["--config", "/nonexistent/cfg.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"chains": 0}"#);
    assert_eq!(bench(&["--config", &cfg]).status.code(), Some(2));
    let cfg = write_config(dir.path(), "not json");
    assert_eq!(bench(&["table1", "--config", &cfg]).status.code(), Some(2));
}

#[test]
fn json_format() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let o = bench(&["--config", &cfg, "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["config"]["chains"], 4);
    assert_eq!(v["rows"].as_array().unwrap().len(), 16);
}

#[test]
fn table1_d1_smoke() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"d": 1}"#);
    let start = Instant::now();
    let o = bench(&["table1", "--config", &cfg]);
    assert!(start.elapsed().as_secs_f64() < 5.0);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    let header = text.lines().nth(1).unwrap();
    assert!(header.starts_with("algorithm,variant,min_ess,mean_ess,cov_error"));
    assert_eq!(text.lines().count(), 6);
}

#[test]
fn check_mode_exit_codes() {
    let o = bench(&["scaling", "--check"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stderr).contains("[PASS]"));
    let o = bench(&["integrators", "--check"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stdout).contains("# order velocity-verlet"));
}
