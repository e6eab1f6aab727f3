use std::path::PathBuf;
use std::process::{Command, Output};

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("bifree-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bifree")).args(args).output().unwrap()
}

const TWO_ATOMS: &str = r#"{"atoms":[{"s_angle":0.3,"t_angle":-0.2,"weight":0.6},{"s_angle":-0.5,"t_angle":0.4,"weight":0.4}]}"#;

#[test]
fn convolve_writes_full_table() {
    let a = scratch("a.json", TWO_ATOMS);
    let out = run(&["--order", "6", "convolve", a.to_str().unwrap(), a.to_str().unwrap()]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "p,q,re,im");
    assert_eq!(lines.len(), 1 + 13 * 13);
}

#[test]
fn limit_demo_errors_shrink() {
    let out = run(&["limit-demo", "--example", "normal", "--levels", "8,16,32,64"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let errors: Vec<f64> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(errors.len(), 4);
    assert!(errors.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn exit_codes_separate_domain_and_io() {
    let bad = scratch("bad.json", r#"{"atoms":[{"s_angle":0.1,"t_angle":0.0,"weight":-1.0}]}"#);
    let out = run(&["power", bad.to_str().unwrap(), "--n", "2"]);
    assert_eq!(out.status.code(), Some(1));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert!(err["error"].is_string());

    let out = run(&["power", "/nonexistent/measure.json", "--n", "2"]);
    assert_eq!(out.status.code(), Some(2));

    let broken = scratch("broken.json", "{\"atoms\": [");
    assert_eq!(run(&["power", broken.to_str().unwrap(), "--n", "2"]).status.code(), Some(2));
}

#[test]
fn outputs_are_deterministic() {
    let a = scratch("seeded.json", TWO_ATOMS);
    let args = ["--seed", "5", "--format", "json", "transform", "--measure", a.to_str().unwrap(), "--which", "sigma", "--random", "3"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn centered_inputs_use_closed_form() {
    let half = scratch(
        "centered.json",
        r#"{"atoms":[{"s_angle":0.0,"t_angle":0.0,"weight":0.375},{"s_angle":3.141592653589793,"t_angle":3.141592653589793,"weight":0.375},{"s_angle":0.0,"t_angle":3.141592653589793,"weight":0.125},{"s_angle":3.141592653589793,"t_angle":0.0,"weight":0.125}]}"#,
    );
    let path = half.to_str().unwrap();
    let out = run(&["--order", "2", "convolve", path, path]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let row = text.lines().find(|l| l.starts_with("2,2,")).unwrap();
    let re: f64 = row.split(',').nth(2).unwrap().parse().unwrap();
    assert!((re - 1.0 / 16.0).abs() < 1e-15);
    assert!(String::from_utf8(out.stderr).unwrap().contains("centered"));
}
