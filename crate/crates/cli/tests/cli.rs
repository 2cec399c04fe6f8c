use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_deautoconv"))
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn run(args: &[&str], paths: &[(&str, &Path)]) -> Output {
    let mut cmd = bin();
    cmd.args(args);
    for (flag, p) in paths {
        cmd.arg(flag).arg(p);
    }
    cmd.output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

fn floats(v: &serde_json::Value) -> Vec<f64> {
    serde_json::from_value(v.clone()).unwrap()
}

#[test]
fn solve_recovers_ones() {
    let dir = TempDir::new().unwrap();
    let y = write(&dir, "y.csv", "1\n2\n1\n");
    let o = run(&["solve"], &[("--input", &y)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = json(&o);
    for v in floats(&r["x_final"]) {
        assert!((v - 1.0).abs() < 1e-12);
    }
    assert!(r["divergence"].as_f64().unwrap() <= 1e-14);
    assert_eq!(r["kt"]["pass"], true);
    assert_eq!(r["config"]["rng"], "ChaCha8Rng::seed_from_u64");
}

#[test]
fn solve_json_input_and_report_file() {
    let dir = TempDir::new().unwrap();
    let y = write(&dir, "y.json", r#"{"name": "demo", "y": [1, 4, 10, 12, 9]}"#);
    let report = dir.path().join("out/report.json");
    std::fs::create_dir_all(report.parent().unwrap()).unwrap();
    let o = run(&["solve", "--starts", "4", "--hessian"], &[("--input", &y), ("--report", &report)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
    let r: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(r["runs"].as_array().unwrap().len(), 4);
    assert!(r["divergence"].as_f64().unwrap() < 1e-10);
    assert!(r["hessian"].is_object());
}

#[test]
fn seeded_multi_start_is_repeatable() {
    let dir = TempDir::new().unwrap();
    let y = dir.path().join("y.json");
    let o = run(&["simulate", "--mode", "random", "--m", "5", "--seed", "2"], &[("--out", &y)]);
    assert_eq!(o.status.code(), Some(0));
    let a = run(&["solve", "--starts", "8", "--seed", "42"], &[("--input", &y)]);
    let b = run(&["solve", "--starts", "8", "--seed", "42"], &[("--input", &y)]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.status.code(), b.status.code());
    let c = run(&["solve", "--starts", "8", "--seed", "43"], &[("--input", &y)]);
    assert_ne!(json(&a)["runs"], json(&c)["runs"]);
}

#[test]
fn solve_writes_trace() {
    let dir = TempDir::new().unwrap();
    let y = write(&dir, "y.csv", "# data\n0.8\n1.3\n2.2\n0.4\n1.9\n");
    let trace = dir.path().join("trace.csv");
    let o = run(&["solve", "--iters", "20", "--snapshots"], &[("--input", &y), ("--trace", &trace)]);
    assert!(matches!(o.status.code(), Some(0 | 3)), "{}", stderr(&o));
    let text = std::fs::read_to_string(&trace).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "t,divergence,step_div,step_l1,x0,x1,x2");
    let rows: Vec<&str> = lines.collect();
    assert!(!rows.is_empty() && rows.len() <= 20);
    assert!(rows[0].starts_with("1,"));
}

#[test]
fn all_zero_data_is_rejected() {
    let dir = TempDir::new().unwrap();
    let y = write(&dir, "y.csv", "0\n0\n0\n");
    let o = run(&["solve"], &[("--input", &y)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("data: y must not be all zero"));
}

#[test]
fn even_length_is_padded_with_warning() {
    let dir = TempDir::new().unwrap();
    let y = write(&dir, "y.csv", "1\n2\n1\n0\n");
    let o = run(&["solve"], &[("--input", &y)]);
    assert!(stderr(&o).contains("warning: y has even length 4"));
    assert_eq!(json(&o)["m"], 2);
}

#[test]
fn malformed_input_reports_location() {
    let dir = TempDir::new().unwrap();
    let y = write(&dir, "y.csv", "1\nabc\n1\n");
    let o = run(&["solve"], &[("--input", &y)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));
}

#[test]
fn negative_entry_is_a_data_error() {
    let dir = TempDir::new().unwrap();
    let y = write(&dir, "y.csv", "1\n-2\n1\n");
    assert_eq!(run(&["solve"], &[("--input", &y)]).status.code(), Some(1));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(bin().args(["solve", "--bogus"]).output().unwrap().status.code(), Some(2));
    assert_eq!(bin().output().unwrap().status.code(), Some(2));
    let dir = TempDir::new().unwrap();
    let y = write(&dir, "y.csv", "1\n2\n1\n");
    let o = run(&["solve", "--init", "uniform:0.5:0.1"], &[("--input", &y)]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn missing_file_is_a_data_error() {
    let o = bin().args(["solve", "--input", "/nonexistent/y.csv"]).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn simulate_exact_model() {
    let o = bin().args(["simulate", "--mode", "exact", "--m", "25", "--seed", "7"]).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    let d = json(&o);
    let y = floats(&d["y"]);
    let x = floats(&d["x_true"]);
    assert_eq!((y.len(), x.len()), (51, 26));
    assert!(x.iter().all(|v| (1.0..=11.0).contains(v)));
    let conv = deautoconv::autoconvolve(&deautoconv::Signal::new(x).unwrap());
    for (a, b) in conv.iter().zip(&y) {
        assert!((a - b).abs() <= 1e-12 * b);
    }
    let again = bin().args(["simulate", "--mode", "exact", "--m", "25", "--seed", "7"]).output().unwrap();
    assert_eq!(o.stdout, again.stdout);
}

#[test]
fn simulate_random_data() {
    let o = bin().args(["simulate", "--mode", "random", "--m", "10", "--seed", "1"]).output().unwrap();
    let y = floats(&json(&o)["y"]);
    assert_eq!(y.len(), 21);
    assert!(y.iter().all(|v| (0.1..=2.0).contains(v)));
}

#[test]
fn check_cases() {
    let dir = TempDir::new().unwrap();
    let y121 = write(&dir, "y121.csv", "1\n2\n1\n");
    let y111 = write(&dir, "y111.csv", "1\n1\n1\n");
    let x11 = write(&dir, "x11.csv", "1\n1\n");
    let xb = write(&dir, "xb.json", "[2, 0]");
    let y400 = write(&dir, "y400.csv", "4\n0\n0\n");

    let o = run(&["check"], &[("--input", &y121), ("--x", &x11)]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("divergence: 0\n"));
    assert!(text.contains("kt_pass: true"));
    assert!(text.contains("hessian_positive_definite: true"));

    let o = run(&["check"], &[("--input", &y111), ("--x", &x11)]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("kt_status: violation,violation"));

    let o = run(&["check"], &[("--input", &y400), ("--x", &xb)]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("kt_status: interior-stationary,boundary-ok"));
}

#[test]
fn check_dimension_mismatch_is_usage_error() {
    let dir = TempDir::new().unwrap();
    let y = write(&dir, "y.csv", "1\n2\n1\n");
    let x = write(&dir, "x.csv", "1\n1\n1\n");
    let o = run(&["check"], &[("--input", &y), ("--x", &x)]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn autoconv_prints_column() {
    let dir = TempDir::new().unwrap();
    let x = write(&dir, "x.csv", "1\n2\n3\n");
    let o = run(&["autoconv"], &[("--input", &x)]);
    assert_eq!(stdout(&o), "1\n4\n10\n12\n9\n");
    let x = write(&dir, "x2.csv", "1\n1\n");
    assert_eq!(stdout(&run(&["autoconv"], &[("--input", &x)])), "1\n2\n1\n");
    let empty = write(&dir, "e.csv", "");
    assert_eq!(run(&["autoconv"], &[("--input", &empty)]).status.code(), Some(1));
}

#[test]
fn version_subcommand() {
    let o = bin().arg("version").output().unwrap();
    assert!(stdout(&o).starts_with("deautoconv "));
}
