use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use radon_svm::svm::Label;
use radon_svm::LabeledPointSet;
use radon_svm_cli::dataset::{read_dataset, write_dataset, Dataset};
use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_radon-svm"))
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn run(args: &[&str], input: Option<&Path>) -> Output {
    let mut cmd = bin();
    cmd.args(args);
    if let Some(p) = input {
        cmd.arg(p);
    }
    cmd.output().unwrap()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn close(v: &Value, x: f64) -> bool {
    (v.as_f64().unwrap() - x).abs() < 1e-9
}

const THREE: &str = "y,x1,x2\n-1,0,1\n-1,0,-1\n+1,2,0\n";

#[test]
fn train_three_point_example() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "three.csv", THREE);
    let v = json(&run(&["train"], Some(&input)));
    assert_eq!(v["schema"], 1);
    assert!(close(&v["w"][0], 1.0) && close(&v["w"][1], 0.0));
    assert!(close(&v["b"], -1.0));
    assert!(close(&v["margin"], 2.0));
    assert_eq!(v["support_indices"], serde_json::json!([0, 1, 2]));
}

#[test]
fn train_csv_output() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "three.csv", THREE);
    let out = run(&["train", "--format", "csv"], Some(&input));
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("w1,w2,b,margin,support"));
    assert!(lines.next().unwrap().ends_with(",0;1;2"));
}

#[test]
fn train_rejects_inseparable_data() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "xor.csv", "y,x1,x2\n1,0,0\n1,1,1\n-1,1,0\n-1,0,1\n");
    let out = run(&["train"], Some(&input));
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not linearly separable"));
}

#[test]
fn usage_and_parse_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.csv", "y,x1\n1,0\n-1,oops\n");
    let out = run(&["train"], Some(&bad));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));

    assert_eq!(run(&["train", "--tol", "fast"], Some(&bad)).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"], None).status.code(), Some(2));
    assert_eq!(run(&["train"], Some(&dir.path().join("missing.csv"))).status.code(), Some(2));
    let out = run(&["census", "--a", "5", "--trials", "0"], None);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn analyze_reports_the_radon_point_and_plots() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "three.csv", THREE);
    let svg = dir.path().join("fig.svg");
    let v = json(&run(&["analyze", "--plot", svg.to_str().unwrap()], Some(&input)));
    assert_eq!((v["n_pos_sv"].as_u64(), v["n_neg_sv"].as_u64()), (Some(1), Some(2)));
    assert!(close(&v["radon_point"][0], 1.0) && close(&v["radon_point"][1], 0.0));
    assert_eq!(v["degeneracy_flags"], serde_json::json!([]));
    let figure = std::fs::read_to_string(svg).unwrap();
    assert!(figure.starts_with("<svg") && figure.contains("radon-point"));
}

#[test]
fn plot_needs_two_dimensions() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "line.csv", "y,x1\n-1,0\n1,2\n");
    let svg = dir.path().join("fig.svg");
    let out = run(&["train", "--plot", svg.to_str().unwrap()], Some(&input));
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("plotting is 2-D only"));
}

#[test]
fn shatter_four_points() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "four.csv", "x1,x2\n0,0\n2,0\n0,2\n2,2\n");
    let v = json(&run(&["shatter"], Some(&input)));
    assert_eq!(v["shattered"], false);
    let w = v["witness"].as_array().unwrap();
    assert_eq!(w[0], w[3]);
    assert_ne!(w[0], w[1]);

    let tri = write(&dir, "tri.csv", "x1,x2\n0,0\n1,0\n0,1\n");
    let v = json(&run(&["shatter"], Some(&tri)));
    assert_eq!(v["shattered"], true);
    assert!(v["witness"].is_null());
}

#[test]
fn radon_of_a_square() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "four.csv", "x1,x2\n0,0\n2,0\n0,2\n2,2\n");
    let v = json(&run(&["radon"], Some(&input)));
    assert_eq!(v["part_one"], serde_json::json!([0, 3]));
    assert!(close(&v["radon_point"][0], 1.0) && close(&v["radon_point"][1], 1.0));
    assert_eq!(v["unique_partition"], true);
}

#[test]
fn audit_of_a_degenerate_rectangle() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "rect.csv", "y,x1,x2\n-1,0,0\n-1,0,1\n1,2,0\n1,2,1\n");
    let v = json(&run(&["audit"], Some(&input)));
    assert_eq!(v["support_count"], 4);
    assert_eq!(v["cause"], "parallel_flats");
}

#[test]
fn census_two_sv_fraction_band_at_a_10() {
    let v = json(&run(&["census", "--a", "10", "--trials", "1000", "--seed", "7"], None));
    let f = v["two_sv_fraction"].as_f64().unwrap();
    assert!((0.582..=0.682).contains(&f), "{f}");
    assert_eq!(v["config"]["seed"], 7);
}

#[test]
fn census_is_independent_of_thread_count() {
    let args = ["census", "--a", "5", "--trials", "50", "--seed", "3"];
    let one = bin().args(args).env("RADON_SVM_THREADS", "1").output().unwrap();
    let many = bin().args(args).env("RADON_SVM_THREADS", "4").output().unwrap();
    assert!(one.status.success() && many.status.success());
    assert_eq!(one.stdout, many.stdout);

    let bad = bin().args(args).env("RADON_SVM_THREADS", "zero").output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn census_csv_records() {
    let out = run(&["census", "--a", "20", "--trials", "5", "--seed", "1", "--format", "csv"], None);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "trial,n_pos_sv,n_neg_sv,margin,flags");
    assert_eq!(lines.len(), 6);
    assert!(lines[1].starts_with("0,"));
}

#[test]
fn dataset_round_trip_through_a_file() {
    let dir = TempDir::new().unwrap();
    let data = LabeledPointSet::new(
        vec![vec![0.1, 0.2], vec![-1e-300, 7.0 / 3.0], vec![123456.789, -0.0]],
        vec![Label::Positive, Label::Negative, Label::Negative],
    )
    .unwrap();
    let path = dir.path().join("d.csv");
    write_dataset(&data, std::fs::File::create(&path).unwrap()).unwrap();
    let back = read_dataset(std::fs::File::open(&path).unwrap()).unwrap();
    assert_eq!(back, Dataset::Labeled(data));
}
