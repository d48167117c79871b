use std::path::PathBuf;
use std::process::{Command, Output};

use bellrelax::measures::{min_causal_influence, InfluenceVariant};
use bellrelax::sampling::pr_box;
use bellrelax_cli::record::ResultRecord;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bellrelax"))
}

fn fixture(name: &str) -> String {
    let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    p.extend(["tests", "fixtures", name]);
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn record(args: &[&str]) -> ResultRecord {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("record JSON")
}

#[test]
fn tsirelson_influence() {
    let r = record(&["causal-influence", "--variant", "x-to-b", "--gen", "chsh-quantum", "--v", "1.0"]);
    assert_eq!(r.measure.as_deref(), Some("C_X->B"));
    assert!((r.value_decimal.unwrap() - 0.207107).abs() < 1e-6);
    let s: f64 = r.value.unwrap().parse().unwrap();
    assert!((s - (0.5f64.sqrt() - 0.5)).abs() < 1e-12);
}

#[test]
fn vertex_csv_has_thirteen_rows() {
    let out = run(&["vertices", "--scenario", "chsh", "--variant", "x-to-b"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut rd = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(rd.headers().unwrap().len(), 32);
    assert_eq!(rd.records().count(), 13);
}

#[test]
fn double_werner_scan() {
    let r = record(&["bilocality", "--gen", "double-werner", "--v", "0.85", "--grid", "41"]);
    assert_eq!(r.value.as_deref(), Some("89/200"));
    assert!((r.value_decimal.unwrap() - 0.445).abs() < 1e-12);
    assert_eq!(r.details["argmin"], serde_json::json!(["1/4"]));
}

#[test]
fn scan_csv_has_twelve_digits() {
    let out = run(&[
        "bilocality", "--gen", "double-werner", "--v", "0.9", "--grid", "5", "--no-refine", "--format", "csv",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("nu_1,m_bl"));
    let vals: Vec<&str> = lines.collect();
    assert_eq!(vals.len(), 5);
    assert!(vals.contains(&"0.25,0.62"), "{vals:?}");
}

#[test]
fn pr_fixture_summary() {
    let r = record(&["causal-influence", "--variant", "x-to-b", "--input", &fixture("pr_box.json")]);
    let s = r.summary.unwrap();
    assert_eq!(s.chsh.as_deref(), Some("1/2"));
    assert_eq!(s.chsh_max.as_deref(), Some("1/2"));
    assert!(s.nonsignalling);
    assert_eq!(r.value.as_deref(), Some("1/2"));
    // The CLI reports the library result verbatim.
    let lib = min_causal_influence(&pr_box(0, 0, 0), InfluenceVariant::XToB).unwrap();
    assert_eq!(r.value.unwrap(), lib.value.to_string());
}

#[test]
fn negative_probability_rejected_with_path() {
    let out = run(&["functional", "--name", "chsh", "--input", &fixture("negative.json")]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("/entries/2/p"), "{err}");
}

#[test]
fn thirds_load_exactly() {
    let r = record(&["functional", "--name", "chsh", "--input", &fixture("thirds.json")]);
    assert_eq!(r.mode, Some(bellrelax::num::Mode::Rational));
    assert_eq!(r.value.as_deref(), Some("0"));
    let out = run(&["generate", "--input", &fixture("thirds.json")]);
    let file = bellrelax::format::DistributionFile::from_json(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    let p = file.to_rational().unwrap();
    assert_eq!(p.get(&[0, 0], &[1, 1]), bellrelax::num::Rational::new(1, 3));
    assert_eq!(p.get(&[1, 1], &[1, 0]), bellrelax::num::Rational::new(2, 3));
}

#[test]
fn record_round_trips_and_is_deterministic() {
    let args = ["communication", "--gen", "random-ns", "--seed", "11"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let rec: ResultRecord = serde_json::from_slice(&a.stdout).unwrap();
    let again = serde_json::to_string_pretty(&rec).unwrap() + "\n";
    assert_eq!(again.as_bytes(), &a.stdout[..]);
    let float = run(&["causal-influence", "--variant", "a-to-b", "--gen", "chsh-quantum", "--v", "0.9"]);
    let rec: ResultRecord = serde_json::from_slice(&float.stdout).unwrap();
    let back: ResultRecord = serde_json::from_str(&serde_json::to_string(&rec).unwrap()).unwrap();
    assert_eq!(back, rec);
}

#[test]
fn exit_codes() {
    let infeasible = run(&["causal-influence", "--variant", "a-to-b", "--gen", "nonmax", "--eps", "0.3"]);
    assert_eq!(infeasible.status.code(), Some(2));
    let rec: ResultRecord = serde_json::from_slice(&infeasible.stdout).unwrap();
    assert_eq!(rec.status, "infeasible");
    let both = run(&["communication", "--gen", "pr-box", "--input", &fixture("pr_box.json")]);
    assert_eq!(both.status.code(), Some(1));
    assert_eq!(run(&["communication"]).status.code(), Some(1));
    assert_eq!(run(&["communication", "--bogus"]).status.code(), Some(1));
    let irrational = run(&["communication", "--gen", "chsh-quantum", "--mode", "rational"]);
    assert_eq!(irrational.status.code(), Some(1));
}

#[test]
fn generate_then_load() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("i3322.json");
    let path = path.to_str().unwrap();
    let out = run(&["generate", "--gen", "i3322", "--v", "3/4", "--output", path]);
    assert!(out.status.success());
    let from_file = record(&["causal-influence", "--variant", "x-to-b", "--input", path, "--mode", "float"]);
    let direct = record(&["causal-influence", "--variant", "x-to-b", "--gen", "i3322", "--v", "3/4", "--mode", "float"]);
    assert_eq!(from_file.value, direct.value);
    assert!((from_file.value_decimal.unwrap() - 0.25).abs() < 1e-9);
}

#[test]
fn value_conditioned_programs() {
    let r = record(&[
        "causal-influence", "--variant", "x-to-b", "--functional", "i3322", "--value", "1/2", "--nonsignalling",
        "--mode", "rational",
    ]);
    assert_eq!(r.value.as_deref(), Some("1/5"));
    let r = record(&["measurement-dependence", "--functional", "chsh", "--value", "1/4", "--nonsignalling"]);
    assert_eq!(r.value.as_deref(), Some("1/4"));
    let clash = run(&["causal-influence", "--variant", "x-to-b", "--functional", "chsh", "--value", "0", "--gen", "pr-box"]);
    assert_eq!(clash.status.code(), Some(1));
}

#[test]
fn message_entropy_and_mi() {
    let r = record(&["communication", "--gen", "pr-box"]);
    assert!((r.entropy_bits.unwrap() - 1.0).abs() < 1e-12);
    let r = record(&["measurement-dependence", "--gen", "cglmp2", "--mi", "--mi-iterations", "500"]);
    let mi = &r.details["mutual_information"];
    assert!(mi["lower"]["standard"].as_f64().unwrap() <= mi["upper"].as_f64().unwrap());
}

#[test]
fn thread_count_does_not_change_output() {
    let base = ["bilocality", "--gen", "double-werner", "--v", "3/4", "--grid", "9", "--no-refine", "--format", "csv"];
    let one = run(&[&base[..], &["--threads", "1"]].concat());
    let two = run(&[&base[..], &["--threads", "2"]].concat());
    assert!(one.status.success());
    assert_eq!(one.stdout, two.stdout);
}
