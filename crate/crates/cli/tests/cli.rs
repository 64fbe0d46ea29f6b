use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn fslp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fslp")).args(args).output().expect("fslp runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> (Value, i32) {
    let o = fslp(&[&["--json"], args].concat());
    (serde_json::from_slice(&o.stdout).expect("valid JSON"), o.status.code().unwrap())
}

#[test]
fn the_one_edge_ring_has_two_transitions() {
    let o = fslp(&["hshr-step", fixture("ring1.hg").to_str().unwrap()]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert_eq!(out.lines().filter(|l| l.starts_with('[')).count(), 2);
    assert!(out.contains("[idle]"));
    assert!(out.contains("[split]"));
}

#[test]
fn the_ring_synchronizes_into_a_star() {
    let (v, code) = json(&["hshr-step", fixture("ring.hg").to_str().unwrap(), "--select", "1,1,1,1"]);
    assert_eq!(code, 0);
    assert_eq!(v["schema"], 1);
    let ts = v["transitions"].as_array().unwrap();
    assert_eq!(ts.len(), 1);
    let target = ts[0]["target"].as_str().unwrap();
    assert_eq!(target.matches("S(").count(), 4);
    assert_eq!(target.matches("w'1").count(), 5);
}

#[test]
fn a_bad_selection_is_an_input_error() {
    let o = fslp(&["hshr-step", fixture("ring.hg").to_str().unwrap(), "--select", "1,1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("selection has 2 entries"));
}

#[test]
fn an_unsynchronized_selection_has_no_transition() {
    let o = fslp(&["hshr-step", fixture("ring.hg").to_str().unwrap(), "--select", "1,-,-,-"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn the_process_reduces_once() {
    let (v, code) = json(&["fusion-reduce", fixture("qrs.fu").to_str().unwrap()]);
    assert_eq!(code, 0);
    let rs = v["reductions"].as_array().unwrap();
    assert_eq!(rs.len(), 1);
    assert!(rs[0]["label"].as_str().unwrap().starts_with("comm"));
}

#[test]
fn translated_processes_print_as_graph_files() {
    let o = fslp(&["fusion2hshr", fixture("qrs.fu").to_str().unwrap()]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.lines().next().unwrap().starts_with("nodes "));
    assert!(out.contains("out1: "));
    assert!(out.contains("in1: "));
    let literal = stdout(&fslp(&["--literal-translation", "fusion2hshr", fixture("qrs.fu").to_str().unwrap()]));
    assert!(literal.starts_with("nodes "));
}

#[test]
fn graphs_translate_to_programs() {
    let o = fslp(&["hshr2slp", fixture("ring.hg").to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(
        stdout(&o),
        "split: C(x, y) :- C(x, z), C(z, y).\nstar: C(r(x, w), r(y, w)) :- S(y, w).\n?- C(x, y), C(y, z), C(z, v), C(v, x).\n"
    );
}

#[test]
fn the_ring_corresponds() {
    let (v, code) = json(&["check", fixture("ring1.hg").to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(v["passed"], true);
    assert_eq!(v["transitions"].as_array().unwrap().len(), 2);
}

#[test]
fn the_big_step_file_has_one_nonempty_big_step() {
    let (v, code) = json(&["slp-bigstep", fixture("bigstep.slp").to_str().unwrap(), "--nonempty"]);
    assert_eq!(code, 0);
    let bs = v["queries"][0]["big_steps"].as_array().unwrap();
    assert_eq!(bs.len(), 1);
    let all = json(&["slp-bigstep", fixture("bigstep.slp").to_str().unwrap()]).0;
    assert_eq!(all["queries"][0]["big_steps"].as_array().unwrap().len(), 2);
}

#[test]
fn the_pipeline_agrees() {
    let (v, code) = json(&["pipeline", fixture("qrs.fu").to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(v["verdict"]["ok"], true);
    assert_eq!(v["reductions"].as_array().unwrap().len(), 1);
    assert_eq!(v["transitions"].as_array().unwrap().len(), 1);
    assert_eq!(v["big_steps"].as_array().unwrap().len(), 1);
}

#[test]
fn a_small_sweep_is_clean_and_deterministic() {
    let a = fslp(&["--json", "sweep", "--count", "15"]);
    let b = fslp(&["--json", "sweep", "--count", "15"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["counterexamples"], 0);
}

#[test]
fn dot_output() {
    let out = stdout(&fslp(&["dot", fixture("ring1.hg").to_str().unwrap()]));
    assert!(out.starts_with("graph \"ring1\" {"));
}

#[test]
fn input_errors_exit_with_two() {
    assert_eq!(fslp(&["fusion-reduce", "missing.fu"]).status.code(), Some(2));
    assert_eq!(fslp(&["fusion-reduce", fixture("ring.hg").to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(fslp(&["dot", "graph.txt"]).status.code(), Some(2));
}

fn golden(name: &str, args: &[&str]) {
    let expected = std::fs::read_to_string(fixture("golden").join(name)).unwrap();
    let args: Vec<String> = args
        .iter()
        .map(|a| if a.contains('.') { fixture(a).to_string_lossy().into_owned() } else { a.to_string() })
        .collect();
    let o = Command::new(env!("CARGO_BIN_EXE_fslp")).args(&args).output().unwrap();
    assert_eq!(stdout(&o), expected, "{name}");
}

#[test]
fn outputs_match_the_golden_files() {
    golden("qrs.reduce.txt", &["fusion-reduce", "qrs.fu"]);
    golden("ring1.step.txt", &["hshr-step", "ring1.hg"]);
    golden("ring.slp", &["hshr2slp", "ring.hg"]);
    golden("bigstep.json", &["--json", "slp-bigstep", "--nonempty", "bigstep.slp"]);
    golden("qrs.pipeline.txt", &["pipeline", "qrs.fu"]);
}
