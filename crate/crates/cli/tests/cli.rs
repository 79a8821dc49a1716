use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const M_EVEN_1: &str = "registers 1\nstates q0 q1 qf\nfinal qf\n\
                        dec q0 r1 -> q1\ndec q1 r1 -> q0\nfork q0 -> qf qf\n";
const M_EVEN_2: &str = "registers 2\nstates q0 q1 qf\nfinal qf\n\
                        dec q0 r1 -> q1\ndec q1 r1 -> q0\nfork q0 -> qf qf\n";

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spineless"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn report(args: &[&str]) -> Value {
    let out = run(args);
    assert_eq!(
        out.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is json")
}

fn verdict<'a>(r: &'a Value, name: &str) -> &'a Value {
    r["verdicts"]
        .as_array()
        .unwrap()
        .iter()
        .find(|v| v["name"] == name)
        .unwrap_or_else(|| panic!("no verdict {name} in {r}"))
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn analyze_reports_every_verdict() {
    let r = report(&["analyze", "x1 <= x1^2 v x1^4"]);
    assert_eq!(r["command"], "analyze");
    assert_eq!(verdict(&r, "reduction")["value"], "simple");
    assert_eq!(verdict(&r, "trivial")["value"], false);
    assert_eq!(verdict(&r, "mingly")["value"], false);
    let exp = verdict(&r, "expansive");
    assert_eq!(exp["value"], true);
    assert_eq!(exp["witness"]["sigma"], serde_json::json!([[1]]));
    assert_eq!(exp["witness"]["c"], serde_json::json!([1, 3]));
    let pre = verdict(&r, "prespinal");
    assert_eq!(pre["value"], false);
    assert_eq!(pre["witness"], "spineless");
    assert!(pre.get("caps").is_some());
    assert_eq!(verdict(&r, "heuristic_k")["value"], 4);
}

#[test]
fn simulate_finds_the_parity_trace() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "m_even.acm", M_EVEN_1);
    let r = report(&[
        "simulate", &m, "--init", "q0 r1^2", "--depth", "10", "--reg", "10", "--width", "8",
    ]);
    let v = verdict(&r, "accepts");
    assert_eq!(v["value"], "accepted");
    assert_eq!(v["witness"]["length"], 3);
    assert_eq!(v["caps"]["depth"], 10);
}

#[test]
fn built_machine_simulates_the_source() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "m.acm", M_EVEN_2);
    let mk = dir.path().join("mk.acm");
    let mk = mk.to_str().unwrap();
    let r = report(&["build-mk", &m, "--K", "3", "-o", mk]);
    assert_eq!(verdict(&r, "round_trip")["value"], true);
    let text = std::fs::read_to_string(mk).unwrap();
    assert_eq!(
        spineless::acm::parse_acm(&text).unwrap().to_text(),
        text,
        "build-mk output re-parses to an equal machine"
    );
    let r = report(&["simulate", mk, "--init", "q0 r1^9 r2^1"]);
    assert_eq!(verdict(&r, "accepts")["value"], "accepted");
    let r = report(&[
        "simulate",
        mk,
        "--init",
        "q0 r1^27 r2^1",
        "--reg",
        "40",
        "--depth",
        "120",
    ]);
    assert_eq!(verdict(&r, "accepts")["value"], "unknown");
    assert_eq!(verdict(&r, "accepts")["witness"]["exhausted"], true);
}

#[test]
fn reports_are_byte_identical() {
    let args = ["frame-check", "--seed", "11", "--count", "15", "--json"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let r: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(verdict(&r, "mismatches")["value"], 0);
}

#[test]
fn json_flag_gives_a_single_line() {
    let out = run(&["analyze", "x1 <= 1 v x1^2", "--json"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.trim_end().lines().count(), 1);
}

#[test]
fn report_keys_are_sorted() {
    let out = run(&["analyze", "x1*x2 <= x1^2 v x2^2", "--json"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let c = text.find("\"command\"").unwrap();
    let i = text.find("\"inputs\"").unwrap();
    let v = text.find("\"verdicts\"").unwrap();
    let n = text.find("\"version\"").unwrap();
    assert!(c < i && i < v && v < n);
}

#[test]
fn output_flag_writes_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("r.json");
    let out = run(&["analyze", "x1 <= 1 v x1^2", "-o", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&p).unwrap()).unwrap();
    assert_eq!(r["command"], "analyze");
}

#[test]
fn star_commands() {
    let r = report(&["falsify-star", "x1 <= 1 v x1^2", "--K", "3"]);
    assert_eq!(verdict(&r, "check")["value"], true);
    let r = report(&[
        "star-search",
        "x1 <= x1^2 v x1^4",
        "--mode",
        "double",
        "--bound",
        "40",
    ]);
    assert_eq!(r["inputs"]["K"], 4);
    assert_eq!(r["inputs"]["K_source"], "certified");
    assert_eq!(verdict(&r, "counterexample")["value"], "none");
    let r = report(&["star-search", "x1 <= 1 v x1^2", "--K", "2"]);
    assert_eq!(verdict(&r, "counterexample")["value"], "found");
}

#[test]
fn machine_commands() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "m.acm", M_EVEN_1);
    let r = report(&["admissibility", &m, "--equation", "x1 <= x1^2 v x1^4"]);
    let w = &verdict(&r, "difference")["witness"]["witnesses"];
    assert!(w.as_array().unwrap().iter().any(|c| c == "q0 r1^3"));
    let r = report(&[
        "ambient-simulate",
        &m,
        "--equation",
        "x1 <= 1 v x1^2",
        "--init",
        "q0 r1^3",
        "--degree-cap",
        "3",
    ]);
    assert_eq!(verdict(&r, "accepts")["value"], "unknown");
    assert_eq!(verdict(&r, "accepts_with_equation")["value"], "accepted");
    let r = report(&["acc-quasieq", &m, "--init", "q0 r1^2"]);
    assert_eq!(
        verdict(&r, "quasiequation")["witness"]["consequent"],
        "q0*r1^2 <= qf"
    );
    let r = report(&["epsilon-sn", &m, "--init", "q0 r1^2", "--n", "2"]);
    assert!(verdict(&r, "equation")["value"]
        .as_str()
        .unwrap()
        .contains(")^2 <= "));
}

#[test]
fn usage_errors_exit_with_two() {
    let out = run(&["simulate", "m.acm", "--init", "q0", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--bogus"));
    assert_eq!(run(&["frame-check"]).status.code(), Some(2));
    assert_eq!(
        run(&["star-search", "x1 <= 1", "--mode", "triple"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn analysis_errors_exit_with_one() {
    assert_eq!(run(&["analyze", "x <= "]).status.code(), Some(1));
    assert_eq!(
        run(&["simulate", "/nonexistent.acm", "--init", "q0"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        run(&["falsify-star", "x1 <= 1 v x1", "--K", "2"])
            .status
            .code(),
        Some(1)
    );
}
