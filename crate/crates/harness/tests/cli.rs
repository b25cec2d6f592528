//! Black-box tests of the `fareycount` binary.

use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_fareycount"));
    c.env_remove("FAREYCOUNT_WORKERS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn line(out: &Output) -> Value {
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    serde_json::from_str(text.trim()).expect("one JSON line on stdout")
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

#[test]
fn documented_examples() {
    let out = run(&["count-l", "--n", "2", "--h", "10", "--method", "fast"]);
    assert_eq!(code(&out), 0);
    let v = line(&out);
    assert_eq!(v["outputs"]["count"], 33);
    assert_eq!(v["subcommand"], "count-l");
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("{\"schema_version\":1,"));
    assert_eq!(line(&run(&["jn", "--bounds", "4,4"]))["outputs"]["count"], 4);
    assert_eq!(line(&run(&["count-s", "--n", "3", "--h", "2", "--method", "brute"]))["outputs"]["count"], 216);
    assert_eq!(line(&run(&["doubly", "--n", "2", "--h", "10", "--method", "brute"]))["outputs"]["count"], 33);
    assert_eq!(line(&run(&["lower-bound", "--n", "2", "--h", "10"]))["outputs"]["count"], 32);
    let n = run(&["count-n", "--coeffs", "0,1,-1", "--box0", "0:2,0:2", "--box", "0:2,0:2"]);
    assert_eq!(line(&n)["outputs"]["count"], 6);
}

#[test]
fn exit_codes() {
    assert_eq!(code(&run(&["count-l", "--n", "2"])), 2);
    assert_eq!(code(&run(&["count-l", "--n", "2", "--h", "x"])), 2);
    assert_eq!(code(&run(&["count-l", "--n", "2", "--h", "3", "--bogus", "1"])), 2);
    assert_eq!(code(&run(&["jn", "--bounds", "3,3", "--h", "2"])), 2);
    assert_eq!(code(&run(&["doubly", "--n", "2", "--h", "3", "--method", "naive"])), 2);
    assert_eq!(code(&run(&["verify", "nonsense"])), 2);
    assert_eq!(code(&run(&["count-l", "--n", "3", "--h", "200", "--method", "brute", "--budget", "1000"])), 3);
    assert_eq!(code(&run(&["count-s", "--n", "27", "--h", "1"])), 4);
    let bad = run(&["expsum-verify", "--coeffs", "1,1", "--box0", "0:3", "--box", "0:3", "--p", "3"]);
    assert_eq!(code(&bad), 2);
}

#[test]
fn worker_count_does_not_change_results() {
    let strip = |mut v: Value| {
        v.as_object_mut().unwrap().remove("timestamp");
        v.as_object_mut().unwrap().remove("elapsed_ms");
        v
    };
    for args in [
        vec!["count-l", "--n", "3", "--h", "12", "--method", "fast"],
        vec!["count-l", "--n", "3", "--h", "9", "--method", "naive"],
        vec!["jn", "--bounds", "30,30,30"],
    ] {
        let one = strip(line(&run(&[&args[..], &["--workers", "1"]].concat())));
        let four = strip(line(&run(&[&args[..], &["--workers", "4"]].concat())));
        assert_eq!(one, four);
    }
}

fn read(p: &Path) -> String {
    std::fs::read_to_string(p).unwrap()
}

#[test]
fn warm_cache_returns_line_verbatim() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache.jsonl");
    let c = cache.to_str().unwrap();
    let first = run(&["count-l", "--n", "3", "--h", "8", "--cache", c]);
    let second = run(&["count-l", "--h", "8", "--n", "3", "--cache", c, "--workers", "3"]);
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(read(&cache).lines().count(), 1);
    let other = run(&["count-l", "--n", "3", "--h", "9", "--cache", c]);
    assert_ne!(first.stdout, other.stdout);
    assert_eq!(read(&cache).lines().count(), 2);
}

#[test]
fn config_file_and_environment_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# defaults\nn = 2\nh = 5\n").unwrap();
    let c = cfg.to_str().unwrap();
    assert_eq!(line(&run(&["count-l", "--config", c]))["outputs"]["count"], 11);
    assert_eq!(line(&run(&["count-l", "--config", c, "--h", "10"]))["outputs"]["count"], 33);
    std::fs::write(&cfg, "n = 2\nh = 5\ncolour = red\n").unwrap();
    assert_eq!(code(&run(&["count-l", "--config", c])), 2);
    let out = bin().args(["count-l", "--n", "2", "--h", "5"]).env("FAREYCOUNT_WORKERS", "zero").output().unwrap();
    assert_eq!(code(&out), 2);
    let out = bin().args(["count-l", "--n", "2", "--h", "5", "--workers", "2"]).env("FAREYCOUNT_WORKERS", "zero").output().unwrap();
    assert_eq!(code(&out), 0);
}

#[test]
fn scaling_writes_csv_and_fit() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("scaling.csv");
    let out = run(&["scaling", "--quantity", "L", "--n", "2", "--h-grid", "20:160:2", "--out", csv.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let slope = line(&out)["outputs"]["fit"]["slope"].as_f64().unwrap();
    assert!((1.8..=2.2).contains(&slope), "slope {slope}");
    let text = read(&csv);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,H,count,candidates_examined,elapsed_ms"));
    assert_eq!(lines.count(), 4);
    let j = run(&["scaling", "--quantity", "J", "--n", "2", "--h-grid", "8,16,32,64"]);
    let slope = line(&j)["outputs"]["fit"]["slope"].as_f64().unwrap();
    assert!((slope - 1.0).abs() < 0.05);
}

#[test]
fn emitted_solutions_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("tuples.csv");
    let out = run(&["lower-bound", "--n", "3", "--h", "6", "--emit-solutions", "--out", csv.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let count = line(&out)["outputs"]["count"].as_u64().unwrap();
    let text = read(&csv);
    assert!(text.starts_with("alpha_1,alpha_2,alpha_3\n"));
    assert_eq!(text.lines().count() as u64, count + 1);
    assert_eq!(code(&run(&["lower-bound", "--n", "3", "--h", "6", "--emit-solutions"])), 2);
}

#[test]
fn expsum_subcommands() {
    let out = run(&["expsum-verify", "--coeffs", "1,1", "--box0", "0:3", "--box", "0:3", "--p", "7"]);
    assert_eq!(code(&out), 0);
    assert_eq!(line(&out)["outputs"]["m"], 3);
    let out = run(&["expsum-verify", "--samples", "20", "--seed", "4"]);
    assert_eq!(code(&out), 0);
    assert_eq!(line(&out)["outputs"]["failures"], 0);
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("moment.csv");
    let out = run(&["expsum-moment", "--q", "100", "--moment", "2", "--out", csv.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert_eq!(line(&out)["outputs"]["U"], 10);
    assert!(read(&csv).starts_with("q,a,n,U,V,total,bound_reference,ratio\n"));
}

#[test]
fn verify_suites_pass() {
    for suite in ["oracle", "identity", "construction", "expsum"] {
        let out = run(&["verify", suite, "--workers", "4"]);
        assert_eq!(code(&out), 0, "{suite}: {}", String::from_utf8_lossy(&out.stderr));
        assert_eq!(line(&out)["outputs"]["passed"], true);
    }
}

#[test]
fn count_bound_batch_meets_frozen_cap() {
    let out = run(&["count-n", "--samples", "200", "--workers", "4"]);
    assert_eq!(code(&out), 0);
    assert_eq!(line(&out)["outputs"]["regression"], false);
}
