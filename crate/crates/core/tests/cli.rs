//! End-to-end runs of the binary.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_market-moments");

fn fixture(name: &str) -> String {
    format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .env_remove("MARKET_MOMENTS_THREADS")
        .output()
        .unwrap()
}

fn reports(out: &Output) -> Vec<Value> {
    String::from_utf8(out.stdout.clone())
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&[]).status.code(), Some(2));
    assert_eq!(run(&["analyze"]).status.code(), Some(2));
    assert_eq!(run(&["analyze", "x.csv", "--window", "0"]).status.code(), Some(2));
    assert_eq!(run(&["analyze", "x.csv", "--window", "3 weeks"]).status.code(), Some(2));
    assert_eq!(run(&["--threads", "0", "check", &fixture("two_tick.csv")]).status.code(), Some(2));
}

#[test]
fn version_and_help_exit_zero() {
    let v = run(&["--version"]);
    assert_eq!(v.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&v.stdout).contains("report schema 1"));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn data_errors_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let empty = write(dir.path(), "empty.csv", "");
    let out = run(&["analyze", &empty, "--window", "1"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("no ticks"));

    let header_only = write(dir.path(), "header.csv", "time,value,volume\n");
    assert_eq!(run(&["analyze", &header_only, "-w", "1"]).status.code(), Some(3));

    let bad = write(dir.path(), "bad.csv", "time,value,volume\n0,1,1\n1,2,0\n");
    let out = run(&["analyze", &bad, "-w", "1"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("line 3"), "{}", stderr(&out));

    let unsorted = write(dir.path(), "unsorted.csv", "time,value,volume\n2,1,1\n1,2,1\n");
    let out = run(&["analyze", &unsorted, "-w", "1"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("not sorted"));

    let missing = dir.path().join("nope.csv");
    assert_eq!(run(&["analyze", missing.to_str().unwrap(), "-w", "1"]).status.code(), Some(3));
    assert_eq!(run(&["returns", &fixture("two_tick.csv"), "-w", "1"]).status.code(), Some(3));
}

#[test]
fn price_schema_input_gives_same_report() {
    let dir = tempfile::tempdir().unwrap();
    let prices = write(dir.path(), "p.csv", "time,price,volume\n0.25,4,3\n0.75,2,1\n");
    let a = run(&["analyze", &prices, "-w", "1", "--schema", "price"]);
    let b = run(&["analyze", &fixture("two_tick.csv"), "-w", "1"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    // the declared schema must match the header
    assert_eq!(run(&["analyze", &prices, "-w", "1", "--schema", "value"]).status.code(), Some(3));
}

#[test]
fn jsonl_input_gives_same_report() {
    let dir = tempfile::tempdir().unwrap();
    let jl = write(
        dir.path(),
        "t.jsonl",
        "{\"time\":0.25,\"value\":12,\"volume\":3}\n{\"time\":0.75,\"value\":2,\"volume\":1}\n",
    );
    let a = run(&["analyze", &jl, "-w", "1"]);
    let b = run(&["analyze", &fixture("two_tick.csv"), "-w", "1"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn lag_beyond_span_marks_returns_empty() {
    let out = run(&["returns", &fixture("two_tick.csv"), "-w", "1", "--lag", "10"]);
    assert_eq!(out.status.code(), Some(0));
    let r = &reports(&out)[0];
    assert_eq!(r["returns"]["resolved"], 0);
    assert_eq!(r["returns"]["unresolved"], 2);
    assert!(r["returns"]["status"]["degenerate"].is_string());
    assert!(stderr(&out).contains("warning"));

    let strict = run(&["returns", &fixture("two_tick.csv"), "-w", "1", "--lag", "10", "--strict"]);
    assert_eq!(strict.status.code(), Some(4));
}

#[test]
fn returns_resolve_within_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(
        dir.path(),
        "r.csv",
        "time,value,volume\n0.1,10,1\n0.6,22,2\n1.2,9,3\n1.7,4,1\n",
    );
    let out = run(&["returns", &f, "-w", "1", "--lag", "0.5"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let rs = reports(&out);
    assert_eq!(rs.len(), 2);
    // window 1: 1.2 -> price at 0.6 (11), 1.7 -> price at 1.2 (3)
    let r = &rs[1]["returns"];
    assert_eq!(r["resolved"], 2);
    let h1 = (9.0 + 4.0) / (11.0 * 3.0 + 3.0 * 1.0);
    let m = r["direct"]["mean"].as_f64().unwrap();
    assert!((m - h1).abs() < 1e-15, "{m} vs {h1}");
}

#[test]
fn aggregate_of_two_four_six() {
    let out = run(&["aggregate", &fixture("deals_246.csv"), "-w", "1"]);
    assert!(out.status.success());
    let a = &reports(&out)[0]["aggregate"];
    assert_eq!(a["k"], 3);
    assert_eq!(a["agg_volatility"].as_f64(), Some(24.0));
    let cv = a["agg_cv_sq"].as_f64().unwrap();
    assert!((cv - 1.0 / 6.0).abs() < 1e-15);
    assert_eq!(a["deal_cv_sq"].as_f64(), Some(cv));
}

#[test]
fn composite_profit_and_zero_mean() {
    let out = run(&["composite", "--spec", &fixture("profit.toml")]);
    assert!(out.status.success());
    let c = &reports(&out)[0]["composite"];
    assert_eq!(c["mean"].as_f64(), Some(8.0));
    assert_eq!(c["volatility"].as_f64(), Some(16.0));
    assert_eq!(c["cv_sq"].as_f64(), Some(0.25));
    assert_eq!(c["theta"]["sales"].as_f64(), Some(2.25));
    assert_eq!(c["pairs"][0]["phi"].as_f64(), Some(-0.75));

    let zm = run(&["composite", "--spec", &fixture("zero_mean.toml")]);
    assert_eq!(zm.status.code(), Some(0));
    let c = &reports(&zm)[0]["composite"];
    assert_eq!(c["mean"].as_f64(), Some(0.0));
    assert_eq!(c["volatility"].as_f64(), Some(2.0));
    assert_eq!(c["cv_sq"]["degenerate"], "zero mean");

    let strict = run(&["composite", "--spec", &fixture("zero_mean.toml"), "--strict"]);
    assert_eq!(strict.status.code(), Some(4));
    assert!(strict.stdout.is_empty());
}

#[test]
fn composite_oracle_section() {
    let out = run(&["composite", "--spec", &fixture("profit.toml"), "--draws", "200000", "--seed", "3"]);
    assert!(out.status.success());
    let r = &reports(&out)[0];
    assert!(r["oracle"]["z_score"].as_f64().unwrap().abs() < 3.0);
    assert_eq!(r["provenance"]["seed"], 3);
    assert_eq!(
        run(&["composite", "--spec", &fixture("profit.toml"), "--draws", "10"]).status.code(),
        Some(3)
    );
}

#[test]
fn simulate_is_reproducible_and_thread_independent() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(
        dir.path(),
        "g.toml",
        "n_ticks = 20000\ntime_step = 0.001\ntarget_corr_cu = 0.3\nseed = 9\n\
         [value_dist]\nkind = \"lognormal\"\nmu = 0.0\nsigma = 0.4\n\
         [volume_dist]\nkind = \"gamma\"\nshape = 2.0\nscale = 1.0\n",
    );
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for (path, threads) in [(&a, "1"), (&b, "4")] {
        let out = run(&["--threads", threads, "simulate", "--genspec", &spec, "-o", path.to_str().unwrap()]);
        assert!(out.status.success(), "{}", stderr(&out));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    let other = run(&["simulate", "--genspec", &spec, "--seed", "10"]);
    assert_ne!(other.stdout, std::fs::read(&a).unwrap());

    let ra = run(&["--threads", "1", "analyze", a.to_str().unwrap(), "-w", "1", "--lag", "0.05", "--gap"]);
    let rb = run(&["--threads", "4", "analyze", a.to_str().unwrap(), "-w", "1", "--lag", "0.05", "--gap"]);
    assert!(ra.status.success());
    assert_eq!(reports(&ra).len(), 20);
    assert_eq!(ra.stdout, rb.stdout);
}

#[test]
fn simulate_deals_feed_aggregate() {
    let dir = tempfile::tempdir().unwrap();
    let deals = dir.path().join("d.csv");
    let out = run(&[
        "simulate", "--genspec", &fixture("lognormal.toml"), "--agents", "7", "-o",
        deals.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let agg = run(&["aggregate", deals.to_str().unwrap(), "-w", "10s"]);
    assert!(agg.status.success());
    let r = &reports(&agg)[0]["aggregate"];
    assert_eq!(r["k"], 10000);
    let gap = r["cv_transfer_gap"].as_f64().unwrap();
    assert!(gap < 1e-12, "{gap}");
}

#[test]
fn output_dir_writes_one_file_per_window() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "t.csv", "time,value,volume\n0.5,1,1\n1.5,2,1\n3.5,3,1\n");
    let out_dir = dir.path().join("reports");
    let out = run(&["analyze", &f, "-w", "1", "--output-dir", out_dir.to_str().unwrap()]);
    assert!(out.status.success());
    let mut names: Vec<String> = std::fs::read_dir(&out_dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(names, ["window-0.json", "window-1.json", "window-3.json"]);
    let one: Value = serde_json::from_slice(&std::fs::read(out_dir.join("window-3.json")).unwrap()).unwrap();
    assert_eq!(one["window"]["index"], 3);
}

#[test]
fn constant_price_window_is_point_mass() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "c.csv", "time,value,volume\n0.1,6,3\n0.2,4,2\n0.3,10,5\n");
    let out = run(&["analyze", &f, "-w", "1", "--gap"]);
    assert!(out.status.success());
    let r = &reports(&out)[0];
    assert_eq!(r["price"]["direct"]["volatility"].as_f64(), Some(0.0));
    assert_eq!(r["gaussian"]["price"]["point_mass"], true);
}

#[test]
fn check_reports_counts() {
    let out = run(&["check", &fixture("two_tick.csv")]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("2 ticks"));
    let out = run(&["check", &fixture("deals_246.csv"), "--kind", "deals"]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("3 deals"));
    let out = run(&["check", &fixture("profit.toml")]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("2 components"));
    let out = run(&["check", &fixture("lognormal.toml"), "--kind", "genspec"]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("10000 ticks"));
    assert_eq!(run(&["check", &fixture("lognormal.toml")]).status.code(), Some(3));
}

#[test]
fn stdin_input() {
    use std::io::Write;
    use std::process::Stdio;
    let mut child = Command::new(BIN)
        .args(["analyze", "-", "-w", "1"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(&std::fs::read(fixture("two_tick.csv")).unwrap())
        .unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(out.stdout, std::fs::read(fixture("two_tick.report.json")).unwrap());
}
