use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn sleepmis(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sleepmis"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

const HEADER: &str = "algo,family,n,m,seed,avg_awake,max_awake,total_rounds,avg_finish,mis_size,verdict,rank_tie_flag,runtime_ms";

#[test]
fn run_sleeping_cycle() {
    let out = sleepmis(&["run", "--algo", "sleeping", "--graph", "cycle:n=64", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = json(&out);
    assert_eq!(v["verdict"], "valid");
    // K = 18 for n = 64.
    assert_eq!(v["total_rounds"], 3 * ((1u64 << 18) - 1));
    assert_eq!(v["depth"], 18);
    for key in HEADER.split(',') {
        assert!(v.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn run_greedy_complete() {
    let out = sleepmis(&["run", "--algo", "greedy", "--graph", "complete:n=8", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["mis_size"], 1);
}

#[test]
fn missing_graph_file_names_the_path() {
    let out = sleepmis(&["run", "--algo", "sleeping", "--graph", "file:missing.edges", "--seed", "0"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("missing.edges"), "{}", stderr(&out));
}

#[test]
fn usage_errors_exit_one() {
    for args in [
        vec!["run", "--algo", "sleeping", "--graph", "cycle:n=8", "--bogus"],
        vec!["run", "--algo", "sleeping", "--graph", "hypercube:n=8"],
        vec!["run", "--algo", "quantum", "--graph", "cycle:n=8"],
        vec!["run", "--algo", "sleeping", "--graph", "cycle:n=2^3..2^4"],
        vec!["verify", "--graph", "cycle:n=64", "--seeds", "5..4"],
        vec!["frobnicate"],
    ] {
        let out = sleepmis(&args);
        assert_eq!(out.status.code(), Some(1), "{args:?}: {}", stderr(&out));
    }
    assert_eq!(sleepmis(&["--help"]).status.code(), Some(0));
}

#[test]
fn graph_file_runs() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("tri.edges");
    std::fs::write(&file, "# n=4\n0 1\n1 2\n0 2\n").unwrap();
    let spec = format!("file:{}", path_str(&file));
    let out = sleepmis(&["run", "--algo", "luby", "--graph", &spec]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = json(&out);
    assert_eq!((v["n"].as_u64(), v["m"].as_u64()), (Some(4), Some(3)));
    // The isolated node 3 and one triangle corner.
    assert_eq!(v["mis_size"], 2);
}

#[test]
fn emitted_trace_rechecks() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("t.json");
    let out = sleepmis(&[
        "run", "--algo", "fast", "--graph", "gnp:n=64,p=0.1", "--seed", "3", "--emit-trace", path_str(&trace),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let again = sleepmis(&["recheck", path_str(&trace)]);
    assert_eq!(again.status.code(), Some(0), "{}", stderr(&again));
    assert_eq!(json(&again)["verdict"], "valid");
    assert_eq!(json(&again)["metrics"]["total_rounds"], json(&out)["total_rounds"]);

    // Claiming nobody joined must fail the recheck.
    let mut dump: Value = serde_json::from_str(&std::fs::read_to_string(&trace).unwrap()).unwrap();
    for s in dump["outputs"].as_array_mut().unwrap() {
        *s = Value::from("out");
    }
    std::fs::write(&trace, dump.to_string()).unwrap();
    assert_eq!(sleepmis(&["recheck", path_str(&trace)]).status.code(), Some(2));
}

fn experiment(dir: &Path, name: &str, extra: &[&str], threads: &str) -> (Output, Vec<u8>) {
    let out_path = dir.join(name);
    let mut args = vec![
        "experiment",
        "--algo",
        "sleeping,greedy",
        "--graph",
        "gnp:n=2^4..2^6,p=8/n",
        "--graph",
        "cycle:n=12|9",
        "--seeds",
        "0..4",
        "--out",
        path_str(&out_path),
    ];
    args.extend_from_slice(extra);
    let out = Command::new(env!("CARGO_BIN_EXE_sleepmis"))
        .args(&args)
        .env("SLEEPMIS_THREADS", threads)
        .output()
        .unwrap();
    let bytes = std::fs::read(&out_path).unwrap_or_default();
    (out, bytes)
}

#[test]
fn experiment_is_byte_identical_and_sorted() {
    let dir = tempfile::tempdir().unwrap();
    let (a, csv_a) = experiment(dir.path(), "a.csv", &[], "1");
    let (b, csv_b) = experiment(dir.path(), "b.csv", &[], "3");
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(b.status.code(), Some(0));
    assert_eq!(csv_a, csv_b);

    let text = String::from_utf8(csv_a).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(HEADER));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    // 2 algorithms x 5 graphs x 5 seeds.
    assert_eq!(rows.len(), 50);
    let keys: Vec<(&str, &str, u64, u64)> = rows
        .iter()
        .map(|r| (r[0], r[1], r[2].parse().unwrap(), r[4].parse().unwrap()))
        .collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    assert_eq!(keys[0], ("greedy", "cycle", 9, 0));
    for r in &rows {
        assert_eq!(r[12], "", "runtime_ms stays empty without --timing");
        assert_eq!(r[5].split('.').nth(1).map(str::len), Some(6));
    }

    let manifest_a: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("a.manifest.json")).unwrap()).unwrap();
    let manifest_b: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("b.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest_a["config_hash"], manifest_b["config_hash"]);
    assert_eq!(manifest_a["rows"], 50);
}

#[test]
fn experiment_from_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.conf");
    let out = dir.path().join("r.csv");
    std::fs::write(
        &cfg,
        format!(
            "# two algorithms on one path\nalgo = luby | fast\ngraph = path:n=10\nseeds = 1..3\nc = 4\nout = {}\n",
            out.display()
        ),
    )
    .unwrap();
    let res = sleepmis(&["experiment", "--config", path_str(&cfg)]);
    assert_eq!(res.status.code(), Some(0), "{}", stderr(&res));
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 1 + 6);

    // Flags override the file.
    let res = sleepmis(&["experiment", "--config", path_str(&cfg), "--seeds", "0..0"]);
    assert_eq!(res.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&out).unwrap().lines().count(), 1 + 2);
}

#[test]
fn timeouts_are_rows() {
    let dir = tempfile::tempdir().unwrap();
    let (out, csv) = experiment(dir.path(), "t.csv", &["--cap", "40"], "2");
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = String::from_utf8(csv).unwrap();
    let timeouts = text.lines().filter(|l| l.contains(",timeout,")).count();
    // Every sleeping run needs far more than 40 rounds; greedy finishes.
    assert_eq!(timeouts, 25);
}

#[test]
fn unwritable_output_is_an_error() {
    let out = sleepmis(&[
        "experiment", "--algo", "greedy", "--graph", "path:n=4", "--seeds", "0..1", "--out", "/nonexistent/dir/r.csv",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("/nonexistent/dir/r.csv"));
}

#[test]
fn fast_beats_sleeping_rounds_at_1024() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("cmp.csv");
    let res = sleepmis(&[
        "experiment", "--algo", "sleeping,fast", "--graph", "gnp:n=1024,p=8/n", "--seeds", "0..2", "--out",
        path_str(&out_path),
    ]);
    assert_eq!(res.status.code(), Some(0), "{}", stderr(&res));
    let text = std::fs::read_to_string(&out_path).unwrap();
    let rounds = |algo: &str| -> Vec<u64> {
        text.lines()
            .filter(|l| l.starts_with(&format!("{algo},")))
            .map(|l| l.split(',').nth(7).unwrap().parse().unwrap())
            .collect()
    };
    let (fast, sleeping) = (rounds("fast"), rounds("sleeping"));
    assert_eq!(fast.len(), 3);
    assert!(fast.iter().zip(&sleeping).all(|(f, s)| f < s));
}

#[test]
fn valid_rows_recheck_from_trace_files() {
    let dir = tempfile::tempdir().unwrap();
    let traces = dir.path().join("traces");
    let (out, csv) = experiment(dir.path(), "r.csv", &["--trace-dir", path_str(&traces)], "2");
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(csv).unwrap();
    let valid = text.lines().filter(|l| l.contains(",valid,")).count();
    let files: Vec<_> = std::fs::read_dir(&traces).unwrap().map(|e| e.unwrap().path()).collect();
    assert_eq!(files.len(), 50);
    let mut rechecked = 0;
    for f in files {
        let r = sleepmis(&["recheck", path_str(&f)]);
        if r.status.code() == Some(0) {
            rechecked += 1;
        }
    }
    assert_eq!(rechecked, valid);
}

#[test]
fn verify_cycle_campaign() {
    let out = sleepmis(&[
        "verify", "--algo", "sleeping", "--graph", "cycle:n=64", "--seeds", "0..499", "--checks", "mis,equiv",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = json(&out);
    assert_eq!(v["runs"], 500);
    let mis = &v["mis"];
    assert_eq!(
        mis["valid"].as_u64().unwrap() + mis["invalid_with_tie"].as_u64().unwrap(),
        500
    );
    assert_eq!(v["equivalence"]["mismatches"].as_array().unwrap().len(), 0);
    assert!(stderr(&out).contains("result: pass"));
}

#[test]
fn verify_exact_and_statistics() {
    let out = sleepmis(&["verify", "--checks", "exact", "--graph", "path:n=2", "--seeds", "0..0"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["exact"]["expected_right"], "1/2");
    assert_eq!(v["exact"]["expected_left"], "1");

    let guard = sleepmis(&["verify", "--checks", "exact", "--graph", "cycle:n=32", "--seeds", "0..0"]);
    assert_eq!(guard.status.code(), Some(1));

    let stats = sleepmis(&[
        "verify", "--graph", "gnp:n=128,p=8/n", "--seeds", "0..59", "--checks", "pruning,zdecay",
    ]);
    assert_eq!(stats.status.code(), Some(0), "{}", stderr(&stats));
    assert_eq!(json(&stats)["zdecay"]["levels"].as_array().unwrap().len(), 7);
}
