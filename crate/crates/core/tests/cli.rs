use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn cfdp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cfdp")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = cfdp(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn no_arguments_prints_usage_and_fails() {
    let out = cfdp(&[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
    assert!(out.stdout.is_empty());
}

#[test]
fn unknown_subcommand_and_flag_fail_with_one() {
    assert_eq!(cfdp(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(cfdp(&["dp-gap", "--nope", "3"]).status.code(), Some(1));
    assert_eq!(cfdp(&["--help"]).status.code(), Some(0));
}

#[test]
fn input_errors_fail_with_one_and_io_errors_with_two() {
    let out = cfdp(&["dp-gap", "--p1", "0"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
    let out = cfdp(&["posterior", "--x", "1", "--a", "0", "--sigma0", "-1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("invalid model"));

    let out = cfdp(&["repair", "--train", "/nonexistent/train.csv"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/nonexistent/train.csv"));
}

#[test]
fn dsep_reads_the_edge_list_format() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.txt");
    std::fs::write(&g, "U -> X\nA -> Z\nX -> Yhat\nZ <-> Yhat\n").unwrap();
    let run = |args: &[&str]| {
        let out = cfdp(&[&["dsep", "--graph", path(&g)][..], args].concat());
        assert!(out.status.success());
        String::from_utf8(out.stdout).unwrap()
    };
    // Z is a collider on Yhat <-> Z <- A
    assert_eq!(run(&["--src", "Yhat", "--dst", "A"]), "true\n");
    assert_eq!(run(&["--src", "Yhat", "--dst", "A", "--given", "Z"]), "false\n");
    assert_eq!(run(&["--src", "X", "--dst", "A"]), "true\n");
    assert_eq!(run(&["--src", "A", "--dst", "X", "--given", "Yhat"]), "true\n");
    let rec = json(&["dsep", "--graph", path(&g), "--src", "A", "--dst", "X", "--given", "Yhat,Z", "--json"]);
    assert_eq!(rec["value"], Value::Bool(false));
    assert_eq!(rec["config"]["subcommand"], "dsep");

    assert_eq!(cfdp(&["dsep", "--graph", path(&g), "--src", "A", "--dst", "Q"]).status.code(), Some(1));
}

#[test]
fn adversary_finds_the_most_negative_world() {
    let rec = json(&[
        "adversary", "--mu0", "1", "--mu1", "1", "--sigma0", "1", "--sigma1", "1", "--x", "2", "--a", "0", "--grid",
        "-0.99:0.99:0.11",
    ]);
    assert!((rec["rho_star"].as_f64().unwrap() + 0.99).abs() < 1e-9);
    assert_eq!(rec["rho_profile"].as_array().unwrap().len(), 19);
    assert_eq!(rec["config"]["params"]["grid"], "-0.99:0.99:0.11");
}

#[test]
fn posterior_and_gap_records() {
    let post = json(&["posterior", "--mu0", "1", "--mu1", "1", "--rho", "0.5", "--x", "2", "--a", "0"]);
    assert_eq!(post["mean"].as_f64(), Some(1.5));
    assert!((post["variance"].as_f64().unwrap() - 0.75).abs() < 1e-12);

    let cf = json(&["cf-gap", "--predictor", "po_linear", "--rho", "-0.3", "--x", "-0.5", "--a", "1"]);
    assert_eq!(cf["value"].as_f64(), Some(0.0));
    assert_eq!(cf["conditioning_point"]["a"], 1);

    let mc = json(&["cf-gap", "--method", "monte-carlo", "--n", "200000", "--window", "0.05", "--x", "0", "--a", "0", "--seed", "3"]);
    assert_eq!(mc["method"], "monte_carlo");
    assert_eq!(mc["seed"], 3);
    assert!(mc["value"].as_f64().unwrap() > 0.4);

    let dp = json(&["dp-gap", "--mu1", "2", "--n", "20000", "--seed", "5"]);
    assert!(dp["value"].as_f64().unwrap() < 0.03);
    assert_eq!(dp["config"]["params"]["seed"], 5);
    let raw = json(&["dp-gap", "--mu1", "2", "--n", "20000", "--seed", "5", "--predictor", "identity"]);
    assert!(raw["value"].as_f64().unwrap() > 0.6);
}

#[test]
fn same_seed_gives_byte_identical_output() {
    for args in [
        &["sample", "--n", "50", "--rho", "0.4", "--seed", "9"][..],
        &["dp-gap", "--n", "5000", "--seed", "9"],
        &["strong-assumption", "--n", "3000", "--seed", "9"],
        &["gp-demo", "--n", "3000", "--levels", "-1,0,2", "--seed", "9"],
        &["adversary", "--x", "1", "--a", "1", "--grid", "-0.5,0,0.5", "--method", "monte-carlo", "--n", "20000", "--window", "0.1"],
    ] {
        let (a, b) = (cfdp(args), cfdp(args));
        assert!(a.status.success(), "{args:?}: {}", String::from_utf8_lossy(&a.stderr));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
    assert_ne!(cfdp(&["sample", "--n", "5", "--seed", "1"]).stdout, cfdp(&["sample", "--n", "5", "--seed", "2"]).stdout);
}

#[test]
fn sample_writes_consistent_draws() {
    let out = cfdp(&["sample", "--n", "200", "--rho", "-0.3"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("a,x0,x1,x"));
    for line in lines {
        let f: Vec<&str> = line.split(',').collect();
        let pick = if f[0] == "0" { f[1] } else { f[2] };
        assert_eq!(pick, f[3]);
    }
}

#[test]
fn repair_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let train = dir.path().join("train.csv");
    let out = dir.path().join("out.csv");
    let mut csv = String::from("a,y_bar\n");
    for i in 0..20 {
        csv += &format!("g,{}\nh,{}\n", i, 100 + 2 * i);
    }
    std::fs::write(&train, csv).unwrap();
    let run = cfdp(&["repair", "--train", path(&train), "--out", path(&out)]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("a,y_bar,y_hat"));
    // the k-th score of each group maps to the same pooled value
    let rows: Vec<Vec<String>> = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    assert_eq!(rows.len(), 40);
    for pair in rows.chunks(2) {
        assert_eq!(pair[0][2], pair[1][2]);
    }
    assert_eq!(cfdp(&["repair", "--mode", "median", "--train", path(&train)]).status.code(), Some(1));
}

#[test]
fn synthetic_rank_experiment_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("law.csv");
    assert!(cfdp(&["synth-data", "--n", "3000", "--seed", "4", "--out", path(&data)]).status.success());
    let mut outputs = Vec::new();
    for k in 0..2 {
        let out_dir = dir.path().join(format!("run{k}"));
        let rec = json(&[
            "rank-experiment", "--data", path(&data), "--subgroup", "race=Black", "--n-test", "20", "--seed", "7",
            "--out-dir", path(&out_dir),
        ]);
        assert_eq!(rec["config"]["subcommand"], "rank-experiment");
        let files: Vec<Vec<u8>> = ["ranks.csv", "spearman.json", "rankplot.svg"]
            .iter()
            .map(|f| std::fs::read(out_dir.join(f)).unwrap())
            .collect();
        outputs.push(files);
    }
    assert_eq!(outputs[0], outputs[1]);
    let bad = cfdp(&[
        "rank-experiment", "--data", path(&data), "--subgroup", "race=Nobody", "--out-dir", path(&dir.path().join("x")),
    ]);
    assert_eq!(bad.status.code(), Some(1));
}
