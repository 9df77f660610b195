use std::process::{Command, Output};

use serde_json::Value;

fn boolcomp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_boolcomp"))
        .args(args)
        .env_remove("BOOLCOMP_MAX_ARITY")
        .env_remove("BOOLCOMP_MAX_EDGES")
        .output()
        .expect("binary runs")
}

fn report(args: &[&str]) -> Value {
    let out = boolcomp(args);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("json report")
}

#[test]
fn or2_global_certificate_complexity() {
    let r = report(&[
        "measure",
        "named:OR",
        "--n",
        "2",
        "--measure",
        "C",
        "--global",
    ]);
    assert_eq!(r["result"]["m0"], "2");
    assert_eq!(r["result"]["m1"], "1");
    assert_eq!(r["inputs"][0]["arity"], 2);
    assert_eq!(r["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn nand4_charval_interval() {
    let r = report(&["charval", "named:NAND", "--n", "4", "--measure", "C"]);
    let iv = &r["result"]["interval"];
    let lo: f64 = iv[0].as_str().unwrap().parse().unwrap();
    let hi: f64 = iv[1].as_str().unwrap().parse().unwrap();
    assert!(lo >= 2.0 - 1e-9 && hi <= 2.0 + 1e-9 && lo <= hi);
    assert_eq!(r["result"]["charval"]["exact"]["a"], "2");
}

#[test]
fn bublitz_local_values() {
    for (m, v) in [("bs", "4"), ("bs*", "9/2"), ("Cstar", "9/2"), ("C", "5")] {
        let r = report(&["measure", "named:BUBLITZ", "-m", m, "--input", "010011"]);
        assert_eq!(r["result"]["value"], v, "{m}");
    }
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| boolcomp(args).status.code().unwrap();
    assert_eq!(
        code(&["measure", "named:NOPE", "--n", "2", "-m", "C", "--global"]),
        2
    );
    assert_eq!(code(&["measure", "missing.btt", "-m", "C", "--global"]), 2);
    assert_eq!(code(&["measure", "named:OR", "--n", "2", "-m", "C"]), 2);
    assert_eq!(
        code(&[
            "measure",
            "named:OR",
            "--n",
            "4",
            "-m",
            "C",
            "--global",
            "--max-arity",
            "3"
        ]),
        3
    );
    assert_eq!(
        code(&[
            "zoo",
            "random-code",
            "--n",
            "6",
            "--count",
            "6",
            "--seed",
            "0"
        ]),
        4
    );
    assert_eq!(code(&["verify", "--suite", "nope"]), 2);
}

#[test]
fn flags_win_over_environment() {
    let run = |env: &str, extra: &[&str]| {
        let mut args = vec!["measure", "named:OR", "--n", "4", "-m", "C", "--global"];
        args.extend_from_slice(extra);
        Command::new(env!("CARGO_BIN_EXE_boolcomp"))
            .args(&args)
            .env("BOOLCOMP_MAX_ARITY", env)
            .output()
            .unwrap()
            .status
            .code()
            .unwrap()
    };
    assert_eq!(run("3", &[]), 3);
    assert_eq!(run("3", &["--max-arity", "4"]), 0);
    assert_eq!(run("10", &["--max-arity", "3"]), 3);
}

#[test]
fn reports_are_deterministic() {
    let strip = |mut v: Value| {
        v["elapsed_ms"] = Value::Null;
        v
    };
    let args = [
        "zoo",
        "random-code",
        "--n",
        "10",
        "--count",
        "4",
        "--seed",
        "7",
        "--distance",
        "1",
    ];
    assert_eq!(strip(report(&args)), strip(report(&args)));
    let args = ["charval", "named:BUBLITZ", "-m", "Cstar"];
    assert_eq!(strip(report(&args)), strip(report(&args)));
}

#[test]
fn compose_round_trips_through_files() {
    let dir = std::env::temp_dir().join(format!("boolcomp-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let tree = dir.join("t.itree");
    std::fs::write(&tree, "(2 (2) (2))").unwrap();
    let out = dir.join("f.btt");
    let r = report(&[
        "compose",
        "named:OR",
        "--n",
        "2",
        "--tree",
        tree.to_str().unwrap(),
        "-o",
        out.to_str().unwrap(),
    ]);
    assert_eq!(r["result"]["arity"], 4);
    // OR of ORs is OR_4: C_0 = 4 at 0000
    let r = report(&[
        "measure",
        out.to_str().unwrap(),
        "-m",
        "C",
        "--input",
        "0000",
    ]);
    assert_eq!(r["result"]["value"], "4");
    // without a matching file the named syntax applies
    let r = report(&[
        "measure",
        "named:AND",
        "--n",
        "4",
        "-m",
        "C",
        "--input",
        "0000",
    ]);
    assert_eq!(r["result"]["value"], "1");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn composed_measure_matches_table() {
    let tree = report(&[
        "measure",
        "named:NAND",
        "--n",
        "2",
        "-m",
        "C",
        "--uniform",
        "2",
        "--input",
        "0110",
    ]);
    let btt = report(&["compose", "named:NAND", "--n", "2", "--uniform", "2"]);
    let dir = std::env::temp_dir().join(format!("boolcomp-cli-m-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("f.btt");
    std::fs::write(&path, btt["result"]["btt"].as_str().unwrap()).unwrap();
    let table = report(&[
        "measure",
        path.to_str().unwrap(),
        "-m",
        "C",
        "--input",
        "0110",
    ]);
    assert_eq!(tree["result"]["value"], table["result"]["value"]);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn verify_suite_reports_pass() {
    let r = report(&["verify", "--suite", "bublitz"]);
    assert_eq!(r["result"]["passed"], true);
    assert_eq!(r["result"]["suites"][0]["criterion"], 1);
}

#[test]
fn zoo_exports_btt() {
    let dir = std::env::temp_dir().join(format!("boolcomp-cli-z-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("star.btt");
    let r = report(&["zoo", "star", "--s", "4", "--btt", path.to_str().unwrap()]);
    assert_eq!(r["result"]["verification"]["passed"], true);
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("n=6\n"));
    std::fs::remove_dir_all(&dir).unwrap();
}
