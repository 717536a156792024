//! Exit codes and output of the `logizono` binary.

use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_logizono"))
        .args(args)
        .env_remove("LOGIZONO_CAP")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

/// CSV rows with the timing column dropped.
fn sizes_only(csv: &str) -> Vec<String> {
    csv.lines()
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            if f.len() == 3 {
                format!("{},{}", f[0], f[2])
            } else {
                l.to_string()
            }
        })
        .collect()
}

#[test]
fn eval_prints_points() {
    let o = run(&["eval", fixture("three_points.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "001\n010\n110\n");

    let o = run(&["eval", fixture("singleton.json").to_str().unwrap()]);
    assert_eq!(stdout(&o), "0110\n");
}

#[test]
fn eval_capacity_exit() {
    let p25 = fixture("p25.json");
    let o = run(&["eval", p25.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).contains("capacity"));

    let o = Command::new(env!("CARGO_BIN_EXE_logizono"))
        .args(["eval", p25.to_str().unwrap()])
        .env("LOGIZONO_CAP", "25")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "0\n1\n");
}

#[test]
fn reach_explicit_intersection() {
    let o = run(&[
        "reach",
        "--model",
        fixture("intersection.json").to_str().unwrap(),
        "--steps",
        "5,1,0",
        "--algebra",
        "explicit",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(
        sizes_only(&stdout(&o)),
        [
            "# model=intersection algebra=explicit mode=minkowski seed=1",
            "steps,size",
            "0,16",
            "1,24",
            "5,36"
        ]
    );
}

#[test]
fn reach_output_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for i in 0..2 {
        let out = dir.path().join(format!("run{i}.csv"));
        let o = run(&[
            "reach",
            "--case",
            "boolean10",
            "--seed",
            "4",
            "--steps",
            "1,2",
            "--rep",
            "poly",
            "--mode",
            "exact",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        outputs.push(sizes_only(&std::fs::read_to_string(&out).unwrap()));
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0][0], "# model=boolean10-seed4 algebra=poly mode=exact seed=4");
}

#[test]
fn reach_json_dump() {
    let o = run(&[
        "reach",
        "--model",
        fixture("intersection.json").to_str().unwrap(),
        "--steps",
        "2",
        "--algebra",
        "logical",
        "--format",
        "json",
        "--dump-sets",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["records"][0]["size"], 64);
    assert_eq!(v["records"][0]["sets"].as_array().unwrap().len(), 8);
}

#[test]
fn reach_errors() {
    let o = run(&["reach", "--model", "/does/not/exist.json", "--steps", "5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("/does/not/exist.json"));

    let o = run(&[
        "reach",
        "--model",
        fixture("intersection.json").to_str().unwrap(),
        "--steps",
        "2",
        "--algebra",
        "logical",
        "--mode",
        "exact",
    ]);
    assert_eq!(o.status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"vars":[{"name":"x","role":"state","init":["0"]}],"updates":{"x":"x ^^ x"}}"#)
        .unwrap();
    let o = run(&["reach", "--model", bad.to_str().unwrap(), "--steps", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("column"), "{}", stderr(&o));
}

#[test]
fn lfsr_round_trips() {
    let o = run(&["lfsr", "--lk", "16", "--key-hex", "0xBEEF"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("recovered_key=0xbeef"));
    assert!(out.contains("recovered=true"));

    let o = run(&["lfsr", "--lk", "30", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("recovered=true"));
    assert!(stdout(&o).contains("time_seconds="));

    let o = run(&["lfsr", "--spec", fixture("lfsr.json").to_str().unwrap(), "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("lk=60 lm=120"));
    assert!(stdout(&o).contains("recovered=true"));
}

#[test]
fn lfsr_short_message() {
    let o = run(&["lfsr", "--lk", "8", "--lm", "4"]);
    match o.status.code() {
        Some(4) => assert!(stderr(&o).contains("key search failed")),
        Some(0) => assert!(stderr(&o).contains("warning")),
        other => panic!("unexpected exit {other:?}"),
    }
}

#[test]
fn lfsr_bad_taps() {
    let o = run(&["lfsr", "--lk", "8", "--taps", "9,1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn selftest_passes() {
    let o = run(&["selftest", "--scale", "0.05", "--seed", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("PASS")).count(), 4);
}
