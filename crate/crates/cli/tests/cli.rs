use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
        .display()
        .to_string()
}

fn dqc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dqc")).args(args).output().expect("spawn dqc")
}

fn field(out: &Output, key: &str) -> Option<String> {
    let text = String::from_utf8_lossy(&out.stdout);
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key}=")).map(str::to_string))
}

#[test]
fn missing_file_exits_2() {
    let out = dqc(&["circuit", "info", "--circuit", "/nonexistent/c.nl"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot read"));
}

#[test]
fn malformed_netlist_exits_2_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.nl");
    std::fs::write(&p, "inputs 2\ngate g AND x1 x3\noutput g\n").unwrap();
    let out = dqc(&["circuit", "info", "--circuit", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn tiny_budget_exits_2() {
    let out = dqc(&["--budget", "2", "debate", "verify", "--system", &data("andor4_kw.sys")]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn build_reports_fields() {
    let c = data("parity4.nl");
    let out = dqc(&["--format", "structured", "debate", "build", "--protocol", "kw", "--circuit", &c, "--verify"]);
    assert!(out.status.success());
    assert_eq!(field(&out, "valid").as_deref(), Some("true"));
    assert_eq!(field(&out, "chain").as_deref(), Some("kw"));
    assert_eq!(field(&out, "ell_bound").as_deref(), Some("6"));
    assert!(field(&out, "wall_time").is_none());
}

#[test]
fn timing_adds_wall_time() {
    let out = dqc(&["--format", "structured", "--timing", "circuit", "info", "--circuit", &data("and2.nl")]);
    assert!(field(&out, "wall_time").is_some());
}

#[test]
fn json_output_parses() {
    let out = dqc(&["--format", "json", "debate", "verify", "--system", &data("and2_kw.sys")]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["valid"], true);
    assert_eq!(v["pass"], true);
}

#[test]
fn sequential_matches_parallel() {
    let args = ["--format", "structured", "debate", "build", "--protocol", "crossexam", "--circuit"];
    let c = data("andor4.nl");
    let par = dqc(&[&args[..], &[c.as_str(), "--verify"]].concat());
    let seq = dqc(&[&["--sequential"][..], &args[..], &[c.as_str(), "--verify"]].concat());
    assert_eq!(par.stdout, seq.stdout);
}

#[test]
fn seeded_random_trees_reproduce() {
    let run = |seed: &str| {
        let out = dqc(&[
            "--format", "structured", "--seed", seed, "yao", "run", "--circuit", &data("parity4.nl"),
            "--random-trees", "30",
        ]);
        assert!(out.status.success());
        out.stdout
    };
    assert_eq!(run("7"), run("7"));
}

#[test]
fn descriptor_and_advice_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let sys = dir.path().join("andor4.sys");
    let table = dir.path().join("andor4.adv");
    let out = dqc(&[
        "debate", "build", "--protocol", "kw", "--circuit", &data("andor4.nl"), "--out", sys.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let out = dqc(&["advice", "extract", "--system", sys.to_str().unwrap(), "--out", table.to_str().unwrap()]);
    assert!(out.status.success());
    let out = dqc(&[
        "--format", "structured", "advice", "check", "--system", sys.to_str().unwrap(), "--table",
        table.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(field(&out, "mismatches").as_deref(), Some("0"));
}

#[test]
fn corrupted_table_fails() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("and2.adv");
    let sys = data("and2_kw.sys");
    dqc(&["advice", "extract", "--system", &sys, "--out", table.to_str().unwrap()]);
    let text = std::fs::read_to_string(&table).unwrap();
    let flipped = text.replacen("verdict", "#", 1);
    std::fs::write(&table, flipped).unwrap();
    let out = dqc(&["advice", "check", "--system", &sys, "--table", table.to_str().unwrap()]);
    assert_ne!(out.status.code(), Some(0));
}

#[test]
fn pspace_export_reloads() {
    let dir = tempfile::tempdir().unwrap();
    let stem = dir.path().join("acc");
    let a = dqc(&["--format", "structured", "pspace", "demo", "--n", "2", "--horizon", "1", "--export", stem.to_str().unwrap()]);
    assert!(a.status.success());
    let tm = dir.path().join("acc.tm");
    let b = dqc(&["--format", "structured", "pspace", "demo", "--machine", tm.to_str().unwrap()]);
    assert!(b.status.success(), "{}", String::from_utf8_lossy(&b.stderr));
    assert_eq!(field(&a, "max_probes_observed"), field(&b, "max_probes_observed"));
    assert_eq!(field(&a, "k"), field(&b, "k"));
}

#[test]
fn compress_keeps_validity() {
    let out = dqc(&["--format", "structured", "debate", "compress", "--system", &data("and2_kw_padded.sys")]);
    assert!(out.status.success());
    assert_eq!(field(&out, "k").as_deref(), Some("1"));
}
