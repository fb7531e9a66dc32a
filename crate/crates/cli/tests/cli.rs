use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn glue(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_glue")).args(args).env("GLUE_SEED", "7").output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

fn stderr_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stderr).expect("stderr is JSON")
}

/// The two-origins fixture with a candidate glued space appended.
fn with_candidate(dir: &Path, name: &str, space: Value, charts: [Vec<usize>; 2]) -> PathBuf {
    let mut doc: Value = serde_json::from_str(&fs::read_to_string(fixture("two_origins.json")).unwrap()).unwrap();
    let cod = if space.is_string() { space.as_str().unwrap().to_string() } else { "candidate".to_string() };
    if !space.is_string() {
        doc["payload"]["spaces"]["candidate"] = space;
    }
    let maps: Vec<Value> = charts.iter().map(|a| json!({"dom": "line", "cod": cod, "assign": a})).collect();
    doc["payload"]["candidate"] = json!({"space": cod, "charts": maps});
    let path = dir.join(name);
    fs::write(&path, doc.to_string()).unwrap();
    path
}

#[test]
fn fixtures_verify() {
    for name in ["two_origins.json", "two_origins_sheaf.json", "two_origins_ringed.json"] {
        let o = glue(&["verify", fixture(name).to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{name}: {}", String::from_utf8_lossy(&o.stderr));
        assert_eq!(stdout_json(&o)["verdict"], json!(true));
    }
}

#[test]
fn wrong_candidates_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let indiscrete = json!({"points": 3, "opens": [[], [0, 1, 2]]});
    let coarse = with_candidate(dir.path(), "coarse.json", indiscrete, [vec![0, 1], vec![0, 2]]);
    let o = glue(&["verify", coarse.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert_eq!(stdout_json(&o)["conditions"]["e"], json!(false));

    let collapsed = with_candidate(dir.path(), "collapsed.json", json!("line"), [vec![0, 1], vec![0, 1]]);
    let o = glue(&["verify", collapsed.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert_eq!(stdout_json(&o)["conditions"]["overlap_law"], json!(false));
}

#[test]
fn bad_input_exits_two_with_a_pointer() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.json");
    fs::write(&empty, "").unwrap();
    let o = glue(&["verify", empty.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert_eq!(stderr_json(&o)["pointer"], json!("/"));

    let mut doc: Value = serde_json::from_str(&fs::read_to_string(fixture("two_origins.json")).unwrap()).unwrap();
    doc["payload"]["inclusions"][0][1]["assign"] = json!([9]);
    let broken = dir.path().join("broken.json");
    fs::write(&broken, doc.to_string()).unwrap();
    let o = glue(&["verify", broken.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    let pointer = stderr_json(&o)["pointer"].as_str().unwrap().to_string();
    assert!(pointer.starts_with("/payload/inclusions/0/1"), "{pointer}");

    let o = glue(&["verify", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(code(&o), 2);
}

#[test]
fn scheme_variant_exits_two() {
    let o = glue(&["verify", fixture("two_origins_ringed.json").to_str().unwrap(), "--variant", "sch"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("unsupported"));
}

#[test]
fn reports_are_deterministic() {
    for name in ["two_origins.json", "two_origins_sheaf.json", "two_origins_ringed.json"] {
        let file = fixture(name);
        let a = glue(&["verify", file.to_str().unwrap()]);
        let b = glue(&["verify", file.to_str().unwrap()]);
        assert_eq!(a.stdout, b.stdout, "{name}");
    }
}

#[test]
fn index_census_and_dot() {
    let dir = tempfile::tempdir().unwrap();
    let dot = dir.path().join("i.dot");
    let o = glue(&["index", "--n", "2", "--dot", dot.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let census = stdout_json(&o);
    assert_eq!(census["objects"], json!(4));
    assert_eq!(census["morphisms"], json!(10));
    let text = fs::read_to_string(dot).unwrap();
    assert!(text.starts_with("digraph"));
    for node in ["[0]", "[1]", "[0,1]", "[1,0]"] {
        assert!(text.contains(node), "{node} missing from\n{text}");
    }
}

#[test]
fn report_as_dot() {
    let o = glue(&["report", fixture("two_origins.json").to_str().unwrap(), "--format", "dot"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("digraph"));
}

#[test]
fn build_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = glue(&["build", fixture("two_origins.json").to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    for f in ["report.json", "q.json", "q.dot", "summary.json"] {
        assert!(out.join(f).is_file(), "{f}");
    }
    let q: Value = serde_json::from_str(&fs::read_to_string(out.join("q.json")).unwrap()).unwrap();
    assert_eq!(q["points"], json!(3));
    let report: Value = serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report, stdout_json(&o));
}
