use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn cardbound(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cardbound"))
        .current_dir(dir)
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Writes CSVs whose degree sequences are R.X=(3,2,2), S.X=(5,1),
/// S.Y=(3,2,1), T.Y=(2,1,1,1), plus a catalog extracted from them.
fn example() -> (TempDir, PathBuf) {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::create_dir(d.join("data")).unwrap();
    fs::write(d.join("data/R.csv"), "X\na\na\na\nb\nb\nc\nc\n").unwrap();
    fs::write(d.join("data/S.csv"), "X,Y\na,p\na,p\na,p\na,q\na,q\nb,r\n").unwrap();
    fs::write(d.join("data/T.csv"), "Y\np\np\nq\nr\ns\n").unwrap();
    fs::write(d.join("q.txt"), "Q = R(X, _), S(X, Y, _), T(Y, _)\n").unwrap();
    fs::write(d.join("bag.txt"), "Q = R(X), S(X, Y), T(Y)\n").unwrap();
    let o = cardbound(
        &[
            "stats",
            "--input",
            "data/R.csv",
            "data/S.csv",
            "data/T.csv",
            "--out",
            "cat.json",
        ],
        d,
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let cat = d.join("cat.json");
    (dir, cat)
}

fn set_infinite(cat: &Path) {
    let mut doc: Value = serde_json::from_str(&fs::read_to_string(cat).unwrap()).unwrap();
    for r in doc["relations"].as_array_mut().unwrap() {
        r["max_multiplicity"] = "inf".into();
    }
    fs::write(cat, serde_json::to_string(&doc).unwrap()).unwrap();
}

#[test]
fn stats_extracts_the_example_sequences() {
    let (dir, cat) = example();
    let doc: Value = serde_json::from_str(&fs::read_to_string(&cat).unwrap()).unwrap();
    let degrees = |rel: usize, att: usize| -> Vec<String> {
        doc["relations"][rel]["attributes"][att]["degrees"]
            .as_array()
            .unwrap()
            .iter()
            .map(|v| v.as_str().unwrap().to_string())
            .collect()
    };
    assert_eq!(degrees(0, 0), ["3", "2", "2"]);
    assert_eq!(degrees(1, 0), ["5", "1"]);
    assert_eq!(degrees(1, 1), ["3", "2", "1"]);
    assert_eq!(degrees(2, 0), ["2", "1", "1", "1"]);
    assert_eq!(doc["relations"][1]["max_multiplicity"], "3");
    drop(dir);
}

#[test]
fn stats_handles_empty_tables_and_single_buckets() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("E.csv"), "A,B\n").unwrap();
    fs::write(d.join("S.csv"), "X\na\na\na\nb\nc\n").unwrap();
    let o = cardbound(
        &[
            "stats",
            "--input",
            "E.csv",
            "S.csv",
            "--out",
            "c.json",
            "--compress",
            "1",
        ],
        d,
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let doc: Value = serde_json::from_str(&fs::read_to_string(d.join("c.json")).unwrap()).unwrap();
    assert_eq!(doc["relations"][0]["cardinality"], "0");
    let stair = &doc["relations"][1]["attributes"][0]["staircase"];
    assert_eq!(stair, &serde_json::json!([["3", "3"]]));
}

#[test]
fn stats_reports_ragged_rows_with_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("B.csv"), "X,Y\n1,2\n3\n").unwrap();
    let o = cardbound(
        &["stats", "--input", "B.csv", "--out", "c.json"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("B.csv:3:"), "{}", stderr(&o));
}

#[test]
fn bound_all_reports_every_method() {
    let (dir, cat) = example();
    set_infinite(&cat);
    let o = cardbound(
        &[
            "bound",
            "--catalog",
            "cat.json",
            "--query",
            "q.txt",
            "--json",
            "r.json",
        ],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let doc: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(doc["schema_version"], 1);
    assert_eq!(doc["bounds"]["agm"]["value"], "210");
    assert_eq!(doc["bounds"]["pb"]["value"], "36");
    assert_eq!(doc["bounds"]["dsb"]["value"], "26");
    assert_eq!(doc["bounds"]["dsb"]["b_effective"]["S"], "inf");
    assert!(doc["bounds"]["fdsb"]["micros"].is_u64());
}

#[test]
fn dsb_is_the_same_from_every_root() {
    let (dir, cat) = example();
    set_infinite(&cat);
    for root in ["R", "S", "T"] {
        let o = cardbound(
            &[
                "bound",
                "--catalog",
                "cat.json",
                "--query",
                "bag.txt",
                "--method",
                "dsb",
                "--root",
                root,
            ],
            dir.path(),
        );
        assert!(stdout(&o).starts_with("dsb   26"), "{}", stdout(&o));
    }
}

#[test]
fn finite_multiplicity_on_a_wide_atom_is_flagged() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("W.csv"), "A,B,C\n1,1,1\n1,1,1\n1,2,3\n").unwrap();
    fs::write(d.join("q.txt"), "Q = W(A, B, C)").unwrap();
    assert!(
        cardbound(&["stats", "--input", "W.csv", "--out", "c.json"], d)
            .status
            .success()
    );
    let o = cardbound(
        &[
            "bound",
            "--catalog",
            "c.json",
            "--query",
            "q.txt",
            "--method",
            "dsb",
        ],
        d,
    );
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(
        stderr(&o).contains("declares B=2 but the construction used B=inf"),
        "{}",
        stderr(&o)
    );
}

#[test]
fn error_exit_codes() {
    let (dir, _) = example();
    let d = dir.path();
    fs::write(d.join("syntax.txt"), "Q = R(X").unwrap();
    fs::write(d.join("unknown.txt"), "Q = Z(X)").unwrap();
    fs::write(d.join("arity.txt"), "Q = S(X)").unwrap();
    let chain: Vec<String> = (0..17)
        .map(|i| format!("a{i}:S(V{i}, V{})", i + 1))
        .collect();
    fs::write(d.join("long.txt"), format!("Q = {}", chain.join(", "))).unwrap();
    let code = |query: &str, method: &str| {
        cardbound(
            &[
                "bound",
                "--catalog",
                "cat.json",
                "--query",
                query,
                "--method",
                method,
            ],
            d,
        )
        .status
        .code()
    };
    assert_eq!(code("syntax.txt", "all"), Some(2));
    assert_eq!(code("unknown.txt", "all"), Some(3));
    assert_eq!(code("arity.txt", "dsb"), Some(3));
    assert_eq!(code("long.txt", "pb"), Some(4));
}

#[test]
fn cyclic_queries_fall_back_to_spanning_trees() {
    let (dir, cat) = example();
    set_infinite(&cat);
    fs::write(
        dir.path().join("tri.txt"),
        "Q = a:S(X, Y), b:S(Y, Z), c:S(Z, X)",
    )
    .unwrap();
    let o = cardbound(
        &["bound", "--catalog", "cat.json", "--query", "tri.txt"],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stderr(&o).contains("spanning-tree"), "{}", stderr(&o));
    assert!(stdout(&o).contains("dsb"));
}

#[test]
fn verify_on_the_worst_case_instance_is_tight() {
    let (dir, cat) = example();
    set_infinite(&cat);
    let o = cardbound(
        &[
            "verify",
            "--catalog",
            "cat.json",
            "--query",
            "bag.txt",
            "--worst-case",
            "--method",
            "dsb",
        ],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("true  26"), "{}", stdout(&o));
}

#[test]
fn verify_on_real_and_generated_data() {
    let (dir, _) = example();
    let d = dir.path();
    for args in [
        vec![
            "verify",
            "--catalog",
            "cat.json",
            "--query",
            "q.txt",
            "--data-dir",
            "data",
        ],
        vec![
            "verify",
            "--catalog",
            "cat.json",
            "--query",
            "q.txt",
            "--seed",
            "7",
            "--relax-fdsb",
        ],
    ] {
        let o = cardbound(&args, d);
        assert!(o.status.success(), "{}", stderr(&o));
        assert!(stdout(&o).contains("true"));
    }
}

#[test]
fn verify_flags_a_catalog_smaller_than_the_data() {
    let (dir, cat) = example();
    let mut doc: Value = serde_json::from_str(&fs::read_to_string(&cat).unwrap()).unwrap();
    doc["relations"][2]["cardinality"] = "1".into();
    doc["relations"][2]["attributes"][0]["degrees"] = serde_json::json!(["1"]);
    fs::write(&cat, serde_json::to_string(&doc).unwrap()).unwrap();
    let o = cardbound(
        &[
            "verify",
            "--catalog",
            "cat.json",
            "--query",
            "bag.txt",
            "--data-dir",
            "data",
            "--method",
            "dsb",
        ],
        dir.path(),
    );
    assert!(
        stderr(&o).contains("catalog does not cover the data"),
        "{}",
        stderr(&o)
    );
    assert_eq!(o.status.code(), Some(5));
}
