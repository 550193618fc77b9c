use std::path::PathBuf;
use std::process::{Command, Output};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_liouvillian"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn corpus(name: &str) -> String {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name);
    root.to_string_lossy().into_owned()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("json report")
}

const EXAMPLE_ONE: &str = "dy/dx = ((x+1)*y)/(x - x*y - y^2 + x^2)";

#[test]
fn example_one_is_found_and_verified() {
    let out = bin(&["solve", EXAMPLE_ONE, "--output", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["schema"], "liouvillian-report/1");
    let e = &r["entries"][0];
    assert_eq!(e["outcome"], "found");
    assert_eq!(e["verified"], true);
    assert_eq!(e["factor"]["p"], "x");
    assert_eq!(e["factor"]["q"], "y");
    assert_eq!(e["factor"]["factors"][0]["poly"], "x + y");
    assert_eq!(e["factor"]["factors"][0]["exponent"], "-2");
}

#[test]
fn text_output_names_the_factor() {
    let out = bin(&["solve", EXAMPLE_ONE]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("R = exp((x)/(y)) * (x + y)^(-2)"), "{text}");
}

#[test]
fn exact_equation_gives_one() {
    let out = bin(&["solve", "dy/dx = -x/y", "--output", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let f = &json(&out)["entries"][0]["factor"];
    assert_eq!(f["p"], "0");
    assert_eq!(f["factors"].as_array().unwrap().len(), 0);
}

#[test]
fn zero_branch_budget_is_a_resource_outcome() {
    let out = bin(&["solve", EXAMPLE_ONE, "--branch-cap", "0", "--output", "json"]);
    assert_eq!(out.status.code(), Some(2));
    let e = &json(&out)["entries"][0];
    assert_eq!(e["outcome"], "resource");
    assert!(e["factor"].is_null());
}

#[test]
fn exhausted_budget_exits_two() {
    // This field needs deg Q = 4.
    let out = bin(&[
        "solve",
        "(a*x+b)^2 * dy/dx + (a*x+b)*y^3 + c*y^2 = 0",
        "--bind", "a=1", "--bind", "b=1", "--bind", "c=1",
        "--max-q-degree", "3",
        "--output", "json",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let e = &json(&out)["entries"][0];
    assert_eq!(e["outcome"], "exhausted");
    assert_eq!(e["exhausted"], true);
}

#[test]
fn bindings_and_escalation() {
    let out = bin(&[
        "solve",
        "(a*x+b)^2 * dy/dx + (a*x+b)*y^3 + c*y^2 = 0",
        "--bind", "a=1", "--bind", "b=1", "--bind", "c=1",
        "--max-q-degree", "4",
        "--parallel",
        "--output", "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let e = &json(&out)["entries"][0];
    assert_eq!(e["stats"]["found_at"]["composition"], serde_json::json!([2, 2]));
}

#[test]
fn input_errors_exit_one() {
    let out = bin(&["solve", "dy/dx = 1/(x"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("offset 10"));

    let out = bin(&["solve", "dy/dx = k*x"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("'k'"));

    assert_eq!(bin(&["solve", "dy/dx = x", "--bind", "oops"]).status.code(), Some(1));
    assert_eq!(bin(&["solve", "dy/dx = x", "--output", "xml"]).status.code(), Some(1));
    assert_eq!(bin(&["solve", "dy/dx = x/0"]).status.code(), Some(1));
    assert_eq!(bin(&["corpus", "/nonexistent/corpus.toml"]).status.code(), Some(1));
}

#[test]
fn equation_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("eq.txt");
    std::fs::write(&path, format!("# example one\n{EXAMPLE_ONE}\n")).unwrap();
    let out = bin(&["solve", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn shipped_corpus_matches() {
    let out = bin(&["corpus", &corpus("worked_examples.toml"), "--output", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    for e in r["entries"].as_array().unwrap() {
        assert_eq!(e["outcome"], "found", "{}", e["id"]);
        assert_eq!(e["matches_expected"], true, "{}", e["id"]);
    }
}

#[test]
fn placeholder_corpus_is_skipped() {
    let out = bin(&["corpus", &corpus("kamke.toml"), "--output", "json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["skipped"].as_array().unwrap().len(), 8);
}

#[test]
fn wrong_expectation_fails_the_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(
        &path,
        format!(
            "[[entry]]\nid = \"wrong\"\nequation = \"{EXAMPLE_ONE}\"\n\
             [entry.expected]\np = \"x\"\nq = \"y\"\nfactors = [{{ poly = \"x + y\", exponent = \"-1\" }}]\n"
        ),
    )
    .unwrap();
    let out = bin(&["corpus", path.to_str().unwrap(), "--output", "json"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["entries"][0]["matches_expected"], false);

    let empty = dir.path().join("empty.toml");
    std::fs::write(&empty, "").unwrap();
    let out = bin(&["corpus", empty.to_str().unwrap(), "--output", "json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["entries"].as_array().unwrap().len(), 0);
}
