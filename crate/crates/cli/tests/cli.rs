//! End-to-end tests of the binary: exit codes, wording, and JSON shape.

use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_hyperfibre")
}

fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn fixtures() -> PathBuf {
    fixture_dir().join("curves.json")
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().expect("binary runs")
}

fn run_fixture(args: &[&str]) -> Output {
    let file = fixtures();
    let mut full = vec![args[0], file.to_str().unwrap()];
    full.extend_from_slice(&args[1..]);
    run(&full)
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_str(&stdout(out)).expect("output is valid JSON")
}

fn write_temp(name: &str, contents: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("hyperfibre-{}-{name}.json", std::process::id()));
    std::fs::write(&path, contents).expect("temp file written");
    path
}

#[test]
fn check_certifies_global_curve() {
    let out = run_fixture(&["check", "--label", "global"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("StarStar"));
    assert!(text.contains("frobenius permutation of pairs: [0, 2, 1]"));
}

#[test]
fn check_json_reports_pair_data() {
    let out = run_fixture(&["check", "--label", "global", "--json"]);
    assert_eq!(code(&out), 0);
    let doc = json_of(&out);
    assert_eq!(doc["verdict"], "star_star");
    assert_eq!(doc["genus"], 2);
    assert_eq!(doc["precision"], 64);
    let pairs = doc["pairs"].as_array().unwrap();
    let vals: Vec<u64> = pairs.iter().map(|p| p["eta_valuation"].as_u64().unwrap()).collect();
    assert_eq!(vals, [0, 2, 2]);
    let depths: Vec<(i64, i64)> = pairs
        .iter()
        .map(|p| (p["depth"]["num"].as_i64().unwrap(), p["depth"]["den"].as_i64().unwrap()))
        .collect();
    assert_eq!(depths, [(2, 1), (3, 1), (3, 1)]);
    assert_eq!(doc["frobenius_perm"], serde_json::json!([0, 2, 1]));
}

#[test]
fn check_honours_precision_and_seed_flags() {
    let out = run_fixture(&[
        "check", "--label", "global", "--json", "--precision", "96", "--seed", "7",
    ]);
    assert_eq!(code(&out), 0);
    let doc = json_of(&out);
    assert_eq!(doc["precision"], 96);
    assert_eq!(doc["seed"], "7");
    assert_eq!(doc["verdict"], "star_star");
}

#[test]
fn check_rejects_bad_c_with_exit_two() {
    let path = write_temp(
        "c3",
        r#"{"schema_version": 1, "curves": [{"label": "evenc", "c": 3, "f": [28, -232, 221, 66, -61, -2, 1]}]}"#,
    );
    let out = run(&["check", path.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(stdout(&out).contains("equation not of form (★★)"));
    let _ = std::fs::remove_file(path);
}

#[test]
fn check_rejects_odd_degree_with_schema_error() {
    let path = write_temp(
        "odddeg",
        r#"{"schema_version": 1, "curves": [{"label": "odd", "c": 1, "f": [1, 0, 0, 1, 0, 0, 0, 1]}]}"#,
    );
    let out = run(&["check", path.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("schema error"));
    let _ = std::fs::remove_file(path);
}

#[test]
fn io_label_and_usage_errors_exit_one() {
    let out = run(&["check", "/nonexistent/curves.json"]);
    assert_eq!(code(&out), 1);

    let out = run_fixture(&["check", "--label", "nope"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("no curve labelled"));

    let out = run(&["frobnicate"]);
    assert_eq!(code(&out), 1);

    let out = run(&["--help"]);
    assert_eq!(code(&out), 0);
}

#[test]
fn analyze_reports_nodes_and_orbits() {
    let out = run_fixture(&["analyze", "--label", "ex111"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("thickness 1, residue degree 1, non-split"));
    assert!(text.contains("thickness 2, residue degree 2, split"));
    assert!(text.contains("stable graph: 2 vertices, 3 edges, cycle rank 2"));
    assert!(text.contains("minimal regular graph: 4 vertices, 5 edges"));
    assert!(text.contains("twin (depth 5/2, 2 roots)"));

    let out = run_fixture(&["analyze", "--label", "ex111", "--json"]);
    let doc = json_of(&out);
    assert_eq!(doc["stable_model"]["qbar"], serde_json::json!([[0], [1], [1], [1]]));
    let nodes = doc["nodes"].as_array().unwrap();
    assert_eq!(nodes.len(), 3);
    assert_eq!(nodes[0]["thickness"], 1);
    assert_eq!(nodes[0]["split"], false);
    assert_eq!(nodes[1]["thickness"], 2);
    assert_eq!(nodes[1]["split"], true);
    assert_eq!(nodes[1]["edge_orbit"], nodes[2]["edge_orbit"]);
    let mr = &doc["graphs"]["minimal_regular"];
    let orbit_sizes: Vec<usize> = mr["vertex_orbits"]
        .as_array()
        .unwrap()
        .iter()
        .map(|o| o.as_array().unwrap().len())
        .collect();
    assert_eq!(orbit_sizes, [2, 2]);
    assert!(doc["two_torsion"].is_null());
    assert_eq!(doc["good_ordinary"], false);
}

#[test]
fn analyze_star_curve_reports_good_ordinary() {
    let out = run_fixture(&["analyze", "--label", "star-g2"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("good ordinary reduction"));
    assert!(stdout(&out).contains("nodes (0):"));

    let out = run_fixture(&["analyze", "--label", "star-g2", "--json"]);
    let doc = json_of(&out);
    assert_eq!(doc["good_ordinary"], true);
    assert_eq!(doc["two_torsion"]["full_dimension"], 4);
    assert_eq!(doc["two_torsion"]["kernel_dimension"], 2);
    assert_eq!(doc["graphs"]["stable"]["total_genus"], 2);
}

#[test]
fn cluster_pictures_at_odd_primes() {
    let out = run_fixture(&["cluster", "--label", "global", "--prime", "7"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert_eq!(text.matches("twin (depth 1, 2 roots)").count(), 1);

    let out = run_fixture(&["cluster", "--label", "global", "--prime", "53"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).matches("twin (depth 1/2, 2 roots)").count(), 2);
}

#[test]
fn shifted_two_adic_picture_matches_stored_p11() {
    let stored: Value = serde_json::from_str(
        &std::fs::read_to_string(fixture_dir().join("global_p11_picture.json")).unwrap(),
    )
    .unwrap();
    let shifted = run_fixture(&["cluster", "--label", "global", "--prime", "2", "--shifted", "--json"]);
    let at11 = run_fixture(&["cluster", "--label", "global", "--prime", "11", "--json"]);
    assert_eq!(code(&shifted), 0);
    assert_eq!(code(&at11), 0);
    assert_eq!(json_of(&at11)["picture"], stored);
    assert_eq!(json_of(&shifted)["picture"], stored);
}

#[test]
fn cluster_without_stored_factors_is_an_error() {
    let out = run_fixture(&["cluster", "--label", "ex111", "--prime", "7"]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("no factored form"));

    let out = run_fixture(&["cluster", "--label", "global", "--prime", "15"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn graph_dot_carries_frobenius_attributes() {
    let out = run_fixture(&["graph", "--label", "ex111", "--model", "minimal"]);
    assert_eq!(code(&out), 0);
    let dot = stdout(&out);
    assert!(dot.contains("graph minimal_regular {"));
    assert!(dot.contains("v3 ["));
    assert!(dot.contains("frob=\"v1\""));
    assert!(dot.contains("swap=\"yes\""));
}

#[test]
fn graph_json_reports_cycle_rank() {
    let out = run_fixture(&["graph", "--label", "global", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let doc = json_of(&out);
    assert_eq!(doc["model"], "stable");
    assert_eq!(doc["graph"]["cycle_rank"], 2);
    assert_eq!(doc["graph"]["vertices"].as_array().unwrap().len(), 1);
    assert_eq!(doc["graph"]["edges"].as_array().unwrap().len(), 2);
}

#[test]
fn batch_output_keeps_input_order_and_aggregates_exit() {
    let out = run_fixture(&["check"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let order: Vec<usize> = ["global", "ex111", "star-g2", "star-g3", "star-g4"]
        .iter()
        .map(|l| text.find(&format!("== {l} ==")).expect("label present"))
        .collect();
    assert!(order.windows(2).all(|w| w[0] < w[1]));

    let path = write_temp(
        "mixed",
        r#"{"schema_version": 1, "curves": [
            {"label": "good", "c": 1, "f": [28, -232, 221, 66, -61, -2, 1]},
            {"label": "bad", "c": 3, "f": [28, -232, 221, 66, -61, -2, 1]}
        ]}"#,
    );
    let out = run(&["check", path.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    let text = stdout(&out);
    assert!(text.find("== good ==").unwrap() < text.find("== bad ==").unwrap());
    let _ = std::fs::remove_file(path);
}

#[test]
fn batch_json_is_an_array_that_reparses() {
    let out = run_fixture(&["analyze", "--json"]);
    assert_eq!(code(&out), 0);
    let doc = json_of(&out);
    let entries = doc.as_array().expect("batch output is a JSON array");
    assert_eq!(entries.len(), 5);
    let labels: Vec<&str> = entries.iter().map(|e| e["label"].as_str().unwrap()).collect();
    assert_eq!(labels, ["global", "ex111", "star-g2", "star-g3", "star-g4"]);
    for entry in entries {
        assert!(entry["certificate"]["pairs"].is_array());
        assert!(entry["cluster_picture"]["leaf_count"].is_number());
    }
}

#[test]
fn string_integers_are_accepted() {
    let path = write_temp(
        "strings",
        r#"{"schema_version": 1, "curves": [{"label": "s", "c": "1", "f": ["28", "-232", "221", "66", "-61", "-2", "1"]}]}"#,
    );
    let out = run(&["check", path.to_str().unwrap(), "--label", "s", "--json"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json_of(&out)["verdict"], "star_star");
    let _ = std::fs::remove_file(path);
}

#[test]
fn factored_form_mismatch_is_a_schema_error() {
    let path = write_temp(
        "badfactors",
        r#"{"schema_version": 1, "curves": [{
            "label": "g", "c": 1, "f": [28, -232, 221, 66, -61, -2, 1],
            "odd_primes": [{"p": 7, "factors": [[-4, 0, 1], [-1, 7, 1], [6, -9, 1]]}]
        }]}"#,
    );
    let out = run(&["check", path.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("do not multiply to f"));
    let _ = std::fs::remove_file(path);
}
