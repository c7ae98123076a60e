//! End-to-end tests of the binary: exact outputs for the documented
//! examples, byte determinism, stream discipline and exit codes.

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tanglegen"))
        .args(args)
        .env("RUST_BACKTRACE", "0")
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("utf8 stdout")
}

fn stderr(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).expect("utf8 stderr")
}

#[test]
fn count_fixed_trees_examples() {
    let out = run(&["count", "fixed-trees", "--partition", "8,4,2"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "33\n");

    let out = run(&["count", "fixed-trees", "--partition", "3,1"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "0\n");

    let out = run(&["count", "fixed-trees", "--partition", "2,2"]);
    assert_eq!(stdout(&out), "3\n");
}

#[test]
fn count_chains_examples() {
    let out = run(&["count", "chains", "--n", "4", "--k", "2"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "13\n");

    let out = run(&["count", "chains", "--n", "5", "--k", "2"]);
    assert_eq!(stdout(&out), "114\n");

    let out = run(&["count", "chains", "--n", "0", "--k", "2"]);
    assert!(!out.status.success());
}

#[test]
fn count_rejects_malformed_partition() {
    let out = run(&["count", "fixed-trees", "--partition", "8,,2"]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("error"));
    assert!(stdout(&out).is_empty());
}

#[test]
fn sample_tree_single_cycle_is_unique_for_any_seed() {
    for seed in ["7", "8", "12345"] {
        let out = run(&["sample", "tree", "--permutation", "(1,2,3,4)", "--seed", seed]);
        assert!(out.status.success());
        assert_eq!(stdout(&out), "((1,3),(2,4));\n");
    }
}

#[test]
fn sample_tree_is_byte_deterministic() {
    let args = [
        "sample", "tree", "--permutation", "(1,2)(3,4)", "--seed", "42", "--count", "10",
    ];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stderr, b.stderr);
    assert_eq!(stdout(&a).lines().count(), 10);
}

#[test]
fn sample_tree_metadata_on_stderr_in_newick_mode() {
    let out = run(&["sample", "tree", "--permutation", "(1,2)", "--seed", "3"]);
    assert!(out.status.success());
    let err = stderr(&out);
    assert!(err.contains("seed=3"), "metadata missing: {err}");
    // Results stay pure Newick.
    for line in stdout(&out).lines() {
        assert!(line.ends_with(';'), "unexpected stdout line: {line}");
    }
}

#[test]
fn sample_tree_json_schema() {
    let out = run(&[
        "sample", "tree", "--permutation", "(1,2)(3,4)", "--seed", "5", "--count", "2",
        "--format", "json",
    ]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_str(stdout(&out).trim()).expect("valid json");
    assert_eq!(doc["n"], 4);
    assert_eq!(doc["k"], 1);
    assert_eq!(doc["seed"], 5);
    assert_eq!(doc["trees"].as_array().map(|a| a.len()), Some(2));
    for t in doc["trees"].as_array().unwrap() {
        assert!(t.as_str().unwrap().ends_with(';'));
    }
}

#[test]
fn sample_tree_rejects_non_binary_cycle_type() {
    let out = run(&["sample", "tree", "--permutation", "(1,2,3)", "--seed", "1"]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("empty support"), "{}", stderr(&out));
    assert!(stdout(&out).is_empty());
}

#[test]
fn sample_chain_shapes_and_determinism() {
    let args = [
        "sample", "chain", "--n", "3", "--k", "2", "--seed", "1", "--count", "3",
    ];
    let a = run(&args);
    assert!(a.status.success());
    let text = stdout(&a);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 6, "3 chains, 2 newick lines each");
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);

    let json = run(&[
        "sample", "chain", "--n", "3", "--k", "2", "--seed", "1", "--count", "2",
        "--format", "json",
    ]);
    let doc: serde_json::Value = serde_json::from_str(stdout(&json).trim()).unwrap();
    assert_eq!(doc["n"], 3);
    assert_eq!(doc["k"], 2);
    assert_eq!(doc["seed"], 1);
    assert_eq!(doc["chains"].as_array().unwrap().len(), 2);
    assert_eq!(doc["chains"][0].as_array().unwrap().len(), 2);
}

#[test]
fn sample_partition_lines_are_valid_binary_partitions() {
    let out = run(&[
        "sample", "partition", "--n", "6", "--k", "2", "--seed", "9", "--count", "50",
    ]);
    assert!(out.status.success());
    for line in stdout(&out).lines() {
        let parts: Vec<u64> = line.split(',').map(|p| p.parse().unwrap()).collect();
        assert_eq!(parts.iter().sum::<u64>(), 6, "line {line}");
        assert!(parts.iter().all(|p| p.is_power_of_two()), "line {line}");
    }
}

#[test]
fn enumerate_counts_and_order() {
    let out = run(&["enumerate", "--n", "3"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    assert_eq!(lines[3], "count=3");
    let mut sorted = lines[..3].to_vec();
    sorted.sort();
    assert_eq!(sorted, lines[..3].to_vec(), "lines must be sorted");

    let out = run(&["enumerate", "--n", "1"]);
    assert_eq!(stdout(&out), "1;\ncount=1\n");
}

#[test]
fn enumerate_fixed_by_filters() {
    let out = run(&["enumerate", "--n", "4", "--fixed-by", "(1,2)(3,4)"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 4);
    assert!(text.ends_with("count=3\n"));
}

#[test]
fn enumerate_guard_is_explicit() {
    let out = run(&["enumerate", "--n", "12"]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("guard"), "{}", stderr(&out));
}

#[test]
fn verify_passes_and_guards() {
    let out = run(&["verify", "--max-n", "4"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert_eq!(text.matches("[PASS]").count(), 4);
    assert_eq!(text.matches("[FAIL]").count(), 0);

    let out = run(&["verify", "--max-n", "20"]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("guard"), "{}", stderr(&out));
}
