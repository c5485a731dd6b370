//! Behavior of the `chainrank` binary: exit codes, the single-line stderr
//! diagnostics, stdout fallbacks, and a full file-based pipeline run.

use std::collections::HashMap;
use std::path::Path;
use std::process::{Command, Output};

fn run_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chainrank"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("failed to spawn the pipeline binary")
}

fn run(args: &[&str]) -> Output {
    let dir = std::env::temp_dir();
    run_in(&dir, args)
}

fn stderr_line(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).trim_end().to_owned()
}

fn expect_success(output: &Output, what: &str) {
    assert!(
        output.status.success(),
        "{what} failed: {}",
        String::from_utf8_lossy(&output.stderr)
    );
}

#[test]
fn help_exits_zero_and_lists_every_subcommand() {
    let output = run(&["--help"]);
    expect_success(&output, "--help");
    let text = String::from_utf8_lossy(&output.stdout);
    for name in ["synth", "dist", "rerank", "mine", "fuse", "eval"] {
        assert!(text.contains(name), "--help does not mention {name}");
    }
}

#[test]
fn no_arguments_prints_help_and_fails() {
    let output = run(&[]);
    assert!(!output.status.success());
    // clap sends the help for a missing subcommand to stderr.
    let text = String::from_utf8_lossy(&output.stderr);
    assert!(text.contains("Usage"), "expected usage text, got: {text}");
}

#[test]
fn configuration_errors_come_before_missing_files() {
    // No --qg given; the window must still be rejected first.
    let output = run(&["mine", "--variant", "local", "--window", "0"]);
    assert!(!output.status.success());
    assert_eq!(stderr_line(&output), "error: bad-config: window must be >= 1");
}

#[test]
fn missing_required_flags_are_named() {
    let output = run(&["mine"]);
    assert!(!output.status.success());
    assert_eq!(stderr_line(&output), "error: bad-config: --qg is required");

    let output = run(&["eval", "--ranking", "whatever.txt"]);
    assert!(!output.status.success());
    assert_eq!(stderr_line(&output), "error: bad-config: --truth is required");
}

#[test]
fn unreadable_inputs_report_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let output = run_in(dir.path(), &["mine", "--qg", "no-such-file.txt", "--gg", "x.txt"]);
    assert!(!output.status.success());
    let line = stderr_line(&output);
    assert!(
        line.starts_with("error: io: no-such-file.txt"),
        "unexpected diagnostic: {line}"
    );
}

#[test]
fn unknown_flags_are_usage_errors() {
    let output = run(&["mine", "--bogus"]);
    assert!(!output.status.success());
    let line = stderr_line(&output);
    assert!(line.starts_with("error: usage: "), "unexpected diagnostic: {line}");
}

#[test]
fn invalid_lambda_is_rejected() {
    let output = run(&["rerank", "--lambda", "1.5"]);
    assert!(!output.status.success());
    assert_eq!(stderr_line(&output), "error: bad-config: lambda must be in [0, 1]");
}

fn synth(dir: &Path, extra: &[&str]) {
    let mut args = vec![
        "synth",
        "--queries-out",
        "queries.csv",
        "--gallery-out",
        "gallery.csv",
        "--truth-out",
        "truth.csv",
    ];
    args.extend_from_slice(extra);
    expect_success(&run_in(dir, &args), "synth");
}

#[test]
fn dist_streams_the_matrix_to_stdout_when_out_is_omitted() {
    let dir = tempfile::tempdir().unwrap();
    synth(dir.path(), &["--ids", "6", "--frames", "5", "--dim", "8"]);
    let output = run_in(
        dir.path(),
        &["dist", "--rows", "queries.csv", "--cols", "gallery.csv"],
    );
    expect_success(&output, "dist");
    let text = String::from_utf8_lossy(&output.stdout);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("6 24"), "matrix header");
    // Header, two id lines, then one line per query row.
    assert_eq!(text.lines().count(), 3 + 6);
}

fn parse_report(text: &str) -> HashMap<String, String> {
    text.lines()
        .filter_map(|line| line.split_once('='))
        .map(|(k, v)| (k.to_owned(), v.to_owned()))
        .collect()
}

#[test]
fn full_pipeline_produces_a_consistent_report() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    synth(
        d,
        &[
            "--ids", "8", "--frames", "6", "--dim", "32", "--step-sigma", "0.5",
            "--center-sigma", "10", "--noise-sigma", "0.1", "--seed", "7",
        ],
    );
    expect_success(
        &run_in(d, &["dist", "--rows", "queries.csv", "--cols", "gallery.csv", "--out", "qg.txt"]),
        "dist qg",
    );
    expect_success(
        &run_in(d, &["dist", "--rows", "gallery.csv", "--cols", "gallery.csv", "--out", "gg.txt"]),
        "dist gg",
    );
    expect_success(
        &run_in(d, &["mine", "--qg", "qg.txt", "--gg", "gg.txt", "--window", "1", "--out", "chains.txt"]),
        "mine",
    );
    expect_success(
        &run_in(d, &["mine", "--qg", "qg.txt", "--variant", "direct", "--out", "direct.txt"]),
        "mine direct",
    );

    let eval = |ranking: &str, out: &str| {
        let output = run_in(d, &["eval", "--ranking", ranking, "--truth", "truth.csv", "--out", out]);
        expect_success(&output, "eval");
        let human = String::from_utf8_lossy(&output.stdout).to_string();
        assert!(human.contains("mAP: "), "human report missing mAP: {human}");
        parse_report(&std::fs::read_to_string(d.join(out)).unwrap())
    };
    let chained = eval("chains.txt", "report_chain.txt");
    let direct = eval("direct.txt", "report_direct.txt");

    for report in [&chained, &direct] {
        assert_eq!(report["queries"], "8");
        assert_eq!(report["gallery"], "40");
        let map: f64 = report["map"].parse().unwrap();
        assert!((0.0..=1.0).contains(&map), "mAP out of range: {map}");
        let cmc1: f64 = report["cmc_1"].parse().unwrap();
        assert!((0.0..=1.0).contains(&cmc1));
        assert!(report.contains_key("order_consistency"), "frames are complete");
        assert_eq!(report.keys().filter(|k| k.starts_with("ap_")).count(), 8);
    }

    // With slow drift and mild noise, chaining must not lose to the direct
    // sort on this configuration.
    let chain_map: f64 = chained["map"].parse().unwrap();
    let direct_map: f64 = direct["map"].parse().unwrap();
    assert!(
        chain_map >= direct_map,
        "chain mAP {chain_map} fell below direct mAP {direct_map}"
    );
}

#[test]
fn eval_rejects_rankings_with_ids_missing_from_the_truth() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("ranking.txt"), "q0: g0 g1\n").unwrap();
    std::fs::write(d.join("truth.csv"), "id,identity,frame\nq0,a,\ng0,a,1\n").unwrap();
    let output = run_in(d, &["eval", "--ranking", "ranking.txt", "--truth", "truth.csv"]);
    assert!(!output.status.success());
    let line = stderr_line(&output);
    assert!(
        line.starts_with("error: missing-truth: "),
        "unexpected diagnostic: {line}"
    );
}

#[test]
fn fuse_requires_matched_ranking_and_matrix_counts() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("r.txt"), "q0: g0\n").unwrap();
    let output = run_in(d, &["fuse", "--ranking", "r.txt"]);
    assert!(!output.status.success());
    assert_eq!(
        stderr_line(&output),
        "error: bad-config: 1 --ranking files but 0 --matrix files"
    );
}
