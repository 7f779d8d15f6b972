//! End-to-end checks of the command implementations and the binary itself:
//! report content, CSV determinism, exit codes.

use clap::Parser;
use matching_model_cli::{run, Cli};
use std::path::Path;
use std::process::Command;

fn run_to_string(args: &[&str]) -> Result<String, (i32, String)> {
    let cli = Cli::try_parse_from(args).expect("test arguments parse");
    let mut out = Vec::new();
    match run(cli, &mut out) {
        Ok(()) => Ok(String::from_utf8(out).unwrap()),
        Err(e) => Err((e.exit_code(), e.message().to_string())),
    }
}

#[test]
fn classify_reports_the_reference_graphs() {
    let text = run_to_string(&["matching-model", "classify", "--model", "example1"]).unwrap();
    assert!(text.contains("connected: true"));
    assert!(text.contains("bipartite: false"));
    assert!(text.contains("separable: no"));
    assert!(text.contains("facets: 6"));
    assert!(text.contains("doubling graph connected: true"));

    let text = run_to_string(&["matching-model", "classify", "--model", "figure5"]).unwrap();
    assert!(text.contains("separable: order 2 with parts {1,2,4,5} {3,6}"));
    assert!(text.contains("doubling graph connected: false"));

    let text = run_to_string(&["matching-model", "classify", "--model", "cycle5"]).unwrap();
    assert!(text.contains("bipartite: false"));
    assert!(text.contains("separable: no"));
}

#[test]
fn ncond_reports_agree_across_methods() {
    let text = run_to_string(&[
        "matching-model",
        "ncond",
        "--model",
        "example1",
        "--method",
        "both",
    ])
    .unwrap();
    assert!(text.contains("holds: true"));
    assert!(text.contains("margin: 1/10"));
    assert!(text.contains("witness: {1}"));
    assert!(text.contains("agreement: true"));
}

#[test]
fn ncond_witness_on_a_file_model() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("model.json");
    std::fs::write(
        &path,
        r#"{"vertices": ["a", "b", "c"],
            "edges": [["a", "b"], ["b", "c"], ["c", "a"]]}"#,
    )
    .unwrap();
    let text = run_to_string(&[
        "matching-model",
        "ncond",
        "--model",
        path.to_str().unwrap(),
        "--witness",
    ])
    .unwrap();
    assert!(text.contains("witness law: a:"));
    assert!(text.contains("witness margin:"));

    // Bipartite graphs get none.
    let path2 = dir.path().join("path.json");
    std::fs::write(
        &path2,
        r#"{"vertices": ["a", "b", "c"],
            "edges": [["a", "b"], ["b", "c"]]}"#,
    )
    .unwrap();
    let text = run_to_string(&[
        "matching-model",
        "ncond",
        "--model",
        path2.to_str().unwrap(),
        "--witness",
    ])
    .unwrap();
    assert!(text.contains("witness law: none (graph is bipartite)"));
}

#[test]
fn ncond_without_law_or_witness_is_a_usage_error() {
    let err = run_to_string(&["matching-model", "ncond", "--model", "figure5"]).unwrap_err();
    assert_eq!(err.0, 1, "{}", err.1);
}

#[test]
fn missing_model_file_is_a_usage_error() {
    let err = run_to_string(&[
        "matching-model",
        "classify",
        "--model",
        "/no/such/file.json",
    ])
    .unwrap_err();
    assert_eq!(err.0, 1);
}

#[test]
fn simulate_writes_deterministic_trajectories() {
    let dir = tempfile::tempdir().unwrap();
    let out1 = dir.path().join("a.csv");
    let out2 = dir.path().join("b.csv");
    let summary = dir.path().join("summary.csv");
    for out in [&out1, &out2] {
        let text = run_to_string(&[
            "matching-model",
            "simulate",
            "--model",
            "example1",
            "--policy",
            "ml",
            "--horizon",
            "20000",
            "--seed",
            "5",
            "--out",
            out.to_str().unwrap(),
            "--summary-out",
            summary.to_str().unwrap(),
        ])
        .unwrap();
        assert!(text.contains("policy: ml"));
        assert!(text.contains("growth_rate:"));
    }
    let summary_text = std::fs::read_to_string(&summary).unwrap();
    assert!(summary_text.starts_with("mu_1,mu_2,policy,seed,slope,empty_visits,verdict\n"));
    assert!(summary_text
        .lines()
        .nth(1)
        .unwrap()
        .starts_with("1/5,3/10,ml,5,"));
    let a = std::fs::read(&out1).unwrap();
    let b = std::fs::read(&out2).unwrap();
    assert_eq!(a, b, "identical flags must give byte-identical CSV");
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("n,size\n"));
    // Snapshot rows keep the step parity.
    for line in text.lines().skip(1) {
        let (n, size) = line.split_once(',').unwrap();
        let n: u64 = n.parse().unwrap();
        let size: u64 = size.parse().unwrap();
        assert_eq!(n % 2, size % 2);
    }
}

#[test]
fn region_csv_is_byte_stable_and_well_formed() {
    let dir = tempfile::tempdir().unwrap();
    let out1 = dir.path().join("r1.csv");
    let out2 = dir.path().join("r2.csv");
    let sweep = dir.path().join("sweep.csv");
    for out in [&out1, &out2] {
        run_to_string(&[
            "matching-model",
            "region",
            "--policy",
            "b",
            "--step",
            "0.1",
            "--horizon",
            "30000",
            "--seeds",
            "3",
            "--base-seed",
            "4",
            "--out",
            out.to_str().unwrap(),
            "--empirical-out",
            sweep.to_str().unwrap(),
        ])
        .unwrap();
    }
    let a = std::fs::read_to_string(&out1).unwrap();
    let b = std::fs::read_to_string(&out2).unwrap();
    assert_eq!(a, b);
    assert!(a.starts_with(
        "mu_1,mu_2,closed_form_A,closed_form_B,fmm_A,fmm_B,discriminant_A,empirical\n"
    ));
    // 36 interior grid points at step 0.1.
    assert_eq!(a.lines().count(), 37);
    // The exact columns certify the closed forms pointwise.
    for line in a.lines().skip(1) {
        let cells: Vec<&str> = line.split(',').collect();
        let closed_a = cells[2] == "true";
        let fmm_a_ergodic = cells[4] == "Ergodic";
        assert_eq!(closed_a, fmm_a_ergodic, "row {line}");
    }
    let sweep_text = std::fs::read_to_string(&sweep).unwrap();
    assert!(sweep_text.starts_with("mu_1,mu_2,policy,seed,slope,empty_visits,verdict\n"));
    assert_eq!(sweep_text.lines().count(), 1 + 36 * 3);
}

#[test]
fn exact_region_sweep_without_simulation() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("exact.csv");
    run_to_string(&[
        "matching-model",
        "region",
        "--step",
        "0.02",
        "--horizon",
        "0",
        "--out",
        out.to_str().unwrap(),
    ])
    .unwrap();
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 1 + 1176);
    assert!(text.lines().nth(1).unwrap().ends_with(",na"));
}

#[test]
fn reproduce_commands_pass_at_reduced_horizon() {
    let text = run_to_string(&["matching-model", "reproduce", "example1"]).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("ok: ")).count(), 4);
    assert!(!text.contains("FAIL"));

    let text = run_to_string(&[
        "matching-model",
        "reproduce",
        "cycle5",
        "--horizon",
        "300000",
    ])
    .unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("ok: ")).count(), 12);
    assert!(!text.contains("FAIL"));
}

#[test]
fn unknown_reproduction_target_is_a_usage_error() {
    let err = run_to_string(&["matching-model", "reproduce", "example9"]).unwrap_err();
    assert_eq!(err.0, 1);
}

#[test]
fn binary_smoke_test() {
    let exe = env!("CARGO_BIN_EXE_matching-model");
    let ok = Command::new(exe)
        .args(["classify", "--model", "example1"])
        .output()
        .unwrap();
    assert!(ok.status.success());
    assert!(String::from_utf8_lossy(&ok.stdout).contains("facets: 6"));

    let usage = Command::new(exe)
        .args(["classify", "--model", "/no/such/file.json"])
        .output()
        .unwrap();
    assert_eq!(usage.status.code(), Some(1));

    let bad_flag = Command::new(exe).args(["classify"]).output().unwrap();
    assert_eq!(bad_flag.status.code(), Some(1));

    assert!(Path::new(exe).exists());
}
