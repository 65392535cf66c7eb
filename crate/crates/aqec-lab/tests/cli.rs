//! End-to-end smoke tests for the command-line binary: flag parsing, config
//! merging, output routing, and the exit-code contract (0 success, 1 runtime
//! failure, 2 usage error).

use std::process::{Command, Output};

use aqec_lab::codeword_io;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aqec-lab"))
        .args(args)
        .output()
        .expect("binary should launch")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout should be UTF-8")
}

#[test]
fn loss_sweep_prints_csv_and_honors_the_out_flag() {
    let out = run(&[
        "sweep-loss",
        "--points",
        "4",
        "--gamma-max",
        "0.1",
        "--families",
        "LNCY,NSA_SC",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("gamma,family,l1,l2\n"));
    assert_eq!(text.lines().count(), 1 + 2 * 4);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("loss.csv");
    let filed = run(&[
        "sweep-loss",
        "--points",
        "4",
        "--gamma-max",
        "0.1",
        "--families",
        "LNCY,NSA_SC",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(filed.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&path).unwrap(), text);
}

#[test]
fn fidelity_sweep_emits_closed_form_only_rows_for_large_local_dimension() {
    let out = run(&[
        "sweep-fidelity",
        "--points",
        "3",
        "--families",
        "NSA_SC_QUDIT",
        "--n",
        "4",
        "--q",
        "5",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("gamma,family,n,k,q,F_plan,F_oracle,F_closed_form\n"));
    // Plan and oracle columns stay empty when only the closed form is available.
    assert!(text.lines().skip(1).all(|l| l.contains(",,,")));
}

#[test]
fn config_file_is_loaded_and_flags_override_it() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("cfg.json");
    std::fs::write(
        &cfg_path,
        r#"{ "points": 3, "families": ["LNCY"], "gamma_max": 0.1 }"#,
    )
    .unwrap();

    let from_cfg = run(&["--config", cfg_path.to_str().unwrap(), "sweep-loss"]);
    assert_eq!(from_cfg.status.code(), Some(0));
    assert_eq!(stdout(&from_cfg).lines().count(), 1 + 3);

    let overridden = run(&[
        "--config",
        cfg_path.to_str().unwrap(),
        "sweep-loss",
        "--points",
        "2",
    ]);
    assert_eq!(overridden.status.code(), Some(0));
    assert_eq!(stdout(&overridden).lines().count(), 1 + 2);
}

#[test]
fn usage_errors_exit_with_code_two() {
    // Unknown family tag.
    let bogus = run(&["sweep-loss", "--families", "BOGUS"]);
    assert_eq!(bogus.status.code(), Some(2));

    // Qubit-only family with an incompatible local dimension.
    let mismatched = run(&["sweep-fidelity", "--families", "NSA_SC", "--q", "5"]);
    assert_eq!(mismatched.status.code(), Some(2));

    // Malformed flag value (rejected by the parser itself).
    let unparsable = run(&["sweep-loss", "--points", "many"]);
    assert_eq!(unparsable.status.code(), Some(2));

    // Config file that does not exist.
    let missing = run(&["--config", "/nonexistent/cfg.json", "sweep-loss"]);
    assert_eq!(missing.status.code(), Some(2));

    // Out-of-range learning shape.
    let too_big = run(&["learn", "--n", "9"]);
    assert_eq!(too_big.status.code(), Some(2));
    let k_exceeds_n = run(&["learn", "--n", "4", "--k", "5"]);
    assert_eq!(k_exceeds_n.status.code(), Some(2));

    // Zero-seed verification request.
    let no_seeds = run(&["verify", "--seeds", "0"]);
    assert_eq!(no_seeds.status.code(), Some(2));
}

#[test]
fn basis_search_lists_shift_orbits() {
    let out = run(&["search-basis", "--n", "4", "--q", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("class 0:"));
    assert!(text.contains("0000"));
    assert!(text.contains("1111"));
    assert!(text.contains("classes = "));
}

#[test]
fn exported_codewords_read_back_into_the_same_space() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("code.json");
    let out = run(&[
        "export-code",
        "--family",
        "NSA_PC",
        "--gamma",
        "0.05",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let code = codeword_io::read_code(&path).unwrap();
    assert_eq!(code.n, 4);
    assert_eq!(code.q, 2);
    assert_eq!(code.codewords().len(), 2);
}

#[test]
fn a_short_learning_run_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "learn",
        "--n",
        "2",
        "--k",
        "1",
        "--gamma0",
        "0.05",
        "--seed",
        "3",
        "--max-steps",
        "30",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(dir.path().join("learn_seed3.json").exists());
    assert!(dir.path().join("code_seed3.json").exists());
    assert!(stdout(&out).contains("seed 3:"));
}
