mod common;

use std::process::Command;

use common::*;
use psdorder::io::read_general_matrix;
use serde_json::Value;

fn json_of(stdout: &str) -> Value {
    serde_json::from_str(stdout).unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {stdout}"))
}

#[test]
fn corpus_exit_codes_and_json_stdout() {
    for (args, want) in CORPUS {
        let mut with_json = args.to_vec();
        with_json.push("--json");
        let (code, out, err) = run_cli(&with_json);
        assert_eq!(code, *want, "{args:?}\nstdout: {out}\nstderr: {err}");
        let v = json_of(&out);
        assert_eq!(out.trim().lines().count(), 1, "--json output is one line");
        if code == 2 {
            assert!(v["error"].is_string(), "{args:?}: {v}");
            assert!(!err.is_empty(), "{args:?}: diagnostics belong on stderr");
        }

        // Pretty output is the default; usage errors leave stdout empty.
        let (code, out, _) = run_cli(args);
        assert_eq!(code, *want);
        if !out.is_empty() {
            assert_eq!(json_of(&out), v);
        }
    }
}

#[test]
fn minus_chain_example() {
    let (code, out, _) = run_cli(&["order", "check", "--relation", "minus", "@E1.csv", "@E2.csv"]);
    assert_eq!(code, 0);
    let v = json_of(&out);
    assert_eq!(v["holds"], true);
    assert_eq!(v["command"], "order check");
    assert_eq!(v["certificate"]["kind"], "rank-triple");
    assert_eq!(v["certificate"]["rank_diff"], 1);
    assert!(v["tolerances"].is_object() && v["version"].is_string());
}

#[test]
fn incomparable_pair_reports_rank_triple() {
    let (code, out, _) = run_cli(&["canon", "simcong", "@adv_A.csv", "@adv_B.csv", "--json"]);
    assert_eq!(code, 1);
    let v = json_of(&out);
    assert_eq!(v["error"], "NotMinusComparable");
    assert_eq!(v["rank_triple"]["rank_a"], 1);
    assert_eq!(v["rank_triple"]["rank_b"], 1);
    assert_eq!(v["rank_triple"]["rank_diff"], 2);
    assert!(v["stage"].is_string());
}

#[test]
fn missing_operands_are_a_usage_error() {
    let (code, out, err) = run_cli(&["order", "check", "--relation", "lowner"]);
    assert_eq!(code, 2);
    assert!(out.is_empty());
    assert!(err.contains("required"));
}

fn rank_with(extra: &[&str]) -> u64 {
    let mut args = vec!["canon", "inertia", "@rank_fixture.csv", "--json"];
    args.extend_from_slice(extra);
    let (code, out, _) = run_cli(&args);
    assert_eq!(code, 0);
    json_of(&out)["rank"].as_u64().unwrap()
}

#[test]
fn rank_tolerance_flag_reaches_the_kernel() {
    assert_eq!(rank_with(&[]), 2);
    assert_eq!(rank_with(&["--tol-rank", "1e-7"]), 2);
    assert_eq!(rank_with(&["--tol-rank", "1e-5"]), 1);
    assert_eq!(rank_with(&["--tol-rank", "1.1e-6"]), 1);
    assert_eq!(rank_with(&["--tol-rank", "0.9e-6"]), 2);
}

#[test]
fn environment_tolerances_apply_and_flags_win() {
    let bin = env!("CARGO_BIN_EXE_psdorder");
    let fixture = fixtures().join("rank_fixture.csv");
    let rank = |env: Option<&str>, flag: Option<&str>| {
        let mut cmd = Command::new(bin);
        cmd.args(["canon", "inertia", "--json"]).arg(&fixture);
        cmd.env_remove("PSDORDER_TOL_RANK");
        if let Some(e) = env {
            cmd.env("PSDORDER_TOL_RANK", e);
        }
        if let Some(f) = flag {
            cmd.args(["--tol-rank", f]);
        }
        let out = cmd.output().unwrap();
        assert_eq!(out.status.code(), Some(0));
        json_of(&String::from_utf8(out.stdout).unwrap())["rank"].as_u64().unwrap()
    };
    assert_eq!(rank(None, None), 2);
    assert_eq!(rank(Some("1e-5"), None), 1);
    assert_eq!(rank(Some("1e-5"), Some("1e-7")), 2);
    assert_eq!(rank(Some("1e-7"), Some("1e-5")), 1);
}

#[test]
fn other_tolerance_flags_are_reported() {
    let (_, out, _) = run_cli(&[
        "canon", "inertia", "@E1.csv", "--tol-psd", "1e-6", "--tol-idem", "1e-4", "--tol-recon", "1e-7", "--json",
    ]);
    let t = &json_of(&out)["tolerances"];
    assert_eq!(t["psd_tol"], 1e-6);
    assert_eq!(t["idem_tol"], 1e-4);
    assert_eq!(t["recon_tol"], 1e-7);
}

#[test]
fn psd_tolerance_changes_a_verdict() {
    // 0 ≤ A fails by an eigenvalue of -1e-7 relative to ‖A‖ = 1.
    let dir = tempfile::tempdir().unwrap();
    let (a, z) = (dir.path().join("a.csv"), dir.path().join("z.csv"));
    std::fs::write(&a, "1,0\n0,-1e-7\n").unwrap();
    std::fs::write(&z, "0,0\n0,0\n").unwrap();
    let (a, z) = (a.to_str().unwrap(), z.to_str().unwrap());
    let (code, _, _) = run_cli(&["order", "check", "--relation", "lowner", z, a]);
    assert_eq!(code, 1, "default slack rejects -1e-7");
    let (code, _, _) = run_cli(&["order", "check", "--relation", "lowner", z, a, "--tol-psd", "1e-6"]);
    assert_eq!(code, 0);
}

#[test]
fn simcong_writes_transform() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("S.csv");
    let (code, stdout, _) = run_cli(&[
        "canon", "simcong", "@E1.csv", "@E2.csv", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let v = json_of(&stdout);
    assert_eq!((v["result"]["r"].as_u64(), v["result"]["s"].as_u64()), (Some(1), Some(2)));
    let s = read_general_matrix(&out).unwrap();
    assert!(rel_err(&s.congruence(&ek(3, 1)).unwrap(), &ek(3, 1)) < 1e-12);
    assert!(rel_err(&s.congruence(&ek(3, 2)).unwrap(), &ek(3, 2)) < 1e-12);
}

#[test]
fn fit_recovers_probe_transform() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("S.json");
    let (code, _, _) = run_cli(&["preserver", "fit", "--samples", "@probes", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    let s = read_general_matrix(&out).unwrap();
    let want = psdorder_core::Matrix::from_rows(&[[2.0, 1.0], [0.0, 1.0]]).unwrap();
    let err = rel_err(&s, &want).min(rel_err(&s, &want.scale(-1.0)));
    assert!(err < 1e-12, "{s:?}");
}

#[test]
fn nonsymmetric_input_warns_on_stderr() {
    let (code, out, err) = run_cli(&["order", "check", "--relation", "lowner", "@nonsym.csv", "@adv_B.csv", "--json"]);
    assert_eq!(code, 1);
    assert!(err.contains("not symmetric"), "{err}");
    json_of(&out);
}

#[test]
fn trace_inflation_lists_backward_counterexample() {
    let (code, out, _) = run_cli(&[
        "preserver", "verify", "--map", "trace-inflation", "--relation", "lowner", "--trials", "50", "--seed", "1", "--json",
    ]);
    assert_eq!(code, 1);
    let v = json_of(&out);
    assert_eq!(v["verdict"], "fails");
    assert!(v["backward_failure_count"].as_u64().unwrap() >= 1);
    assert!(v["backward_failures"][0]["A"].is_array());
}

#[test]
fn model_compare_certificates() {
    let (code, out, _) = run_cli(&["model", "compare", "@m1.json", "@m2.json", "--json"]);
    assert_eq!(code, 0);
    let v = json_of(&out);
    assert_eq!(v["result"], true);
    assert_eq!(v["l2_geq_l1"], false);
    assert_eq!(v["labels"][0], "better");
}

#[test]
fn monte_carlo_section_is_attached() {
    let (code, out, _) = run_cli(&[
        "qform", "check", "--forms", "@cochran_A1.csv,@cochran_A2.csv", "--cov", "@I3.csv", "--mean", "@mu0.csv", "--mc",
        "4000", "--seed", "9", "--json",
    ]);
    assert_eq!(code, 0);
    let v = json_of(&out);
    assert_eq!(v["monte_carlo"]["df"], serde_json::json!([1, 2]));
    assert_eq!(v["monte_carlo"]["n_samples"], 4000);
}

#[test]
fn help_goes_to_stdout() {
    let (code, out, _) = run_cli(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("Usage"));
    let (code, out, _) = run_cli(&["order", "check", "--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("--relation"));
}
