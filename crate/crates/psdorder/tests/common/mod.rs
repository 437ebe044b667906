#![allow(dead_code)]

use std::path::PathBuf;

use psdorder_core::sampling::{random_invertible, stream_rng};
use psdorder_core::{Matrix, PsdMatrix, SymMatrix, ToleranceConfig};
use psdorder_oracle::QMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

/// Replaces every `@` with the fixture directory.
pub fn expand(args: &[&str]) -> Vec<String> {
    let dir = format!("{}/", fixtures().display());
    args.iter().map(|a| a.replace('@', &dir)).collect()
}

/// Runs the CLI in process; returns (exit code, stdout, stderr).
pub fn run_cli(args: &[&str]) -> (i32, String, String) {
    let mut argv = vec!["psdorder".to_string()];
    argv.extend(expand(args));
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = psdorder::run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

/// The fixture corpus: arguments (with `@` for the fixture directory) and
/// the exit code each invocation must produce.
pub const CORPUS: &[(&[&str], i32)] = &[
    (&["order", "check", "--relation", "minus", "@E1.csv", "@E2.csv"], 0),
    (&["order", "check", "--relation", "minus", "@E2.csv", "@I3.csv"], 0),
    (&["order", "check", "--relation", "minus", "@E2.csv", "@E1.csv"], 1),
    (&["order", "check", "--relation", "lowner", "@E1.csv", "@I3.csv"], 0),
    (&["order", "check", "--relation", "star", "@E1.csv", "@E2.csv"], 0),
    (&["order", "check", "--relation", "left-star", "@E1.csv", "@E2.csv"], 0),
    (&["order", "check", "--relation", "right-star", "@E1.csv", "@E2.csv"], 0),
    (&["order", "check", "--relation", "lowner", "@adv_A.csv", "@adv_B.csv"], 1),
    (&["order", "check", "--relation", "minus", "@adv_A.csv", "@adv_B.csv"], 1),
    (&["order", "check", "--relation", "star", "@adv_A.csv", "@adv_B.csv"], 1),
    (&["order", "minus", "--method", "rank", "@E1.csv", "@E2.csv"], 0),
    (&["order", "minus", "--method", "image", "@E1.csv", "@E2.csv"], 0),
    (&["order", "minus", "--method", "ginv", "@E1.csv", "@E2.csv"], 0),
    (&["order", "minus", "--method", "ginv", "@adv_A.csv", "@adv_B.csv"], 1),
    (&["order", "minus", "--method", "image", "@A.json", "@A.json"], 0),
    (&["order", "adjacent", "@E1.csv", "@E2.csv"], 0),
    (&["order", "adjacent", "@E1.csv", "@I3.csv"], 1),
    (&["canon", "inertia", "@indefinite.csv"], 0),
    (&["canon", "inertia", "@rank_fixture.csv", "--tol-rank", "1e-5"], 0),
    (&["canon", "canonical", "@A.json"], 0),
    (&["canon", "simcong", "@E1.csv", "@E2.csv"], 0),
    (&["canon", "simcong", "@adv_A.csv", "@adv_B.csv"], 1),
    (&["canon", "simcong", "@indefinite.csv", "@adv_B.csv"], 2),
    (&["order", "check", "--relation", "lowner"], 2),
    (&["order", "check", "--relation", "bogus", "@E1.csv", "@E2.csv"], 2),
    (&["order", "check", "--relation", "lowner", "@ragged.csv", "@E1.csv"], 2),
    (&["order", "check", "--relation", "lowner", "@bad_number.csv", "@E1.csv"], 2),
    (&["order", "check", "--relation", "lowner", "@missing.csv", "@E1.csv"], 2),
    (&["order", "check", "--relation", "lowner", "@nonsym.csv", "@I3.csv"], 2),
    (&["order", "check", "--relation", "lowner", "@nonsym.csv", "@adv_B.csv"], 1),
    (&["canon", "inertia", "@E1.csv", "--tol-rank", "-1"], 2),
    (&["frobnicate"], 2),
    (
        &["preserver", "verify", "--map", "congruence:@S.csv", "--relation", "minus", "--trials", "20", "--seed", "1"],
        0,
    ),
    (
        &["preserver", "verify", "--map", "congruence:@S.csv", "--relation", "lowner", "--trials", "20", "--seed", "1"],
        0,
    ),
    (
        &["preserver", "verify", "--map", "trace-inflation", "--relation", "lowner", "--trials", "50", "--seed", "1"],
        1,
    ),
    (
        &["preserver", "verify", "--map", "congruence:@S_singular.csv", "--relation", "minus"],
        2,
    ),
    (&["preserver", "verify", "--map", "bogus", "--relation", "minus"], 2),
    (&["preserver", "verify", "--map", "identity", "--relation", "minus", "--trials", "0"], 2),
    (&["preserver", "projectors", "--map", "identity", "--dim", "3"], 0),
    (&["preserver", "projectors", "--map", "rank-collapse", "--dim", "3"], 1),
    (&["preserver", "fit", "--samples", "@probes"], 0),
    (&["preserver", "fit", "--samples", "@probes_bad"], 1),
    (&["preserver", "fit", "--samples", "@no_such_dir"], 2),
    (&["model", "compare", "@m1.json", "@m2.json"], 0),
    (&["model", "compare", "@m2.json", "@m1.json"], 1),
    (&["model", "compare", "@m1.json", "@m3.json"], 1),
    (&["model", "compare", "@m1.json", "@gm.json"], 2),
    (&["model", "compare", "@m1.json", "@E1.csv"], 2),
    (&["model", "blue", "--estimator", "@hat.csv", "@gm.json"], 0),
    (&["model", "blue", "--estimator", "@zero3.csv", "@gm.json"], 1),
    (&["model", "blue", "--estimator", "@I3.csv", "@gm.json"], 2),
    (
        &["qform", "check", "--forms", "@cochran_A1.csv,@cochran_A2.csv", "--cov", "@I3.csv", "--mean", "@mu0.csv"],
        0,
    ),
    (
        &["qform", "check", "--forms", "@cochran_A1.csv,@cochran_A2.csv", "--cov", "@I3.csv", "--mean", "@mu0.csv", "--mc", "2000", "--seed", "3"],
        0,
    ),
    (
        &["qform", "check", "--forms", "@overlap_A1.csv,@overlap_A2.csv", "--cov", "@I3.csv", "--mean", "@mu0.csv"],
        1,
    ),
    (
        &["qform", "check", "--forms", "@cochran_A1.csv", "--cov", "@I3.csv", "--mean", "@E1.csv"],
        2,
    ),
];

pub fn tol() -> ToleranceConfig {
    ToleranceConfig::default()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    stream_rng(seed, 0)
}

/// Integer `n x k` factor with entries in `[-3, 3]`.
pub fn int_factor<R: Rng>(rng: &mut R, n: usize, k: usize) -> Vec<Vec<i64>> {
    (0..n)
        .map(|_| (0..k).map(|_| rng.gen_range(-3..=3)).collect())
        .collect()
}

pub fn int_gram(g: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = g.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| g[i].iter().zip(&g[j]).map(|(a, b)| a * b).sum())
                .collect()
        })
        .collect()
}

pub fn columns(g: &[Vec<i64>], keep: &[usize]) -> Vec<Vec<i64>> {
    g.iter().map(|r| keep.iter().map(|&j| r[j]).collect()).collect()
}

/// An integer PSD pair; half the time `A` uses a subset of `B`'s factor
/// columns, so both minus-order verdicts are common.
pub fn int_psd_pair<R: Rng>(rng: &mut R, n: usize) -> (Vec<Vec<i64>>, Vec<Vec<i64>>) {
    let k = rng.gen_range(1..=n + 1);
    let g = int_factor(rng, n, k);
    let b = int_gram(&g);
    let a = if rng.gen_bool(0.5) {
        let keep: Vec<usize> = (0..k).filter(|_| rng.gen_bool(0.5)).collect();
        int_gram(&columns(&g, &keep))
    } else {
        let ka = rng.gen_range(1..=n);
        int_gram(&int_factor(rng, n, ka))
    };
    (a, b)
}

pub fn to_sym(m: &[Vec<i64>]) -> SymMatrix {
    let rows: Vec<Vec<f64>> = m.iter().map(|r| r.iter().map(|&v| v as f64).collect()).collect();
    SymMatrix::from_rows(&rows).unwrap()
}

pub fn to_psd(m: &[Vec<i64>]) -> PsdMatrix {
    PsdMatrix::certify(to_sym(m), &tol()).unwrap()
}

pub fn to_q(m: &[Vec<i64>]) -> QMatrix {
    QMatrix::from_i64(m)
}

pub fn ek(n: usize, k: usize) -> Matrix {
    Matrix::from_diag(&(0..n).map(|i| if i < k { 1.0 } else { 0.0 }).collect::<Vec<_>>())
}

/// `(S E_r Sᵗ, S E_s Sᵗ, r, s)` with `S` uniform on `[-2, 2]`, condition
/// number below `1e4`.
pub fn congruent_pair<R: Rng>(rng: &mut R, n: usize) -> (PsdMatrix, PsdMatrix, usize, usize) {
    let s = random_invertible(rng, n, -2.0, 2.0, 1e4, &tol()).unwrap();
    let hi = rng.gen_range(0..=n);
    let lo = rng.gen_range(0..=hi);
    let sym = |k| SymMatrix::symmetrized(s.congruence(&ek(n, k)).unwrap()).unwrap().0;
    (
        PsdMatrix::certify(sym(lo), &tol()).unwrap(),
        PsdMatrix::certify(sym(hi), &tol()).unwrap(),
        lo,
        hi,
    )
}

/// Max-entry error relative to `max(1, ‖want‖_max)`.
pub fn rel_err(got: &Matrix, want: &Matrix) -> f64 {
    got.max_abs_diff(want) / want.max_abs().max(1.0)
}
