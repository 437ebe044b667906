#![allow(dead_code)]

use psdorder_core::sampling::{random_invertible, stream_rng};
use psdorder_core::{Matrix, PsdMatrix, SymMatrix, ToleranceConfig};
use psdorder_oracle::QMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

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

/// `G Gᵗ` over the integers.
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

/// An integer PSD pair. Half the time `A` is built from a subset of the
/// columns of `B`'s factor, so both verdicts of the minus order occur.
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

pub fn ek(n: usize, k: usize) -> Matrix {
    Matrix::from_diag(&(0..n).map(|i| if i < k { 1.0 } else { 0.0 }).collect::<Vec<_>>())
}

/// `(S E_r Sᵗ, S E_s Sᵗ, S, r, s)` with `S` uniform on `[-2, 2]` and
/// condition number below `1e4`.
pub fn congruent_pair<R: Rng>(
    rng: &mut R,
    n: usize,
) -> (PsdMatrix, PsdMatrix, Matrix, usize, usize) {
    let s = random_invertible(rng, n, -2.0, 2.0, 1e4, &tol()).unwrap();
    let hi = rng.gen_range(0..=n);
    let lo = rng.gen_range(0..=hi);
    let a = SymMatrix::symmetrized(s.congruence(&ek(n, lo)).unwrap()).unwrap().0;
    let b = SymMatrix::symmetrized(s.congruence(&ek(n, hi)).unwrap()).unwrap().0;
    (
        PsdMatrix::certify(a, &tol()).unwrap(),
        PsdMatrix::certify(b, &tol()).unwrap(),
        s,
        lo,
        hi,
    )
}

pub fn rel_err(got: &Matrix, want: &Matrix) -> f64 {
    got.max_abs_diff(want) / want.max_abs().max(1.0)
}
