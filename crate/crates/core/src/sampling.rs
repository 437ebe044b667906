//! Seeded random matrices and normal variates.
//!
//! Every generator is a ChaCha8 stream: `seed` picks the key and `stream`
//! picks one of 2^64 independent streams, so sub-seeds for trial `t` or shard
//! `k` are `(seed, t)` / `(seed, k)` and results do not depend on scheduling.

use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::matrix::{Matrix, PsdMatrix};
use crate::numkernel::{self, norm};
use crate::tol::ToleranceConfig;

pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Standard normal variates by the Box-Muller transform, emitting both values
/// of each pair.
#[derive(Debug, Clone)]
pub struct NormalStream<R> {
    rng: R,
    spare: Option<f64>,
}

impl<R: Rng> NormalStream<R> {
    pub fn new(rng: R) -> Self {
        Self { rng, spare: None }
    }

    pub fn draw(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        // u1 in (0, 1] keeps the logarithm finite.
        let u1: f64 = 1.0 - self.rng.gen::<f64>();
        let u2: f64 = self.rng.gen();
        let r = libm::sqrt(-2.0 * libm::log(u1));
        let (s, c) = libm::sincos(2.0 * PI * u2);
        self.spare = Some(r * s);
        r * c
    }

    pub fn fill(&mut self, out: &mut [f64]) {
        out.iter_mut().for_each(|x| *x = self.draw());
    }
}

pub fn uniform_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize, lo: f64, hi: f64) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| rng.gen_range(lo..=hi))
}

pub fn gaussian_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> Matrix {
    let mut normal = NormalStream::new(rng);
    Matrix::from_fn(rows, cols, |_, _| normal.draw())
}

/// Haar-ish random orthogonal matrix from Gram-Schmidt on Gaussian columns.
pub fn random_orthogonal<R: Rng>(rng: &mut R, n: usize) -> Matrix {
    loop {
        let g = gaussian_matrix(rng, n, n);
        let mut cols: Vec<Vec<f64>> = Vec::with_capacity(n);
        let mut ok = true;
        for j in 0..n {
            let mut w = g.column(j);
            for _ in 0..2 {
                for b in &cols {
                    let d = numkernel::dot(&w, b);
                    w.iter_mut().zip(b).for_each(|(x, y)| *x -= d * y);
                }
            }
            let nw = norm(&w);
            if nw < 1e-8 {
                ok = false;
                break;
            }
            w.iter_mut().for_each(|x| *x /= nw);
            cols.push(w);
        }
        if ok {
            let mut q = Matrix::zeros(n, n);
            for (j, c) in cols.iter().enumerate() {
                q.set_column(j, c);
            }
            return q;
        }
    }
}

/// Rejection sampler: entries uniform on `[lo, hi]`, kept once the condition
/// number is below `max_cond`.
pub fn random_invertible<R: Rng>(
    rng: &mut R,
    n: usize,
    lo: f64,
    hi: f64,
    max_cond: f64,
    tol: &ToleranceConfig,
) -> Result<Matrix> {
    loop {
        let s = uniform_matrix(rng, n, n, lo, hi);
        if numkernel::condition_number(&s, tol)? < max_cond {
            return Ok(s);
        }
    }
}

/// `Q diag(σ) Q'ᵗ` with `σ` log-uniform on `[1, cond]`; condition number at
/// most `cond`.
pub fn conditioned_matrix<R: Rng>(rng: &mut R, n: usize, cond: f64) -> Matrix {
    let q1 = random_orthogonal(rng, n);
    let q2 = random_orthogonal(rng, n);
    let ln = libm::log(cond.max(1.0));
    let d: Vec<f64> = (0..n).map(|_| libm::exp(rng.gen_range(0.0..=ln))).collect();
    q1.mul(&Matrix::from_diag(&d)).mul(&q2.transpose())
}

/// `G Gᵗ` with Gaussian `n x rank` factor `G`.
pub fn random_psd<R: Rng>(rng: &mut R, n: usize, rank: usize) -> PsdMatrix {
    PsdMatrix::gram(&gaussian_matrix(rng, n, rank))
}

/// Orthogonal projector of the given rank onto a random subspace.
pub fn random_projector<R: Rng>(rng: &mut R, n: usize, rank: usize) -> PsdMatrix {
    let q = random_orthogonal(rng, n);
    PsdMatrix::gram(&q.block(0, 0, n, rank))
}
