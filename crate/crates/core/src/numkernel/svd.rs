//! One-sided (Hestenes) Jacobi SVD and dense inversion for general matrices.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::tol::ToleranceConfig;

/// Thin SVD `M = U diag(sigma) Vᵗ`, singular values non-increasing,
/// `k = min(rows, cols)` columns in `u` and `v`.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: Matrix,
    pub sigma: Vec<f64>,
    pub v: Matrix,
}

impl Svd {
    pub fn max_sigma(&self) -> f64 {
        self.sigma.first().copied().unwrap_or(0.0)
    }

    pub fn min_sigma(&self) -> f64 {
        self.sigma.last().copied().unwrap_or(0.0)
    }

    /// Number of singular values above the rank cutoff relative to `scale`.
    pub fn rank_at(&self, n: usize, scale: f64, tol: &ToleranceConfig) -> usize {
        let cut = tol.rank_cutoff(n, scale);
        self.sigma.iter().filter(|&&s| s > cut).count()
    }
}

pub fn svd(m: &Matrix, tol: &ToleranceConfig) -> Result<Svd> {
    if m.rows() < m.cols() {
        let t = svd_tall(&m.transpose(), tol)?;
        return Ok(Svd {
            u: t.v,
            sigma: t.sigma,
            v: t.u,
        });
    }
    svd_tall(m, tol)
}

fn svd_tall(m: &Matrix, tol: &ToleranceConfig) -> Result<Svd> {
    let (rows, cols) = m.shape();
    let mut a = m.clone();
    let mut v = Matrix::identity(cols);
    // Rotations are cheap; one-sided Jacobi needs a few more sweeps than the
    // two-sided variant on rank-deficient input.
    let budget = 2 * tol.max_sweeps;
    // Columns at this squared norm are rounding noise; their singular values
    // are far below any rank cutoff and their directions are meaningless.
    let negligible = {
        let f = f64::EPSILON * m.frobenius();
        f * f
    };

    let mut sweeps = 0;
    loop {
        let mut rotated = false;
        let mut worst: f64 = 0.0;
        for i in 0..cols.saturating_sub(1) {
            for j in i + 1..cols {
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, 0.0);
                for r in 0..rows {
                    let x = a[(r, i)];
                    let y = a[(r, j)];
                    alpha += x * x;
                    beta += y * y;
                    gamma += x * y;
                }
                if gamma == 0.0 || alpha <= negligible || beta <= negligible {
                    continue;
                }
                let cosine = gamma.abs() / libm::sqrt(alpha * beta);
                if cosine.is_nan() || cosine <= f64::EPSILON {
                    continue;
                }
                worst = worst.max(cosine);
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = {
                    let t = 1.0 / (zeta.abs() + libm::sqrt(1.0 + zeta * zeta));
                    if zeta < 0.0 {
                        -t
                    } else {
                        t
                    }
                };
                let c = 1.0 / libm::sqrt(1.0 + t * t);
                let s = c * t;
                for r in 0..rows {
                    let x = a[(r, i)];
                    let y = a[(r, j)];
                    a[(r, i)] = c * x - s * y;
                    a[(r, j)] = s * x + c * y;
                }
                for r in 0..cols {
                    let x = v[(r, i)];
                    let y = v[(r, j)];
                    v[(r, i)] = c * x - s * y;
                    v[(r, j)] = s * x + c * y;
                }
            }
        }
        sweeps += 1;
        if !rotated {
            break;
        }
        if sweeps >= budget {
            return Err(Error::NonConvergence {
                sweeps,
                off_norm: worst,
            });
        }
    }

    let norms: Vec<f64> = (0..cols)
        .map(|j| libm::sqrt((0..rows).map(|r| a[(r, j)] * a[(r, j)]).sum()))
        .collect();
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));

    let mut u = Matrix::zeros(rows, cols);
    let mut vs = Matrix::zeros(cols, cols);
    let mut sigma = Vec::with_capacity(cols);
    for (dst, &src) in order.iter().enumerate() {
        let s = norms[src];
        sigma.push(s);
        for r in 0..rows {
            u[(r, dst)] = if s > 0.0 { a[(r, src)] / s } else { 0.0 };
        }
        for r in 0..cols {
            vs[(r, dst)] = v[(r, src)];
        }
    }
    Ok(Svd { u, sigma, v: vs })
}

/// Numerical rank of a general matrix.
pub fn matrix_rank(m: &Matrix, tol: &ToleranceConfig) -> Result<usize> {
    let d = svd(m, tol)?;
    Ok(d.rank_at(m.rows().max(m.cols()), d.max_sigma(), tol))
}

/// Fails with `SingularMatrix` unless the smallest singular value of the
/// square matrix `s` clears the rank cutoff.
pub fn ensure_invertible(s: &Matrix, tol: &ToleranceConfig) -> Result<()> {
    if !s.is_square() {
        return Err(Error::NotSquare {
            rows: s.rows(),
            cols: s.cols(),
        });
    }
    let d = svd(s, tol)?;
    let cut = tol.rank_cutoff(s.rows(), d.max_sigma());
    if d.max_sigma() == 0.0 || d.min_sigma() <= cut {
        return Err(Error::SingularMatrix {
            sigma_min: d.min_sigma(),
        });
    }
    Ok(())
}

/// Spectral condition number `σ_max / σ_min` (infinite when singular).
pub fn condition_number(s: &Matrix, tol: &ToleranceConfig) -> Result<f64> {
    let d = svd(s, tol)?;
    Ok(if d.min_sigma() == 0.0 {
        f64::INFINITY
    } else {
        d.max_sigma() / d.min_sigma()
    })
}

/// Inverse by Gauss-Jordan elimination with partial pivoting.
pub fn inverse(s: &Matrix, tol: &ToleranceConfig) -> Result<Matrix> {
    ensure_invertible(s, tol)?;
    let n = s.rows();
    let mut a = s.clone();
    let mut inv = Matrix::identity(n);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[(i, col)].abs().total_cmp(&a[(j, col)].abs()))
            .expect("non-empty range");
        if a[(pivot, col)] == 0.0 {
            return Err(Error::SingularMatrix { sigma_min: 0.0 });
        }
        if pivot != col {
            for j in 0..n {
                let t = a[(col, j)];
                a[(col, j)] = a[(pivot, j)];
                a[(pivot, j)] = t;
                let t = inv[(col, j)];
                inv[(col, j)] = inv[(pivot, j)];
                inv[(pivot, j)] = t;
            }
        }
        let p = a[(col, col)];
        for j in 0..n {
            a[(col, j)] /= p;
            inv[(col, j)] /= p;
        }
        for i in 0..n {
            if i == col {
                continue;
            }
            let f = a[(i, col)];
            if f == 0.0 {
                continue;
            }
            for j in 0..n {
                a[(i, j)] -= f * a[(col, j)];
                inv[(i, j)] -= f * inv[(col, j)];
            }
        }
    }
    Ok(inv)
}
