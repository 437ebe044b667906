//! Cyclic Jacobi eigensolver for dense symmetric matrices.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::matrix::{Matrix, SymMatrix};
use crate::tol::ToleranceConfig;

/// Components with magnitude at or below this are skipped when fixing the
/// eigenvector sign.
const SIGN_EPS: f64 = 1.0e-10;

/// `A = Q diag(values) Qᵗ` with eigenvalues sorted non-increasing and column
/// `k` of `vectors` the eigenvector for `values[k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigDecomposition {
    pub vectors: Matrix,
    pub values: Vec<f64>,
}

impl EigDecomposition {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn max_abs_value(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn vector(&self, k: usize) -> Vec<f64> {
        self.vectors.column(k)
    }

    /// `Q diag(f(λ)) Qᵗ`.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> SymMatrix {
        let n = self.dim();
        let mut out = Matrix::zeros(n, n);
        for (k, &lam) in self.values.iter().enumerate() {
            let w = f(lam);
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let qi = w * self.vectors[(i, k)];
                if qi == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += qi * self.vectors[(j, k)];
                }
            }
        }
        SymMatrix::from_product(out)
    }

    pub fn reconstruct(&self) -> SymMatrix {
        self.map_spectrum(|l| l)
    }
}

fn off_diagonal_norm(a: &Matrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)] * a[(i, j)];
            }
        }
    }
    libm::sqrt(s)
}

/// Eigendecomposition by cyclic Jacobi rotations.
///
/// Pivots are visited row by row, `(0,1), (0,2), …, (n-2,n-1)`, for at most
/// `tol.max_sweeps` sweeps. The result is deterministic: eigenvalues are
/// sorted non-increasing (ties keep their diagonal order) and each
/// eigenvector is flipped so that its first component with magnitude above
/// `1e-10` is positive.
pub fn sym_eig(a: &SymMatrix, tol: &ToleranceConfig) -> Result<EigDecomposition> {
    let n = a.dim();
    let mut m = a.as_matrix().clone();
    let mut v = Matrix::identity(n);
    let target = tol.eig_tol * m.frobenius();

    let mut off = off_diagonal_norm(&m);
    let mut sweeps = 0;
    while off > target {
        if sweeps == tol.max_sweeps {
            return Err(Error::NonConvergence {
                sweeps,
                off_norm: off,
            });
        }
        for p in 0..n.saturating_sub(1) {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let t = if theta.abs() > 1.0e150 {
                    0.5 / theta
                } else {
                    let t = 1.0 / (theta.abs() + libm::sqrt(theta * theta + 1.0));
                    if theta < 0.0 {
                        -t
                    } else {
                        t
                    }
                };
                let c = 1.0 / libm::sqrt(t * t + 1.0);
                let s = t * c;

                m[(p, p)] -= t * apq;
                m[(q, q)] += t * apq;
                m[(p, q)] = 0.0;
                m[(q, p)] = 0.0;
                for r in 0..n {
                    if r == p || r == q {
                        continue;
                    }
                    let arp = m[(r, p)];
                    let arq = m[(r, q)];
                    let new_rp = c * arp - s * arq;
                    let new_rq = s * arp + c * arq;
                    m[(r, p)] = new_rp;
                    m[(p, r)] = new_rp;
                    m[(r, q)] = new_rq;
                    m[(q, r)] = new_rq;
                }
                for r in 0..n {
                    let vrp = v[(r, p)];
                    let vrq = v[(r, q)];
                    v[(r, p)] = c * vrp - s * vrq;
                    v[(r, q)] = s * vrp + c * vrq;
                }
            }
        }
        sweeps += 1;
        off = off_diagonal_norm(&m);
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(j, j)].total_cmp(&m[(i, i)]));

    let values: Vec<f64> = order.iter().map(|&k| m[(k, k)]).collect();
    let mut vectors = Matrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = v.column(src);
        let flip = col
            .iter()
            .find(|x| x.abs() > SIGN_EPS)
            .is_some_and(|&x| x < 0.0);
        if flip {
            col.iter_mut().for_each(|x| *x = -*x);
        }
        vectors.set_column(dst, &col);
    }
    Ok(EigDecomposition { vectors, values })
}
