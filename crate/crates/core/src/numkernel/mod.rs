//! Numerical core: eigendecomposition, tolerance-based rank, generalized
//! inverses, subspaces and spectral splits.

mod eig;
mod svd;

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use eig::{sym_eig, EigDecomposition};
pub use svd::{condition_number, ensure_invertible, inverse, matrix_rank, svd, Svd};

use crate::error::{Error, Result};
use crate::matrix::{Matrix, PsdMatrix, SymMatrix};
use crate::tol::ToleranceConfig;

/// Number of eigenvalues with `|λ| > cutoff`, where the cutoff is the rank
/// tolerance times `scale`.
pub(crate) fn rank_from_eig(e: &EigDecomposition, scale: f64, tol: &ToleranceConfig) -> usize {
    let cut = tol.rank_cutoff(e.dim(), scale);
    e.values.iter().filter(|l| l.abs() > cut).count()
}

/// Numerical rank: eigenvalues with `|λ| > rank_rel(n) * max|λ|`.
pub fn numerical_rank(a: &SymMatrix, tol: &ToleranceConfig) -> Result<usize> {
    let e = sym_eig(a, tol)?;
    Ok(rank_from_eig(&e, e.max_abs_value(), tol))
}

/// Numerical rank where the cutoff is relative to an externally supplied
/// scale, e.g. the operands a difference was formed from.
pub fn numerical_rank_scaled(a: &SymMatrix, scale: f64, tol: &ToleranceConfig) -> Result<usize> {
    let e = sym_eig(a, tol)?;
    Ok(rank_from_eig(&e, scale.max(e.max_abs_value()), tol))
}

/// Outcome of a PSD test. On failure `witness` is a unit vector with
/// `xᵗAx = min_eig < 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct PsdCheck {
    pub is_psd: bool,
    pub min_eig: f64,
    pub witness: Option<Vec<f64>>,
}

pub(crate) fn psd_from_eig(e: &EigDecomposition, scale: f64, tol: &ToleranceConfig) -> PsdCheck {
    let n = e.dim();
    let min_eig = e.values[n - 1];
    let is_psd = min_eig >= -tol.psd_tol * scale;
    PsdCheck {
        is_psd,
        min_eig,
        witness: (!is_psd).then(|| e.vector(n - 1)),
    }
}

/// PSD iff the smallest eigenvalue is `>= -psd_tol * max|λ|`.
pub fn is_psd(a: &SymMatrix, tol: &ToleranceConfig) -> Result<PsdCheck> {
    let e = sym_eig(a, tol)?;
    Ok(psd_from_eig(&e, e.max_abs_value(), tol))
}

/// PSD test with the slack measured against `scale` (at least `max|λ|`).
pub fn is_psd_scaled(a: &SymMatrix, scale: f64, tol: &ToleranceConfig) -> Result<PsdCheck> {
    let e = sym_eig(a, tol)?;
    Ok(psd_from_eig(&e, scale.max(e.max_abs_value()), tol))
}

/// Moore-Penrose inverse: eigenvalues above the rank cutoff are inverted,
/// the rest dropped.
pub fn pinv(a: &SymMatrix, tol: &ToleranceConfig) -> Result<SymMatrix> {
    let e = sym_eig(a, tol)?;
    let cut = tol.rank_cutoff(e.dim(), e.max_abs_value());
    Ok(e.map_spectrum(|l| if l.abs() > cut { 1.0 / l } else { 0.0 }))
}

/// A random member of the inner-inverse family `G = A⁺ + V - A⁺AVAA⁺`,
/// with `V` drawn entrywise uniform on `[-1, 1]` from a ChaCha8 stream seeded
/// by `seed`. `seed == 0` returns `A⁺` itself.
pub fn inner_ginverse(a: &SymMatrix, seed: u64, tol: &ToleranceConfig) -> Result<Matrix> {
    let ap = pinv(a, tol)?;
    if seed == 0 {
        return Ok(ap.into_matrix());
    }
    let n = a.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v = Matrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..=1.0));
    let pa = ap.mul(a); // A⁺A
    let ap_a = pa.mul(&v).mul(a).mul(&ap); // A⁺A V A A⁺
    ap.as_matrix().add(&v)?.sub(&ap_a)
}

/// Orthonormal basis of a subspace of `ℝⁿ`, one vector per column.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceBasis {
    ambient: usize,
    vectors: Matrix,
}

impl SubspaceBasis {
    /// Wraps columns assumed orthonormal.
    pub fn from_orthonormal(vectors: Matrix) -> Self {
        Self {
            ambient: vectors.rows(),
            vectors,
        }
    }

    /// Orthonormalizes the given spanning vectors (modified Gram-Schmidt with
    /// re-orthogonalization), dropping those that are dependent within
    /// `recon_tol`.
    pub fn span(ambient: usize, vectors: &[Vec<f64>], tol: &ToleranceConfig) -> Result<Self> {
        let mut basis: Vec<Vec<f64>> = Vec::new();
        for v in vectors {
            if v.len() != ambient {
                return Err(Error::DimensionMismatch {
                    expected: (ambient, 1),
                    found: (v.len(), 1),
                });
            }
            let norm0 = norm(v);
            if norm0 == 0.0 {
                continue;
            }
            let mut w: Vec<f64> = v.iter().map(|x| x / norm0).collect();
            for _ in 0..2 {
                for b in &basis {
                    let d = dot(&w, b);
                    w.iter_mut().zip(b).for_each(|(x, y)| *x -= d * y);
                }
            }
            let nw = norm(&w);
            if nw > tol.recon_tol {
                w.iter_mut().for_each(|x| *x /= nw);
                basis.push(w);
            }
        }
        let mut m = Matrix::zeros(ambient, basis.len());
        for (j, b) in basis.iter().enumerate() {
            m.set_column(j, b);
        }
        Ok(Self::from_orthonormal(m))
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.vectors.cols()
    }

    pub fn vectors(&self) -> &Matrix {
        &self.vectors
    }

    pub fn vector(&self, k: usize) -> Vec<f64> {
        self.vectors.column(k)
    }

    /// Distance of `x` from the subspace.
    pub fn residual(&self, x: &[f64]) -> f64 {
        let mut r = x.to_vec();
        for k in 0..self.dim() {
            let b = self.vector(k);
            let d = dot(&r, &b);
            r.iter_mut().zip(&b).for_each(|(x, y)| *x -= d * y);
        }
        norm(&r)
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    libm::sqrt(dot(a, a))
}

pub(crate) fn basis_from_eig(e: &EigDecomposition, scale: f64, tol: &ToleranceConfig) -> SubspaceBasis {
    let cut = tol.rank_cutoff(e.dim(), scale);
    let keep: Vec<usize> = (0..e.dim()).filter(|&k| e.values[k].abs() > cut).collect();
    let mut m = Matrix::zeros(e.dim(), keep.len());
    for (j, &k) in keep.iter().enumerate() {
        m.set_column(j, &e.vector(k));
    }
    SubspaceBasis::from_orthonormal(m)
}

/// `Im A`: eigenvectors whose eigenvalues clear the rank cutoff.
pub fn image_basis(a: &SymMatrix, tol: &ToleranceConfig) -> Result<SubspaceBasis> {
    let e = sym_eig(a, tol)?;
    Ok(basis_from_eig(&e, e.max_abs_value(), tol))
}

/// `Im M` for a general matrix: left singular vectors above the cutoff.
pub fn image_basis_general(m: &Matrix, tol: &ToleranceConfig) -> Result<SubspaceBasis> {
    let d = svd(m, tol)?;
    let r = d.rank_at(m.rows().max(m.cols()), d.max_sigma(), tol);
    Ok(SubspaceBasis::from_orthonormal(d.u.block(0, 0, m.rows(), r)))
}

/// `U ⊆ W` iff every basis vector of `U` lies within `recon_tol` of `W`.
pub fn subspace_leq(u: &SubspaceBasis, w: &SubspaceBasis, tol: &ToleranceConfig) -> Result<bool> {
    if u.ambient() != w.ambient() {
        return Err(Error::DimensionMismatch {
            expected: (w.ambient(), w.dim()),
            found: (u.ambient(), u.dim()),
        });
    }
    Ok((0..u.dim()).all(|k| w.residual(&u.vector(k)) <= tol.recon_tol))
}

/// Positive and negative parts `(C⁺, C⁻)` with `C = C⁺ - C⁻` and
/// `C⁺C⁻ = 0`: `C⁺ = Q diag(max(λ,0)) Qᵗ`, `C⁻ = Q diag(max(-λ,0)) Qᵗ`.
/// Eigenvalues inside the rank cutoff go to neither part.
pub fn pos_neg_split(c: &SymMatrix, tol: &ToleranceConfig) -> Result<(PsdMatrix, PsdMatrix)> {
    let e = sym_eig(c, tol)?;
    let cut = tol.rank_cutoff(e.dim(), e.max_abs_value());
    let plus = e.map_spectrum(|l| if l > cut { l } else { 0.0 });
    let minus = e.map_spectrum(|l| if l < -cut { -l } else { 0.0 });
    Ok((PsdMatrix::assume_psd(plus), PsdMatrix::assume_psd(minus)))
}

/// Orthogonal projector `U Uᵗ` onto the span of `U`.
pub fn projector_onto(u: &SubspaceBasis) -> PsdMatrix {
    PsdMatrix::gram(u.vectors())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use core::f64::consts::FRAC_1_SQRT_2;

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn sym(rows: &[[f64; 2]]) -> SymMatrix {
        SymMatrix::from_rows(rows).unwrap()
    }

    fn penrose_residual(a: &Matrix, g: &Matrix) -> f64 {
        let aga = a.mul(g).mul(a);
        let gag = g.mul(a).mul(g);
        let ag = a.mul(g);
        let ga = g.mul(a);
        aga.max_abs_diff(a)
            .max(gag.max_abs_diff(g))
            .max(ag.asymmetry())
            .max(ga.asymmetry())
    }

    #[test]
    fn rank_examples() {
        assert_eq!(numerical_rank(&SymMatrix::identity(5), &tol()).unwrap(), 5);
        assert_eq!(numerical_rank(&SymMatrix::zeros(3), &tol()).unwrap(), 0);
        // Default cutoff at n = 2: 2 * 1e3 * eps * 1 ≈ 4.4e-13 > 1e-20.
        assert_eq!(numerical_rank(&SymMatrix::diag(&[1.0, 1e-20]), &tol()).unwrap(), 1);
        let a = SymMatrix::diag(&[1.0, 1e-6]);
        assert_eq!(numerical_rank(&a, &tol()).unwrap(), 2);
        assert_eq!(numerical_rank(&a, &tol().with_rank_rel_tol(1e-5)).unwrap(), 1);
    }

    #[test]
    fn psd_examples() {
        let c = is_psd(&sym(&[[2.0, 1.0], [1.0, 2.0]]), &tol()).unwrap();
        assert!(c.is_psd && c.witness.is_none());
        assert!(is_psd(&SymMatrix::zeros(3), &tol()).unwrap().is_psd);

        let a = sym(&[[1.0, 2.0], [2.0, 1.0]]);
        let c = is_psd(&a, &tol()).unwrap();
        assert!(!c.is_psd);
        let x = c.witness.unwrap();
        assert!((x[0] - FRAC_1_SQRT_2).abs() < 1e-14);
        assert!((x[1] + FRAC_1_SQRT_2).abs() < 1e-14);
        assert!((a.quad_form(&x) + 1.0).abs() < 1e-14);
    }

    #[test]
    fn pinv_examples() {
        let g = pinv(&SymMatrix::diag(&[2.0, 4.0]), &tol()).unwrap();
        assert!(g.max_abs_diff(&Matrix::from_diag(&[0.5, 0.25])) < 1e-15);

        let a = SymMatrix::diag(&[2.0, 0.0]);
        let g = pinv(&a, &tol()).unwrap();
        assert!(g.max_abs_diff(&Matrix::from_diag(&[0.5, 0.0])) < 1e-15);
        assert!(penrose_residual(&a, &g) < 1e-15);

        let x = [0.6, 0.0, 0.8];
        let p = SymMatrix::outer(&x);
        let g = pinv(&p, &tol()).unwrap();
        assert!(g.max_abs_diff(&p) < 1e-14);
        assert!(penrose_residual(&p, &g) < 1e-14);
    }

    #[test]
    fn inner_inverse_family() {
        let a = SymMatrix::diag(&[2.0, 0.0]);
        let g0 = inner_ginverse(&a, 0, &tol()).unwrap();
        assert_eq!(g0, Matrix::from_diag(&[0.5, 0.0]));
        let g7 = inner_ginverse(&a, 7, &tol()).unwrap();
        assert!(a.mul(&g7).mul(&a).max_abs_diff(&a) < 1e-15);
        assert!(g7.max_abs_diff(&g0) > 1e-3);

        let b = sym(&[[2.0, 1.0], [1.0, 2.0]]);
        let inv = Matrix::from_rows(&[[2.0 / 3.0, -1.0 / 3.0], [-1.0 / 3.0, 2.0 / 3.0]]).unwrap();
        for seed in [0, 1, 99] {
            let g = inner_ginverse(&b, seed, &tol()).unwrap();
            assert!(g.max_abs_diff(&inv) < 1e-14, "seed {seed}");
        }
    }

    #[test]
    fn image_examples() {
        let b = image_basis(&SymMatrix::diag(&[1.0, 0.0]), &tol()).unwrap();
        assert_eq!(b.dim(), 1);
        assert_eq!(b.vector(0), vec![1.0, 0.0]);

        let b = image_basis(&sym(&[[1.0, 1.0], [1.0, 1.0]]), &tol()).unwrap();
        assert_eq!(b.dim(), 1);
        let v = b.vector(0);
        assert!((v[0] - FRAC_1_SQRT_2).abs() < 1e-14 && (v[1] - FRAC_1_SQRT_2).abs() < 1e-14);

        assert_eq!(image_basis(&SymMatrix::identity(3), &tol()).unwrap().dim(), 3);
    }

    #[test]
    fn subspace_examples() {
        let t = tol();
        let e1 = SubspaceBasis::span(2, &[vec![1.0, 0.0]], &t).unwrap();
        let e2 = SubspaceBasis::span(2, &[vec![0.0, 1.0]], &t).unwrap();
        let full = image_basis(&SymMatrix::identity(2), &t).unwrap();
        assert!(subspace_leq(&e1, &full, &t).unwrap());
        assert!(!subspace_leq(&e1, &e2, &t).unwrap());
        let ones = SubspaceBasis::span(2, &[vec![1.0, 1.0]], &t).unwrap();
        let im = image_basis(&sym(&[[1.0, 1.0], [1.0, 1.0]]), &t).unwrap();
        assert!(subspace_leq(&ones, &im, &t).unwrap());
        let e3 = SubspaceBasis::span(3, &[vec![1.0, 0.0, 0.0]], &t).unwrap();
        assert!(subspace_leq(&e3, &e1, &t).is_err());
    }

    #[test]
    fn split_examples() {
        let (p, m) = pos_neg_split(&SymMatrix::diag(&[3.0, -2.0]), &tol()).unwrap();
        assert!(p.max_abs_diff(&Matrix::from_diag(&[3.0, 0.0])) < 1e-15);
        assert!(m.max_abs_diff(&Matrix::from_diag(&[0.0, 2.0])) < 1e-15);

        let c = sym(&[[2.0, 1.0], [1.0, 2.0]]);
        let (p, m) = pos_neg_split(&c, &tol()).unwrap();
        assert!(p.max_abs_diff(&c) < 1e-14);
        assert_eq!(m.max_abs(), 0.0);

        let (p, m) = pos_neg_split(&sym(&[[0.0, 1.0], [1.0, 0.0]]), &tol()).unwrap();
        assert!(p.max_abs_diff(&Matrix::from_rows(&[[0.5, 0.5], [0.5, 0.5]]).unwrap()) < 1e-15);
        assert!(m.max_abs_diff(&Matrix::from_rows(&[[0.5, -0.5], [-0.5, 0.5]]).unwrap()) < 1e-15);
    }

    #[test]
    fn projector_examples() {
        let t = tol();
        let p = projector_onto(&SubspaceBasis::span(2, &[vec![1.0, 0.0]], &t).unwrap());
        assert_eq!(p.as_matrix(), &Matrix::from_diag(&[1.0, 0.0]));
        let p = projector_onto(&SubspaceBasis::span(2, &[vec![1.0, 1.0]], &t).unwrap());
        assert!(p.max_abs_diff(&Matrix::from_rows(&[[0.5, 0.5], [0.5, 0.5]]).unwrap()) < 1e-15);
        let p = projector_onto(&image_basis(&SymMatrix::identity(3), &t).unwrap());
        assert_eq!(p.as_matrix(), &Matrix::identity(3));
    }
}
