//! Sylvester inertia, congruence canonical forms, and the constructive
//! simultaneous congruence of a minus-comparable PSD pair to `(E_r, E_s)`.

use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result, SimCongStage};
use crate::matrix::{Matrix, PsdMatrix, SymMatrix};
use crate::numkernel::sym_eig;
use crate::tol::ToleranceConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Inertia {
    pub n_plus: usize,
    pub n_minus: usize,
    pub n_zero: usize,
}

impl Inertia {
    pub fn dim(&self) -> usize {
        self.n_plus + self.n_minus + self.n_zero
    }

    pub fn rank(&self) -> usize {
        self.n_plus + self.n_minus
    }
}

impl fmt::Display for Inertia {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.n_plus, self.n_minus, self.n_zero)
    }
}

/// `S` with `A ≈ S E_r Sᵗ` and `B ≈ S E_s Sᵗ`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimCongResult {
    pub transform: Matrix,
    pub r: usize,
    pub s: usize,
    /// `‖A - S E_r Sᵗ‖_max`.
    pub residual_a: f64,
    /// `‖B - S E_s Sᵗ‖_max`.
    pub residual_b: f64,
}

/// `diag(1, …, 1, 0, …, 0)` with `k` ones.
pub fn canonical_ek(n: usize, k: usize) -> Result<PsdMatrix> {
    if k > n {
        return Err(Error::OutOfRange { k, n });
    }
    let d: Vec<f64> = (0..n).map(|i| if i < k { 1.0 } else { 0.0 }).collect();
    Ok(PsdMatrix::assume_psd(SymMatrix::diag(&d)))
}

/// `diag(I_p, -I_q, 0)` of dimension `p + q + z`.
pub fn signature_matrix(inertia: Inertia) -> SymMatrix {
    let d: Vec<f64> = (0..inertia.dim())
        .map(|i| {
            if i < inertia.n_plus {
                1.0
            } else if i < inertia.rank() {
                -1.0
            } else {
                0.0
            }
        })
        .collect();
    SymMatrix::diag(&d)
}

fn inertia_of(values: &[f64], cut: f64) -> Inertia {
    Inertia {
        n_plus: values.iter().filter(|&&l| l > cut).count(),
        n_minus: values.iter().filter(|&&l| l < -cut).count(),
        n_zero: values.iter().filter(|&&l| l.abs() <= cut).count(),
    }
}

/// Counts of eigenvalues above `+cutoff`, below `-cutoff`, and in between,
/// with the cutoff relative to `max|λ|`.
pub fn inertia(a: &SymMatrix, tol: &ToleranceConfig) -> Result<Inertia> {
    let e = sym_eig(a, tol)?;
    let cut = tol.rank_cutoff(e.dim(), e.max_abs_value());
    Ok(inertia_of(&e.values, cut))
}

/// `S` invertible with `A = S diag(I_p, -I_q, 0) Sᵗ`, where column `k` of `S`
/// is `|λ_k|^{1/2} q_k` for the nonzero eigenpairs and `q_k` otherwise.
/// Columns are ordered positive, negative, zero.
pub fn congruence_canonical(a: &SymMatrix, tol: &ToleranceConfig) -> Result<(Matrix, Inertia)> {
    let e = sym_eig(a, tol)?;
    let n = e.dim();
    let cut = tol.rank_cutoff(n, e.max_abs_value());
    let inertia = inertia_of(&e.values, cut);
    // Eigenvalues arrive sorted descending: positives, zeros, negatives.
    let mut order: Vec<usize> = (0..inertia.n_plus).collect();
    order.extend(n - inertia.n_minus..n);
    order.extend(inertia.n_plus..n - inertia.n_minus);
    let mut s = Matrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let lam = e.values[src];
        let w = if lam.abs() > cut { libm::sqrt(lam.abs()) } else { 1.0 };
        let q: Vec<f64> = e.vector(src).iter().map(|x| w * x).collect();
        s.set_column(dst, &q);
    }
    Ok((s, inertia))
}

fn reject(stage: SimCongStage, residual: f64) -> Error {
    Error::NotMinusComparable { stage, residual }
}

/// Simultaneous congruence of a PSD pair with `A ≤⁻ B` to `(E_r, E_s)`.
///
/// 1. `B = Q diag(λ) Qᵗ`, `s = rank B`, `V = diag(λ₁^{-1/2}, …, λ_s^{-1/2}, 1, …) Qᵗ`
///    so `V B Vᵗ = E_s`.
/// 2. `A₁ = V A Vᵗ`; its trailing `(n-s)` block `NᵗAN` must vanish. For PSD
///    `A` that forces `AN = 0`, i.e. `Im A ⊆ Im B`.
/// 3. The leading `s x s` block `Ã₁` must be idempotent.
/// 4. `Ã₁ = W diag(μ) Wᵗ` with every `μ` within `idem_tol` of 0 or 1; `r`
///    counts the ones and `U = Wᵗ`.
/// 5. `S = (Z V)⁻¹ = Q diag(λ^{1/2}, 1) diag(W, I)`, formed without inversion.
/// 6. Both reconstructions are checked against `recon_tol * scale`.
///
/// `scale` is `max(λ_max(B), ‖A‖_max)`. A numerically zero `A` yields `r = 0`.
/// Any failed check gives `NotMinusComparable` naming the step.
pub fn sim_congruence(a: &PsdMatrix, b: &PsdMatrix, tol: &ToleranceConfig) -> Result<SimCongResult> {
    a.check_same_dim(b)?;
    let n = a.dim();
    let eb = sym_eig(b, tol)?;
    let scale = eb.max_abs_value().max(a.max_abs());
    let cut = tol.rank_cutoff(n, scale);
    let s = eb.values.iter().filter(|&&l| l > cut).count();

    // Step 1. V has row k equal to w_k q_kᵗ.
    let w: Vec<f64> = (0..n)
        .map(|k| if k < s { 1.0 / libm::sqrt(eb.values[k]) } else { 1.0 })
        .collect();
    let v = Matrix::from_fn(n, n, |k, j| w[k] * eb.vectors[(j, k)]);

    // Step 2.
    let a1 = v.mul(a).mul(&v.transpose());
    let trailing = a1.block(s, s, n - s, n - s).max_abs();
    // Entries of the trailing block are qᵢᵗAqⱼ, on the scale of A itself.
    if trailing > tol.recon_tol * scale {
        return Err(reject(SimCongStage::ImageContainment, trailing));
    }

    let a_is_zero = a.max_abs() <= cut;
    let (wmat, r) = if a_is_zero || s == 0 {
        (Matrix::identity(s), 0)
    } else {
        // Step 3.
        let (block, asym) = SymMatrix::symmetrized(a1.block(0, 0, s, s))?;
        let bscale = block.max_abs().max(1.0);
        if asym > tol.idem_tol * bscale {
            return Err(reject(SimCongStage::Idempotency, asym));
        }
        let idem = block.mul(&block).max_abs_diff(&block);
        if idem > tol.idem_tol * bscale {
            return Err(reject(SimCongStage::Idempotency, idem));
        }
        // Step 4.
        let eu = sym_eig(&block, tol)?;
        let mut r = 0;
        for &mu in &eu.values {
            if (mu - 1.0).abs() <= tol.idem_tol {
                r += 1;
            } else if mu.abs() > tol.idem_tol {
                let off = (mu - 1.0).abs().min(mu.abs());
                return Err(reject(SimCongStage::SpectrumClustering, off));
            }
        }
        (eu.vectors, r)
    };

    // Step 5.
    let root: Vec<f64> = (0..n)
        .map(|k| if k < s { libm::sqrt(eb.values[k]) } else { 1.0 })
        .collect();
    let qd = Matrix::from_fn(n, n, |i, k| eb.vectors[(i, k)] * root[k]);
    let z_inv = Matrix::from_fn(n, n, |i, j| {
        if i < s && j < s {
            wmat[(i, j)]
        } else if i == j {
            1.0
        } else {
            0.0
        }
    });
    let transform = qd.mul(&z_inv);

    // Step 6.
    let er = canonical_ek(n, r)?;
    let es = canonical_ek(n, s)?;
    let residual_a = transform.congruence(&er)?.max_abs_diff(a);
    let residual_b = transform.congruence(&es)?.max_abs_diff(b);
    let bound = tol.recon_tol * scale;
    if residual_a > bound || residual_b > bound {
        return Err(reject(
            SimCongStage::Reconstruction,
            residual_a.max(residual_b),
        ));
    }
    Ok(SimCongResult {
        transform,
        r,
        s,
        residual_a,
        residual_b,
    })
}
