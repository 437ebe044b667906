//! Linear models `(y, Xβ, σ²D)`: efficiency-matrix comparison, BLUE
//! verification, and independence of quadratic forms with a Monte Carlo check.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::canonical::{sim_congruence, SimCongResult};
use crate::error::{Error, Result};
use crate::matrix::{Matrix, PsdMatrix, SymMatrix};
use crate::numkernel::{self, image_basis_general, inner_ginverse, numerical_rank, subspace_leq, sym_eig};
use crate::orders::{lowner_leq, minus_leq, MinusMethod, OrderVerdict};
use crate::sampling::{stream_rng, NormalStream};
use crate::special::{chi2_cdf, ks_distance};
use crate::tol::ToleranceConfig;

/// Samples drawn per shard in [`mc_quadratic_forms`]; shard `k` uses
/// `stream_rng(seed, k)`.
pub const MC_SHARD: usize = 8192;

#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    pub x: Matrix,
    pub d: PsdMatrix,
    pub sigma2: f64,
    pub label: String,
}

impl LinearModel {
    pub fn new(x: Matrix, d: PsdMatrix, sigma2: f64, label: impl Into<String>) -> Result<Self> {
        x.check_finite()?;
        if x.rows() != d.dim() {
            return Err(Error::DimensionMismatch {
                expected: (d.dim(), x.cols()),
                found: x.shape(),
            });
        }
        if !(sigma2.is_finite() && sigma2 >= 0.0) {
            return Err(Error::PreconditionViolated("sigma2 must be finite and nonnegative"));
        }
        Ok(Self {
            x,
            d,
            sigma2,
            label: label.into(),
        })
    }

    /// Number of observations.
    pub fn n(&self) -> usize {
        self.x.rows()
    }

    /// Number of parameters.
    pub fn p(&self) -> usize {
        self.x.cols()
    }

    /// `σ²D`.
    pub fn covariance(&self) -> PsdMatrix {
        PsdMatrix::assume_psd(self.d.scale(self.sigma2))
    }
}

fn sandwich(x: &Matrix, g: &Matrix, tol: &ToleranceConfig) -> Result<PsdMatrix> {
    let (m, _) = SymMatrix::symmetrized(x.transpose().mul(g).mul(x))?;
    PsdMatrix::certify(m, tol)
}

fn d_plus_xxt(model: &LinearModel) -> SymMatrix {
    model
        .d
        .add(&SymMatrix::gram(&model.x))
        .expect("D and XXᵗ are both n x n")
}

/// `M = Xᵗ (D + XXᵗ)⁺ X`. `σ²` is a common factor of both models in a
/// comparison and is not part of `M`.
pub fn efficiency_matrix(model: &LinearModel, tol: &ToleranceConfig) -> Result<PsdMatrix> {
    let g = numkernel::pinv(&d_plus_xxt(model), tol)?;
    sandwich(&model.x, &g, tol)
}

/// `M` with the random inner inverse `inner_ginverse(D + XXᵗ, seed)` in place
/// of the pseudoinverse. Agrees with [`efficiency_matrix`] because
/// `Im X ⊆ Im(D + XXᵗ)`.
pub fn efficiency_matrix_with_seed(
    model: &LinearModel,
    seed: u64,
    tol: &ToleranceConfig,
) -> Result<PsdMatrix> {
    let g = inner_ginverse(&d_plus_xxt(model), seed, tol)?;
    sandwich(&model.x, &g, tol)
}

/// `XᵗD⁺X`, defined when `Im X ⊆ Im D`. It is a different matrix from
/// [`efficiency_matrix`] but induces the same comparison; for a square model
/// with `X = D` it equals `D`.
pub fn efficiency_matrix_reduced(model: &LinearModel, tol: &ToleranceConfig) -> Result<PsdMatrix> {
    let contained = subspace_leq(
        &image_basis_general(&model.x, tol)?,
        &numkernel::image_basis(&model.d, tol)?,
        tol,
    )?;
    if !contained {
        return Err(Error::PreconditionViolated("Im X must lie in Im D"));
    }
    let g = numkernel::pinv(&model.d, tol)?;
    sandwich(&model.x, &g, tol)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonVerdict {
    pub l1_geq_l2: bool,
    pub l2_geq_l1: bool,
    pub m1: PsdMatrix,
    pub m2: PsdMatrix,
    /// `M₂ ≤ᴸ M₁`.
    pub m2_leq_m1: OrderVerdict,
    /// `M₁ ≤ᴸ M₂`.
    pub m1_leq_m2: OrderVerdict,
}

/// `L₁ ⪰ L₂` iff `M₂ ≤ᴸ M₁`. The models must share `p`.
pub fn model_compare(
    l1: &LinearModel,
    l2: &LinearModel,
    tol: &ToleranceConfig,
) -> Result<ComparisonVerdict> {
    if l1.p() != l2.p() {
        return Err(Error::DimensionMismatch {
            expected: (l1.n(), l1.p()),
            found: (l2.n(), l2.p()),
        });
    }
    let m1 = efficiency_matrix(l1, tol)?;
    let m2 = efficiency_matrix(l2, tol)?;
    let m2_leq_m1 = lowner_leq(&m2, &m1, tol)?;
    let m1_leq_m2 = lowner_leq(&m1, &m2, tol)?;
    Ok(ComparisonVerdict {
        l1_geq_l2: m2_leq_m1.holds,
        l2_geq_l1: m1_leq_m2.holds,
        m1,
        m2,
        m2_leq_m1,
        m1_leq_m2,
    })
}

/// `V(Ly) = σ² L D Lᵗ`.
pub fn estimator_covariance(
    l: &Matrix,
    model: &LinearModel,
    tol: &ToleranceConfig,
) -> Result<PsdMatrix> {
    if l.cols() != model.n() {
        return Err(Error::DimensionMismatch {
            expected: (l.rows(), model.n()),
            found: l.shape(),
        });
    }
    l.check_finite()?;
    let (c, _) = SymMatrix::symmetrized(l.mul(&model.d).mul(&l.transpose()).scale(model.sigma2))?;
    PsdMatrix::certify(c, tol)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlueVerdict {
    /// `LX = X`.
    pub cond_i: bool,
    /// `‖LX - X‖_max`.
    pub unbiasedness_residual: f64,
    /// `Im(LD) ⊆ Im X`.
    pub cond_ii: bool,
    pub dim_image_ld: usize,
    pub dim_image_x: usize,
    /// `V(Ly)` and `V(y)` are simultaneously congruent to `(E_r, E_s)` with
    /// `r < s`.
    pub cond_iii: bool,
    pub sim_cong: Option<SimCongResult>,
    /// Why the reduction failed, when it did.
    pub sim_cong_error: Option<String>,
    pub is_blue: bool,
}

/// Checks the three conditions characterizing `Ly` as the BLUE of `Xβ`.
/// `L` is `n x n`. The case `V(Ly) = V(y)` (within `recon_tol`) is outside
/// the characterization and is rejected with `PreconditionViolated`.
pub fn blue_check(l: &Matrix, model: &LinearModel, tol: &ToleranceConfig) -> Result<BlueVerdict> {
    let n = model.n();
    if l.shape() != (n, n) {
        return Err(Error::DimensionMismatch {
            expected: (n, n),
            found: l.shape(),
        });
    }
    let v_ly = estimator_covariance(l, model, tol)?;
    let v_y = model.covariance();
    if crate::orders::approx_equal(&v_ly, &v_y, tol) {
        return Err(Error::PreconditionViolated("V(Ly) equals V(y)"));
    }

    let x = &model.x;
    let lx = l.mul(x);
    let unbiasedness_residual = lx.max_abs_diff(x);
    let bound = tol.recon_tol * n as f64 * (l.max_abs() * x.max_abs()).max(x.max_abs()).max(1.0);
    let cond_i = unbiasedness_residual <= bound;

    let im_ld = image_basis_general(&l.mul(&model.d), tol)?;
    let im_x = image_basis_general(x, tol)?;
    let cond_ii = subspace_leq(&im_ld, &im_x, tol)?;

    let (sim_cong, sim_cong_error) = match sim_congruence(&v_ly, &v_y, tol) {
        Ok(res) => (Some(res), None),
        Err(e @ Error::NotMinusComparable { .. }) => (None, Some(e.to_string())),
        Err(e) => return Err(e),
    };
    let cond_iii = sim_cong.as_ref().is_some_and(|r| r.r < r.s);
    Ok(BlueVerdict {
        cond_i,
        unbiasedness_residual,
        cond_ii,
        dim_image_ld: im_ld.dim(),
        dim_image_x: im_x.dim(),
        cond_iii,
        sim_cong,
        sim_cong_error,
        is_blue: cond_i && cond_ii && cond_iii,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct QFormEntry {
    /// `rank(WᵗAᵢW)`.
    pub rank: usize,
    /// `WᵗAᵢW ≤⁻ WᵗAW` by the rank characterization.
    pub minus: OrderVerdict,
    pub sim_cong: Option<SimCongResult>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QFormReport {
    /// `W = (V : μ)`, `n x (n+1)`.
    pub w: Matrix,
    pub forms: Vec<QFormEntry>,
    /// `rank(WᵗAW)` with `A = ΣAᵢ`.
    pub s: usize,
    pub overall: bool,
}

fn check_forms(forms: &[PsdMatrix], v: &PsdMatrix, mu: &[f64]) -> Result<usize> {
    let n = v.dim();
    if forms.is_empty() {
        return Err(Error::PreconditionViolated("at least one form is required"));
    }
    if mu.len() != n {
        return Err(Error::DimensionMismatch {
            expected: (n, 1),
            found: (mu.len(), 1),
        });
    }
    for a in forms {
        if a.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: (n, n),
                found: (a.dim(), a.dim()),
            });
        }
    }
    Ok(n)
}

/// Rank criterion for independent chi-squared quadratic forms: every
/// `WᵗAᵢW` must sit below `WᵗAW` in the minus order.
pub fn qform_rank_criterion(
    forms: &[PsdMatrix],
    v: &PsdMatrix,
    mu: &[f64],
    tol: &ToleranceConfig,
) -> Result<QFormReport> {
    let n = check_forms(forms, v, mu)?;
    let w = v.hcat(&Matrix::column_vector(mu))?;
    let wt = w.transpose();
    let compress = |a: &SymMatrix| PsdMatrix::assume_psd(SymMatrix::from_product(wt.mul(a).mul(&w)));

    let mut total = SymMatrix::zeros(n);
    for a in forms {
        total = total.add(a)?;
    }
    let big = compress(&total);
    let s = numerical_rank(&big, tol)?;

    let mut entries = Vec::with_capacity(forms.len());
    for a in forms {
        let small = compress(a);
        let minus = minus_leq(&small, &big, MinusMethod::Rank, tol)?;
        let sim_cong = match sim_congruence(&small, &big, tol) {
            Ok(res) => Some(res),
            Err(Error::NotMinusComparable { .. }) => None,
            Err(e) => return Err(e),
        };
        let rank = match &minus.certificate {
            crate::orders::Certificate::RankTriple { rank_a, .. } => *rank_a,
            _ => numerical_rank(&small, tol)?,
        };
        entries.push(QFormEntry {
            rank,
            minus,
            sim_cong,
        });
    }
    let overall = entries.iter().all(|e| e.minus.holds);
    Ok(QFormReport {
        w,
        forms: entries,
        s,
        overall,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct McReport {
    pub n_samples: usize,
    /// `rank(V^{1/2} Aᵢ V^{1/2})`, the degrees of freedom each form is tested
    /// against.
    pub df: Vec<usize>,
    pub means: Vec<f64>,
    /// Pearson correlations of the `Qᵢ`; a constant form correlates 0 with
    /// everything else.
    pub correlations: Matrix,
    pub max_abs_correlation: f64,
    /// KS distance of each `Qᵢ` to the central `χ²(dfᵢ)` CDF.
    pub ks: Vec<f64>,
}

/// Draws `x ~ N(μ, V)` as `μ + V^{1/2} z` and reports correlations of
/// `Qᵢ = xᵗAᵢx` and their KS distances to `χ²(dfᵢ)`. Samples are generated in
/// shards of [`MC_SHARD`]; shard `k` uses `stream_rng(seed, k)`.
pub fn mc_quadratic_forms(
    forms: &[PsdMatrix],
    v: &PsdMatrix,
    mu: &[f64],
    n_samples: usize,
    seed: u64,
    tol: &ToleranceConfig,
) -> Result<McReport> {
    let n = check_forms(forms, v, mu)?;
    if n_samples < 2 {
        return Err(Error::PreconditionViolated("at least two samples are required"));
    }
    let ev = sym_eig(v, tol)?;
    let root = ev.map_spectrum(|l| libm::sqrt(l.max(0.0)));
    let df = forms
        .iter()
        .map(|a| numerical_rank(&SymMatrix::from_product(root.mul(a).mul(&root)), tol))
        .collect::<Result<Vec<_>>>()?;

    let k = forms.len();
    let mut q: Vec<Vec<f64>> = vec![Vec::with_capacity(n_samples); k];
    let mut z = vec![0.0; n];
    let mut x = vec![0.0; n];
    let shards = n_samples.div_ceil(MC_SHARD);
    for shard in 0..shards {
        let mut normal = NormalStream::new(stream_rng(seed, shard as u64));
        let count = MC_SHARD.min(n_samples - shard * MC_SHARD);
        for _ in 0..count {
            normal.fill(&mut z);
            for i in 0..n {
                x[i] = mu[i] + (0..n).map(|j| root[(i, j)] * z[j]).sum::<f64>();
            }
            for (qi, a) in q.iter_mut().zip(forms) {
                qi.push(a.quad_form(&x));
            }
        }
    }

    let ns = n_samples as f64;
    let means: Vec<f64> = q.iter().map(|s| s.iter().sum::<f64>() / ns).collect();
    let sd: Vec<f64> = q
        .iter()
        .zip(&means)
        .map(|(s, m)| libm::sqrt(s.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / ns))
        .collect();
    let mut correlations = Matrix::identity(k);
    let mut max_abs_correlation: f64 = 0.0;
    for i in 0..k {
        for j in i + 1..k {
            let c = if sd[i] > 0.0 && sd[j] > 0.0 {
                let cov = q[i]
                    .iter()
                    .zip(&q[j])
                    .map(|(a, b)| (a - means[i]) * (b - means[j]))
                    .sum::<f64>()
                    / ns;
                cov / (sd[i] * sd[j])
            } else {
                0.0
            };
            correlations[(i, j)] = c;
            correlations[(j, i)] = c;
            max_abs_correlation = max_abs_correlation.max(c.abs());
        }
    }
    let ks = q
        .iter_mut()
        .zip(&df)
        .map(|(s, &d)| ks_distance(s, |t| chi2_cdf(d, t)))
        .collect();
    Ok(McReport {
        n_samples,
        df,
        means,
        correlations,
        max_abs_correlation,
        ks,
    })
}
