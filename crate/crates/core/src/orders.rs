//! Decision procedures, with certificates, for the Löwner, minus, star,
//! left-star and right-star orders, plus adjacency.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::error::Result;
use crate::matrix::{Matrix, SymMatrix};
use crate::numkernel::{
    self, basis_from_eig, image_basis, image_basis_general, psd_from_eig, rank_from_eig,
    subspace_leq, sym_eig,
};
use crate::tol::ToleranceConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OrderRelation {
    Lowner,
    Minus,
    Star,
    LeftStar,
    RightStar,
}

impl OrderRelation {
    pub const ALL: [OrderRelation; 5] = [
        OrderRelation::Lowner,
        OrderRelation::Minus,
        OrderRelation::Star,
        OrderRelation::LeftStar,
        OrderRelation::RightStar,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OrderRelation::Lowner => "lowner",
            OrderRelation::Minus => "minus",
            OrderRelation::Star => "star",
            OrderRelation::LeftStar => "left-star",
            OrderRelation::RightStar => "right-star",
        }
    }

    pub fn parse(s: &str) -> Option<OrderRelation> {
        Self::ALL
            .into_iter()
            .find(|r| r.name() == s || r.name().replace('-', "_") == s)
    }
}

impl fmt::Display for OrderRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The three equivalent ways of deciding `A ≤⁻ B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MinusMethod {
    /// `rank(B - A) = rank(B) - rank(A)`.
    Rank,
    /// `Im B = Im A ⊕ Im(B - A)`.
    Image,
    /// `GA = GB` and `AG = BG` for an inner inverse `G` of `A`.
    Ginv,
}

impl MinusMethod {
    pub const ALL: [MinusMethod; 3] = [MinusMethod::Rank, MinusMethod::Image, MinusMethod::Ginv];

    pub fn name(self) -> &'static str {
        match self {
            MinusMethod::Rank => "rank",
            MinusMethod::Image => "image",
            MinusMethod::Ginv => "ginv",
        }
    }

    pub fn parse(s: &str) -> Option<MinusMethod> {
        Self::ALL.into_iter().find(|m| m.name() == s)
    }
}

/// Where `A` sits relative to `B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Comparison {
    Equal,
    /// `A ≤ B` and `A ≠ B`.
    StrictlyLess,
    /// `B ≤ A` and `A ≠ B`.
    StrictlyGreater,
    Incomparable,
}

impl Comparison {
    pub fn name(self) -> &'static str {
        match self {
            Comparison::Equal => "equal",
            Comparison::StrictlyLess => "strictly less",
            Comparison::StrictlyGreater => "strictly greater",
            Comparison::Incomparable => "incomparable",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Certificate {
    /// Smallest eigenvalue of `B - A`; when it is negative beyond slack,
    /// `vector` is a unit `x` with `xᵗ(B - A)x < 0`.
    PsdWitness {
        min_eig: f64,
        vector: Option<Vec<f64>>,
    },
    RankTriple {
        rank_a: usize,
        rank_b: usize,
        rank_diff: usize,
    },
    /// Dimensions of `Im A`, `Im B`, `Im(B - A)`, `Im A + Im(B - A)`.
    ImageSum {
        dim_a: usize,
        dim_b: usize,
        dim_diff: usize,
        dim_sum: usize,
        contained: bool,
    },
    /// `G` together with `‖AGA - A‖`, `‖GA - GB‖`, `‖AG - BG‖` (max norms).
    InnerInverse {
        g: Matrix,
        inner_residual: f64,
        left_residual: f64,
        right_residual: f64,
    },
    /// Max-norm residuals of the defining identities of a star-family order.
    Residuals {
        first: f64,
        second: Option<f64>,
        image_contained: Option<bool>,
        bound: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrderVerdict {
    pub holds: bool,
    pub relation: OrderRelation,
    pub method: Option<MinusMethod>,
    pub certificate: Certificate,
    pub comparison: Comparison,
    pub detail: String,
}

/// `max(1, ‖A‖_max, ‖B‖_max)`.
fn pair_scale(a: &SymMatrix, b: &SymMatrix) -> f64 {
    a.max_abs().max(b.max_abs()).max(1.0)
}

/// Matrices are equal when `‖A - B‖_max <= recon_tol * max(1, ‖A‖, ‖B‖)`.
pub fn approx_equal(a: &SymMatrix, b: &SymMatrix, tol: &ToleranceConfig) -> bool {
    a.dim() == b.dim() && a.max_abs_diff(b) <= tol.recon_tol * pair_scale(a, b)
}

fn lowner_decide(a: &SymMatrix, b: &SymMatrix, tol: &ToleranceConfig) -> Result<(bool, Certificate)> {
    a.check_same_dim(b)?;
    let d = b.sub(a)?;
    let e = sym_eig(&d, tol)?;
    let scale = a.max_abs().max(b.max_abs()).max(e.max_abs_value());
    let check = psd_from_eig(&e, scale, tol);
    Ok((
        check.is_psd,
        Certificate::PsdWitness {
            min_eig: check.min_eig,
            vector: check.witness,
        },
    ))
}

struct MinusSpectra {
    a: numkernel::EigDecomposition,
    b: numkernel::EigDecomposition,
    d: numkernel::EigDecomposition,
    scale: f64,
}

fn minus_spectra(a: &SymMatrix, b: &SymMatrix, tol: &ToleranceConfig) -> Result<MinusSpectra> {
    a.check_same_dim(b)?;
    let ea = sym_eig(a, tol)?;
    let eb = sym_eig(b, tol)?;
    let ed = sym_eig(&b.sub(a)?, tol)?;
    let scale = ea
        .max_abs_value()
        .max(eb.max_abs_value())
        .max(ed.max_abs_value());
    Ok(MinusSpectra {
        a: ea,
        b: eb,
        d: ed,
        scale,
    })
}

fn minus_decide(
    a: &SymMatrix,
    b: &SymMatrix,
    method: MinusMethod,
    tol: &ToleranceConfig,
) -> Result<(bool, Certificate)> {
    a.check_same_dim(b)?;
    match method {
        MinusMethod::Rank => {
            let s = minus_spectra(a, b, tol)?;
            let rank_a = rank_from_eig(&s.a, s.scale, tol);
            let rank_b = rank_from_eig(&s.b, s.scale, tol);
            let rank_diff = rank_from_eig(&s.d, s.scale, tol);
            Ok((
                rank_b.checked_sub(rank_a) == Some(rank_diff),
                Certificate::RankTriple {
                    rank_a,
                    rank_b,
                    rank_diff,
                },
            ))
        }
        MinusMethod::Image => {
            let s = minus_spectra(a, b, tol)?;
            let ua = basis_from_eig(&s.a, s.scale, tol);
            let ub = basis_from_eig(&s.b, s.scale, tol);
            let ud = basis_from_eig(&s.d, s.scale, tol);
            let (dim_a, dim_b, dim_diff) = (ua.dim(), ub.dim(), ud.dim());
            let joined = ua.vectors().hcat(ud.vectors())?;
            // Columns are orthonormal within each block, so singular values
            // of the concatenation live in [0, √2] and measure the angle
            // between Im A and Im(B - A).
            let dim_sum = if joined.cols() == 0 {
                0
            } else {
                numkernel::svd(&joined, tol)?
                    .sigma
                    .iter()
                    .filter(|&&x| x > tol.recon_tol)
                    .count()
            };
            let contained = subspace_leq(&ua, &ub, tol)? && subspace_leq(&ud, &ub, tol)?;
            let holds = contained && dim_sum == dim_a + dim_diff && dim_sum == dim_b;
            Ok((
                holds,
                Certificate::ImageSum {
                    dim_a,
                    dim_b,
                    dim_diff,
                    dim_sum,
                    contained,
                },
            ))
        }
        MinusMethod::Ginv => {
            // G = B⁺ A B⁺ is an inner inverse of A satisfying GA = GB and
            // AG = BG exactly when A ≤⁻ B.
            let bp = numkernel::pinv(b, tol)?;
            let g = bp.mul(a).mul(&bp);
            let am = a.as_matrix();
            let bm = b.as_matrix();
            let n = a.dim() as f64;
            let inner_residual = am.mul(&g).mul(am).max_abs_diff(am);
            let left_residual = g.mul(am).max_abs_diff(&g.mul(bm));
            let right_residual = am.mul(&g).max_abs_diff(&bm.mul(&g));
            let inner_bound = tol.recon_tol * n * am.max_abs();
            let side_bound = tol.recon_tol * n * g.max_abs() * am.max_abs().max(bm.max_abs());
            let holds = inner_residual <= inner_bound
                && left_residual <= side_bound
                && right_residual <= side_bound;
            Ok((
                holds,
                Certificate::InnerInverse {
                    g,
                    inner_residual,
                    left_residual,
                    right_residual,
                },
            ))
        }
    }
}

fn image_leq(a: &SymMatrix, b: &SymMatrix, tol: &ToleranceConfig) -> Result<bool> {
    subspace_leq(&image_basis(a, tol)?, &image_basis(b, tol)?, tol)
}

fn star_decide(
    a: &SymMatrix,
    b: &SymMatrix,
    relation: OrderRelation,
    tol: &ToleranceConfig,
) -> Result<(bool, Certificate)> {
    a.check_same_dim(b)?;
    let am = a.as_matrix();
    let bm = b.as_matrix();
    let at = am.transpose();
    let bt = bm.transpose();
    let bound = tol.recon_tol * a.dim() as f64 * am.max_abs() * am.max_abs().max(bm.max_abs());
    let (first, second, image_contained) = match relation {
        OrderRelation::Star => {
            // AᵗA = AᵗB and AAᵗ = BAᵗ
            let r1 = at.mul(am).max_abs_diff(&at.mul(bm));
            let r2 = am.mul(&at).max_abs_diff(&bm.mul(&at));
            (r1, Some(r2), None)
        }
        OrderRelation::LeftStar => {
            // AᵗA = AᵗB and Im A ⊆ Im B
            let r1 = at.mul(am).max_abs_diff(&at.mul(bm));
            (r1, None, Some(image_leq(a, b, tol)?))
        }
        OrderRelation::RightStar => {
            // AAᵗ = ABᵗ and Im Aᵗ ⊆ Im Bᵗ
            let r1 = am.mul(&at).max_abs_diff(&am.mul(&bt));
            let contained = subspace_leq(
                &image_basis_general(&at, tol)?,
                &image_basis_general(&bt, tol)?,
                tol,
            )?;
            (r1, None, Some(contained))
        }
        OrderRelation::Lowner | OrderRelation::Minus => {
            unreachable!("star_decide called for {relation}")
        }
    };
    let holds = first <= bound && second.is_none_or(|r| r <= bound) && image_contained != Some(false);
    Ok((
        holds,
        Certificate::Residuals {
            first,
            second,
            image_contained,
            bound,
        },
    ))
}

fn decide(
    a: &SymMatrix,
    b: &SymMatrix,
    relation: OrderRelation,
    method: MinusMethod,
    tol: &ToleranceConfig,
) -> Result<(bool, Certificate)> {
    match relation {
        OrderRelation::Lowner => lowner_decide(a, b, tol),
        OrderRelation::Minus => minus_decide(a, b, method, tol),
        _ => star_decide(a, b, relation, tol),
    }
}

fn verdict(
    a: &SymMatrix,
    b: &SymMatrix,
    relation: OrderRelation,
    method: MinusMethod,
    tol: &ToleranceConfig,
) -> Result<OrderVerdict> {
    let (holds, certificate) = decide(a, b, relation, method, tol)?;
    let comparison = if holds {
        if approx_equal(a, b, tol) {
            Comparison::Equal
        } else {
            Comparison::StrictlyLess
        }
    } else if decide(b, a, relation, method, tol)?.0 {
        Comparison::StrictlyGreater
    } else {
        Comparison::Incomparable
    };
    let detail = format!(
        "A {} B under the {} order: {}",
        if holds { "<=" } else { "is not <=" },
        relation,
        comparison.name()
    );
    Ok(OrderVerdict {
        holds,
        relation,
        method: (relation == OrderRelation::Minus).then_some(method),
        certificate,
        comparison,
        detail,
    })
}

/// `A ≤ᴸ B` iff `B - A` is PSD. The slack is `psd_tol` times the largest of
/// `‖A‖_max`, `‖B‖_max` and `max|λ(B - A)|`.
pub fn lowner_leq(a: &SymMatrix, b: &SymMatrix, tol: &ToleranceConfig) -> Result<OrderVerdict> {
    verdict(a, b, OrderRelation::Lowner, MinusMethod::Rank, tol)
}

/// `A ≤⁻ B` by the chosen characterization. All three ranks / images share
/// one cutoff, relative to the largest eigenvalue magnitude among `A`, `B`
/// and `B - A`.
pub fn minus_leq(
    a: &SymMatrix,
    b: &SymMatrix,
    method: MinusMethod,
    tol: &ToleranceConfig,
) -> Result<OrderVerdict> {
    verdict(a, b, OrderRelation::Minus, method, tol)
}

/// Star, left-star or right-star order. Panics if `variant` is not one of
/// the three.
pub fn star_family_leq(
    a: &SymMatrix,
    b: &SymMatrix,
    variant: OrderRelation,
    tol: &ToleranceConfig,
) -> Result<OrderVerdict> {
    assert!(
        matches!(
            variant,
            OrderRelation::Star | OrderRelation::LeftStar | OrderRelation::RightStar
        ),
        "not a star-family relation: {variant}"
    );
    verdict(a, b, variant, MinusMethod::Rank, tol)
}

/// Any of the five relations; minus uses the rank characterization.
pub fn order_leq(
    a: &SymMatrix,
    b: &SymMatrix,
    relation: OrderRelation,
    tol: &ToleranceConfig,
) -> Result<OrderVerdict> {
    verdict(a, b, relation, MinusMethod::Rank, tol)
}

/// Verdict only, skipping the reverse comparison.
pub fn holds(
    a: &SymMatrix,
    b: &SymMatrix,
    relation: OrderRelation,
    tol: &ToleranceConfig,
) -> Result<bool> {
    Ok(decide(a, b, relation, MinusMethod::Rank, tol)?.0)
}

/// `rank(A - B) = 1`, with the cutoff relative to the operands.
pub fn adjacent(a: &SymMatrix, b: &SymMatrix, tol: &ToleranceConfig) -> Result<bool> {
    a.check_same_dim(b)?;
    let d = a.sub(b)?;
    let scale = a.max_abs().max(b.max_abs());
    Ok(numkernel::numerical_rank_scaled(&d, scale, tol)? == 1)
}

/// For a rank-one PSD `A` and `B ≤ᴸ A`, returns `λ = tr(B)/tr(A) ∈ [0, 1]`
/// with `B = λA`. Returns `None` when `A` is not rank one, `B ≰ᴸ A`, or the
/// residual `‖B - λA‖_max` exceeds `recon_tol * max(1, ‖A‖, ‖B‖)`.
pub fn scalar_below_rank_one(
    a: &SymMatrix,
    b: &SymMatrix,
    tol: &ToleranceConfig,
) -> Result<Option<f64>> {
    a.check_same_dim(b)?;
    if numkernel::numerical_rank(a, tol)? != 1 || !lowner_decide(b, a, tol)?.0 {
        return Ok(None);
    }
    let lambda = (b.trace() / a.trace()).clamp(0.0, 1.0);
    let residual = b.max_abs_diff(&a.scale(lambda));
    Ok((residual <= tol.recon_tol * pair_scale(a, b)).then_some(lambda))
}
