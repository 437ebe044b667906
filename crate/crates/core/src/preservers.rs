//! Maps on the PSD cone, empirical both-directions order preservation, and
//! recovery of `S` from samples of a congruence map `A ↦ SASᵗ`.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use rand::Rng;

use crate::canonical::canonical_ek;
use crate::error::{Error, Result};
use crate::matrix::{Matrix, PsdMatrix, SymMatrix};
use crate::numkernel::{self, ensure_invertible, numerical_rank, sym_eig};
use crate::orders::{self, OrderRelation};
use crate::sampling::{conditioned_matrix, random_orthogonal, random_projector, random_psd, stream_rng};
use crate::tol::ToleranceConfig;

/// Condition number bound for the congruence factors built by the pair
/// sampler.
pub const SAMPLER_COND: f64 = 10.0;

/// Seed of the random projectors used by [`projector_fixed_point_suite`].
pub const PROJECTOR_SEED: u64 = 0x5eed;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapKind {
    Congruence,
    /// `A ↦ A + tr(A) I`.
    TraceInflation,
    /// `A ↦ tr(A) E₁₁`.
    RankCollapse,
    Custom,
}

impl MapKind {
    pub fn name(self) -> &'static str {
        match self {
            MapKind::Congruence => "congruence",
            MapKind::TraceInflation => "trace-inflation",
            MapKind::RankCollapse => "rank-collapse",
            MapKind::Custom => "custom",
        }
    }
}

type MapFn = Arc<dyn Fn(&SymMatrix) -> SymMatrix + Send + Sync>;

#[derive(Clone)]
pub struct MatrixMap {
    kind: MapKind,
    transform: Option<Matrix>,
    custom: Option<MapFn>,
}

impl fmt::Debug for MatrixMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MatrixMap")
            .field("kind", &self.kind)
            .field("transform", &self.transform)
            .finish_non_exhaustive()
    }
}

/// `A ↦ SASᵗ`. Fails with `SingularMatrix` unless `σ_min(S)` clears the
/// rank cutoff.
pub fn congruence_map(s: Matrix, tol: &ToleranceConfig) -> Result<MatrixMap> {
    s.check_finite()?;
    ensure_invertible(&s, tol)?;
    Ok(MatrixMap {
        kind: MapKind::Congruence,
        transform: Some(s),
        custom: None,
    })
}

pub fn identity_map(n: usize) -> MatrixMap {
    MatrixMap {
        kind: MapKind::Congruence,
        transform: Some(Matrix::identity(n)),
        custom: None,
    }
}

pub fn trace_inflation() -> MatrixMap {
    MatrixMap {
        kind: MapKind::TraceInflation,
        transform: None,
        custom: None,
    }
}

pub fn rank_collapse() -> MatrixMap {
    MatrixMap {
        kind: MapKind::RankCollapse,
        transform: None,
        custom: None,
    }
}

/// Wraps an arbitrary function. The caller is responsible for it mapping
/// into the PSD cone; [`MatrixMap::apply_psd`] re-certifies.
pub fn custom_map(f: impl Fn(&SymMatrix) -> SymMatrix + Send + Sync + 'static) -> MatrixMap {
    MatrixMap {
        kind: MapKind::Custom,
        transform: None,
        custom: Some(Arc::new(f)),
    }
}

impl MatrixMap {
    pub fn kind(&self) -> MapKind {
        self.kind
    }

    /// `S` for congruence maps.
    pub fn transform(&self) -> Option<&Matrix> {
        self.transform.as_ref()
    }

    pub fn apply(&self, a: &SymMatrix) -> SymMatrix {
        match self.kind {
            MapKind::Congruence => {
                let s = self.transform.as_ref().expect("congruence map carries S");
                SymMatrix::from_product(s.mul(a).mul(&s.transpose()))
            }
            MapKind::TraceInflation => a
                .add(&SymMatrix::identity(a.dim()).scale(a.trace()))
                .expect("same dimension"),
            MapKind::RankCollapse => {
                let mut e = SymMatrix::zeros(a.dim());
                if a.dim() > 0 {
                    e = canonical_ek(a.dim(), 1).expect("k <= n").into_sym();
                }
                e.scale(a.trace())
            }
            MapKind::Custom => (self.custom.as_ref().expect("custom map carries f"))(a),
        }
    }

    /// Applies the map and re-certifies the image as PSD. The built-in kinds
    /// preserve the cone, so only custom maps can fail here.
    pub fn apply_psd(&self, a: &PsdMatrix, tol: &ToleranceConfig) -> Result<PsdMatrix> {
        let image = self.apply(a);
        match self.kind {
            MapKind::Custom => PsdMatrix::certify(image, tol),
            _ => Ok(PsdMatrix::assume_psd(image)),
        }
    }

    /// `A ↦ S⁻¹ A S⁻ᵗ` for congruence maps, `None` otherwise.
    pub fn inverse(&self, tol: &ToleranceConfig) -> Result<Option<MatrixMap>> {
        match (self.kind, &self.transform) {
            (MapKind::Congruence, Some(s)) => {
                Ok(Some(congruence_map(numkernel::inverse(s, tol)?, tol)?))
            }
            _ => Ok(None),
        }
    }
}

/// A pair on which an implication failed.
#[derive(Debug, Clone, PartialEq)]
pub struct Counterexample {
    pub trial: usize,
    pub a: SymMatrix,
    pub b: SymMatrix,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PreservationVerdict {
    PreservesBoth,
    Fails,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PreservationReport {
    pub relation: OrderRelation,
    pub trials: usize,
    pub forward_failures: Vec<Counterexample>,
    pub backward_failures: Vec<Counterexample>,
    pub verdict: PreservationVerdict,
}

impl PreservationReport {
    fn new(
        relation: OrderRelation,
        trials: usize,
        forward_failures: Vec<Counterexample>,
        backward_failures: Vec<Counterexample>,
    ) -> Self {
        let verdict = if forward_failures.is_empty() && backward_failures.is_empty() {
            PreservationVerdict::PreservesBoth
        } else {
            PreservationVerdict::Fails
        };
        Self {
            relation,
            trials,
            forward_failures,
            backward_failures,
            verdict,
        }
    }

    pub fn preserves_both(&self) -> bool {
        self.verdict == PreservationVerdict::PreservesBoth
    }
}

/// Which recipe produced a sampled pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairRecipe {
    /// `A ≤ B` by construction for the requested relation.
    Comparable,
    /// Independent random PSD matrices.
    Independent,
    /// A comparable pair, swapped.
    Reversed,
    /// `A = cB` with `c ∈ (0, 1)`: Löwner-comparable, generally not
    /// minus- or star-comparable.
    Scaled,
    Equal,
}

impl PairRecipe {
    const CYCLE: [PairRecipe; 5] = [
        PairRecipe::Comparable,
        PairRecipe::Independent,
        PairRecipe::Reversed,
        PairRecipe::Scaled,
        PairRecipe::Equal,
    ];

    pub fn for_trial(trial: usize) -> PairRecipe {
        Self::CYCLE[trial % Self::CYCLE.len()]
    }
}

fn comparable_pair<R: Rng>(rng: &mut R, relation: OrderRelation, n: usize) -> (PsdMatrix, PsdMatrix) {
    match relation {
        OrderRelation::Lowner => {
            // B = A + GGᵗ
            let (ra, rg) = (rng.gen_range(0..=n), rng.gen_range(0..=n));
            let a = random_psd(rng, n, ra);
            let g = random_psd(rng, n, rg);
            let b = PsdMatrix::assume_psd(a.add(&g).expect("same dimension"));
            (a, b)
        }
        OrderRelation::Minus => {
            // A = S E_r Sᵗ, B = S E_s Sᵗ
            let s = conditioned_matrix(rng, n, SAMPLER_COND);
            let hi = rng.gen_range(0..=n);
            let lo = rng.gen_range(0..=hi);
            let a = PsdMatrix::assume_psd(SymMatrix::from_product(
                s.congruence(&canonical_ek(n, lo).expect("lo <= n")).expect("square"),
            ));
            let b = PsdMatrix::assume_psd(SymMatrix::from_product(
                s.congruence(&canonical_ek(n, hi).expect("hi <= n")).expect("square"),
            ));
            (a, b)
        }
        OrderRelation::Star | OrderRelation::LeftStar | OrderRelation::RightStar => {
            // B = A + C with Im C ⊥ Im A.
            let q = random_orthogonal(rng, n);
            let hi = rng.gen_range(0..=n);
            let lo = rng.gen_range(0..=hi);
            let d: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..=2.0)).collect();
            let da: Vec<f64> = (0..n).map(|i| if i < lo { d[i] } else { 0.0 }).collect();
            let db: Vec<f64> = (0..n).map(|i| if i < hi { d[i] } else { 0.0 }).collect();
            let a = q.congruence(&Matrix::from_diag(&da)).expect("square");
            let b = q.congruence(&Matrix::from_diag(&db)).expect("square");
            (
                PsdMatrix::assume_psd(SymMatrix::from_product(a)),
                PsdMatrix::assume_psd(SymMatrix::from_product(b)),
            )
        }
    }
}

/// The seeded pair generator behind [`preserves_order`]. Trial `t` draws from
/// `stream_rng(seed, t)` using recipe [`PairRecipe::for_trial`]`(t)`.
pub fn sample_pair(
    relation: OrderRelation,
    n: usize,
    seed: u64,
    trial: usize,
) -> (PairRecipe, PsdMatrix, PsdMatrix) {
    let mut rng = stream_rng(seed, trial as u64);
    let recipe = PairRecipe::for_trial(trial);
    let (a, b) = match recipe {
        PairRecipe::Comparable => comparable_pair(&mut rng, relation, n),
        PairRecipe::Reversed => {
            let (a, b) = comparable_pair(&mut rng, relation, n);
            (b, a)
        }
        PairRecipe::Independent => {
            let ra = rng.gen_range(1..=n);
            let rb = rng.gen_range(1..=n);
            (random_psd(&mut rng, n, ra), random_psd(&mut rng, n, rb))
        }
        PairRecipe::Scaled => {
            let rb = rng.gen_range(1..=n);
            let b = random_psd(&mut rng, n, rb);
            let c = rng.gen_range(0.2..=0.8);
            (PsdMatrix::assume_psd(b.scale(c)), b)
        }
        PairRecipe::Equal => {
            let r = rng.gen_range(0..=n);
            let a = random_psd(&mut rng, n, r);
            (a.clone(), a)
        }
    };
    (recipe, a, b)
}

/// Checks `A ≤ B ⇒ φ(A) ≤ φ(B)` (forward) and `φ(A) ≤ φ(B) ⇒ A ≤ B`
/// (backward) on `trials` pairs from [`sample_pair`]. The minus order is
/// decided by its rank characterization.
pub fn preserves_order(
    map: &MatrixMap,
    relation: OrderRelation,
    n: usize,
    seed: u64,
    trials: usize,
    tol: &ToleranceConfig,
) -> Result<PreservationReport> {
    if trials == 0 {
        return Err(Error::PreconditionViolated("trials must be at least 1"));
    }
    if n == 0 {
        return Err(Error::Empty);
    }
    let mut forward = Vec::new();
    let mut backward = Vec::new();
    for t in 0..trials {
        let (_, a, b) = sample_pair(relation, n, seed, t);
        let before = orders::holds(&a, &b, relation, tol)?;
        let after = orders::holds(&map.apply(&a), &map.apply(&b), relation, tol)?;
        let record = || Counterexample {
            trial: t,
            a: a.as_sym().clone(),
            b: b.as_sym().clone(),
        };
        if before && !after {
            forward.push(record());
        }
        if after && !before {
            backward.push(record());
        }
    }
    Ok(PreservationReport::new(relation, trials, forward, backward))
}

/// The probes `e₁e₁ᵗ, …, eₙeₙᵗ` followed by `(e₁+eᵢ)(e₁+eᵢ)ᵗ` for `i = 2..n`.
pub fn probe_set(n: usize) -> Vec<PsdMatrix> {
    let unit = |i: usize| {
        let mut x = alloc::vec![0.0; n];
        x[i] = 1.0;
        x
    };
    let mut out: Vec<PsdMatrix> = (0..n).map(|i| PsdMatrix::gram(&Matrix::column_vector(&unit(i)))).collect();
    for i in 1..n {
        let mut x = unit(i);
        x[0] = 1.0;
        out.push(PsdMatrix::gram(&Matrix::column_vector(&x)));
    }
    out
}

fn inconsistent(msg: String) -> Error {
    Error::InconsistentSamples(msg)
}

/// Largest eigenpair as `√λ q`, provided the matrix is numerically rank one.
fn rank_one_factor(b: &SymMatrix, what: &str, tol: &ToleranceConfig) -> Result<Vec<f64>> {
    let e = sym_eig(b, tol)?;
    let rank = crate::numkernel::rank_from_eig(&e, e.max_abs_value(), tol);
    if rank != 1 || e.values[0] <= 0.0 {
        return Err(inconsistent(format!("image of {what} has rank {rank}, expected 1")));
    }
    let w = libm::sqrt(e.values[0]);
    Ok(e.vector(0).iter().map(|x| w * x).collect())
}

/// Recovers `S` from pairs `(Aᵢ, SAᵢSᵗ)` that include the [`probe_set`].
///
/// Column `sᵢ` comes from the rank-one image `sᵢsᵢᵗ` of `eᵢeᵢᵗ`; the sign of
/// `sᵢ` relative to `s₁` is whichever of `(s₁ ± sᵢ)(s₁ ± sᵢ)ᵗ` matches the
/// image of `(e₁+eᵢ)(e₁+eᵢ)ᵗ`. The result is normalized so the first entry of
/// `s₁` above `recon_tol * ‖s₁‖` is positive, and every supplied pair must be
/// reproduced within `recon_tol * n * max(‖B‖, ‖S‖²‖A‖)`.
pub fn fit_congruence(pairs: &[(PsdMatrix, PsdMatrix)], tol: &ToleranceConfig) -> Result<Matrix> {
    let first = pairs
        .first()
        .ok_or_else(|| inconsistent(String::from("no sample pairs")))?;
    let n = first.0.dim();
    for (a, b) in pairs {
        if a.dim() != n || b.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: (n, n),
                found: (a.dim(), b.dim()),
            });
        }
    }
    let probes = probe_set(n);
    let image_of = |k: usize| -> Result<&PsdMatrix> {
        pairs
            .iter()
            .find(|(a, _)| a.max_abs_diff(&probes[k]) <= tol.recon_tol)
            .map(|(_, b)| b)
            .ok_or_else(|| inconsistent(format!("probe {k} missing from samples")))
    };

    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(n);
    for i in 0..n {
        cols.push(rank_one_factor(image_of(i)?, &format!("e{}e{}ᵗ", i + 1, i + 1), tol)?);
    }
    for i in 1..n {
        let c = image_of(n + i - 1)?;
        let plus: Vec<f64> = cols[0].iter().zip(&cols[i]).map(|(x, y)| x + y).collect();
        let minus: Vec<f64> = cols[0].iter().zip(&cols[i]).map(|(x, y)| x - y).collect();
        let rp = SymMatrix::outer(&plus).max_abs_diff(c);
        let rm = SymMatrix::outer(&minus).max_abs_diff(c);
        if rm < rp {
            cols[i].iter_mut().for_each(|x| *x = -*x);
        }
    }
    let s1_norm = numkernel::norm(&cols[0]);
    let lead = cols[0]
        .iter()
        .find(|x| x.abs() > tol.recon_tol * s1_norm)
        .copied()
        .unwrap_or(1.0);
    let mut s = Matrix::zeros(n, n);
    for (j, c) in cols.iter().enumerate() {
        let c: Vec<f64> = c.iter().map(|x| if lead < 0.0 { -x } else { *x }).collect();
        s.set_column(j, &c);
    }
    if ensure_invertible(&s, tol).is_err() {
        return Err(inconsistent(String::from("recovered S is singular")));
    }

    let s_sq = s.max_abs() * s.max_abs();
    for (k, (a, b)) in pairs.iter().enumerate() {
        let residual = s.congruence(a)?.max_abs_diff(b);
        let bound = tol.recon_tol * n as f64 * b.max_abs().max(s_sq * a.max_abs());
        if residual > bound {
            return Err(inconsistent(format!(
                "pair {k} residual {residual:e} exceeds {bound:e}"
            )));
        }
    }
    Ok(s)
}

/// Evaluates `map` on the probe set and fits `S`.
pub fn fit_congruence_from_map(map: &MatrixMap, n: usize, tol: &ToleranceConfig) -> Result<Matrix> {
    let pairs: Vec<(PsdMatrix, PsdMatrix)> = probe_set(n)
        .into_iter()
        .map(|p| {
            let image = map.apply_psd(&p, tol)?;
            Ok((p, image))
        })
        .collect::<Result<_>>()?;
    fit_congruence(&pairs, tol)
}

/// `Q = Qᵗ` and `‖Q² - Q‖_max <= idem_tol * max(1, ‖Q‖_max)`.
pub fn is_orthogonal_projector(q: &SymMatrix, tol: &ToleranceConfig) -> bool {
    q.mul(q).max_abs_diff(q) <= tol.idem_tol * q.max_abs().max(1.0)
}

/// Feeds the map every `E_k`, `k = 0..=n`, and three random projectors of each
/// rank (seeded by [`PROJECTOR_SEED`]). A projector whose image is not an
/// orthogonal projector is a forward failure; one whose image has a
/// different rank is a backward failure. The counterexample pair is
/// `(P, φ(P))`.
pub fn projector_fixed_point_suite(
    map: &MatrixMap,
    n: usize,
    tol: &ToleranceConfig,
) -> Result<PreservationReport> {
    let mut projectors: Vec<PsdMatrix> = (0..=n)
        .map(|k| canonical_ek(n, k))
        .collect::<Result<_>>()?;
    let mut rng = stream_rng(PROJECTOR_SEED, n as u64);
    for k in 1..=n {
        for _ in 0..3 {
            projectors.push(random_projector(&mut rng, n, k));
        }
    }
    let mut forward = Vec::new();
    let mut backward = Vec::new();
    for (t, p) in projectors.iter().enumerate() {
        let image = map.apply(p);
        let record = || Counterexample {
            trial: t,
            a: p.as_sym().clone(),
            b: image.clone(),
        };
        if !is_orthogonal_projector(&image, tol) {
            forward.push(record());
        }
        if numerical_rank(&image, tol)? != numerical_rank(p, tol)? {
            backward.push(record());
        }
    }
    Ok(PreservationReport::new(
        OrderRelation::Minus,
        projectors.len(),
        forward,
        backward,
    ))
}
