//! JSON renderings of verdicts and certificates.

use psdorder_core::canonical::{Inertia, SimCongResult};
use psdorder_core::linmodels::{BlueVerdict, ComparisonVerdict, McReport, QFormReport};
use psdorder_core::orders::{Certificate, OrderVerdict};
use psdorder_core::preservers::{Counterexample, PreservationReport};
use psdorder_core::{Matrix, ToleranceConfig};
use serde_json::{json, Map, Value};

/// Counterexamples listed per failure kind; the counts are always complete.
pub const MAX_LISTED: usize = 5;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn matrix(m: &Matrix) -> Value {
    json!(m.to_rows())
}

pub fn tolerances(t: &ToleranceConfig) -> Value {
    json!({
        "rank_rel_tol": t.rank_rel_tol,
        "eig_tol": t.eig_tol,
        "max_sweeps": t.max_sweeps,
        "psd_tol": t.psd_tol,
        "idem_tol": t.idem_tol,
        "recon_tol": t.recon_tol,
        "sym_tol": t.sym_tol,
    })
}

/// Wraps a body with `command`, `tolerances` and `version`.
pub fn envelope(command: &str, body: Value, t: &ToleranceConfig) -> Value {
    let mut out = Map::new();
    out.insert("command".into(), json!(command));
    if let Value::Object(fields) = body {
        out.extend(fields);
    }
    out.insert("tolerances".into(), tolerances(t));
    out.insert("version".into(), json!(VERSION));
    Value::Object(out)
}

pub fn certificate(c: &Certificate) -> Value {
    match c {
        Certificate::PsdWitness { min_eig, vector } => json!({
            "kind": "psd-witness",
            "min_eig": min_eig,
            "witness": vector,
        }),
        Certificate::RankTriple {
            rank_a,
            rank_b,
            rank_diff,
        } => json!({
            "kind": "rank-triple",
            "rank_a": rank_a,
            "rank_b": rank_b,
            "rank_diff": rank_diff,
        }),
        Certificate::ImageSum {
            dim_a,
            dim_b,
            dim_diff,
            dim_sum,
            contained,
        } => json!({
            "kind": "image-sum",
            "dim_a": dim_a,
            "dim_b": dim_b,
            "dim_diff": dim_diff,
            "dim_sum": dim_sum,
            "contained": contained,
        }),
        Certificate::InnerInverse {
            g,
            inner_residual,
            left_residual,
            right_residual,
        } => json!({
            "kind": "inner-inverse",
            "g": matrix(g),
            "inner_residual": inner_residual,
            "left_residual": left_residual,
            "right_residual": right_residual,
        }),
        Certificate::Residuals {
            first,
            second,
            image_contained,
            bound,
        } => json!({
            "kind": "residuals",
            "first": first,
            "second": second,
            "image_contained": image_contained,
            "bound": bound,
        }),
    }
}

pub fn verdict(v: &OrderVerdict) -> Value {
    json!({
        "holds": v.holds,
        "relation": v.relation.name(),
        "method": v.method.map(|m| m.name()),
        "comparison": v.comparison.name(),
        "detail": v.detail,
        "certificate": certificate(&v.certificate),
    })
}

pub fn inertia(i: &Inertia) -> Value {
    json!({ "n_plus": i.n_plus, "n_minus": i.n_minus, "n_zero": i.n_zero })
}

pub fn sim_cong(r: &SimCongResult) -> Value {
    json!({
        "S": matrix(&r.transform),
        "r": r.r,
        "s": r.s,
        "residual_a": r.residual_a,
        "residual_b": r.residual_b,
    })
}

fn counterexamples(list: &[Counterexample]) -> Value {
    json!(list
        .iter()
        .take(MAX_LISTED)
        .map(|c| json!({
            "trial": c.trial,
            "A": matrix(&c.a),
            "B": matrix(&c.b),
        }))
        .collect::<Vec<_>>())
}

pub fn preservation(r: &PreservationReport) -> Value {
    json!({
        "holds": r.preserves_both(),
        "relation": r.relation.name(),
        "trials": r.trials,
        "verdict": if r.preserves_both() { "preserves_both" } else { "fails" },
        "forward_failure_count": r.forward_failures.len(),
        "backward_failure_count": r.backward_failures.len(),
        "forward_failures": counterexamples(&r.forward_failures),
        "backward_failures": counterexamples(&r.backward_failures),
    })
}

pub fn comparison(v: &ComparisonVerdict) -> Value {
    json!({
        "result": v.l1_geq_l2,
        "l1_geq_l2": v.l1_geq_l2,
        "l2_geq_l1": v.l2_geq_l1,
        "M1": matrix(&v.m1),
        "M2": matrix(&v.m2),
        "certificate": {
            "m2_leq_m1": verdict(&v.m2_leq_m1),
            "m1_leq_m2": verdict(&v.m1_leq_m2),
        },
    })
}

pub fn blue(v: &BlueVerdict) -> Value {
    json!({
        "result": v.is_blue,
        "is_blue": v.is_blue,
        "cond_i": { "holds": v.cond_i, "residual": v.unbiasedness_residual },
        "cond_ii": {
            "holds": v.cond_ii,
            "dim_image_ld": v.dim_image_ld,
            "dim_image_x": v.dim_image_x,
        },
        "cond_iii": {
            "holds": v.cond_iii,
            "sim_cong": v.sim_cong.as_ref().map(sim_cong),
            "error": v.sim_cong_error,
        },
    })
}

pub fn qform(r: &QFormReport) -> Value {
    json!({
        "result": r.overall,
        "overall": r.overall,
        "s": r.s,
        "W": matrix(&r.w),
        "forms": r.forms.iter().map(|f| json!({
            "rank": f.rank,
            "minus": verdict(&f.minus),
            "sim_cong": f.sim_cong.as_ref().map(sim_cong),
        })).collect::<Vec<_>>(),
    })
}

pub fn monte_carlo(r: &McReport) -> Value {
    json!({
        "n_samples": r.n_samples,
        "df": r.df,
        "means": r.means,
        "correlations": matrix(&r.correlations),
        "max_abs_correlation": r.max_abs_correlation,
        "ks": r.ks,
    })
}
