use crate::error::{Error, Result};

/// Multiplier on `f64::EPSILON` used by the default rank cutoff.
pub const RANK_EPS_SCALE: f64 = 1.0e3 * f64::EPSILON;

/// The single policy object behind every floating-point rank, PSD,
/// idempotency and reconstruction decision.
///
/// Defaults:
///
/// | field          | default                         | meaning |
/// |----------------|---------------------------------|---------|
/// | `eig_tol`      | `f64::EPSILON`                  | Jacobi stops once the off-diagonal Frobenius norm is `<= eig_tol * ‖A‖_F` |
/// | `max_sweeps`   | 30                              | Jacobi iteration budget, in full cyclic sweeps |
/// | `rank_rel_tol` | `None` (= `n * 1e3 * EPSILON`)  | an eigenvalue / singular value counts iff `|λ| > rank_rel_tol * scale` |
/// | `psd_tol`      | `1e-10`                         | PSD iff `λ_min >= -psd_tol * scale` |
/// | `idem_tol`     | `1e-8`                          | idempotency and `{0,1}` spectrum slack (relative to `max(1, ‖P‖_max)`) |
/// | `recon_tol`    | `1e-9`                          | reconstruction, residual, and equality slack (relative) |
/// | `sym_tol`      | `1e-10`                         | accepted asymmetry relative to `max(1, ‖A‖_max)` |
///
/// `scale` is the largest eigenvalue magnitude of the matrix being examined,
/// or of the operands a difference was formed from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceConfig {
    pub eig_tol: f64,
    pub max_sweeps: usize,
    pub rank_rel_tol: Option<f64>,
    pub psd_tol: f64,
    pub idem_tol: f64,
    pub recon_tol: f64,
    pub sym_tol: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            eig_tol: f64::EPSILON,
            max_sweeps: 30,
            rank_rel_tol: None,
            psd_tol: 1.0e-10,
            idem_tol: 1.0e-8,
            recon_tol: 1.0e-9,
            sym_tol: 1.0e-10,
        }
    }
}

impl ToleranceConfig {
    pub fn with_rank_rel_tol(mut self, tol: f64) -> Self {
        self.rank_rel_tol = Some(tol);
        self
    }

    pub fn with_psd_tol(mut self, tol: f64) -> Self {
        self.psd_tol = tol;
        self
    }

    pub fn with_idem_tol(mut self, tol: f64) -> Self {
        self.idem_tol = tol;
        self
    }

    pub fn with_recon_tol(mut self, tol: f64) -> Self {
        self.recon_tol = tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        let checks = [
            ("eig_tol", positive(self.eig_tol)),
            ("rank_rel_tol", self.rank_rel_tol.is_none_or(positive)),
            ("psd_tol", positive(self.psd_tol)),
            ("idem_tol", positive(self.idem_tol)),
            ("recon_tol", positive(self.recon_tol)),
            ("sym_tol", positive(self.sym_tol)),
            ("max_sweeps", self.max_sweeps > 0),
        ];
        match checks.iter().find(|(_, ok)| !ok) {
            Some((name, _)) => Err(Error::InvalidTolerance { name }),
            None => Ok(()),
        }
    }

    /// Relative rank tolerance in effect for an `n`-dimensional problem.
    pub fn rank_rel(&self, n: usize) -> f64 {
        self.rank_rel_tol.unwrap_or(n as f64 * RANK_EPS_SCALE)
    }

    /// Absolute cutoff: values with magnitude above it count toward the rank.
    pub fn rank_cutoff(&self, n: usize, scale: f64) -> f64 {
        self.rank_rel(n) * scale
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        ToleranceConfig::default().validate().unwrap();
    }

    #[test]
    fn rejects_non_positive() {
        let tol = ToleranceConfig::default().with_psd_tol(0.0);
        assert_eq!(
            tol.validate(),
            Err(Error::InvalidTolerance { name: "psd_tol" })
        );
        let tol = ToleranceConfig::default().with_rank_rel_tol(-1.0);
        assert!(tol.validate().is_err());
        let tol = ToleranceConfig::default().with_recon_tol(f64::NAN);
        assert!(tol.validate().is_err());
    }

    #[test]
    fn cutoff_scales_with_dimension() {
        let tol = ToleranceConfig::default();
        assert_eq!(tol.rank_cutoff(4, 2.0), 8.0 * RANK_EPS_SCALE);
        let tol = tol.with_rank_rel_tol(1e-6);
        assert_eq!(tol.rank_cutoff(4, 2.0), 2e-6);
    }
}
