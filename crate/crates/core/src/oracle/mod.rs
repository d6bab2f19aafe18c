//! Independent checks of the closed-form solver: an exhaustive grid search
//! with explicit equilibrium audits, a seeded Monte Carlo welfare estimator,
//! and randomized property sweeps.

mod brute;
mod monte_carlo;
mod properties;
mod sampling;

pub use brute::{
    brute_force_optimum, brute_force_slice, write_reports_csv, AuditReport, SliceOptimum,
};
pub use monte_carlo::{monte_carlo_welfare, McEstimate};
pub use properties::{property_sweep, PropertyReport, PROPERTY_IDS};
pub use sampling::{sample_any, sample_either_positive, Sample};

use crate::equilibrium::Institution;
use crate::error::OracleError;

/// Grid resolution, sampling size and search limits for the oracles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    /// Spacing of the punishment cap grid.
    pub fine_grid_step: f64,
    /// Spacing of the mixing-probability grid.
    pub mix_grid_step: f64,
    /// Largest cap on the grid. `None` uses `max(F^u, F^b) + 2` per slice;
    /// an explicit value must be at least `max(F^u, F^b) + 1`.
    pub fine_max: Option<f64>,
    pub mc_samples: u64,
    pub seed: u64,
    /// Most profiles enumerated on one slice.
    pub budget: u64,
    pub institution: Institution,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            fine_grid_step: 0.01,
            mix_grid_step: 1e-4,
            fine_max: None,
            mc_samples: 1_000_000,
            seed: 0,
            budget: 5_000_000,
            institution: Institution::SubjectiveCourt,
        }
    }
}

impl OracleConfig {
    /// Welfare tolerance implied by the grids: ten mixing steps.
    pub fn tolerance(&self) -> f64 {
        10.0 * self.mix_grid_step
    }

    pub fn validate(&self) -> Result<(), OracleError> {
        let bad = |m: String| Err(OracleError::InvalidConfig(m));
        if !(self.fine_grid_step > 0.0) {
            return bad(format!(
                "fine_grid_step {} must be positive",
                self.fine_grid_step
            ));
        }
        if !(self.mix_grid_step > 0.0 && self.mix_grid_step <= 1.0) {
            return bad(format!(
                "mix_grid_step {} must lie in (0, 1]",
                self.mix_grid_step
            ));
        }
        if let Some(f) = self.fine_max {
            if !(f > 0.0 && f.is_finite()) {
                return bad(format!("fine_max {f} must be positive and finite"));
            }
        }
        if self.mc_samples == 0 {
            return bad("mc_samples must be positive".into());
        }
        Ok(())
    }
}
