use crate::error::ContinuumError;

use super::welfare::biased_cutoff_from_unbiased;
use super::{is_mean_preserving_spread, PosteriorDistribution};

/// Step of the fine grid used to confirm separation numerically.
const GRID_STEP: f64 = 1e-4;
/// Largest fine on that grid.
const GRID_MAX: f64 = 10.0;
/// Expected-utility slack counted as indifference.
const INDIFFERENCE_TOL: f64 = 1e-12;

/// Three posteriors after `x = -1` under an unverifiable signal with
/// realizations `-1, 0, 1`, and the perturbed signal that moves the middle
/// posterior up by `eps1` and the lowest down by `eps2`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlackwellExample {
    /// Posteriors at `y = -1, 0, 1`.
    pub mu: [f64; 3],
    /// Perturbed posteriors.
    pub mu_prime: [f64; 3],
    /// Probabilities of `y = -1, 0, 1`, shared by both signals.
    pub probs: [f64; 3],
    pub eps1: f64,
    pub eps2: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlackwellReport {
    pub mean: f64,
    pub mean_prime: f64,
    /// The perturbed posterior distribution is a mean-preserving spread of
    /// the original.
    pub mean_preserving_spread: bool,
    /// Some fine keeps the unbiased type acting at `y = 1` while the biased
    /// type may abstain at `y = 0`, from the cutoff relation.
    pub separates: bool,
    pub separates_prime: bool,
    /// The same verdicts from a scan of fines.
    pub grid_separates: bool,
    pub grid_separates_prime: bool,
    /// The perturbed middle posterior is still below 1/2.
    pub middle_inefficient_prime: bool,
}

impl BlackwellExample {
    /// `eps2` is set so that the mean posterior is unchanged.
    pub fn new(mu: [f64; 3], probs: [f64; 3], eps1: f64) -> Result<Self, ContinuumError> {
        let invalid = |m: String| Err(ContinuumError::InvalidDistribution(m));
        if (probs.iter().sum::<f64>() - 1.0).abs() > 1e-12 || probs.iter().any(|p| *p <= 0.0) {
            return invalid(format!(
                "probabilities {probs:?} must be positive and sum to 1"
            ));
        }
        if !(mu[0] < mu[1] && mu[1] <= 0.5 && 0.5 < mu[2]) {
            return invalid(format!(
                "posteriors {mu:?} must satisfy mu0 < mu1 <= 1/2 < mu2"
            ));
        }
        if eps1 < 0.0 {
            return invalid(format!("eps1 {eps1} must be nonnegative"));
        }
        let eps2 = probs[1] * eps1 / probs[0];
        let mu_prime = [mu[0] - eps2, mu[1] + eps1, mu[2]];
        if mu_prime[0] < 0.0 || mu_prime[1] >= mu_prime[2] {
            return invalid(format!(
                "perturbed posteriors {mu_prime:?} are not ordered in [0, 1]"
            ));
        }
        Ok(BlackwellExample {
            mu,
            mu_prime,
            probs,
            eps1,
            eps2,
        })
    }

    /// Posteriors `0.2, 1/2, 3/4` with probabilities `1/2, 1/4, 1/4`. The
    /// fine that leaves the unbiased type indifferent at `3/4` leaves the
    /// biased type indifferent at exactly `1/2`.
    pub fn standard(eps1: f64) -> Result<Self, ContinuumError> {
        Self::new([0.2, 0.5, 0.75], [0.5, 0.25, 0.25], eps1)
    }

    pub fn distribution(&self) -> Result<PosteriorDistribution, ContinuumError> {
        PosteriorDistribution::discrete(&zip(self.mu, self.probs))
    }

    pub fn distribution_prime(&self) -> Result<PosteriorDistribution, ContinuumError> {
        PosteriorDistribution::discrete(&zip(self.mu_prime, self.probs))
    }

    pub fn report(&self) -> Result<BlackwellReport, ContinuumError> {
        let d = self.distribution()?;
        let dp = self.distribution_prime()?;
        Ok(BlackwellReport {
            mean: d.mean(),
            mean_prime: dp.mean(),
            mean_preserving_spread: is_mean_preserving_spread(&dp, &d),
            separates: separates(self.mu)?,
            separates_prime: separates(self.mu_prime)?,
            grid_separates: grid_separates(self.mu),
            grid_separates_prime: grid_separates(self.mu_prime),
            middle_inefficient_prime: self.mu_prime[1] < 0.5,
        })
    }
}

fn zip(mu: [f64; 3], probs: [f64; 3]) -> Vec<(f64, f64)> {
    mu.iter().copied().zip(probs.iter().copied()).collect()
}

/// The largest fine keeping the unbiased type active at `mu[2]` also lets
/// the biased type abstain at `mu[1]`.
fn separates(mu: [f64; 3]) -> Result<bool, ContinuumError> {
    Ok(biased_cutoff_from_unbiased(mu[2])? >= mu[1] - INDIFFERENCE_TOL)
}

/// Scans fines on a grid plus the two indifference fines, comparing
/// expected utilities directly.
fn grid_separates(mu: [f64; 3]) -> bool {
    let steps = (GRID_MAX / GRID_STEP).round() as usize;
    let critical = [(2.0 * mu[2] - 1.0) / (1.0 - mu[2]), 1.0 / (1.0 - mu[1])];
    (0..=steps)
        .map(|i| i as f64 * GRID_STEP)
        .chain(critical)
        .any(|f| {
            let unbiased_acts = mu[2] - (1.0 - mu[2]) * (1.0 + f) >= -INDIFFERENCE_TOL;
            let biased_may_abstain = 1.0 - (1.0 - mu[1]) * f <= INDIFFERENCE_TOL;
            unbiased_acts && biased_may_abstain
        })
}

/// The standard instance with `eps1 = 0.05`.
pub fn blackwell_counterexample() -> Result<(BlackwellExample, BlackwellReport), ContinuumError> {
    let ex = BlackwellExample::standard(0.05)?;
    let report = ex.report()?;
    Ok((ex, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_instance_breaks_separation() {
        let (ex, r) = blackwell_counterexample().unwrap();
        assert!((ex.eps2 - 0.025).abs() < 1e-15);
        assert!((r.mean - r.mean_prime).abs() < 1e-12);
        assert!(r.mean_preserving_spread);
        assert!(r.separates && r.grid_separates);
        assert!(!r.separates_prime && !r.grid_separates_prime);
    }

    #[test]
    fn zero_perturbation_keeps_verdicts() {
        let r = BlackwellExample::standard(0.0).unwrap().report().unwrap();
        assert_eq!(r.separates, r.separates_prime);
        assert_eq!(r.grid_separates, r.grid_separates_prime);
    }

    #[test]
    fn interior_instance() {
        // Biased cutoff at the unbiased indifference fine for 8/11 is 2/5.
        let ex = BlackwellExample::new([0.1, 0.4, 8.0 / 11.0], [0.4, 0.3, 0.3], 0.05).unwrap();
        let r = ex.report().unwrap();
        assert!(r.mean_preserving_spread && r.middle_inefficient_prime);
        assert!(r.separates && !r.separates_prime);
        assert!(r.grid_separates && !r.grid_separates_prime);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(BlackwellExample::new([0.2, 0.5, 0.75], [0.5, 0.25, 0.2], 0.0).is_err());
        assert!(BlackwellExample::new([0.2, 0.6, 0.75], [0.5, 0.25, 0.25], 0.0).is_err());
        assert!(BlackwellExample::standard(0.5).is_err());
    }
}
