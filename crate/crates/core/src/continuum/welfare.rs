use crate::error::ContinuumError;

use super::PosteriorDistribution;

/// Cutoff of the biased type under the fine that puts the unbiased cutoff at
/// `mu_u`, clamped to `[0, mu_u]`.
pub fn biased_cutoff_from_unbiased(mu_u: f64) -> Result<f64, ContinuumError> {
    if !(mu_u > 0.5 && mu_u <= 1.0) {
        return Err(ContinuumError::CutoffDomain(mu_u));
    }
    let mu_b = 0.5 * (3.0 - 1.0 / (2.0 * mu_u - 1.0));
    Ok(mu_b.clamp(0.0, mu_u))
}

/// Unbiased cutoff `(1 + F) / (2 + F)` under fine `F`.
pub fn unbiased_cutoff(fine: f64) -> f64 {
    (1.0 + fine) / (2.0 + fine)
}

/// Biased cutoff `1 - 1/F` under fine `F`, clamped at 0.
pub fn biased_cutoff(fine: f64) -> f64 {
    (1.0 - 1.0 / fine).max(0.0)
}

/// Designer value at one verifiable realization when the unbiased type acts
/// above `mu_u` and the biased type above the matching biased cutoff.
pub fn welfare_functional(
    dist: &PosteriorDistribution,
    mu_u: f64,
    gamma: f64,
) -> Result<f64, ContinuumError> {
    let mu_b = biased_cutoff_from_unbiased(mu_u)?;
    Ok((1.0 - gamma) * dist.value_above(mu_b) + gamma * dist.value_above(mu_u))
}

/// Designer value under fine `F >= 0`. At `F = 0` the unbiased type acts
/// from 1/2 on and the biased type always.
pub fn welfare_at_fine(dist: &PosteriorDistribution, fine: f64, gamma: f64) -> f64 {
    (1.0 - gamma) * dist.value_above(biased_cutoff(fine))
        + gamma * dist.value_above(unbiased_cutoff(fine))
}

/// Largest value of [`welfare_at_fine`] over fines in `[0, 2]`, with the
/// maximizing fine.
///
/// Fines above 2 push both cutoffs past 1/2 and only remove efficient
/// action. The search scans a uniform grid, adds the fines that put either
/// cutoff on a breakpoint, and refines around the best point by golden
/// section.
pub fn optimal_fine_welfare(dist: &PosteriorDistribution, gamma: f64) -> (f64, f64) {
    let eval = |f: f64| welfare_at_fine(dist, f, gamma);
    let mut fines: Vec<f64> = (0..=2000).map(|i| i as f64 / 1000.0).collect();
    for p in dist.breakpoints() {
        if p < 1.0 {
            fines.push((2.0 * p - 1.0) / (1.0 - p));
            fines.push(1.0 / (1.0 - p));
        }
    }
    fines.retain(|f| (0.0..=2.0).contains(f));
    let (mut best_f, mut best_v) = (0.0, eval(0.0));
    for &f in &fines {
        let v = eval(f);
        if v > best_v {
            best_f = f;
            best_v = v;
        }
    }
    let (mut lo, mut hi) = ((best_f - 1e-3).max(0.0), (best_f + 1e-3).min(2.0));
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..60 {
        let a = hi - ratio * (hi - lo);
        let b = lo + ratio * (hi - lo);
        if eval(a) >= eval(b) {
            hi = b;
        } else {
            lo = a;
        }
    }
    let mid = 0.5 * (lo + hi);
    let v = eval(mid);
    if v > best_v {
        (mid, v)
    } else {
        (best_f, best_v)
    }
}
