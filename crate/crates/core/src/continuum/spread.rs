use serde::{Deserialize, Serialize};

use super::PosteriorDistribution;

/// Slack on CDF comparisons.
pub const SPREAD_TOL: f64 = 1e-12;

/// How the first distribution compares with the second around a pivot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SpreadOrder {
    MoreSpread,
    LessSpread,
    Incomparable,
    Equal,
}

impl SpreadOrder {
    pub fn reversed(self) -> Self {
        match self {
            SpreadOrder::MoreSpread => SpreadOrder::LessSpread,
            SpreadOrder::LessSpread => SpreadOrder::MoreSpread,
            other => other,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpreadComparison {
    pub order: SpreadOrder,
    pub pivot: f64,
}

/// Sorted union of both breakpoint sets, the pivot, and all midpoints.
fn refinement(a: &PosteriorDistribution, b: &PosteriorDistribution, pivot: f64) -> Vec<f64> {
    let mut pts = a.breakpoints();
    pts.extend(b.breakpoints());
    pts.push(pivot);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let mids: Vec<f64> = pts.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    pts.extend(mids);
    pts.sort_by(f64::total_cmp);
    pts
}

/// Whether `G_a >= G_b` below `pivot` and `G_a <= G_b` from `pivot` on.
///
/// Mass sitting exactly at the pivot is on neither side; for atomless
/// distributions this is the same as including the pivot below. Both CDFs
/// are linear between consecutive refinement points, so checking the value
/// and the left limit at each point covers every `t`.
fn dominates(
    a: &PosteriorDistribution,
    b: &PosteriorDistribution,
    pivot: f64,
    pts: &[f64],
) -> bool {
    pts.iter().all(|&t| {
        let right = a.cdf(t) - b.cdf(t);
        let left = a.cdf_left(t) - b.cdf_left(t);
        let right_ok = if t < pivot {
            right >= -SPREAD_TOL
        } else {
            right <= SPREAD_TOL
        };
        let left_ok = if t <= pivot {
            left >= -SPREAD_TOL
        } else {
            left <= SPREAD_TOL
        };
        right_ok && left_ok
    })
}

/// Compares `a` against `b` in the spread order around `pivot`.
pub fn compare_spread(
    a: &PosteriorDistribution,
    b: &PosteriorDistribution,
    pivot: f64,
) -> SpreadComparison {
    let pts = refinement(a, b, pivot);
    let order = match (dominates(a, b, pivot, &pts), dominates(b, a, pivot, &pts)) {
        (true, true) => SpreadOrder::Equal,
        (true, false) => SpreadOrder::MoreSpread,
        (false, true) => SpreadOrder::LessSpread,
        (false, false) => SpreadOrder::Incomparable,
    };
    SpreadComparison { order, pivot }
}

/// Whether `a` is a mean-preserving spread of `b`: equal means and
/// `int_0^t (G_a - G_b) >= 0` for every `t`.
pub fn is_mean_preserving_spread(a: &PosteriorDistribution, b: &PosteriorDistribution) -> bool {
    if (a.mean() - b.mean()).abs() > 1e-10 {
        return false;
    }
    let mut pts = a.breakpoints();
    pts.extend(b.breakpoints());
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let diff = |t: f64| a.cdf_integral(t) - b.cdf_integral(t);
    let mut candidates = pts.clone();
    // The integrand is linear between breakpoints; interior minima of its
    // integral sit where it crosses zero from below.
    for w in pts.windows(2) {
        let dl = a.cdf(w[0]) - b.cdf(w[0]);
        let dr = a.cdf_left(w[1]) - b.cdf_left(w[1]);
        if dl < 0.0 && dr > 0.0 {
            candidates.push(w[0] + (w[1] - w[0]) * dl / (dl - dr));
        }
    }
    candidates.iter().all(|&t| diff(t) >= -1e-12)
}
