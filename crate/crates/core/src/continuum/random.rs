use rand::Rng;

use crate::error::ContinuumError;

use super::welfare::{optimal_fine_welfare, welfare_functional};
use super::{compare_spread, PosteriorDistribution, SpreadOrder};

/// Draws a mean-matched pair `(more, less)` with `more` weakly more spread
/// than `less` around 1/2.
///
/// `less` puts random masses on `2 * half_cells` equal cells of `[0, 1]`.
/// `more` starts from the same masses and applies `moves` pairs of
/// transfers: one moves mass leftward between two cells below 1/2, the
/// other moves mass rightward between two cells above 1/2, sized so the
/// mean is unchanged. Both distributions are atomless.
pub fn random_spread_pair<R: Rng + ?Sized>(
    rng: &mut R,
    half_cells: usize,
    moves: usize,
) -> Result<(PosteriorDistribution, PosteriorDistribution), ContinuumError> {
    if half_cells < 2 {
        return Err(ContinuumError::InvalidDistribution(
            "at least two cells per half are required".into(),
        ));
    }
    let n = 2 * half_cells;
    let mut less: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = less.iter().sum();
    less.iter_mut().for_each(|m| *m /= total);
    let mut more = less.clone();

    for _ in 0..moves {
        let (i, j) = distinct_pair(rng, 0, half_cells);
        let (k, l) = distinct_pair(rng, half_cells, n);
        let (down, up) = ((j - i) as f64, (l - k) as f64);
        let mut left = rng.gen_range(0.0..0.5) * more[j];
        let mut right = left * down / up;
        if right > 0.9 * more[k] {
            right = 0.9 * more[k];
            left = right * up / down;
        }
        more[j] -= left;
        more[i] += left;
        more[k] -= right;
        more[l] += right;
    }

    let cells = |m: &[f64]| -> Vec<(f64, f64, f64)> {
        m.iter()
            .enumerate()
            .map(|(c, &mass)| (c as f64 / n as f64, (c + 1) as f64 / n as f64, mass))
            .collect()
    };
    Ok((
        PosteriorDistribution::piecewise_uniform(&cells(&more))?,
        PosteriorDistribution::piecewise_uniform(&cells(&less))?,
    ))
}

/// `i < j` drawn from `lo..hi`.
fn distinct_pair<R: Rng + ?Sized>(rng: &mut R, lo: usize, hi: usize) -> (usize, usize) {
    let a = rng.gen_range(lo..hi);
    let mut b = rng.gen_range(lo..hi - 1);
    if b >= a {
        b += 1;
    }
    (a.min(b), a.max(b))
}

/// One randomized comparison of the welfare functional across a spread
/// pair.
#[derive(Debug, Clone, PartialEq)]
pub struct SpreadWelfareTrial {
    pub mu_u: f64,
    pub gamma: f64,
    pub order: SpreadOrder,
    pub mean_gap: f64,
    /// Value under the more spread distribution at the sampled cutoffs.
    pub pi_more: f64,
    /// Value under the less spread distribution at the sampled cutoffs.
    pub pi_less: f64,
    /// Values when the fine is chosen optimally for each distribution.
    pub best_more: f64,
    pub best_less: f64,
}

impl SpreadWelfareTrial {
    /// `pi_more - pi_less`.
    pub fn fixed_cutoff_gain(&self) -> f64 {
        self.pi_more - self.pi_less
    }

    /// `best_more - best_less`.
    pub fn reoptimized_gain(&self) -> f64 {
        self.best_more - self.best_less
    }
}

/// Draws a spread pair, an unbiased cutoff in `(1/2, 3/4]` (so the biased
/// cutoff is at most 1/2) and a type prior in `(0, 1)`, and evaluates both
/// distributions.
pub fn spread_welfare_trial<R: Rng + ?Sized>(
    rng: &mut R,
) -> Result<SpreadWelfareTrial, ContinuumError> {
    let half_cells = rng.gen_range(2..=6);
    let moves = rng.gen_range(1..=4);
    let (more, less) = random_spread_pair(rng, half_cells, moves)?;
    let mu_u = 1.25 - rng.gen_range(0.5..0.75);
    let gamma = rng.gen_range(0.0..1.0);
    Ok(SpreadWelfareTrial {
        mu_u,
        gamma,
        order: compare_spread(&more, &less, 0.5).order,
        mean_gap: more.mean() - less.mean(),
        pi_more: welfare_functional(&more, mu_u, gamma)?,
        pi_less: welfare_functional(&less, mu_u, gamma)?,
        best_more: optimal_fine_welfare(&more, gamma).1,
        best_less: optimal_fine_welfare(&less, gamma).1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::continuum::is_mean_preserving_spread;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn pairs_are_ordered_and_mean_matched() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let (more, less) = random_spread_pair(&mut rng, 4, 3).unwrap();
            assert!((more.mean() - less.mean()).abs() < 1e-12);
            assert!(more.is_atomless() && less.is_atomless());
            assert!(matches!(
                compare_spread(&more, &less, 0.5).order,
                SpreadOrder::MoreSpread | SpreadOrder::Equal
            ));
            assert!(is_mean_preserving_spread(&more, &less));
        }
    }

    #[test]
    fn trials_favor_spread() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let t = spread_welfare_trial(&mut rng).unwrap();
            assert!(t.mu_u > 0.5 && t.mu_u <= 0.75);
            assert!(t.fixed_cutoff_gain() >= -1e-10, "{t:?}");
        }
    }
}
