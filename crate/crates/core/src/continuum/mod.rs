//! Posterior distributions on `[0, 1]`, the spread order around a pivot
//! belief, the designer's value at a fixed verifiable realization, and the
//! constructions comparing verifiable and unverifiable spreads.

mod blackwell;
mod distribution;
mod prop5;
mod random;
mod spread;
mod welfare;

pub use blackwell::{blackwell_counterexample, BlackwellExample, BlackwellReport};
pub use distribution::PosteriorDistribution;
pub use prop5::{
    binary_slice, designer_welfare, integrate_over, lower_posterior, prop5_instance, prop5_with,
    spread_threshold, upper_posterior, Prop5Instance, Prop5Params, PROP5_GAMMA, PROP5_GAMMA_BAR,
};
pub use random::{random_spread_pair, spread_welfare_trial, SpreadWelfareTrial};
pub use spread::{
    compare_spread, is_mean_preserving_spread, SpreadComparison, SpreadOrder, SPREAD_TOL,
};
pub use welfare::{
    biased_cutoff, biased_cutoff_from_unbiased, optimal_fine_welfare, unbiased_cutoff,
    welfare_at_fine, welfare_functional,
};
