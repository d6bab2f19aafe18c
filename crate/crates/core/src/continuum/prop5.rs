use crate::equilibrium::{Institution, Slice};
use crate::error::ContinuumError;
use crate::model::PopulationModel;
use crate::numerics::gauss_legendre;

use super::{compare_spread, PosteriorDistribution, SpreadComparison};

/// Gauss-Legendre panels per density segment.
const PANELS: usize = 64;

/// Parameters of the verifiable-spread construction: prior, unverifiable
/// precision, type prior and conviction threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prop5Params {
    pub beta: f64,
    pub p_y: f64,
    pub gamma: f64,
    pub gamma_bar: f64,
}

/// Posterior after `y = 1` when the verifiable posterior is `x`.
pub fn upper_posterior(x: f64, p_y: f64) -> f64 {
    x * p_y / (x * p_y + (1.0 - x) * (1.0 - p_y))
}

/// Posterior after `y = -1` when the verifiable posterior is `x`.
pub fn lower_posterior(x: f64, p_y: f64) -> f64 {
    x * (1.0 - p_y) / (x * (1.0 - p_y) + (1.0 - x) * p_y)
}

/// Verifiable posterior at which the two critical fines coincide; below it
/// deterring the biased type also chills the unbiased one.
pub fn spread_threshold(p_y: f64) -> f64 {
    let bracket = (1.0 - p_y) / p_y - p_y / (1.0 - p_y);
    let k = -2.0 / bracket;
    k / (1.0 + k)
}

/// Slice at verifiable posterior `x` with a binary unverifiable signal of
/// precision `p_y`; masses are conditional on `x`.
pub fn binary_slice(x: f64, p_y: f64, pop: &PopulationModel) -> Slice {
    Slice {
        lo: lower_posterior(x, p_y),
        hi: upper_posterior(x, p_y),
        succ: [x * (1.0 - p_y), x * p_y],
        fail: [(1.0 - x) * p_y, (1.0 - x) * (1.0 - p_y)],
        gamma: pop.gamma(),
        gamma_bar: pop.gamma_bar(),
    }
}

/// Integral of `value(x)` against the verifiable distribution.
pub fn integrate_over(dist: &PosteriorDistribution, value: impl Fn(f64) -> f64) -> f64 {
    let mut acc = 0.0;
    for w in dist.knots().windows(2) {
        let (p0, c0) = w[0];
        let (p1, c1) = w[1];
        let mass = c1 - c0;
        if mass == 0.0 {
            continue;
        }
        if p1 == p0 {
            acc += mass * value(p0);
        } else {
            acc += mass / (p1 - p0) * gauss_legendre(&value, p0, p1, PANELS);
        }
    }
    acc
}

/// Designer-optimal welfare when the punishment may depend on the
/// verifiable realization: the best equilibrium on every slice, integrated.
pub fn designer_welfare(
    dist: &PosteriorDistribution,
    p_y: f64,
    pop: &PopulationModel,
    inst: Institution,
) -> f64 {
    integrate_over(dist, |x| binary_slice(x, p_y, pop).best(inst).value)
}

/// A pair of verifiable signals where the more spread one is worse for the
/// designer.
#[derive(Debug, Clone, PartialEq)]
pub struct Prop5Instance {
    pub params: Prop5Params,
    pub epsilon: f64,
    pub x_star: f64,
    pub x1: f64,
    pub x2: f64,
    /// Mass 1/2 on `[x*, x* + eps]` and on `[x1, x1 + eps]`.
    pub x: PosteriorDistribution,
    /// Mass 1/2 on `[x* - eps, x*]` and on `[x2, x2 + eps]`.
    pub x_prime: PosteriorDistribution,
    /// `x_prime` against `x` around 1/2.
    pub spread: SpreadComparison,
    /// Welfare with `x_prime`.
    pub welfare_s1: f64,
    /// Welfare with `x`.
    pub welfare_s2: f64,
    /// `welfare_s2 - welfare_s1`.
    pub gap: f64,
}

/// Builds the construction at explicit parameters.
pub fn prop5_with(params: Prop5Params, epsilon: f64) -> Result<Prop5Instance, ContinuumError> {
    let Prop5Params {
        beta,
        p_y,
        gamma,
        gamma_bar,
    } = params;
    if !(epsilon > 0.0) {
        return Err(ContinuumError::Infeasible(format!(
            "epsilon {epsilon} must be positive"
        )));
    }
    let pop = PopulationModel::from_threshold(gamma, gamma_bar)
        .map_err(|e| ContinuumError::Infeasible(e.to_string()))?;
    let x_star = spread_threshold(p_y);
    let x1 = 2.0 * beta - x_star - epsilon;
    let x2 = 2.0 * beta - x_star;

    let mut failed = Vec::new();
    if gamma <= gamma_bar {
        failed.push(format!(
            "gamma {gamma} not above the conviction threshold {gamma_bar}"
        ));
    }
    if upper_posterior(x_star - epsilon, p_y) <= 0.5 {
        failed.push(format!(
            "upper posterior at x* - eps is {}, not above 1/2",
            upper_posterior(x_star - epsilon, p_y)
        ));
    }
    if x_star + epsilon >= 0.5 {
        failed.push(format!("x* + eps = {} is not below 1/2", x_star + epsilon));
    }
    if lower_posterior(x1, p_y) <= 0.5 {
        failed.push(format!(
            "lower posterior at x1 = {x1} is {}, not above 1/2",
            lower_posterior(x1, p_y)
        ));
    }
    if x_star - epsilon < 0.0 || x2 + epsilon > 1.0 {
        failed.push(format!(
            "support [{}, {}] leaves [0, 1]",
            x_star - epsilon,
            x2 + epsilon
        ));
    }
    if !failed.is_empty() {
        return Err(ContinuumError::Infeasible(failed.join("; ")));
    }

    let x = PosteriorDistribution::piecewise_uniform(&[
        (x_star, x_star + epsilon, 0.5),
        (x1, x1 + epsilon, 0.5),
    ])?;
    let x_prime = PosteriorDistribution::piecewise_uniform(&[
        (x_star - epsilon, x_star, 0.5),
        (x2, x2 + epsilon, 0.5),
    ])?;
    let inst = Institution::SubjectiveCourt;
    let welfare_s1 = designer_welfare(&x_prime, p_y, &pop, inst);
    let welfare_s2 = designer_welfare(&x, p_y, &pop, inst);
    Ok(Prop5Instance {
        params,
        epsilon,
        x_star,
        x1,
        x2,
        spread: compare_spread(&x_prime, &x, 0.5),
        x,
        x_prime,
        welfare_s1,
        welfare_s2,
        gap: welfare_s2 - welfare_s1,
    })
}

/// Default type prior and conviction threshold of the construction.
pub const PROP5_GAMMA: f64 = 0.55;
pub const PROP5_GAMMA_BAR: f64 = 0.5;

/// Searches `beta` and `p_y` over `{0.60, 0.61, ..., 0.80}` at the default
/// type prior and threshold, and returns the feasible instance with the
/// largest welfare gap.
pub fn prop5_instance(epsilon: f64) -> Result<Prop5Instance, ContinuumError> {
    let grid = || (60..=80).map(|i| i as f64 / 100.0);
    let mut best: Option<Prop5Instance> = None;
    let mut last_err = None;
    for beta in grid() {
        for p_y in grid() {
            let params = Prop5Params {
                beta,
                p_y,
                gamma: PROP5_GAMMA,
                gamma_bar: PROP5_GAMMA_BAR,
            };
            match prop5_with(params, epsilon) {
                Ok(inst) if best.as_ref().is_none_or(|b| inst.gap > b.gap) => best = Some(inst),
                Ok(_) => {}
                Err(e) => last_err = Some(e),
            }
        }
    }
    match best {
        Some(b) if b.gap > 0.0 => Ok(b),
        Some(b) => Err(ContinuumError::Infeasible(format!(
            "no grid point yields a positive gap (best {})",
            b.gap
        ))),
        None => Err(last_err.unwrap_or_else(|| ContinuumError::Infeasible("empty grid".into()))),
    }
}
