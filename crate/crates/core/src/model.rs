//! Primitive parameters of the liability game and the Bayesian algebra built
//! on them: posteriors, efficiency cases, and the critical-fine gap.

use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::numerics::{bisect, odds};

fn check_finite(name: &'static str, value: f64) -> Result<(), ModelError> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(ModelError::NotFinite { name, value })
    }
}

fn check_open(name: &'static str, value: f64, low: f64, high: f64) -> Result<(), ModelError> {
    check_finite(name, value)?;
    if value > low && value < high {
        Ok(())
    } else {
        Err(ModelError::OutOfRange {
            name,
            value,
            low,
            high,
        })
    }
}

/// A binary signal realization, `-1` or `+1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Signal {
    Low,
    High,
}

impl Signal {
    pub const BOTH: [Signal; 2] = [Signal::Low, Signal::High];

    pub fn value(self) -> i8 {
        match self {
            Signal::Low => -1,
            Signal::High => 1,
        }
    }

    pub fn from_value(v: i8) -> Option<Signal> {
        match v {
            -1 => Some(Signal::Low),
            1 => Some(Signal::High),
            _ => None,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Signal::Low => 0,
            Signal::High => 1,
        }
    }

    pub fn flip(self) -> Signal {
        match self {
            Signal::Low => Signal::High,
            Signal::High => Signal::Low,
        }
    }
}

/// The state of the project: good (`+1`) or bad (`-1`).
pub type State = Signal;

/// Realizations `(x, y)` of the verifiable and unverifiable signals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SignalPair {
    pub x: Signal,
    pub y: Signal,
}

impl SignalPair {
    pub const ALL: [SignalPair; 4] = [
        SignalPair::new(Signal::Low, Signal::Low),
        SignalPair::new(Signal::Low, Signal::High),
        SignalPair::new(Signal::High, Signal::Low),
        SignalPair::new(Signal::High, Signal::High),
    ];

    pub const fn new(x: Signal, y: Signal) -> Self {
        SignalPair { x, y }
    }

    /// Builds a pair from `{-1, 1}` values.
    pub fn from_values(x: i8, y: i8) -> Option<Self> {
        Some(SignalPair::new(
            Signal::from_value(x)?,
            Signal::from_value(y)?,
        ))
    }

    /// Position in [`SignalPair::ALL`].
    pub fn index(self) -> usize {
        2 * self.x.index() + self.y.index()
    }

    pub fn flipped(self) -> Self {
        SignalPair::new(self.x.flip(), self.y.flip())
    }
}

impl std::fmt::Display for SignalPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.x.value(), self.y.value())
    }
}

/// Agent type: unbiased (`u`) agents share the designer's preferences, biased
/// (`b`) agents gain from acting regardless of the outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AgentType {
    Unbiased,
    Biased,
}

impl AgentType {
    pub const BOTH: [AgentType; 2] = [AgentType::Unbiased, AgentType::Biased];

    pub fn index(self) -> usize {
        match self {
            AgentType::Unbiased => 0,
            AgentType::Biased => 1,
        }
    }
}

/// Prior on the state together with the precisions of both signals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InformationEnvironment {
    beta: f64,
    p_x: f64,
    p_y: f64,
}

impl InformationEnvironment {
    pub fn new(beta: f64, p_x: f64, p_y: f64) -> Result<Self, ModelError> {
        check_open("beta", beta, 0.0, 1.0)?;
        check_open("p_x", p_x, 0.5, 1.0)?;
        check_open("p_y", p_y, 0.5, 1.0)?;
        Ok(InformationEnvironment { beta, p_x, p_y })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn p_x(&self) -> f64 {
        self.p_x
    }

    pub fn p_y(&self) -> f64 {
        self.p_y
    }

    pub fn with_p_x(&self, p_x: f64) -> Result<Self, ModelError> {
        Self::new(self.beta, p_x, self.p_y)
    }

    pub fn with_p_y(&self, p_y: f64) -> Result<Self, ModelError> {
        Self::new(self.beta, self.p_x, p_y)
    }

    pub fn with_beta(&self, beta: f64) -> Result<Self, ModelError> {
        Self::new(beta, self.p_x, self.p_y)
    }

    /// `P(theta)`.
    pub fn state_prob(&self, theta: State) -> f64 {
        match theta {
            Signal::High => self.beta,
            Signal::Low => 1.0 - self.beta,
        }
    }

    /// `P(X = x | theta)`.
    pub fn x_likelihood(&self, x: Signal, theta: State) -> f64 {
        if x == theta {
            self.p_x
        } else {
            1.0 - self.p_x
        }
    }

    /// `P(Y = y | theta)`.
    pub fn y_likelihood(&self, y: Signal, theta: State) -> f64 {
        if y == theta {
            self.p_y
        } else {
            1.0 - self.p_y
        }
    }

    /// `P(theta, X = x, Y = y)`.
    pub fn joint(&self, s: SignalPair, theta: State) -> f64 {
        self.state_prob(theta) * self.x_likelihood(s.x, theta) * self.y_likelihood(s.y, theta)
    }

    /// `P(X = x, Y = y)`.
    pub fn pair_prob(&self, s: SignalPair) -> f64 {
        self.joint(s, Signal::High) + self.joint(s, Signal::Low)
    }
}

/// Bayes posterior `P(theta = 1 | x, y)` with conditionally independent
/// signals.
pub fn posterior(env: &InformationEnvironment, s: SignalPair) -> f64 {
    let good = env.joint(s, Signal::High);
    let bad = env.joint(s, Signal::Low);
    good / (good + bad)
}

/// All four posteriors in [`SignalPair::ALL`] order.
pub fn posteriors(env: &InformationEnvironment) -> [f64; 4] {
    SignalPair::ALL.map(|s| posterior(env, s))
}

/// Acting on a posterior is interim efficient iff it is at least 1/2.
#[inline]
pub fn efficient(posterior: f64) -> bool {
    posterior >= 0.5
}

/// Type prior and court conviction threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PopulationModel {
    gamma: f64,
    loss: f64,
    gamma_bar: f64,
}

impl PopulationModel {
    /// `gamma` is the prior that the agent is unbiased, `loss` the court's
    /// loss scale `L` from convicting an unbiased agent.
    pub fn new(gamma: f64, loss: f64) -> Result<Self, ModelError> {
        check_open("gamma", gamma, 0.0, 1.0)?;
        check_open("L", loss, 0.0, f64::INFINITY)?;
        Ok(PopulationModel {
            gamma,
            loss,
            gamma_bar: 1.0 / (1.0 + loss),
        })
    }

    /// Builds the model from the conviction threshold `gamma_bar = 1/(1+L)`.
    pub fn from_threshold(gamma: f64, gamma_bar: f64) -> Result<Self, ModelError> {
        check_open("gamma", gamma, 0.0, 1.0)?;
        check_open("gamma_bar", gamma_bar, 0.0, 1.0)?;
        Ok(PopulationModel {
            gamma,
            loss: 1.0 / gamma_bar - 1.0,
            gamma_bar,
        })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn loss(&self) -> f64 {
        self.loss
    }

    pub fn gamma_bar(&self) -> f64 {
        self.gamma_bar
    }

    /// Prior probability of a type.
    pub fn type_prob(&self, omega: AgentType) -> f64 {
        match omega {
            AgentType::Unbiased => self.gamma,
            AgentType::Biased => 1.0 - self.gamma,
        }
    }

    /// The analysis assumes the prior exceeds the conviction threshold.
    pub fn satisfies_baseline(&self) -> bool {
        self.gamma > self.gamma_bar
    }
}

/// Where acting is interim efficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CaseLabel {
    /// Efficient iff `x = 1`.
    XPivotal,
    /// Efficient iff `y = 1`.
    YPivotal,
    /// Efficient iff `x + y >= 0`.
    EitherPositive,
    /// Efficient iff `x = y = 1`.
    BothPositive,
    AlwaysEfficient,
    NeverEfficient,
}

impl CaseLabel {
    pub fn name(self) -> &'static str {
        match self {
            CaseLabel::XPivotal => "x-pivotal",
            CaseLabel::YPivotal => "y-pivotal",
            CaseLabel::EitherPositive => "either-positive",
            CaseLabel::BothPositive => "both-positive",
            CaseLabel::AlwaysEfficient => "always-efficient",
            CaseLabel::NeverEfficient => "never-efficient",
        }
    }
}

impl std::fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Classifies the environment by which signal pairs make acting efficient.
/// A posterior of exactly 1/2 counts as efficient.
pub fn classify_case(env: &InformationEnvironment) -> CaseLabel {
    let [mm, mp, pm, pp] = posteriors(env).map(efficient);
    match (mm, mp, pm, pp) {
        (true, _, _, _) => CaseLabel::AlwaysEfficient,
        (false, true, true, _) => CaseLabel::EitherPositive,
        (false, true, false, _) => CaseLabel::YPivotal,
        (false, false, true, _) => CaseLabel::XPivotal,
        (false, false, false, true) => CaseLabel::BothPositive,
        (false, false, false, false) => CaseLabel::NeverEfficient,
    }
}

/// Strict version of the either-positive case: no posterior sits on 1/2.
pub fn is_interior_either_positive(env: &InformationEnvironment) -> bool {
    let [mm, mp, pm, _] = posteriors(env);
    mm < 0.5 && mp > 0.5 && pm > 0.5
}

/// Closed-form gap `F^b - F^u` between the smallest fine deterring the biased
/// agent on `(-1,-1)` and the largest fine keeping the unbiased agent active
/// on `(-1,1)`.
pub fn delta(env: &InformationEnvironment) -> f64 {
    delta_at(env.beta, env.p_x, env.p_y)
}

pub(crate) fn delta_at(beta: f64, p_x: f64, p_y: f64) -> f64 {
    let bracket = (1.0 - p_y) / p_y - p_y / (1.0 - p_y);
    2.0 + odds(beta) * (1.0 - p_x) / p_x * bracket
}

/// Verifiable precision at which `F^b = F^u`, provided the root lies in the
/// interior of the either-positive region.
pub fn critical_px(beta: f64, p_y: f64) -> Option<f64> {
    InformationEnvironment::new(beta, 0.75, p_y).ok()?;
    let root = bisect(|p| delta_at(beta, p, p_y), 0.5, 1.0)?;
    let env = InformationEnvironment::new(beta, root, p_y).ok()?;
    is_interior_either_positive(&env).then_some(root)
}

/// Unverifiable precision at which `F^b = F^u`, provided the root lies in the
/// interior of the either-positive region.
pub fn critical_py(beta: f64, p_x: f64) -> Option<f64> {
    InformationEnvironment::new(beta, p_x, 0.75).ok()?;
    let root = bisect(|p| delta_at(beta, p_x, p), 0.5, 1.0 - f64::EPSILON)?;
    let env = InformationEnvironment::new(beta, p_x, root).ok()?;
    is_interior_either_positive(&env).then_some(root)
}

/// Closure `[low, high]` of the unverifiable precisions that keep
/// `(beta, p_x)` in the either-positive region.
///
/// In odds form with `k = odds(beta)`, `r = odds(p_x)`, `t = odds(p_y)` the
/// region is `max(k/r, r/k) < t <= k r`; the lower end binds either
/// `beta(-1,-1) = 1/2` or `beta(-1,1) = 1/2`, the upper end `beta(1,-1) = 1/2`.
pub fn case_region_bounds(beta: f64, p_x: f64) -> Result<(f64, f64), ModelError> {
    InformationEnvironment::new(beta, p_x, 0.75)?;
    let k = odds(beta);
    let r = odds(p_x);
    let t_low = (k / r).max(r / k);
    let t_high = k * r;
    if t_high <= t_low {
        return Err(ModelError::EmptyRegion { beta, p_x });
    }
    Ok((t_low / (1.0 + t_low), t_high / (1.0 + t_high)))
}
