//! Equilibrium construction for the liability game.
//!
//! The court observes `x`, so each realization of the verifiable signal is
//! solved as an independent slice with its own punishment cap. In the
//! either-positive case only the `x = -1` slice carries a nontrivial
//! tradeoff and the caps reduce to a single maximum punishment.

mod audit;
mod slice;
mod solver;

pub use audit::{audit, Violation};
pub use slice::{Slice, SliceKind, SliceOutcome};
pub use solver::{
    candidate_equilibria, candidates_for, critical_fines, cutoff_belief, eta_b, eta_u, fine_b,
    fine_b_at, fine_u, fine_u_at, free_pass_advantage, solve, solve_optimal, welfare, Mixing,
};
pub(crate) use solver::{regime_of, support_of};

use serde::{Deserialize, Serialize};

use crate::model::{AgentType, CaseLabel, Signal, SignalPair};

/// Two fines closer than this are treated as equal and both regime families
/// are returned.
pub const KNIFE_EDGE_TOL: f64 = 1e-10;
/// Welfare values closer than this are ties.
pub const WELFARE_TIE_TOL: f64 = 1e-12;
/// Slack on belief comparisons in the equilibrium audit.
pub const AUDIT_TOL: f64 = 1e-9;

/// Which institution resolves punishment after a failure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Institution {
    /// Court convicts when it believes the agent is likely biased.
    SubjectiveCourt,
    /// Court convicts when it believes the agent acted against its information.
    ObjectiveCourt,
    /// Principal commits to the punishment before the agent acts.
    Commitment,
    /// Principal picks an unbounded punishment after observing the failure.
    ExPostScreening,
}

/// Coarse label of the designer-optimal scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    FreePass,
    DeterAtFb,
    DeterAtFu,
    CaseSpecific,
}

impl Regime {
    pub fn name(self) -> &'static str {
        match self {
            Regime::FreePass => "free-pass",
            Regime::DeterAtFb => "deter-at-fb",
            Regime::DeterAtFu => "deter-at-fu",
            Regime::CaseSpecific => "case-specific",
        }
    }
}

/// Behavior on one `x` slice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SliceRegime {
    /// Acting is efficient on both `y`; nobody is punished.
    AllAct,
    /// Acting is inefficient on both `y`; a cap deterring everyone.
    NoneAct,
    /// No punishment: the unbiased type acts on `y = 1`, the biased type always.
    FreePass,
    /// Cap `F^b`: biased deterred on `y = -1`, unbiased chilled on `y = 1`.
    FullDeterrence,
    /// Cap `F^b`: biased mixes on `y = -1` to keep the court willing to punish.
    BiasedMixing,
    /// Cap `F^u`: unbiased mixes on `y = 1`, biased deterred on `y = -1`.
    UnbiasedMixing,
    /// Committed punishment implementing the efficient action for both types.
    InterimEfficient,
    /// Unbounded ex-post punishment deters both types on both `y`.
    TotalDeterrence,
}

/// Whether the inputs lie where the analysis applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Support {
    Supported,
    /// Prior on the unbiased type at or below the conviction threshold.
    OutsideAssumedRegion,
    /// Acting is always or never efficient; the answer is immediate.
    TrivialRegion,
}

/// Action probabilities for both types on every signal pair and the
/// court's punishment after a failure at each `x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrategyProfile {
    /// `action[type][pair]` with indices from [`AgentType::index`] and
    /// [`SignalPair::index`].
    pub action: [[f64; 4]; 2],
    /// `punishment[x]` indexed by [`Signal::index`].
    pub punishment: [f64; 2],
}

impl StrategyProfile {
    pub fn uniform(a: f64) -> Self {
        StrategyProfile {
            action: [[a; 4]; 2],
            punishment: [0.0; 2],
        }
    }

    /// Nobody ever acts.
    pub fn none_act() -> Self {
        Self::uniform(0.0)
    }

    /// Both types act on every pair.
    pub fn all_act() -> Self {
        Self::uniform(1.0)
    }

    /// The no-punishment profile: unbiased acts iff the posterior is at least
    /// 1/2, biased always acts.
    pub fn free_pass(posteriors: [f64; 4]) -> Self {
        let mut p = Self::all_act();
        for (i, mu) in posteriors.iter().enumerate() {
            p.action[0][i] = if *mu >= 0.5 { 1.0 } else { 0.0 };
        }
        p
    }

    pub fn action(&self, omega: AgentType, s: SignalPair) -> f64 {
        self.action[omega.index()][s.index()]
    }

    pub fn set_action(&mut self, omega: AgentType, s: SignalPair, a: f64) {
        self.action[omega.index()][s.index()] = a;
    }

    pub fn punishment(&self, x: Signal) -> f64 {
        self.punishment[x.index()]
    }

    /// All probabilities in `[0, 1]` and punishments finite and nonnegative.
    pub fn is_valid(&self) -> bool {
        self.action
            .iter()
            .flatten()
            .all(|a| (0.0..=1.0).contains(a))
            && self.punishment.iter().all(|f| f.is_finite() && *f >= 0.0)
    }
}

/// A perfect Bayesian equilibrium together with the designer's caps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumSolution {
    /// Largest cap across realizations.
    pub f_bar: f64,
    /// Cap on punishment after a failure at each `x`.
    pub caps: [f64; 2],
    pub profile: StrategyProfile,
    /// Court belief after a failure at each `x`: the probability of an
    /// unbiased agent, or under an objective court the probability that the
    /// agent acted on an efficient signal pair. Off-path entries hold the
    /// conviction threshold.
    pub court_belief: [f64; 2],
    pub on_path: [bool; 2],
    pub welfare: f64,
    pub regime: Regime,
    pub slices: [SliceRegime; 2],
    pub institution: Institution,
    pub support: Support,
    pub case: CaseLabel,
}

impl EquilibriumSolution {
    /// Number of action probabilities strictly inside `(0, 1)`.
    pub fn mixed_actions(&self) -> usize {
        self.profile
            .action
            .iter()
            .flatten()
            .filter(|a| **a > 0.0 && **a < 1.0)
            .count()
    }

    /// `a^b(-1,-1)`.
    pub fn biased_on_bad_pair(&self) -> f64 {
        self.profile.action[1][0]
    }

    /// `a^u(-1,1)`.
    pub fn unbiased_on_mixed_pair(&self) -> f64 {
        self.profile.action[0][1]
    }
}
