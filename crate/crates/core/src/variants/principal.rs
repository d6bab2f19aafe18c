//! The designer and court merged into one principal.

use crate::equilibrium::{solve, EquilibriumSolution, Institution};
use crate::error::SolverError;
use crate::model::{InformationEnvironment, PopulationModel};

/// Principal commits to `F(x)` before the agent acts; no indifference
/// condition binds.
pub fn solve_commitment(
    env: &InformationEnvironment,
    pop: &PopulationModel,
) -> Result<EquilibriumSolution, SolverError> {
    solve(env, pop, Institution::Commitment)
}

/// Principal chooses an unbounded punishment after a failure. A belief below
/// the threshold cannot arise on path, so the punishment recorded is a
/// deterministic level equal to the expected punishment agents face.
pub fn solve_expost_screening(
    env: &InformationEnvironment,
    pop: &PopulationModel,
) -> Result<EquilibriumSolution, SolverError> {
    solve(env, pop, Institution::ExPostScreening)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::{solve_optimal, SliceRegime};
    use crate::model::{AgentType, Signal, SignalPair};

    const B: f64 = 9.0 / 13.0;

    fn pop() -> PopulationModel {
        PopulationModel::new(0.55, 1.0).unwrap()
    }

    #[test]
    fn commitment_is_efficient_when_fu_exceeds_fb() {
        let env = InformationEnvironment::new(B, 0.7, 0.75).unwrap();
        let s = solve_commitment(&env, &pop()).unwrap();
        let mp = SignalPair::new(Signal::Low, Signal::High);
        let mm = SignalPair::new(Signal::Low, Signal::Low);
        assert_eq!(s.profile.action(AgentType::Unbiased, mp), 1.0);
        assert_eq!(s.profile.action(AgentType::Biased, mm), 0.0);
        assert_eq!(s.slices[0], SliceRegime::InterimEfficient);
    }

    #[test]
    fn commitment_matches_baseline_when_fb_exceeds_fu() {
        let env = InformationEnvironment::new(B, 0.8, 0.75).unwrap();
        let c = solve_commitment(&env, &pop()).unwrap();
        let b = solve_optimal(&env, &pop()).unwrap();
        assert!((c.welfare - b.welfare).abs() < 1e-15);
    }

    #[test]
    fn ex_post_deters_everyone_when_fb_exceeds_fu() {
        let env = InformationEnvironment::new(B, 0.8, 0.75).unwrap();
        let s = solve_expost_screening(&env, &pop()).unwrap();
        for y in Signal::BOTH {
            let s_pair = SignalPair::new(Signal::Low, y);
            for omega in AgentType::BOTH {
                assert_eq!(s.profile.action(omega, s_pair), 0.0);
            }
        }
        assert!(s.welfare < solve_optimal(&env, &pop()).unwrap().welfare);
    }

    #[test]
    fn ex_post_matches_baseline_when_fu_exceeds_fb() {
        let env = InformationEnvironment::new(B, 0.7, 0.75).unwrap();
        let e = solve_expost_screening(&env, &pop()).unwrap();
        let b = solve_optimal(&env, &pop()).unwrap();
        assert_eq!(e.profile, b.profile);
        assert_eq!(e.welfare, b.welfare);
    }
}
