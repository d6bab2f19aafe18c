//! Whether a court allowed to punish inaction would ever do so.

use crate::equilibrium::EquilibriumSolution;
use crate::model::{AgentType, InformationEnvironment, PopulationModel, Signal, SignalPair};

/// Court posterior that an agent who did not act is unbiased, for each
/// `(x, theta)` in the order `[(-1,-1), (-1,1), (1,-1), (1,1)]`. An empty
/// conditioning event keeps the prior.
pub fn inaction_posteriors(
    env: &InformationEnvironment,
    pop: &PopulationModel,
    sol: &EquilibriumSolution,
) -> [f64; 4] {
    let mut out = [pop.gamma(); 4];
    for x in Signal::BOTH {
        for theta in Signal::BOTH {
            let mut mass = [0.0; 2];
            for omega in AgentType::BOTH {
                for y in Signal::BOTH {
                    let s = SignalPair::new(x, y);
                    mass[omega.index()] += pop.type_prob(omega)
                        * env.joint(s, theta)
                        * (1.0 - sol.profile.action(omega, s));
                }
            }
            let total = mass[0] + mass[1];
            if total > 0.0 {
                out[2 * x.index() + theta.index()] = mass[0] / total;
            }
        }
    }
    out
}

/// True when every inaction posterior is at least the prior, so a court
/// with a prior above its threshold never punishes inaction.
pub fn verify_no_inaction_punishment(
    env: &InformationEnvironment,
    pop: &PopulationModel,
    sol: &EquilibriumSolution,
) -> bool {
    let tol = 1e-12;
    inaction_posteriors(env, pop, sol)
        .iter()
        .all(|g| *g >= pop.gamma() - tol && *g >= pop.gamma_bar() - tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::{candidate_equilibria, StrategyProfile};

    #[test]
    fn candidates_never_invite_inaction_punishment() {
        let env = InformationEnvironment::new(9.0 / 13.0, 0.7, 0.75).unwrap();
        let pop = PopulationModel::new(0.55, 1.0).unwrap();
        for c in candidate_equilibria(&env, &pop).unwrap() {
            assert!(verify_no_inaction_punishment(&env, &pop, &c));
        }
    }

    #[test]
    fn all_act_keeps_prior() {
        let env = InformationEnvironment::new(9.0 / 13.0, 0.7, 0.75).unwrap();
        let pop = PopulationModel::new(0.55, 1.0).unwrap();
        let mut sol = candidate_equilibria(&env, &pop).unwrap().remove(0);
        sol.profile = StrategyProfile::all_act();
        assert_eq!(inaction_posteriors(&env, &pop, &sol), [0.55; 4]);
        assert!(verify_no_inaction_punishment(&env, &pop, &sol));
    }
}
