use std::fmt;

use crate::model::{
    posterior, AgentType, InformationEnvironment, PopulationModel, Signal, SignalPair,
};

use super::solver::cutoff_belief;
use super::{EquilibriumSolution, Institution, AUDIT_TOL};

const PROB_TOL: f64 = 1e-12;

/// A failed equilibrium condition.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub id: &'static str,
    pub x: Option<Signal>,
    pub magnitude: f64,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.x {
            Some(x) => write!(
                f,
                "{} at x={} (magnitude {})",
                self.id,
                x.value(),
                self.magnitude
            ),
            None => write!(f, "{} (magnitude {})", self.id, self.magnitude),
        }
    }
}

/// Court posterior after a failure at `x`, recomputed from the profile by
/// enumerating types and `y`. `None` when nobody fails at `x`.
fn recomputed_belief(
    env: &InformationEnvironment,
    pop: &PopulationModel,
    sol: &EquilibriumSolution,
    x: Signal,
) -> Option<f64> {
    let objective = sol.institution == Institution::ObjectiveCourt;
    let mut numerator = 0.0;
    let mut total = 0.0;
    for omega in AgentType::BOTH {
        for y in Signal::BOTH {
            let s = SignalPair::new(x, y);
            let m = pop.type_prob(omega) * env.joint(s, Signal::Low) * sol.profile.action(omega, s);
            total += m;
            let counts = if objective {
                posterior(env, s) >= 0.5
            } else {
                omega == AgentType::Unbiased
            };
            if counts {
                numerator += m;
            }
        }
    }
    (total > 0.0).then(|| numerator / total)
}

/// Checks a solution against every equilibrium condition, independently of
/// how it was constructed. An empty result means the solution is a valid
/// equilibrium.
pub fn audit(
    env: &InformationEnvironment,
    pop: &PopulationModel,
    sol: &EquilibriumSolution,
) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut flag = |id: &'static str, x: Option<Signal>, magnitude: f64| {
        out.push(Violation { id, x, magnitude })
    };

    for a in sol.profile.action.iter().flatten() {
        if !(-PROB_TOL..=1.0 + PROB_TOL).contains(a) || a.is_nan() {
            flag("probability-range", None, *a);
        }
    }
    if (sol.f_bar - sol.caps[0].max(sol.caps[1])).abs() > PROB_TOL * sol.f_bar.max(1.0) {
        flag("cap-consistency", None, sol.f_bar);
    }
    let welfare = super::welfare(env, pop, &sol.profile);
    if (welfare - sol.welfare).abs() > 1e-12 {
        flag("welfare", None, welfare - sol.welfare);
    }

    let gb = pop.gamma_bar();
    for x in Signal::BOTH {
        let fine = sol.profile.punishment(x);
        let cap = sol.caps[x.index()];
        let scale = cap.max(1.0);
        if !(fine >= 0.0 && fine <= cap + PROB_TOL * scale) {
            flag("punishment-range", Some(x), fine - cap);
        }

        for y in Signal::BOTH {
            let s = SignalPair::new(x, y);
            let mu = posterior(env, s);
            for omega in AgentType::BOTH {
                let a = sol.profile.action(omega, s);
                let gap = mu - cutoff_belief(omega, fine);
                if gap > AUDIT_TOL && a < 1.0 - PROB_TOL {
                    flag("best-response", Some(x), gap * (1.0 - a));
                }
                if gap < -AUDIT_TOL && a > PROB_TOL {
                    flag("best-response", Some(x), -gap * a);
                }
            }
            let au = sol.profile.action(AgentType::Unbiased, s);
            let ab = sol.profile.action(AgentType::Biased, s);
            if au > PROB_TOL && ab < 1.0 - PROB_TOL {
                // Equal cutoffs are impossible, so this only passes at a tie.
                let gap = mu - cutoff_belief(AgentType::Biased, fine);
                if gap > AUDIT_TOL {
                    flag("type-monotone", Some(x), 1.0 - ab);
                }
            }
        }

        let recomputed = recomputed_belief(env, pop, sol, x);
        let on_path = sol.on_path[x.index()];
        let belief = sol.court_belief[x.index()];
        match recomputed {
            Some(g) => {
                if !on_path {
                    flag("path-flag", Some(x), g);
                }
                if (g - belief).abs() > AUDIT_TOL {
                    flag("bayes-consistency", Some(x), g - belief);
                }
            }
            None => {
                if on_path {
                    flag("path-flag", Some(x), belief);
                }
                if (belief - gb).abs() > AUDIT_TOL {
                    flag("off-path-belief", Some(x), belief - gb);
                }
            }
        }

        if sol.institution == Institution::Commitment || recomputed.is_none() {
            continue;
        }
        let g = recomputed.unwrap_or(gb);
        if g < gb - AUDIT_TOL && (fine - cap).abs() > PROB_TOL * scale {
            flag("court-should-punish", Some(x), cap - fine);
        }
        if g > gb + AUDIT_TOL && fine > PROB_TOL * scale {
            flag("court-should-acquit", Some(x), fine);
        }
        if sol.institution == Institution::ExPostScreening && g < gb - AUDIT_TOL {
            flag("ex-post-conviction-on-path", Some(x), gb - g);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::{candidate_equilibria, solve_optimal, StrategyProfile};

    fn setup() -> (InformationEnvironment, PopulationModel) {
        (
            InformationEnvironment::new(9.0 / 13.0, 0.7, 0.75).unwrap(),
            PopulationModel::new(0.55, 1.0).unwrap(),
        )
    }

    #[test]
    fn constructed_candidates_are_clean() {
        let (env, pop) = setup();
        for c in candidate_equilibria(&env, &pop).unwrap() {
            assert!(audit(&env, &pop, &c).is_empty());
        }
    }

    #[test]
    fn tampered_profiles_are_caught() {
        let (env, pop) = setup();
        let good = solve_optimal(&env, &pop).unwrap();

        let mut bad = good.clone();
        bad.profile.action[1][0] = 0.5;
        bad.welfare = crate::equilibrium::welfare(&env, &pop, &bad.profile);
        let ids: Vec<_> = audit(&env, &pop, &bad).iter().map(|v| v.id).collect();
        assert!(ids.contains(&"bayes-consistency"));

        let mut bad = good.clone();
        bad.profile = StrategyProfile::all_act();
        bad.profile.punishment = good.profile.punishment;
        bad.welfare = crate::equilibrium::welfare(&env, &pop, &bad.profile);
        let ids: Vec<_> = audit(&env, &pop, &bad).iter().map(|v| v.id).collect();
        assert!(ids.contains(&"best-response"));

        let mut bad = good;
        bad.welfare += 0.1;
        let ids: Vec<_> = audit(&env, &pop, &bad).iter().map(|v| v.id).collect();
        assert_eq!(ids, vec!["welfare"]);
    }
}
