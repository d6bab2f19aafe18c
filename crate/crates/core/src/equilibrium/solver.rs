use crate::error::SolverError;
use crate::model::{
    classify_case, posterior, AgentType, CaseLabel, InformationEnvironment, PopulationModel,
    Signal, SignalPair,
};

use super::audit::audit;
use super::slice::{Slice, SliceOutcome};
use super::{
    EquilibriumSolution, Institution, Regime, SliceRegime, StrategyProfile, Support,
    KNIFE_EDGE_TOL, WELFARE_TIE_TOL,
};

/// Posterior above which type `omega` strictly prefers to act when a failure
/// costs `fine`.
///
/// Unbiased: `(F+1)/(F+2)`. Biased: `(F-1)/F`, zero for `F <= 1`. Negative
/// fines are read as zero and an infinite fine gives 1.
pub fn cutoff_belief(omega: AgentType, fine: f64) -> f64 {
    let f = fine.max(0.0);
    if f.is_infinite() {
        return 1.0;
    }
    match omega {
        AgentType::Unbiased => (f + 1.0) / (f + 2.0),
        AgentType::Biased => {
            if f <= 1.0 {
                0.0
            } else {
                (f - 1.0) / f
            }
        }
    }
}

/// Fine at which an unbiased agent with posterior `mu` is indifferent.
/// Negative when `mu < 1/2`.
pub fn fine_u_at(mu: f64) -> f64 {
    (2.0 * mu - 1.0) / (1.0 - mu)
}

/// Fine at which a biased agent with posterior `mu` is indifferent.
pub fn fine_b_at(mu: f64) -> f64 {
    1.0 / (1.0 - mu)
}

/// `(F^u, F^b)` from the posteriors on `(-1,1)` and `(-1,-1)`, without any
/// case check.
pub fn critical_fines(env: &InformationEnvironment) -> (f64, f64) {
    let mp = posterior(env, SignalPair::new(Signal::Low, Signal::High));
    let mm = posterior(env, SignalPair::new(Signal::Low, Signal::Low));
    (fine_u_at(mp), fine_b_at(mm))
}

/// Largest fine at which the unbiased type still acts on `(-1,1)`.
pub fn fine_u(env: &InformationEnvironment) -> Result<f64, SolverError> {
    let mu = posterior(env, SignalPair::new(Signal::Low, Signal::High));
    if mu < 0.5 {
        return Err(SolverError::Premise(format!(
            "acting on (-1,1) is inefficient (posterior {mu})"
        )));
    }
    Ok(fine_u_at(mu))
}

/// Smallest fine deterring the biased type on `(-1,-1)`.
pub fn fine_b(env: &InformationEnvironment) -> Result<f64, SolverError> {
    let mu = posterior(env, SignalPair::new(Signal::Low, Signal::Low));
    if mu >= 0.5 {
        return Err(SolverError::Premise(format!(
            "acting on (-1,-1) is efficient (posterior {mu})"
        )));
    }
    Ok(fine_b_at(mu))
}

/// A court-indifference mixing probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mixing {
    /// Clamped to `[0, 1]`.
    pub value: f64,
    pub raw: f64,
    /// False when the raw value exceeds 1.
    pub feasible: bool,
}

impl Mixing {
    fn from_raw(raw: f64) -> Self {
        Mixing {
            value: raw.clamp(0.0, 1.0),
            raw,
            feasible: raw <= 1.0,
        }
    }
}

/// Mixing of the biased type on `(-1,-1)` that makes the court indifferent
/// when the unbiased type acts on `(-1,1)`.
pub fn eta_b(pop: &PopulationModel, env: &InformationEnvironment) -> Mixing {
    let (g, gb, py) = (pop.gamma(), pop.gamma_bar(), env.p_y());
    Mixing::from_raw((1.0 - py) * (g - gb) / (gb * (1.0 - g) * py))
}

/// Mixing of the unbiased type on `(-1,1)` that makes the court indifferent
/// when the biased type is deterred on `(-1,-1)`.
pub fn eta_u(pop: &PopulationModel) -> Mixing {
    let (g, gb) = (pop.gamma(), pop.gamma_bar());
    Mixing::from_raw(gb * (1.0 - g) / (g * (1.0 - gb)))
}

/// Exact ex-ante welfare `E[a^omega(x,y) theta]`.
pub fn welfare(
    env: &InformationEnvironment,
    pop: &PopulationModel,
    profile: &StrategyProfile,
) -> f64 {
    let mut w = 0.0;
    for omega in AgentType::BOTH {
        for s in SignalPair::ALL {
            let a = profile.action(omega, s);
            for theta in Signal::BOTH {
                w += pop.type_prob(omega) * env.joint(s, theta) * a * f64::from(theta.value());
            }
        }
    }
    w
}

/// Welfare of the free pass minus welfare of full deterrence at `F^b`.
pub fn free_pass_advantage(env: &InformationEnvironment, pop: &PopulationModel) -> f64 {
    let (b, px, py, g) = (env.beta(), env.p_x(), env.p_y(), pop.gamma());
    g * (b * (1.0 - px) * py - (1.0 - b) * px * (1.0 - py))
        + (1.0 - g) * (b * (1.0 - px) * (1.0 - py) - (1.0 - b) * px * py)
}

pub(crate) fn support_of(case: CaseLabel, pop: &PopulationModel) -> Support {
    match case {
        CaseLabel::AlwaysEfficient | CaseLabel::NeverEfficient => Support::TrivialRegion,
        _ if !pop.satisfies_baseline() => Support::OutsideAssumedRegion,
        _ => Support::Supported,
    }
}

pub(crate) fn regime_of(case: CaseLabel, outcomes: &[SliceOutcome; 2], fu: f64, fb: f64) -> Regime {
    match case {
        CaseLabel::AlwaysEfficient => Regime::FreePass,
        CaseLabel::EitherPositive => match outcomes[0].regime {
            SliceRegime::FreePass => Regime::FreePass,
            SliceRegime::UnbiasedMixing => Regime::DeterAtFu,
            SliceRegime::InterimEfficient if outcomes[0].cap == fu && fu != fb => Regime::DeterAtFu,
            _ => Regime::DeterAtFb,
        },
        _ => Regime::CaseSpecific,
    }
}

fn assemble(
    env: &InformationEnvironment,
    pop: &PopulationModel,
    inst: Institution,
    case: CaseLabel,
    outcomes: [SliceOutcome; 2],
) -> Result<EquilibriumSolution, SolverError> {
    let mut caps = [outcomes[0].cap, outcomes[1].cap];
    let f_bar = caps[0].max(caps[1]);
    // A slice where everyone acts and the court acquits tolerates any cap.
    if inst != Institution::Commitment {
        for (i, o) in outcomes.iter().enumerate() {
            if o.regime == SliceRegime::AllAct && o.belief >= pop.gamma_bar() - KNIFE_EDGE_TOL {
                caps[i] = f_bar;
            }
        }
    }
    let mut profile = StrategyProfile::none_act();
    for x in Signal::BOTH {
        let o = &outcomes[x.index()];
        for y in Signal::BOTH {
            let s = SignalPair::new(x, y);
            profile.set_action(AgentType::Unbiased, s, o.a_u[y.index()]);
            profile.set_action(AgentType::Biased, s, o.a_b[y.index()]);
        }
        profile.punishment[x.index()] = o.fine;
    }
    let slice = Slice::from_env(env, pop, Signal::Low);
    let sol = EquilibriumSolution {
        f_bar,
        caps,
        profile,
        court_belief: [outcomes[0].belief, outcomes[1].belief],
        on_path: [outcomes[0].on_path, outcomes[1].on_path],
        welfare: welfare(env, pop, &profile),
        regime: regime_of(case, &outcomes, slice.fine_u(), slice.fine_b()),
        slices: [outcomes[0].regime, outcomes[1].regime],
        institution: inst,
        support: support_of(case, pop),
        case,
    };
    let violations = audit(env, pop, &sol);
    if let Some(v) = violations.first() {
        return Err(SolverError::AuditFailed(format!(
            "{} violations, first: {v}",
            violations.len()
        )));
    }
    Ok(sol)
}

fn slices(env: &InformationEnvironment, pop: &PopulationModel) -> [Slice; 2] {
    [
        Slice::from_env(env, pop, Signal::Low),
        Slice::from_env(env, pop, Signal::High),
    ]
}

/// Every equilibrium the designer considers under `inst` in the
/// either-positive case.
pub fn candidates_for(
    env: &InformationEnvironment,
    pop: &PopulationModel,
    inst: Institution,
) -> Result<Vec<EquilibriumSolution>, SolverError> {
    let case = classify_case(env);
    if case != CaseLabel::EitherPositive {
        return Err(SolverError::WrongCase(case));
    }
    let [low, high] = slices(env, pop);
    let top = high.best(inst);
    low.candidates(inst)
        .into_iter()
        .map(|o| assemble(env, pop, inst, case, [o, top]))
        .collect()
}

/// Equilibria supporting each candidate maximum punishment in the
/// either-positive case with a subjective court.
pub fn candidate_equilibria(
    env: &InformationEnvironment,
    pop: &PopulationModel,
) -> Result<Vec<EquilibriumSolution>, SolverError> {
    candidates_for(env, pop, Institution::SubjectiveCourt)
}

/// Designer-optimal equilibrium under `inst`, for every case label.
pub fn solve(
    env: &InformationEnvironment,
    pop: &PopulationModel,
    inst: Institution,
) -> Result<EquilibriumSolution, SolverError> {
    let case = classify_case(env);
    let [low, high] = slices(env, pop);
    let bottom = if case == CaseLabel::EitherPositive
        && inst == Institution::SubjectiveCourt
        && low.fine_b() - low.fine_u() > KNIFE_EDGE_TOL
    {
        // Free pass against full deterrence, decided by the closed-form sign.
        let adv = free_pass_advantage(env, pop);
        let cands = low.candidates(inst);
        let want = if adv >= -WELFARE_TIE_TOL {
            SliceRegime::FreePass
        } else {
            SliceRegime::FullDeterrence
        };
        *cands
            .iter()
            .find(|o| o.regime == want)
            .expect("deterrence branch lists both candidates")
    } else {
        low.best(inst)
    };
    assemble(env, pop, inst, case, [bottom, high.best(inst)])
}

/// Designer-optimal equilibrium with a subjective court.
pub fn solve_optimal(
    env: &InformationEnvironment,
    pop: &PopulationModel,
) -> Result<EquilibriumSolution, SolverError> {
    solve(env, pop, Institution::SubjectiveCourt)
}

#[cfg(test)]
mod tests {
    use super::*;

    const B: f64 = 9.0 / 13.0;

    fn env(px: f64, py: f64) -> InformationEnvironment {
        InformationEnvironment::new(B, px, py).unwrap()
    }

    fn pop() -> PopulationModel {
        PopulationModel::new(11.0 / 20.0, 1.0).unwrap()
    }

    #[test]
    fn cutoffs() {
        assert_eq!(cutoff_belief(AgentType::Unbiased, 0.0), 0.5);
        assert_eq!(cutoff_belief(AgentType::Biased, 1.0), 0.0);
        assert_eq!(cutoff_belief(AgentType::Biased, 2.0), 0.5);
        assert_eq!(cutoff_belief(AgentType::Biased, f64::INFINITY), 1.0);
        // Indifference of the biased type at beta = 1/2 and F = 2.
        assert_eq!(0.5 * 1.0 + 0.5 * (1.0 - 2.0), 0.0);
    }

    #[test]
    fn fines_round_trip_through_cutoffs() {
        for mu in [0.5, 0.6, 0.75, 0.9] {
            let f = fine_u_at(mu);
            assert!((cutoff_belief(AgentType::Unbiased, f) - mu).abs() < 1e-14);
        }
        for mu in [0.1, 0.2, 0.45] {
            let f = fine_b_at(mu);
            assert!((cutoff_belief(AgentType::Biased, f) - mu).abs() < 1e-14);
        }
        assert_eq!(fine_u_at(0.5), 0.0);
    }

    #[test]
    fn reference_fines() {
        let e = env(0.75, 0.75);
        assert!((fine_u(&e).unwrap() - 1.25).abs() < 1e-12);
        assert!((fine_b(&e).unwrap() - 1.25).abs() < 1e-12);
        let xp = InformationEnvironment::new(0.5, 0.9, 0.51).unwrap();
        assert!(matches!(fine_u(&xp), Err(SolverError::Premise(_))));
    }

    #[test]
    fn mixing_examples() {
        let m = eta_b(&pop(), &env(0.75, 0.75));
        assert!((m.value - 2.0 / 27.0).abs() < 1e-12 && m.feasible);
        assert!((eta_u(&pop()).value - 9.0 / 11.0).abs() < 1e-12);
        let edge = PopulationModel::from_threshold(0.5, 0.5).unwrap();
        assert_eq!(eta_b(&edge, &env(0.75, 0.75)).value, 0.0);
        assert_eq!(eta_u(&edge).value, 1.0);
    }

    #[test]
    fn free_pass_welfare_exact() {
        let e = env(0.75, 0.75);
        let fp = StrategyProfile::free_pass(crate::model::posteriors(&e));
        let w = welfare(&e, &pop(), &fp);
        assert!((w - 1897.0 / 4160.0).abs() < 1e-12);
        assert_eq!(welfare(&e, &pop(), &StrategyProfile::none_act()), 0.0);
        let all = welfare(&e, &pop(), &StrategyProfile::all_act());
        assert!((all - (2.0 * B - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn candidate_sets_by_branch() {
        let low = candidate_equilibria(&env(0.7, 0.75), &pop()).unwrap();
        let regimes: Vec<_> = low.iter().map(|s| s.regime).collect();
        assert_eq!(regimes, vec![Regime::DeterAtFb, Regime::DeterAtFu]);
        let c = &low[0];
        assert!((c.biased_on_bad_pair() - 2.0 / 27.0).abs() < 1e-12);
        assert_eq!(c.unbiased_on_mixed_pair(), 1.0);

        let high = candidate_equilibria(&env(0.8, 0.75), &pop()).unwrap();
        let regimes: Vec<_> = high.iter().map(|s| s.regime).collect();
        assert_eq!(regimes, vec![Regime::FreePass, Regime::DeterAtFb]);
        assert_eq!(high[1].biased_on_bad_pair(), 0.0);
        assert_eq!(high[1].unbiased_on_mixed_pair(), 0.0);
    }

    #[test]
    fn sign_test_matches_welfare_difference() {
        let e = env(0.8, 0.75);
        let c = candidate_equilibria(&e, &pop()).unwrap();
        let diff = c[0].welfare - c[1].welfare;
        assert!((diff - free_pass_advantage(&e, &pop())).abs() < 1e-14);
    }

    #[test]
    fn verifiable_precision_can_hurt() {
        let w74 = solve_optimal(&env(0.74, 0.75), &pop()).unwrap().welfare;
        let w76 = solve_optimal(&env(0.76, 0.75), &pop()).unwrap().welfare;
        assert!(w74 > w76, "{w74} vs {w76}");
    }

    #[test]
    fn high_gamma_gives_free_pass() {
        let p = PopulationModel::new(0.99, 1.0).unwrap();
        let s = solve_optimal(&env(0.8, 0.75), &p).unwrap();
        assert_eq!(s.regime, Regime::FreePass);
    }

    #[test]
    fn every_case_solves() {
        let cases = [
            (0.5, 0.9, 0.51, CaseLabel::XPivotal),
            (0.5, 0.51, 0.9, CaseLabel::YPivotal),
            (0.3, 0.7, 0.7, CaseLabel::BothPositive),
            (0.99, 0.7, 0.7, CaseLabel::AlwaysEfficient),
            (0.01, 0.7, 0.7, CaseLabel::NeverEfficient),
        ];
        for (b, px, py, label) in cases {
            let e = InformationEnvironment::new(b, px, py).unwrap();
            let s = solve_optimal(&e, &pop()).unwrap();
            assert_eq!(s.case, label);
            match label {
                CaseLabel::AlwaysEfficient | CaseLabel::NeverEfficient => {
                    assert_eq!(s.support, Support::TrivialRegion)
                }
                _ => assert_eq!(s.support, Support::Supported),
            }
        }
    }

    #[test]
    fn outside_region_is_tagged() {
        let p = PopulationModel::new(0.4, 1.0).unwrap();
        let s = solve_optimal(&env(0.75, 0.75), &p).unwrap();
        assert_eq!(s.support, Support::OutsideAssumedRegion);
    }

    #[test]
    fn knife_edge_returns_both_families() {
        let e = env(0.75, 0.75);
        let c = candidate_equilibria(&e, &pop()).unwrap();
        let regimes: Vec<_> = c.iter().map(|s| s.slices[0]).collect();
        assert!(regimes.contains(&SliceRegime::FreePass));
        assert!(regimes.contains(&SliceRegime::FullDeterrence));
        assert!(regimes.contains(&SliceRegime::BiasedMixing));
        assert!(regimes.contains(&SliceRegime::UnbiasedMixing));
    }
}
