use serde::{Deserialize, Serialize};

use crate::equilibrium::{solve, EquilibriumSolution, Institution, Mixing};
use crate::error::SolverError;
use crate::model::{
    case_region_bounds, classify_case, critical_py, CaseLabel, InformationEnvironment,
    PopulationModel,
};

/// What the court tries to infer before convicting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MensReaMode {
    /// The agent's preferences.
    Subjective,
    /// The agent's information.
    Objective,
}

impl MensReaMode {
    pub fn institution(self) -> Institution {
        match self {
            MensReaMode::Subjective => Institution::SubjectiveCourt,
            MensReaMode::Objective => Institution::ObjectiveCourt,
        }
    }
}

/// Designer-optimal equilibrium for either court objective, in every case.
pub fn solve_with_mens_rea(
    env: &InformationEnvironment,
    pop: &PopulationModel,
    mode: MensReaMode,
) -> Result<EquilibriumSolution, SolverError> {
    solve(env, pop, mode.institution())
}

fn mixing(raw: f64) -> Mixing {
    Mixing {
        value: raw.clamp(0.0, 1.0),
        raw,
        feasible: raw <= 1.0,
    }
}

/// Biased mixing on `(-1,-1)` that leaves an objective court indifferent
/// while the unbiased type is chilled.
pub fn eta_1(env: &InformationEnvironment, pop: &PopulationModel) -> Mixing {
    let (py, gb) = (env.p_y(), pop.gamma_bar());
    mixing((1.0 - py) / py * (1.0 - gb) / gb)
}

/// Biased mixing on `(-1,-1)` that leaves an objective court indifferent
/// while the unbiased type acts on `(-1,1)`.
pub fn eta_2(env: &InformationEnvironment, pop: &PopulationModel) -> Mixing {
    mixing(eta_1(env, pop).raw / (1.0 - pop.gamma()))
}

/// `eta_2 - eta_1` from its piecewise closed form in the court threshold.
pub fn eta_gap_piecewise(p_y: f64, gamma: f64, gamma_bar: f64) -> f64 {
    let r = (1.0 - p_y) / p_y * (1.0 - gamma_bar) / gamma_bar;
    if gamma_bar <= 1.0 - p_y {
        0.0
    } else if gamma_bar < (1.0 - p_y) / (1.0 - p_y * gamma) {
        1.0 - r
    } else {
        gamma / (1.0 - gamma) * r
    }
}

/// Value of acting on `(-1,1)` relative to the loss from acting on `(-1,-1)`.
pub fn delta_hat(env: &InformationEnvironment) -> f64 {
    let (b, px, py) = (env.beta(), env.p_x(), env.p_y());
    (b * py * (1.0 - px) - (1.0 - b) * px * (1.0 - py))
        / ((1.0 - b) * px * py - b * (1.0 - px) * (1.0 - py))
}

/// Welfare of the objective-court equilibrium with cap `F^b` when
/// `F^b > F^u`.
pub fn objective_f1(env: &InformationEnvironment, pop: &PopulationModel) -> f64 {
    let (b, px, py, g) = (env.beta(), env.p_x(), env.p_y(), pop.gamma());
    let e1 = eta_1(env, pop).value;
    b * (px + (1.0 - px) * (1.0 - g) * (py + (1.0 - py) * e1))
        - (1.0 - b) * ((1.0 - px) + px * (1.0 - g) * (1.0 - py + py * e1))
}

/// Welfare of the objective-court equilibrium with cap `F^b` when
/// `F^u > F^b`.
pub fn objective_f2(env: &InformationEnvironment, pop: &PopulationModel) -> f64 {
    let (b, px, py, g) = (env.beta(), env.p_x(), env.p_y(), pop.gamma());
    let e2 = eta_2(env, pop).value;
    b * (px + (1.0 - px) * (py + (1.0 - py) * (1.0 - g) * e2))
        - (1.0 - b) * ((1.0 - px) + px * ((1.0 - py) + py * (1.0 - g) * e2))
}

/// A reason welfare cannot fall as the unverifiable precision rises under
/// an objective court.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MonotoneWitness {
    /// The critical unverifiable precision lies outside the either-positive
    /// interval.
    CriticalOutsideRegion,
    /// Exact condition at the critical precision.
    ConditionAtCritical,
    /// Sufficient condition that does not involve the court threshold.
    SimplifiedCondition,
    /// Prior above the verifiable precision.
    BetaExceedsPx,
    /// Court threshold at most `1 - p_y*`, so both mixings coincide.
    LowCourtThreshold,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityReport {
    pub guaranteed: bool,
    pub witnesses: Vec<MonotoneWitness>,
    pub critical_py: Option<f64>,
    /// `f2 - f1` at the critical precision.
    pub jump: Option<f64>,
}

/// Whether objective-court welfare is nondecreasing in `p_y` across the
/// either-positive interval of `(beta, p_x)`.
pub fn check_py_monotone_objective(
    env: &InformationEnvironment,
    pop: &PopulationModel,
) -> Result<MonotonicityReport, SolverError> {
    case_region_bounds(env.beta(), env.p_x())?;
    let Some(p_star) = critical_py(env.beta(), env.p_x()) else {
        return Ok(MonotonicityReport {
            guaranteed: true,
            witnesses: vec![MonotoneWitness::CriticalOutsideRegion],
            critical_py: None,
            jump: None,
        });
    };
    let at = env.with_p_y(p_star)?;
    let (b, px, g, gb) = (env.beta(), env.p_x(), pop.gamma(), pop.gamma_bar());
    let gap = eta_2(&at, pop).value - eta_1(&at, pop).value;
    let condition = (1.0 - g) / g * gap <= delta_hat(&at);

    let mut witnesses = Vec::new();
    if condition {
        witnesses.push(MonotoneWitness::ConditionAtCritical);
    }
    if (1.0 - b) / b * px / (1.0 - px) <= (1.0 - g * (1.0 - p_star)) / (1.0 - p_star * g) {
        witnesses.push(MonotoneWitness::SimplifiedCondition);
    }
    if b > px {
        witnesses.push(MonotoneWitness::BetaExceedsPx);
    }
    if gb <= 1.0 - p_star {
        witnesses.push(MonotoneWitness::LowCourtThreshold);
    }
    Ok(MonotonicityReport {
        guaranteed: condition,
        witnesses,
        critical_py: Some(p_star),
        jump: Some(objective_f2(&at, pop) - objective_f1(&at, pop)),
    })
}

/// Objective-court optimum plus the `p_y` monotonicity condition at the
/// critical precision (`None` when that precision is outside the region).
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectiveSolution {
    pub solution: EquilibriumSolution,
    pub condition_holds: Option<bool>,
}

/// Designer-optimal equilibrium under an objective court in the
/// either-positive case.
pub fn solve_objective_mensrea(
    env: &InformationEnvironment,
    pop: &PopulationModel,
) -> Result<ObjectiveSolution, SolverError> {
    let case = classify_case(env);
    if case != CaseLabel::EitherPositive {
        return Err(SolverError::WrongCase(case));
    }
    let solution = solve(env, pop, Institution::ObjectiveCourt)?;
    let report = check_py_monotone_objective(env, pop)?;
    Ok(ObjectiveSolution {
        solution,
        condition_holds: report.critical_py.map(|_| report.guaranteed),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::{solve_optimal, SliceRegime};

    const B: f64 = 9.0 / 13.0;

    fn pop() -> PopulationModel {
        PopulationModel::new(0.55, 1.0).unwrap()
    }

    #[test]
    fn reference_mixings() {
        let env = InformationEnvironment::new(B, 0.75, 0.75).unwrap();
        assert!((eta_1(&env, &pop()).value - 1.0 / 3.0).abs() < 1e-12);
        assert!((eta_2(&env, &pop()).value - 20.0 / 27.0).abs() < 1e-12);
    }

    #[test]
    fn piecewise_gap_matches_clamped_difference() {
        for &py in &[0.55, 0.7, 0.9] {
            for &g in &[0.3, 0.55, 0.9] {
                for i in 1..50 {
                    let gb = i as f64 / 50.0;
                    let env = InformationEnvironment::new(B, 0.75, py).unwrap();
                    let p = PopulationModel::from_threshold(g, gb).unwrap();
                    let d = eta_2(&env, &p).value - eta_1(&env, &p).value;
                    assert!((d - eta_gap_piecewise(py, g, gb)).abs() < 1e-12);
                    assert!((-1e-15..=g + 1e-12).contains(&d));
                }
            }
        }
    }

    #[test]
    fn f_forms_match_solver_welfare() {
        let p = pop();
        let above = InformationEnvironment::new(B, 0.8, 0.75).unwrap();
        let s = solve(&above, &p, Institution::ObjectiveCourt).unwrap();
        if s.slices[0] == SliceRegime::FullDeterrence {
            assert!((s.welfare - objective_f1(&above, &p)).abs() < 1e-12);
        }
        let below = InformationEnvironment::new(B, 0.7, 0.75).unwrap();
        let s = solve(&below, &p, Institution::ObjectiveCourt).unwrap();
        assert_eq!(s.slices[0], SliceRegime::BiasedMixing);
        assert!((s.welfare - objective_f2(&below, &p)).abs() < 1e-12);
    }

    #[test]
    fn subjective_mode_is_baseline() {
        let env = InformationEnvironment::new(B, 0.72, 0.75).unwrap();
        let a = solve_with_mens_rea(&env, &pop(), MensReaMode::Subjective).unwrap();
        let b = solve_optimal(&env, &pop()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn witnesses_imply_condition() {
        for &(b, px, g, gb) in &[
            (0.8, 0.75, 0.55, 0.5),
            (B, 0.75, 0.55, 0.2),
            (B, 0.75, 0.99, 0.5),
            (B, 0.8, 0.6, 0.7),
        ] {
            let env = InformationEnvironment::new(b, px, 0.75).unwrap();
            let p = PopulationModel::from_threshold(g, gb).unwrap();
            let r = check_py_monotone_objective(&env, &p).unwrap();
            if !r.witnesses.is_empty() {
                assert!(r.guaranteed, "{b} {px} {g} {gb}: {r:?}");
            }
            if let Some(jump) = r.jump {
                assert_eq!(r.guaranteed, jump >= -1e-12);
            }
        }
    }

    #[test]
    fn beta_above_px_is_monotone() {
        let env = InformationEnvironment::new(0.8, 0.75, 0.7).unwrap();
        let r = check_py_monotone_objective(&env, &pop()).unwrap();
        assert!(r.guaranteed);
    }

    #[test]
    fn high_gamma_is_monotone() {
        let env = InformationEnvironment::new(B, 0.75, 0.75).unwrap();
        let p = PopulationModel::new(0.999, 1.0).unwrap();
        assert!(check_py_monotone_objective(&env, &p).unwrap().guaranteed);
    }

    #[test]
    fn wrong_case_rejected() {
        let env = InformationEnvironment::new(0.5, 0.9, 0.51).unwrap();
        assert!(matches!(
            solve_objective_mensrea(&env, &pop()),
            Err(SolverError::WrongCase(CaseLabel::XPivotal))
        ));
    }
}
