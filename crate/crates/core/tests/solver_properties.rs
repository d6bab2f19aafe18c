use liability_core::equilibrium::{audit, candidate_equilibria, solve, solve_optimal, Institution};
use liability_core::model::{
    case_region_bounds, critical_px, InformationEnvironment, PopulationModel,
};
use proptest::prelude::*;

const INSTITUTIONS: [Institution; 4] = [
    Institution::SubjectiveCourt,
    Institution::ObjectiveCourt,
    Institution::Commitment,
    Institution::ExPostScreening,
];

fn pop() -> impl Strategy<Value = PopulationModel> {
    (0.2..0.8f64, 0.01..0.99f64).prop_map(|(gb, t)| {
        let gamma = gb + 0.005 + t * (0.99 - gb - 0.005);
        PopulationModel::from_threshold(gamma, gb).unwrap()
    })
}

fn w(beta: f64, p_x: f64, p_y: f64, pop: &PopulationModel) -> f64 {
    let env = InformationEnvironment::new(beta, p_x, p_y).unwrap();
    solve_optimal(&env, pop).unwrap().welfare
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn solutions_pass_audit(
        beta in 0.05..0.95f64, p_x in 0.51..0.99f64, p_y in 0.51..0.99f64,
        gamma in 0.01..0.99f64, gamma_bar in 0.05..0.95f64,
    ) {
        // Includes populations below the conviction threshold.
        let env = InformationEnvironment::new(beta, p_x, p_y).unwrap();
        let pop = PopulationModel::from_threshold(gamma, gamma_bar).unwrap();
        for inst in INSTITUTIONS {
            let sol = solve(&env, &pop, inst).unwrap();
            prop_assert!(audit(&env, &pop, &sol).is_empty());
            prop_assert!(sol.profile.is_valid());
        }
    }

    #[test]
    fn optimum_dominates_candidates(beta in 0.1..0.9f64, p_x in 0.51..0.95f64, p_y in 0.51..0.95f64, pop in pop()) {
        let env = InformationEnvironment::new(beta, p_x, p_y).unwrap();
        if let Ok(cands) = candidate_equilibria(&env, &pop) {
            let best = solve_optimal(&env, &pop).unwrap().welfare;
            for c in cands {
                prop_assert!(best >= c.welfare - 1e-12, "{best} < {}", c.welfare);
            }
        }
    }

    #[test]
    fn welfare_nondecreasing_in_py(
        beta in 0.1..0.9f64, p_x in 0.51..0.95f64,
        a in 0.51..0.99f64, b in 0.51..0.99f64, pop in pop(),
    ) {
        let (lo, hi) = (a.min(b), a.max(b));
        prop_assert!(w(beta, p_x, hi, &pop) >= w(beta, p_x, lo, &pop) - 1e-9);
    }

    #[test]
    fn continuous_at_case_transitions(beta in 0.1..0.9f64, p_x in 0.51..0.95f64, pop in pop()) {
        let Ok((lo, hi)) = case_region_bounds(beta, p_x) else { return Ok(()) };
        for edge in [lo, hi] {
            prop_assume!(edge > 0.5 + 2e-3 && edge < 1.0 - 2e-3);
            let gap = |eps: f64| (w(beta, p_x, edge + eps, &pop) - w(beta, p_x, edge - eps, &pop)).abs();
            let gaps = [gap(1e-3), gap(1e-4), gap(1e-5)];
            prop_assert!(gaps[1] <= gaps[0] + 1e-12 && gaps[2] <= gaps[1] + 1e-12, "{gaps:?}");
            prop_assert!(gaps[2] < 1e-4, "{gaps:?}");
        }
    }

    #[test]
    fn single_downward_jump_in_px(beta in 0.1..0.9f64, p_y in 0.51..0.95f64, pop in pop()) {
        let Some(star) = critical_px(beta, p_y) else { return Ok(()) };
        prop_assume!(star > 0.5 + 1e-5 && star < 1.0 - 1e-5);
        // W* never jumps up at p_x*; it is continuous there when the same
        // regime is optimal on both sides.
        let left = w(beta, star - 1e-6, p_y, &pop);
        let right = w(beta, star + 1e-6, p_y, &pop);
        prop_assert!(left > right - 1e-5, "left {left} right {right} at p_x* = {star}");
        // Away from p_x* the curve moves by O(step) between grid points.
        let step = 1e-3;
        let mut p = 0.501;
        let mut big = 0;
        while p + step < 0.999 {
            let d = w(beta, p + step, p_y, &pop) - w(beta, p, p_y, &pop);
            if d.abs() > 0.01 {
                big += 1;
                prop_assert!(d < 0.0, "upward jump at {p}");
                prop_assert!(p <= star && star <= p + step, "jump at {p}, p_x* = {star}");
            }
            p += step;
        }
        prop_assert!(big <= 1);
    }
}

#[test]
fn free_pass_on_both_sides_of_the_threshold_is_continuous() {
    let (beta, p_y) = (0.800272675454492, 0.7187255243186753);
    let pop = PopulationModel::from_threshold(0.7981072604179509, 0.2).unwrap();
    let star = critical_px(beta, p_y).unwrap();
    let left = w(beta, star - 1e-6, p_y, &pop);
    let right = w(beta, star + 1e-6, p_y, &pop);
    assert!(right > left && right - left < 1e-6);
}

#[test]
fn reference_environment_drops_at_the_threshold() {
    let pop = PopulationModel::from_threshold(0.55, 0.5).unwrap();
    let beta = 9.0 / 13.0;
    let left = w(beta, 0.75 - 1e-6, 0.75, &pop);
    let right = w(beta, 0.75 + 1e-6, 0.75, &pop);
    assert!(left - right > 1e-3, "left {left} right {right}");
}
