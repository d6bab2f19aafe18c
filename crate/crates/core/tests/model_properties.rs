use liability_core::equilibrium::{fine_b_at, fine_u_at};
use liability_core::model::{
    classify_case, delta, posterior, posteriors, InformationEnvironment, Signal, SignalPair,
};
use proptest::prelude::*;

fn env(beta: f64, p_x: f64, p_y: f64) -> InformationEnvironment {
    InformationEnvironment::new(beta, p_x, p_y).unwrap()
}

fn pair() -> impl Strategy<Value = SignalPair> {
    prop::sample::select(SignalPair::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn posterior_monotone(
        beta in 0.05..0.9f64, p_x in 0.51..0.94f64, p_y in 0.51..0.94f64,
        h in 1e-4..0.05f64, s in pair(),
    ) {
        let base = posterior(&env(beta, p_x, p_y), s);
        prop_assert!(posterior(&env(beta + h, p_x, p_y), s) > base);
        let up_x = posterior(&env(beta, p_x + h, p_y), s);
        let up_y = posterior(&env(beta, p_x, p_y + h), s);
        match s.x {
            Signal::High => prop_assert!(up_x > base),
            Signal::Low => prop_assert!(up_x < base),
        }
        match s.y {
            Signal::High => prop_assert!(up_y > base),
            Signal::Low => prop_assert!(up_y < base),
        }
    }

    #[test]
    fn total_probability(beta in 0.01..0.99f64, p_x in 0.501..0.999f64, p_y in 0.501..0.999f64) {
        let e = env(beta, p_x, p_y);
        let mean: f64 = SignalPair::ALL.iter().map(|s| e.pair_prob(*s) * posterior(&e, *s)).sum();
        let mass: f64 = SignalPair::ALL.iter().map(|s| e.pair_prob(*s)).sum();
        prop_assert!((mean - beta).abs() < 1e-12);
        prop_assert!((mass - 1.0).abs() < 1e-12);
    }

    #[test]
    fn delta_is_fine_gap(beta in 0.05..0.95f64, p_x in 0.51..0.99f64, p_y in 0.51..0.99f64) {
        let e = env(beta, p_x, p_y);
        let [mm, mp, _, _] = posteriors(&e);
        let gap = fine_b_at(mm) - fine_u_at(mp);
        prop_assert!((delta(&e) - gap).abs() <= 1e-12 * (1.0 + gap.abs()), "{} vs {gap}", delta(&e));
    }

    #[test]
    fn delta_monotone_in_precisions(beta in 0.05..0.95f64, p_x in 0.51..0.99f64, p_y in 0.51..0.99f64) {
        let eps = 1e-4;
        let d = delta(&env(beta, p_x, p_y));
        prop_assert!(delta(&env(beta, p_x + eps, p_y)) > d);
        prop_assert!(delta(&env(beta, p_x, p_y + eps)) < d);
    }

    #[test]
    fn case_stable_under_small_perturbations(
        beta in 0.05..0.95f64, p_x in 0.52..0.98f64, p_y in 0.52..0.98f64,
        dir in prop::array::uniform3(-1.0..1.0f64),
    ) {
        let e = env(beta, p_x, p_y);
        let margin = posteriors(&e).iter().map(|m| (m - 0.5).abs()).fold(f64::INFINITY, f64::min);
        prop_assume!(margin > 1e-9);
        // Log-odds of every posterior move by at most the sum of the logit
        // slopes times the step, and a posterior by a quarter of that; the
        // factor 4 covers the slopes growing over the step.
        let slope = |p: f64| 1.0 / (p * (1.0 - p));
        let lipschitz = (slope(beta) + slope(p_x) + slope(p_y)) / 4.0;
        let h = margin / (4.0 * lipschitz);
        let moved = env(beta + h * dir[0], p_x + h * dir[1], p_y + h * dir[2]);
        prop_assert_eq!(classify_case(&moved), classify_case(&e));
    }
}
