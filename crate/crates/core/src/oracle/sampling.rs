use rand::Rng;

use crate::model::{classify_case, delta, CaseLabel, InformationEnvironment, PopulationModel};

/// A random environment and population.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub env: InformationEnvironment,
    pub pop: PopulationModel,
}

impl std::fmt::Display for Sample {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "beta={} p_x={} p_y={} gamma={} gamma_bar={}",
            self.env.beta(),
            self.env.p_x(),
            self.env.p_y(),
            self.pop.gamma(),
            self.pop.gamma_bar()
        )
    }
}

fn draw_env<R: Rng + ?Sized>(rng: &mut R) -> InformationEnvironment {
    loop {
        let beta = rng.gen_range(0.1..0.9);
        let p_x = rng.gen_range(0.51..0.95);
        let p_y = rng.gen_range(0.51..0.95);
        if let Ok(env) = InformationEnvironment::new(beta, p_x, p_y) {
            return env;
        }
    }
}

/// Threshold in `(0.2, 0.8)` and a type prior above it by at least 0.01.
fn draw_pop<R: Rng + ?Sized>(rng: &mut R) -> PopulationModel {
    let gamma_bar = rng.gen_range(0.2..0.8);
    let gamma = rng.gen_range(gamma_bar + 0.01..0.99);
    PopulationModel::from_threshold(gamma, gamma_bar).expect("sampled inside the domain")
}

/// Either-positive environment with `|F^b - F^u| > 1e-3`, and a type prior
/// above the conviction threshold.
pub fn sample_either_positive<R: Rng + ?Sized>(rng: &mut R) -> Sample {
    let env = loop {
        let env = draw_env(rng);
        if classify_case(&env) == CaseLabel::EitherPositive && delta(&env).abs() > 1e-3 {
            break env;
        }
    };
    Sample {
        env,
        pop: draw_pop(rng),
    }
}

/// Environment of any case, and a type prior above the conviction threshold.
pub fn sample_any<R: Rng + ?Sized>(rng: &mut R) -> Sample {
    Sample {
        env: draw_env(rng),
        pop: draw_pop(rng),
    }
}
