use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::equilibrium::StrategyProfile;
use crate::model::{AgentType, InformationEnvironment, PopulationModel, Signal, SignalPair};

use super::OracleConfig;

/// Draws per random stream; stream `k` covers draws `k * CHUNK ..`.
const CHUNK: u64 = 1 << 16;

/// Sample mean of `a^omega(x, y) theta` and its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub samples: u64,
}

fn draw_signal<R: Rng>(rng: &mut R, theta: Signal, precision: f64) -> Signal {
    if rng.gen::<f64>() < precision {
        theta
    } else {
        theta.flip()
    }
}

/// Estimates ex-ante welfare of `profile` from `cfg.mc_samples` draws of
/// `(omega, theta, x, y)`.
///
/// Draws are split into chunks with independent ChaCha streams keyed by
/// `cfg.seed` and the chunk index, and the chunk sums are added in order,
/// so the result does not depend on the thread count.
pub fn monte_carlo_welfare(
    env: &InformationEnvironment,
    pop: &PopulationModel,
    profile: &StrategyProfile,
    cfg: &OracleConfig,
) -> McEstimate {
    let n = cfg.mc_samples;
    let chunks = n.div_ceil(CHUNK);
    let partial: Vec<(f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(k);
            let len = CHUNK.min(n - k * CHUNK);
            let (mut sum, mut sumsq) = (0.0, 0.0);
            for _ in 0..len {
                let omega = if rng.gen::<f64>() < pop.gamma() {
                    AgentType::Unbiased
                } else {
                    AgentType::Biased
                };
                let theta = if rng.gen::<f64>() < env.beta() {
                    Signal::High
                } else {
                    Signal::Low
                };
                let x = draw_signal(&mut rng, theta, env.p_x());
                let y = draw_signal(&mut rng, theta, env.p_y());
                let a = profile.action(omega, SignalPair::new(x, y));
                // Mixed actions enter through their expectation.
                let v = a * f64::from(theta.value());
                sum += v;
                sumsq += v * v;
            }
            (sum, sumsq)
        })
        .collect();
    let (sum, sumsq) = partial
        .iter()
        .fold((0.0, 0.0), |(s, q), (a, b)| (s + a, q + b));
    let nf = n as f64;
    let mean = sum / nf;
    let var = if n > 1 {
        ((sumsq - nf * mean * mean) / (nf - 1.0)).max(0.0)
    } else {
        0.0
    };
    McEstimate {
        estimate: mean,
        std_error: (var / nf).sqrt(),
        samples: n,
    }
}
