//! Finitely many agent types with graded bias.
//!
//! Type `k` earns `a [lambda_k theta + (1 - lambda_k)]`, so it acts on a
//! posterior `mu` under fine `F` iff `F <= 1 - 2 lambda_k + mu / (1 - mu)`.
//! Index 0 is the fully biased type (`lambda = 0`), the last index the
//! unbiased type (`lambda = 1`).

use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::model::{posterior, InformationEnvironment, Signal, SignalPair};
use crate::numerics::odds;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypeSpectrum {
    lambdas: Vec<f64>,
    weights: Vec<f64>,
}

impl TypeSpectrum {
    pub fn new(lambdas: Vec<f64>, weights: Vec<f64>) -> Result<Self, ModelError> {
        let bad = |m: &str| Err(ModelError::InvalidSpectrum(m.to_string()));
        if lambdas.len() < 2 {
            return bad("at least two types are required");
        }
        if lambdas.len() != weights.len() {
            return bad("lambdas and weights differ in length");
        }
        if lambdas[0] != 0.0 || lambdas[lambdas.len() - 1] != 1.0 {
            return bad("first lambda must be 0 and last must be 1");
        }
        if lambdas.windows(2).any(|w| !(w[0] <= w[1])) {
            return bad("lambdas must be nondecreasing");
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return bad("weights must be nonnegative");
        }
        if (weights.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return bad("weights must sum to 1");
        }
        Ok(TypeSpectrum { lambdas, weights })
    }

    /// The biased/unbiased pair with prior `gamma` on the unbiased type.
    pub fn two_type(gamma: f64) -> Self {
        TypeSpectrum {
            lambdas: vec![0.0, 1.0],
            weights: vec![1.0 - gamma, gamma],
        }
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }
}

/// Critical fines of every type and the marginal types at a given fine.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KTypeFines {
    /// Highest type acting on `(-1,1)` at the fine, if any.
    pub k_pos: Option<usize>,
    /// Highest type acting on `(-1,-1)` at the fine, if any.
    pub k_neg: Option<usize>,
    /// Largest fine at which each type acts on `(-1,1)`; negative when the
    /// type abstains even without a fine.
    pub fines_pos: Vec<f64>,
    /// Smallest fine deterring each type on `(-1,-1)`.
    pub fines_neg: Vec<f64>,
    /// `fines_neg[k_neg] - fines_pos[k_pos]` when both marginal types exist.
    pub difference: Option<f64>,
}

fn type_fine(lambda: f64, mu: f64) -> f64 {
    1.0 - 2.0 * lambda + odds(mu)
}

pub fn ktype_critical_fines(
    env: &InformationEnvironment,
    spectrum: &TypeSpectrum,
    fine: f64,
) -> KTypeFines {
    let mp = posterior(env, SignalPair::new(Signal::Low, Signal::High));
    let mm = posterior(env, SignalPair::new(Signal::Low, Signal::Low));
    let fines_pos: Vec<f64> = spectrum.lambdas.iter().map(|l| type_fine(*l, mp)).collect();
    let fines_neg: Vec<f64> = spectrum.lambdas.iter().map(|l| type_fine(*l, mm)).collect();
    let k_pos = (0..fines_pos.len()).rev().find(|k| fine <= fines_pos[*k]);
    let k_neg = (0..fines_neg.len()).rev().find(|k| fine < fines_neg[*k]);
    let difference = match (k_pos, k_neg) {
        (Some(p), Some(n)) => Some(fines_neg[n] - fines_pos[p]),
        _ => None,
    };
    KTypeFines {
        k_pos,
        k_neg,
        fines_pos,
        fines_neg,
        difference,
    }
}

/// `F_{-1}^{k_neg} - F_1^{k_pos}` in closed form:
/// `2 (lambda_pos - lambda_neg) + odds(beta) (1-p_x)/p_x [(1-p_y)/p_y - p_y/(1-p_y)]`.
pub fn ktype_fine_difference(
    env: &InformationEnvironment,
    lambda_pos: f64,
    lambda_neg: f64,
) -> f64 {
    let (px, py) = (env.p_x(), env.p_y());
    2.0 * (lambda_pos - lambda_neg)
        + odds(env.beta()) * (1.0 - px) / px * ((1.0 - py) / py - py / (1.0 - py))
}
