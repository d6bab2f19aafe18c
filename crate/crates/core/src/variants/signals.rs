//! Signal structures beyond symmetric, conditionally independent precisions.

use serde::{Deserialize, Serialize};

use crate::equilibrium::{fine_b_at, fine_u_at};
use crate::error::ModelError;
use crate::model::Signal;
use crate::numerics::odds;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum DependentSignalSpec {
    /// `Y` copies `X` with probability `rho`; otherwise it is an independent
    /// signal of precision `p_y`.
    Correlated { p_x: f64, p_y: f64, rho: f64 },
    /// State-dependent precisions `P(signal = theta | theta = i)`.
    Asymmetric {
        p_x_pos: f64,
        p_x_neg: f64,
        p_y_pos: f64,
        p_y_neg: f64,
    },
}

fn check(
    name: &str,
    v: f64,
    low: f64,
    high: f64,
    closed_low: bool,
    closed_high: bool,
) -> Result<(), ModelError> {
    let ok = v.is_finite()
        && (if closed_low { v >= low } else { v > low })
        && (if closed_high { v <= high } else { v < high });
    if ok {
        Ok(())
    } else {
        Err(ModelError::InvalidSignalSpec(format!(
            "{name} = {v} out of range"
        )))
    }
}

impl DependentSignalSpec {
    pub fn correlated(p_x: f64, p_y: f64, rho: f64) -> Result<Self, ModelError> {
        check("p_x", p_x, 0.5, 1.0, false, false)?;
        check("p_y", p_y, 0.5, 1.0, false, false)?;
        check("rho", rho, 0.0, 1.0, true, true)?;
        Ok(DependentSignalSpec::Correlated { p_x, p_y, rho })
    }

    pub fn asymmetric(
        p_x_pos: f64,
        p_x_neg: f64,
        p_y_pos: f64,
        p_y_neg: f64,
    ) -> Result<Self, ModelError> {
        check("p_x_pos", p_x_pos, 0.5, 1.0, true, false)?;
        check("p_x_neg", p_x_neg, 0.5, 1.0, true, false)?;
        check("p_y_pos", p_y_pos, 0.5, 1.0, true, false)?;
        check("p_y_neg", p_y_neg, 0.5, 1.0, true, false)?;
        Ok(DependentSignalSpec::Asymmetric {
            p_x_pos,
            p_x_neg,
            p_y_pos,
            p_y_neg,
        })
    }

    /// `P(X = x, Y = y | theta)`.
    pub fn likelihood(&self, x: Signal, y: Signal, theta: Signal) -> f64 {
        let hit = |p: f64, s: Signal| if s == theta { p } else { 1.0 - p };
        match *self {
            DependentSignalSpec::Correlated { p_x, p_y, rho } => {
                let copy = if y == x { rho } else { 0.0 };
                hit(p_x, x) * (copy + (1.0 - rho) * hit(p_y, y))
            }
            DependentSignalSpec::Asymmetric {
                p_x_pos,
                p_x_neg,
                p_y_pos,
                p_y_neg,
            } => {
                let (px, py) = match theta {
                    Signal::High => (p_x_pos, p_y_pos),
                    Signal::Low => (p_x_neg, p_y_neg),
                };
                hit(px, x) * hit(py, y)
            }
        }
    }
}

fn posterior_from(
    spec: &DependentSignalSpec,
    beta: f64,
    x: Signal,
    y: Option<Signal>,
) -> Option<f64> {
    let mass = |theta: Signal| {
        let prior = if theta == Signal::High {
            beta
        } else {
            1.0 - beta
        };
        let l = match y {
            Some(y) => spec.likelihood(x, y, theta),
            None => Signal::BOTH
                .iter()
                .map(|y| spec.likelihood(x, *y, theta))
                .sum(),
        };
        prior * l
    };
    let (good, bad) = (mass(Signal::High), mass(Signal::Low));
    (good + bad > 0.0).then(|| good / (good + bad))
}

/// `(F^u, F^b)` from the posteriors the extended structure induces on
/// `(-1,1)` and `(-1,-1)`. When `(-1,1)` has probability zero (a perfect
/// copy), `Y` adds nothing and both fines use the posterior given `x = -1`.
pub fn extended_fines(spec: &DependentSignalSpec, beta: f64) -> (f64, f64) {
    let x = Signal::Low;
    match (
        posterior_from(spec, beta, x, Some(Signal::High)),
        posterior_from(spec, beta, x, Some(Signal::Low)),
    ) {
        (Some(mp), Some(mm)) => (fine_u_at(mp), fine_b_at(mm)),
        _ => {
            let mu = posterior_from(spec, beta, x, None).expect("x = -1 has positive mass");
            (fine_u_at(mu), fine_b_at(mu))
        }
    }
}

/// `F^b - F^u` under the extended structure.
pub fn delta_extended(spec: &DependentSignalSpec, beta: f64) -> f64 {
    let (fu, fb) = extended_fines(spec, beta);
    fb - fu
}

/// Bracket multiplying `odds(beta) (1-p_x)/p_x` in the correlated gap:
/// `(rho + (1-rho)(1-p_y)) / (rho + (1-rho) p_y) - p_y / (1-p_y)`, never
/// positive.
pub fn correlated_bracket(p_y: f64, rho: f64) -> f64 {
    (rho + (1.0 - rho) * (1.0 - p_y)) / (rho + (1.0 - rho) * p_y) - p_y / (1.0 - p_y)
}

/// Asymmetric gap with a constant of `-2`, as sometimes printed; differs
/// from [`delta_extended`] by exactly 4.
pub fn printed_delta_asymmetric(
    beta: f64,
    p_x_pos: f64,
    p_x_neg: f64,
    p_y_pos: f64,
    p_y_neg: f64,
) -> f64 {
    -2.0 + odds(beta) * (1.0 - p_x_pos) / p_x_neg
        * ((1.0 - p_y_pos) / p_y_neg - p_y_pos / (1.0 - p_y_neg))
}

/// Correlated gap with a constant of `-2`, as sometimes printed; differs
/// from [`delta_extended`] by exactly 4 whenever `rho < 1`.
pub fn printed_delta_correlated(beta: f64, p_x: f64, p_y: f64, rho: f64) -> f64 {
    let a = (1.0 - (1.0 - rho) * p_y) / (rho + p_y * (1.0 - rho)) - p_y / (1.0 - p_y);
    -2.0 + odds(beta) * (1.0 - p_x) / p_x * a
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{delta, InformationEnvironment};

    const B: f64 = 9.0 / 13.0;

    #[test]
    fn independent_copy_reduces_to_baseline() {
        let spec = DependentSignalSpec::correlated(0.8, 0.75, 0.0).unwrap();
        let env = InformationEnvironment::new(B, 0.8, 0.75).unwrap();
        assert!((delta_extended(&spec, B) - delta(&env)).abs() < 1e-12);
    }

    #[test]
    fn perfect_copy_uses_x_only_posterior() {
        let spec = DependentSignalSpec::correlated(0.8, 0.75, 1.0).unwrap();
        let (fu, fb) = extended_fines(&spec, B);
        let mu = B * 0.2 / (B * 0.2 + (1.0 - B) * 0.8);
        assert!((fb - fine_b_at(mu)).abs() < 1e-12);
        assert!((fu - fine_u_at(mu)).abs() < 1e-12);
        assert!((delta_extended(&spec, B) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn symmetric_asymmetric_spec_is_baseline() {
        let spec = DependentSignalSpec::asymmetric(0.7, 0.7, 0.8, 0.8).unwrap();
        let env = InformationEnvironment::new(0.6, 0.7, 0.8).unwrap();
        assert!((delta_extended(&spec, 0.6) - delta(&env)).abs() < 1e-12);
    }

    #[test]
    fn asymmetric_closed_form_and_printed_constant() {
        let (b, a, c, d, e) = (0.65, 0.7, 0.6, 0.8, 0.9);
        let spec = DependentSignalSpec::asymmetric(a, c, d, e).unwrap();
        let derived = 2.0 + odds(b) * (1.0 - a) / c * ((1.0 - d) / e - d / (1.0 - e));
        let first_principles = delta_extended(&spec, b);
        assert!((first_principles - derived).abs() < 1e-12);
        let printed = printed_delta_asymmetric(b, a, c, d, e);
        assert!((first_principles - printed - 4.0).abs() < 1e-12);
    }

    #[test]
    fn correlated_closed_form_and_printed_constant() {
        for &rho in &[0.0, 0.1, 0.4, 0.8, 0.99] {
            let spec = DependentSignalSpec::correlated(0.8, 0.7, rho).unwrap();
            let closed = 2.0 + odds(B) * 0.2 / 0.8 * correlated_bracket(0.7, rho);
            let d = delta_extended(&spec, B);
            assert!((d - closed).abs() < 1e-11, "rho {rho}");
            assert!((d - printed_delta_correlated(B, 0.8, 0.7, rho) - 4.0).abs() < 1e-11);
        }
    }

    #[test]
    fn correlated_bracket_is_nonpositive() {
        for i in 0..=100 {
            let rho = i as f64 / 100.0;
            for &py in &[0.51, 0.6, 0.75, 0.9, 0.99] {
                assert!(correlated_bracket(py, rho) <= 0.0);
            }
        }
    }

    #[test]
    fn validation() {
        assert!(DependentSignalSpec::correlated(0.8, 0.7, 1.2).is_err());
        assert!(DependentSignalSpec::asymmetric(0.4, 0.7, 0.7, 0.7).is_err());
        assert!(DependentSignalSpec::asymmetric(0.5, 0.7, 0.7, 1.0).is_err());
    }
}
