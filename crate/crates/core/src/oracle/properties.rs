use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::continuum::{spread_welfare_trial, SpreadOrder};
use crate::equilibrium::{audit, candidates_for, fine_b_at, fine_u_at, solve, Institution};
use crate::error::OracleError;
use crate::model::{
    classify_case, delta, posterior, CaseLabel, InformationEnvironment, SignalPair, State,
};
use crate::variants::{ktype_fine_difference, verify_no_inaction_punishment};

use super::sampling::{sample_any, sample_either_positive, Sample};
use super::{brute_force_optimum, OracleConfig};

/// Registered property ids, in the order `liability verify` runs them.
pub const PROPERTY_IDS: [&str; 11] = [
    "delta-monotone",
    "delta-identity",
    "posterior-total-probability",
    "py-welfare-monotone",
    "subjective-dominates-objective",
    "variant-ordering",
    "oracle-agreement",
    "inaction-robust",
    "ktype-monotone",
    "spread-welfare",
    "audit-clean",
];

/// Outcome of a randomized property sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct PropertyReport {
    pub id: String,
    pub trials: u64,
    pub failures: u64,
    pub passed: bool,
    /// First failing trial in trial order.
    pub counterexample: Option<String>,
}

type Trial = fn(&mut ChaCha8Rng) -> Result<(), String>;

fn lookup(id: &str) -> Option<Trial> {
    Some(match id {
        "delta-monotone" => delta_monotone,
        "delta-identity" => delta_identity,
        "posterior-total-probability" => total_probability,
        "py-welfare-monotone" => py_welfare_monotone,
        "subjective-dominates-objective" => subjective_dominates,
        "variant-ordering" => variant_ordering,
        "oracle-agreement" => oracle_agreement,
        "inaction-robust" => inaction_robust,
        "ktype-monotone" => ktype_monotone,
        "spread-welfare" => spread_welfare,
        "audit-clean" => audit_clean,
        _ => return None,
    })
}

/// Runs `trials` independent trials of a registered property.
///
/// Trial `i` draws from a ChaCha stream keyed by `(seed, i)`, so reports
/// are identical for any thread count.
pub fn property_sweep(id: &str, trials: u64, seed: u64) -> Result<PropertyReport, OracleError> {
    let trial = lookup(id).ok_or_else(|| OracleError::UnknownProperty(id.to_string()))?;
    let outcomes: Vec<Result<(), String>> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i);
            trial(&mut rng)
        })
        .collect();
    let failures = outcomes.iter().filter(|o| o.is_err()).count() as u64;
    let counterexample = outcomes
        .iter()
        .enumerate()
        .find_map(|(i, o)| o.as_ref().err().map(|e| format!("trial {i}: {e}")));
    Ok(PropertyReport {
        id: id.to_string(),
        trials,
        failures,
        passed: failures == 0,
        counterexample,
    })
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn env(beta: f64, p_x: f64, p_y: f64) -> Result<InformationEnvironment, String> {
    InformationEnvironment::new(beta, p_x, p_y).map_err(|e| e.to_string())
}

fn welfare(s: &Sample, e: &InformationEnvironment, inst: Institution) -> Result<f64, String> {
    solve(e, &s.pop, inst)
        .map(|sol| sol.welfare)
        .map_err(|err| format!("{s}: {inst:?} solve failed: {err}"))
}

fn delta_monotone(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let s = sample_any(rng);
    let (b, px, py) = (s.env.beta(), s.env.p_x(), s.env.p_y());
    let px2 = rng.gen_range(px..0.99);
    let py2 = rng.gen_range(py..0.99);
    let d = delta(&s.env);
    let dx = delta(&env(b, px2, py)?);
    let dy = delta(&env(b, px, py2)?);
    check(dx >= d - 1e-12 && dy <= d + 1e-12, || {
        format!("{s}: delta {d}, at p_x={px2} {dx}, at p_y={py2} {dy}")
    })
}

fn delta_identity(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let s = sample_any(rng);
    let mm = posterior(&s.env, SignalPair::from_values(-1, -1).unwrap());
    let mp = posterior(&s.env, SignalPair::from_values(-1, 1).unwrap());
    let direct = fine_b_at(mm) - fine_u_at(mp);
    let d = delta(&s.env);
    check((direct - d).abs() <= 1e-9 * (1.0 + d.abs()), || {
        format!("{s}: delta {d} but F^b - F^u = {direct}")
    })
}

fn total_probability(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let s = sample_any(rng);
    let mut mass = 0.0;
    let mut high = 0.0;
    for p in SignalPair::ALL {
        mass += s.env.pair_prob(p);
        high += s.env.pair_prob(p) * posterior(&s.env, p);
        let mu = posterior(&s.env, p);
        let direct = s.env.joint(p, State::High) / s.env.pair_prob(p);
        if (mu - direct).abs() > 1e-12 {
            return Err(format!(
                "{s}: posterior at {p} is {mu}, Bayes gives {direct}"
            ));
        }
    }
    check(
        (mass - 1.0).abs() < 1e-12 && (high - s.env.beta()).abs() < 1e-12,
        || format!("{s}: total mass {mass}, mean posterior {high}"),
    )
}

fn py_welfare_monotone(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let s = sample_either_positive(rng);
    let py2 = rng.gen_range(s.env.p_y()..0.99);
    let hi = env(s.env.beta(), s.env.p_x(), py2)?;
    let w1 = welfare(&s, &s.env, Institution::SubjectiveCourt)?;
    let w2 = welfare(&s, &hi, Institution::SubjectiveCourt)?;
    check(w2 >= w1 - 1e-9, || {
        format!("{s}: W = {w1}, at p_y = {py2} W = {w2}")
    })
}

fn subjective_dominates(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let s = sample_either_positive(rng);
    let sub = welfare(&s, &s.env, Institution::SubjectiveCourt)?;
    let obj = welfare(&s, &s.env, Institution::ObjectiveCourt)?;
    check(sub >= obj - 1e-10, || {
        format!("{s}: subjective {sub} < objective {obj}")
    })
}

fn variant_ordering(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let s = sample_either_positive(rng);
    let c = welfare(&s, &s.env, Institution::Commitment)?;
    let b = welfare(&s, &s.env, Institution::SubjectiveCourt)?;
    let e = welfare(&s, &s.env, Institution::ExPostScreening)?;
    check(c >= b - 1e-10 && b >= e - 1e-10, || {
        format!("{s}: commitment {c}, baseline {b}, ex post {e}")
    })
}

fn oracle_agreement(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let s = sample_either_positive(rng);
    let r = brute_force_optimum(&s.env, &s.pop, &OracleConfig::default())
        .map_err(|e| format!("{s}: {e}"))?;
    check(r.agreement && r.violations.is_empty(), || {
        format!(
            "{s}: oracle {} vs solver {:?}, violations {:?}",
            r.best_welfare, r.solver_welfare, r.violations
        )
    })
}

fn inaction_robust(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let s = sample_either_positive(rng);
    let cands = candidates_for(&s.env, &s.pop, Institution::SubjectiveCourt)
        .map_err(|e| format!("{s}: {e}"))?;
    match cands
        .iter()
        .find(|c| !verify_no_inaction_punishment(&s.env, &s.pop, c))
    {
        Some(c) => Err(format!(
            "{s}: candidate {:?} invites inaction punishment",
            c.slices
        )),
        None => Ok(()),
    }
}

fn ktype_monotone(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let s = sample_any(rng);
    let (b, px, py) = (s.env.beta(), s.env.p_x(), s.env.p_y());
    let (lp, ln) = (rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0));
    let px2 = rng.gen_range(px..0.99);
    let py2 = rng.gen_range(py..0.99);
    let d = ktype_fine_difference(&s.env, lp, ln);
    let dx = ktype_fine_difference(&env(b, px2, py)?, lp, ln);
    let dy = ktype_fine_difference(&env(b, px, py2)?, lp, ln);
    check(dx >= d - 1e-12 && dy <= d + 1e-12, || {
        format!("{s} lambdas=({lp}, {ln}): {d}, at p_x={px2} {dx}, at p_y={py2} {dy}")
    })
}

fn spread_welfare(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let t = spread_welfare_trial(rng).map_err(|e| e.to_string())?;
    let ordered = matches!(t.order, SpreadOrder::MoreSpread | SpreadOrder::Equal);
    check(
        ordered && t.mean_gap.abs() < 1e-12 && t.fixed_cutoff_gain() >= -1e-10,
        || format!("{t:?}"),
    )
}

fn audit_clean(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let s = sample_any(rng);
    for inst in [
        Institution::SubjectiveCourt,
        Institution::ObjectiveCourt,
        Institution::Commitment,
        Institution::ExPostScreening,
    ] {
        let sol = solve(&s.env, &s.pop, inst).map_err(|e| format!("{s} ({inst:?}): {e}"))?;
        let v = audit(&s.env, &s.pop, &sol);
        if !v.is_empty() {
            return Err(format!("{s} ({inst:?}): {}", v[0]));
        }
        if classify_case(&s.env) == CaseLabel::EitherPositive && !sol.profile.is_valid() {
            return Err(format!("{s} ({inst:?}): invalid profile"));
        }
    }
    Ok(())
}
