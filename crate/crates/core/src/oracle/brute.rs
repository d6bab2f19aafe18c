use std::io::Write;

use serde::Serialize;

use crate::equilibrium::{
    audit, regime_of, solve, support_of, EquilibriumSolution, Institution, SliceOutcome,
    SliceRegime, StrategyProfile,
};
use crate::error::OracleError;
use crate::model::{
    classify_case, AgentType, InformationEnvironment, PopulationModel, Signal, SignalPair,
};
use crate::numerics::fmt_sig;

use super::OracleConfig;

/// Expected-utility slack treated as indifference, relative to `1 + fine`.
const INDIFFERENCE_TOL: f64 = 1e-12;
/// Slack on the court's comparison with its threshold.
const VIEW_TOL: f64 = 1e-12;
const TIE_TOL: f64 = 1e-12;

/// Payoff of acting at posterior `mu` under expected punishment `fine`.
fn utility(omega: AgentType, mu: f64, fine: f64) -> f64 {
    match omega {
        AgentType::Unbiased => mu - (1.0 - mu) * (1.0 + fine),
        AgentType::Biased => 1.0 - (1.0 - mu) * fine,
    }
}

/// Best outcome found on one realization of the verifiable signal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SliceOptimum {
    pub value: f64,
    pub cap: f64,
    /// Punishment inflicted after a failure.
    pub fine: f64,
    pub a_u: [f64; 2],
    pub a_b: [f64; 2],
    /// Court view after a failure; `None` off path.
    pub view: Option<f64>,
    /// Profiles enumerated on this slice.
    pub examined: u64,
}

/// Search state for one slice. Index 0 of every pair is `y = -1`.
struct SliceSearch<'a> {
    succ: [f64; 2],
    fail: [f64; 2],
    post: [f64; 2],
    gamma: f64,
    gamma_bar: f64,
    cfg: &'a OracleConfig,
}

#[derive(Clone, Copy)]
struct Found {
    value: f64,
    cap: f64,
    fine: f64,
    a: [[f64; 2]; 2],
    /// Pair whose mixing brackets the court threshold, when the profile was
    /// admitted only up to grid resolution.
    bracket: Option<(usize, usize, f64)>,
}

impl Found {
    fn mixed(&self) -> usize {
        self.a
            .iter()
            .flatten()
            .filter(|p| **p > 0.0 && **p < 1.0)
            .count()
    }

    fn better_than(&self, other: &Found) -> bool {
        let scale = 1.0f64.max(self.value.abs()).max(other.value.abs());
        if (self.value - other.value).abs() > TIE_TOL * scale {
            return self.value > other.value;
        }
        if self.bracket.is_none() != other.bracket.is_none() {
            return self.bracket.is_none();
        }
        if self.cap != other.cap {
            return self.cap < other.cap;
        }
        self.mixed() < other.mixed()
    }
}

impl<'a> SliceSearch<'a> {
    fn new(succ: [f64; 2], fail: [f64; 2], pop: &PopulationModel, cfg: &'a OracleConfig) -> Self {
        let post = [0, 1].map(|y| succ[y] / (succ[y] + fail[y]));
        SliceSearch {
            succ,
            fail,
            post,
            gamma: pop.gamma(),
            gamma_bar: pop.gamma_bar(),
            cfg,
        }
    }

    fn value(&self, a: &[[f64; 2]; 2]) -> f64 {
        (0..2)
            .map(|y| {
                (self.gamma * a[0][y] + (1.0 - self.gamma) * a[1][y])
                    * (self.succ[y] - self.fail[y])
            })
            .sum()
    }

    fn view(&self, a: &[[f64; 2]; 2]) -> Option<f64> {
        let mut num = 0.0;
        let mut total = 0.0;
        for y in 0..2 {
            let u = self.gamma * a[0][y] * self.fail[y];
            let b = (1.0 - self.gamma) * a[1][y] * self.fail[y];
            total += u + b;
            num += match self.cfg.institution {
                Institution::ObjectiveCourt => {
                    if self.post[y] >= 0.5 {
                        u + b
                    } else {
                        0.0
                    }
                }
                _ => u,
            };
        }
        (total > 0.0).then(|| num / total)
    }

    /// Whether the court's choice of `fine` out of `{0, cap}` is consistent
    /// with its view.
    fn court_ok(&self, cap: f64, fine: f64, view: Option<f64>) -> bool {
        let inst = self.cfg.institution;
        if inst == Institution::Commitment {
            return fine == cap;
        }
        let Some(v) = view else { return true };
        if cap == 0.0 {
            return inst != Institution::ExPostScreening || v >= self.gamma_bar - VIEW_TOL;
        }
        if v < self.gamma_bar - VIEW_TOL {
            return inst != Institution::ExPostScreening && fine == cap;
        }
        if v > self.gamma_bar + VIEW_TOL {
            return fine == 0.0;
        }
        true
    }

    fn mix_grid(&self) -> Vec<f64> {
        let n = (1.0 / self.cfg.mix_grid_step).round().max(1.0) as usize;
        (0..=n).map(|i| i as f64 / n as f64).collect()
    }

    fn fines(&self) -> Vec<f64> {
        let fine_max = self.fine_max();
        let mut out = vec![0.0];
        if self.cfg.fine_grid_step.is_finite() {
            let n = (fine_max / self.cfg.fine_grid_step).floor() as usize;
            out.extend((1..=n).map(|i| i as f64 * self.cfg.fine_grid_step));
        }
        for mu in self.post {
            for f in [(2.0 * mu - 1.0) / (1.0 - mu), 1.0 / (1.0 - mu)] {
                if f.is_finite() && f > 0.0 {
                    out.push(f);
                }
            }
        }
        out.sort_by(f64::total_cmp);
        out.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.max(1.0));
        out
    }

    fn pivot_fines(&self) -> [f64; 2] {
        let hi = self.post[1].max(self.post[0]);
        let lo = self.post[1].min(self.post[0]);
        [(2.0 * hi - 1.0) / (1.0 - hi), 1.0 / (1.0 - lo)]
    }

    fn fine_max(&self) -> f64 {
        let [fu, fb] = self.pivot_fines();
        let base = [fu, fb]
            .into_iter()
            .filter(|f| f.is_finite())
            .fold(0.0f64, f64::max);
        self.cfg.fine_max.unwrap_or(base + 2.0)
    }

    /// Action options per `(type, y)` at an expected punishment.
    fn options(&self, fine: f64, grid: &[f64]) -> Vec<(usize, usize, Vec<f64>)> {
        let mut out = Vec::with_capacity(4);
        for (t, omega) in AgentType::BOTH.into_iter().enumerate() {
            for y in 0..2 {
                let u = utility(omega, self.post[y], fine);
                let tol = INDIFFERENCE_TOL * (1.0 + fine);
                let opts = if u > tol {
                    vec![1.0]
                } else if u < -tol {
                    vec![0.0]
                } else {
                    grid.to_vec()
                };
                out.push((t, y, opts));
            }
        }
        out
    }

    fn policies(&self, fines: &[f64]) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        for &c in fines {
            if c == 0.0 || self.cfg.institution == Institution::Commitment {
                out.push((c, c));
            } else {
                out.push((c, c));
                out.push((c, 0.0));
            }
        }
        out
    }

    fn run(&self) -> Result<SliceOptimum, OracleError> {
        let grid = self.mix_grid();
        let fines = self.fines();
        let policies = self.policies(&fines);
        let plans: Vec<_> = policies
            .iter()
            .map(|&(c, f)| (c, f, self.options(f, &grid)))
            .collect();
        let requested: u128 = plans
            .iter()
            .map(|(_, _, opts)| opts.iter().map(|o| o.2.len() as u128).product::<u128>())
            .sum();
        if requested > self.cfg.budget as u128 {
            return Err(OracleError::BudgetExceeded {
                requested,
                limit: self.cfg.budget as u128,
            });
        }

        let step = 1.0 / (grid.len() - 1) as f64;
        let mut best: Option<Found> = None;
        for (cap, fine, opts) in &plans {
            let mut idx = [0usize; 4];
            loop {
                let mut a = [[0.0; 2]; 2];
                for (k, (t, y, o)) in opts.iter().enumerate() {
                    a[*t][*y] = o[idx[k]];
                }
                let view = self.view(&a);
                let bracket = if self.court_ok(*cap, *fine, view) {
                    Some(None)
                } else {
                    self.bracket(&a, opts, step, *cap, *fine).map(Some)
                };
                if let Some(bracket) = bracket {
                    let cand = Found {
                        value: self.value(&a),
                        cap: *cap,
                        fine: *fine,
                        a,
                        bracket,
                    };
                    if best.is_none_or(|b| cand.better_than(&b)) {
                        best = Some(cand);
                    }
                }
                // Odometer over the option lists.
                let mut k = 0;
                loop {
                    if k == opts.len() {
                        break;
                    }
                    idx[k] += 1;
                    if idx[k] < opts[k].2.len() {
                        break;
                    }
                    idx[k] = 0;
                    k += 1;
                }
                if k == opts.len() {
                    break;
                }
            }
        }
        let best = best.expect("the zero fine always admits a profile");
        let best = self.polish(best);
        Ok(SliceOptimum {
            value: best.value,
            cap: best.cap,
            fine: best.fine,
            a_u: best.a[0],
            a_b: best.a[1],
            view: self.view(&best.a),
            examined: requested as u64,
        })
    }

    /// A mixed pair whose neighbouring grid value puts the court view on the
    /// other side of its threshold, so an exact equilibrium lies within one
    /// grid step.
    fn bracket(
        &self,
        a: &[[f64; 2]; 2],
        opts: &[(usize, usize, Vec<f64>)],
        step: f64,
        cap: f64,
        fine: f64,
    ) -> Option<(usize, usize, f64)> {
        let inst = self.cfg.institution;
        if inst == Institution::Commitment || cap == 0.0 {
            return None;
        }
        let v = self.view(a)?;
        // Only a court that is near indifference may be treated as such.
        let wants_cap = v < self.gamma_bar;
        if (wants_cap && fine == cap && inst != Institution::ExPostScreening)
            || (!wants_cap && fine == 0.0)
        {
            return None;
        }
        for (t, y, o) in opts {
            if o.len() < 2 {
                continue;
            }
            for d in [-step, step] {
                let mut b = *a;
                b[*t][*y] = (a[*t][*y] + d).clamp(0.0, 1.0);
                if let Some(w) = self.view(&b) {
                    if (v - self.gamma_bar) * (w - self.gamma_bar) <= 0.0 {
                        return Some((*t, *y, b[*t][*y]));
                    }
                }
            }
        }
        None
    }

    /// Moves a bracketed mixing to the exact indifference point by bisection.
    fn polish(&self, mut f: Found) -> Found {
        let Some((t, y, other)) = f.bracket else {
            return f;
        };
        let gap = |p: f64| {
            let mut a = f.a;
            a[t][y] = p;
            self.view(&a).map_or(0.0, |v| v - self.gamma_bar)
        };
        let (mut lo, mut hi) = (f.a[t][y], other);
        let g_lo = gap(lo);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if gap(mid).signum() == g_lo.signum() && gap(mid) != 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let p = if gap(lo).abs() <= gap(hi).abs() {
            lo
        } else {
            hi
        };
        f.a[t][y] = p;
        f.value = self.value(&f.a);
        f.bracket = None;
        f
    }
}

/// Best equilibrium on a single slice with masses `succ[y]` of
/// `(y, theta = 1)` and `fail[y]` of `(y, theta = -1)`.
pub fn brute_force_slice(
    succ: [f64; 2],
    fail: [f64; 2],
    pop: &PopulationModel,
    cfg: &OracleConfig,
) -> Result<SliceOptimum, OracleError> {
    cfg.validate()?;
    SliceSearch::new(succ, fail, pop, cfg).run()
}

/// Result of a brute-force search checked against the closed-form solver.
#[derive(Debug, Clone, PartialEq)]
pub struct AuditReport {
    pub env: InformationEnvironment,
    pub pop: PopulationModel,
    pub institution: Institution,
    pub best_welfare: f64,
    /// Oracle optimum; slice labels are inferred from the found actions.
    pub best_solution: EquilibriumSolution,
    /// Closed-form welfare, or the solver's error message.
    pub solver_welfare: Result<f64, String>,
    /// Equilibrium conditions the oracle optimum fails, by constraint id.
    pub violations: Vec<(String, f64)>,
    pub agreement: bool,
    pub tolerance: f64,
    pub profiles_examined: u64,
}

fn label(post: [f64; 2], o: &SliceOptimum, inst: Institution) -> SliceRegime {
    let interior = |p: f64| p > 0.0 && p < 1.0;
    if post[0] >= 0.5 && o.a_u == [1.0; 2] && o.a_b == [1.0; 2] {
        return SliceRegime::AllAct;
    }
    match (o.a_u, o.a_b) {
        ([0.0, 0.0], [0.0, 0.0]) if post[1] >= 0.5 && inst == Institution::ExPostScreening => {
            SliceRegime::TotalDeterrence
        }
        ([0.0, 0.0], [0.0, 0.0]) => SliceRegime::NoneAct,
        ([0.0, 0.0], [_, 1.0]) => SliceRegime::FullDeterrence,
        ([0.0, 1.0], [1.0, 1.0]) => SliceRegime::FreePass,
        ([0.0, 1.0], [0.0, 1.0]) if inst == Institution::Commitment => {
            SliceRegime::InterimEfficient
        }
        ([0.0, 1.0], [p, 1.0]) if interior(p) || p == 0.0 => SliceRegime::BiasedMixing,
        ([0.0, p], [0.0, 1.0]) if interior(p) => SliceRegime::UnbiasedMixing,
        _ if o.fine == 0.0 => SliceRegime::FreePass,
        _ => SliceRegime::FullDeterrence,
    }
}

/// Grid search for the designer-optimal equilibrium, auditing every profile
/// before admitting it, compared with the closed-form solver.
///
/// Each realization of `x` is searched separately over caps
/// `{0} ∪ grid ∪ critical fines`, court responses `{0, cap}`, and mixing
/// probabilities on every indifferent `(type, y)` pair. Profiles whose court
/// is only indifferent up to one mixing grid step are moved to the exact
/// indifference point before they are reported.
pub fn brute_force_optimum(
    env: &InformationEnvironment,
    pop: &PopulationModel,
    cfg: &OracleConfig,
) -> Result<AuditReport, OracleError> {
    cfg.validate()?;
    let mut optima = Vec::with_capacity(2);
    for x in Signal::BOTH {
        let cell = |y: Signal, theta: Signal| env.joint(SignalPair::new(x, y), theta);
        let succ = [
            cell(Signal::Low, Signal::High),
            cell(Signal::High, Signal::High),
        ];
        let fail = [
            cell(Signal::Low, Signal::Low),
            cell(Signal::High, Signal::Low),
        ];
        let search = SliceSearch::new(succ, fail, pop, cfg);
        if let Some(fm) = cfg.fine_max {
            let need = search
                .pivot_fines()
                .into_iter()
                .filter(|f| f.is_finite())
                .fold(0.0, f64::max)
                + 1.0;
            if x == Signal::Low && fm < need {
                return Err(OracleError::InvalidConfig(format!(
                    "fine_max {fm} is below max(F^u, F^b) + 1 = {need}"
                )));
            }
        }
        let o = search.run()?;
        optima.push((search.post, o));
    }

    let case = classify_case(env);
    let inst = cfg.institution;
    let mut profile = StrategyProfile::none_act();
    let mut outcomes = Vec::with_capacity(2);
    let mut caps = [0.0; 2];
    let mut court_belief = [pop.gamma_bar(); 2];
    let mut on_path = [false; 2];
    for (x, (post, o)) in Signal::BOTH.into_iter().zip(&optima) {
        let i = x.index();
        for y in Signal::BOTH {
            let s = SignalPair::new(x, y);
            profile.set_action(AgentType::Unbiased, s, o.a_u[y.index()]);
            profile.set_action(AgentType::Biased, s, o.a_b[y.index()]);
        }
        profile.punishment[i] = o.fine;
        caps[i] = o.cap;
        if let Some(v) = o.view {
            court_belief[i] = v;
            on_path[i] = true;
        }
        outcomes.push(SliceOutcome {
            regime: label(*post, o, inst),
            cap: o.cap,
            fine: o.fine,
            a_u: o.a_u,
            a_b: o.a_b,
            belief: court_belief[i],
            on_path: on_path[i],
            value: o.value,
        });
    }
    let outcomes = [outcomes[0], outcomes[1]];
    let lo_post = optima[0].0;
    let fu = (2.0 * lo_post[1] - 1.0) / (1.0 - lo_post[1]);
    let fb = 1.0 / (1.0 - lo_post[0]);
    let best_welfare = optima[0].1.value + optima[1].1.value;
    let best_solution = EquilibriumSolution {
        f_bar: caps[0].max(caps[1]),
        caps,
        profile,
        court_belief,
        on_path,
        welfare: best_welfare,
        regime: regime_of(case, &outcomes, fu, fb),
        slices: [outcomes[0].regime, outcomes[1].regime],
        institution: inst,
        support: support_of(case, pop),
        case,
    };
    let violations: Vec<(String, f64)> = audit(env, pop, &best_solution)
        .into_iter()
        .map(|v| (v.id.to_string(), v.magnitude))
        .collect();
    let solver_welfare = solve(env, pop, inst)
        .map(|s| s.welfare)
        .map_err(|e| e.to_string());
    let tolerance = cfg.tolerance();
    let agreement = matches!(solver_welfare, Ok(w) if (w - best_welfare).abs() <= tolerance);
    Ok(AuditReport {
        env: *env,
        pop: *pop,
        institution: inst,
        best_welfare,
        best_solution,
        solver_welfare,
        violations,
        agreement,
        tolerance,
        profiles_examined: optima.iter().map(|(_, o)| o.examined).sum(),
    })
}

#[derive(Serialize)]
struct ReportRow<'a> {
    beta: String,
    p_x: String,
    p_y: String,
    gamma: String,
    gamma_bar: String,
    institution: String,
    case: &'a str,
    regime: &'a str,
    solver_welfare: String,
    oracle_welfare: String,
    agreement: bool,
    violations: usize,
}

/// Writes reports as CSV with columns `beta, p_x, p_y, gamma, gamma_bar,
/// institution, case, regime, solver_welfare, oracle_welfare, agreement,
/// violations`. Solver errors leave `solver_welfare` empty.
pub fn write_reports_csv<W: Write>(out: W, reports: &[AuditReport]) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    let sig = |v: f64| fmt_sig(v, 12);
    for r in reports {
        w.serialize(ReportRow {
            beta: sig(r.env.beta()),
            p_x: sig(r.env.p_x()),
            p_y: sig(r.env.p_y()),
            gamma: sig(r.pop.gamma()),
            gamma_bar: sig(r.pop.gamma_bar()),
            institution: format!("{:?}", r.institution),
            case: r.best_solution.case.name(),
            regime: r.best_solution.regime.name(),
            solver_welfare: r
                .solver_welfare
                .as_ref()
                .map(|w| sig(*w))
                .unwrap_or_default(),
            oracle_welfare: sig(r.best_welfare),
            agreement: r.agreement,
            violations: r.violations.len(),
        })?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::candidates_for;
    use crate::model::critical_px;

    const B: f64 = 9.0 / 13.0;

    fn pop() -> PopulationModel {
        PopulationModel::new(0.55, 1.0).unwrap()
    }

    fn env(px: f64) -> InformationEnvironment {
        InformationEnvironment::new(B, px, 0.75).unwrap()
    }

    fn with(inst: Institution) -> OracleConfig {
        OracleConfig {
            institution: inst,
            ..OracleConfig::default()
        }
    }

    #[test]
    fn reference_environment_agrees() {
        let r = brute_force_optimum(&env(0.7), &pop(), &OracleConfig::default()).unwrap();
        assert!(r.agreement && r.violations.is_empty(), "{r:?}");
        assert_eq!(r.best_solution.slices[0], SliceRegime::BiasedMixing);
        assert!((r.best_solution.biased_on_bad_pair() - 2.0 / 27.0).abs() < 1e-9);
    }

    #[test]
    fn critical_grid_reproduces_candidates() {
        // No uniform grid: caps are 0 and the critical fines only.
        let cfg = OracleConfig {
            fine_grid_step: f64::INFINITY,
            ..OracleConfig::default()
        };
        for px in [0.7, 0.8] {
            let r = brute_force_optimum(&env(px), &pop(), &cfg).unwrap();
            let best = candidates_for(&env(px), &pop(), Institution::SubjectiveCourt)
                .unwrap()
                .iter()
                .map(|c| c.welfare)
                .fold(f64::NEG_INFINITY, f64::max);
            assert!(
                (r.best_welfare - best).abs() < 1e-12,
                "{px}: {} vs {best}",
                r.best_welfare
            );
        }
    }

    #[test]
    fn knife_edge_lists_both_families() {
        let px = critical_px(B, 0.75).unwrap();
        let e = env(px);
        assert!(matches!(
            brute_force_optimum(&e, &pop(), &OracleConfig::default()),
            Err(OracleError::BudgetExceeded { .. })
        ));
        let cfg = OracleConfig {
            mix_grid_step: 1e-3,
            ..OracleConfig::default()
        };
        let r = brute_force_optimum(&e, &pop(), &cfg).unwrap();
        assert!(r.agreement && r.violations.is_empty(), "{r:?}");
        let cands = candidates_for(&e, &pop(), Institution::SubjectiveCourt).unwrap();
        let has = |s: SliceRegime| cands.iter().any(|c| c.slices[0] == s);
        assert!(has(SliceRegime::FullDeterrence) && has(SliceRegime::UnbiasedMixing));
        let best = cands
            .iter()
            .map(|c| c.welfare)
            .fold(f64::NEG_INFINITY, f64::max);
        assert!((r.best_welfare - best).abs() <= r.tolerance);
    }

    #[test]
    fn every_institution_agrees_at_fb_below_fu() {
        for inst in [
            Institution::SubjectiveCourt,
            Institution::ObjectiveCourt,
            Institution::Commitment,
            Institution::ExPostScreening,
        ] {
            let r = brute_force_optimum(&env(0.7), &pop(), &with(inst)).unwrap();
            assert!(r.agreement && r.violations.is_empty(), "{inst:?}: {r:?}");
        }
    }

    #[test]
    fn objective_court_total_deterrence() {
        // A cap deterring both types leaves the court off path, so it may
        // convict; this beats the eta_1 profile, whose slice value is negative.
        let r = brute_force_optimum(&env(0.8), &pop(), &with(Institution::ObjectiveCourt)).unwrap();
        assert!(r.violations.is_empty());
        assert!(!r.agreement);
        assert_eq!(r.best_solution.slices[0], SliceRegime::NoneAct);
        assert!((r.best_welfare - 0.492307692307692).abs() < 1e-12);
        assert!(r.best_welfare > r.solver_welfare.clone().unwrap());
    }

    #[test]
    fn explicit_fine_max_is_checked() {
        let low = OracleConfig {
            fine_max: Some(1.5),
            ..OracleConfig::default()
        };
        assert!(matches!(
            brute_force_optimum(&env(0.7), &pop(), &low),
            Err(OracleError::InvalidConfig(_))
        ));
        let bad = OracleConfig {
            mix_grid_step: 0.0,
            ..OracleConfig::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn csv_header() {
        let r = brute_force_optimum(&env(0.7), &pop(), &OracleConfig::default()).unwrap();
        let mut buf = Vec::new();
        write_reports_csv(&mut buf, &[r]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "beta,p_x,p_y,gamma,gamma_bar,institution,case,regime,solver_welfare,oracle_welfare,agreement,violations"
        );
        assert!(lines
            .next()
            .unwrap()
            .contains("SubjectiveCourt,either-positive,deter-at-fb"));
    }
}
