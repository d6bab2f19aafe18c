use crate::model::{InformationEnvironment, PopulationModel, Signal, SignalPair};

use super::solver::{fine_b_at, fine_u_at};
use super::{Institution, SliceRegime, KNIFE_EDGE_TOL, WELFARE_TIE_TOL};

/// Efficiency pattern of a slice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SliceKind {
    /// Both posteriors at least 1/2.
    AllEfficient,
    /// Both posteriors below 1/2.
    NoneEfficient,
    /// Efficient on `y = 1` only.
    Mixed,
}

/// The game restricted to one realization `x`.
///
/// Index 0 refers to `y = -1`, index 1 to `y = 1`. `succ[y]` and `fail[y]`
/// are (possibly unnormalized) masses of `(y, theta = 1)` and
/// `(y, theta = -1)` at this `x`; only their ratios matter for beliefs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Slice {
    pub lo: f64,
    pub hi: f64,
    pub succ: [f64; 2],
    pub fail: [f64; 2],
    pub gamma: f64,
    pub gamma_bar: f64,
}

/// One equilibrium candidate on a slice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SliceOutcome {
    pub regime: SliceRegime,
    pub cap: f64,
    /// Punishment the court inflicts after a failure.
    pub fine: f64,
    pub a_u: [f64; 2],
    pub a_b: [f64; 2],
    pub belief: f64,
    pub on_path: bool,
    pub value: f64,
}

impl SliceOutcome {
    pub fn mixed_actions(&self) -> usize {
        self.a_u
            .iter()
            .chain(self.a_b.iter())
            .filter(|a| **a > 0.0 && **a < 1.0)
            .count()
    }

    /// Designer preference: higher value, then smaller cap, then fewer mixed
    /// actions.
    pub fn preferred_over(&self, other: &SliceOutcome) -> bool {
        let scale = 1.0f64.max(self.value.abs()).max(other.value.abs());
        if self.value > other.value + WELFARE_TIE_TOL * scale {
            return true;
        }
        if self.value < other.value - WELFARE_TIE_TOL * scale {
            return false;
        }
        if self.cap != other.cap {
            return self.cap < other.cap;
        }
        self.mixed_actions() < other.mixed_actions()
    }
}

impl Slice {
    pub fn from_env(env: &InformationEnvironment, pop: &PopulationModel, x: Signal) -> Self {
        let cell = |y: Signal, theta: Signal| env.joint(SignalPair::new(x, y), theta);
        let lo = crate::model::posterior(env, SignalPair::new(x, Signal::Low));
        let hi = crate::model::posterior(env, SignalPair::new(x, Signal::High));
        Slice {
            lo,
            hi,
            succ: [
                cell(Signal::Low, Signal::High),
                cell(Signal::High, Signal::High),
            ],
            fail: [
                cell(Signal::Low, Signal::Low),
                cell(Signal::High, Signal::Low),
            ],
            gamma: pop.gamma(),
            gamma_bar: pop.gamma_bar(),
        }
    }

    pub fn kind(&self) -> SliceKind {
        if self.lo >= 0.5 {
            SliceKind::AllEfficient
        } else if self.hi < 0.5 {
            SliceKind::NoneEfficient
        } else {
            SliceKind::Mixed
        }
    }

    /// Largest fine keeping the unbiased type active on `y = 1`.
    pub fn fine_u(&self) -> f64 {
        fine_u_at(self.hi)
    }

    /// Smallest fine deterring the biased type on `y = -1`.
    pub fn fine_b(&self) -> f64 {
        fine_b_at(self.lo)
    }

    /// Designer value of the given actions on this slice.
    pub fn value(&self, a_u: [f64; 2], a_b: [f64; 2]) -> f64 {
        (0..2)
            .map(|y| {
                (self.gamma * a_u[y] + (1.0 - self.gamma) * a_b[y]) * (self.succ[y] - self.fail[y])
            })
            .sum()
    }

    /// Court belief that a failed actor is unbiased; `None` off path.
    pub fn belief(&self, a_u: [f64; 2], a_b: [f64; 2]) -> Option<f64> {
        let u: f64 = (0..2).map(|y| self.fail[y] * a_u[y]).sum::<f64>() * self.gamma;
        let b: f64 = (0..2).map(|y| self.fail[y] * a_b[y]).sum::<f64>() * (1.0 - self.gamma);
        (u + b > 0.0).then(|| u / (u + b))
    }

    /// Probability that a failed actor acted on an efficient pair; `None` off
    /// path.
    pub fn objective_q(&self, a_u: [f64; 2], a_b: [f64; 2]) -> Option<f64> {
        let posts = [self.lo, self.hi];
        let mut good = 0.0;
        let mut total = 0.0;
        for y in 0..2 {
            let m = (self.gamma * a_u[y] + (1.0 - self.gamma) * a_b[y]) * self.fail[y];
            total += m;
            if posts[y] >= 0.5 {
                good += m;
            }
        }
        (total > 0.0).then(|| good / total)
    }

    fn court_view(&self, inst: Institution, a_u: [f64; 2], a_b: [f64; 2]) -> Option<f64> {
        match inst {
            Institution::ObjectiveCourt => self.objective_q(a_u, a_b),
            _ => self.belief(a_u, a_b),
        }
    }

    fn outcome(
        &self,
        inst: Institution,
        regime: SliceRegime,
        cap: f64,
        a_u: [f64; 2],
        a_b: [f64; 2],
    ) -> SliceOutcome {
        let view = self.court_view(inst, a_u, a_b);
        // Inflicted punishment: the cap unless the court strictly acquits.
        let fine = match (inst, view) {
            (Institution::Commitment, _) => cap,
            (_, Some(v)) if v > self.gamma_bar + KNIFE_EDGE_TOL => 0.0,
            _ => cap,
        };
        SliceOutcome {
            regime,
            cap,
            fine,
            a_u,
            a_b,
            belief: view.unwrap_or(self.gamma_bar),
            on_path: view.is_some(),
            value: self.value(a_u, a_b),
        }
    }

    /// Court-indifference mixing of the biased type on `y = -1` under cap
    /// `F^b`, unclamped.
    pub fn eta_b_raw(&self) -> f64 {
        (self.gamma - self.gamma_bar) * self.fail[1]
            / (self.gamma_bar * (1.0 - self.gamma) * self.fail[0])
    }

    /// Court-indifference mixing of the unbiased type on `y = 1` under cap
    /// `F^u`, unclamped.
    pub fn eta_u_raw(&self) -> f64 {
        self.gamma_bar * (1.0 - self.gamma) / (self.gamma * (1.0 - self.gamma_bar))
    }

    /// Objective-court mixing when the unbiased type is chilled, unclamped.
    pub fn eta_1_raw(&self) -> f64 {
        self.fail[1] * (1.0 - self.gamma_bar) / (self.gamma_bar * self.fail[0])
    }

    /// Objective-court mixing when the unbiased type acts, unclamped.
    pub fn eta_2_raw(&self) -> f64 {
        self.eta_1_raw() / (1.0 - self.gamma)
    }

    fn free_pass(&self, inst: Institution) -> SliceOutcome {
        self.outcome(inst, SliceRegime::FreePass, 0.0, [0.0, 1.0], [1.0, 1.0])
    }

    fn total_deterrence(&self, inst: Institution) -> SliceOutcome {
        let cap = fine_b_at(self.hi);
        self.outcome(inst, SliceRegime::TotalDeterrence, cap, [0.0; 2], [0.0; 2])
    }

    /// All equilibrium candidates on this slice under `inst`.
    ///
    /// An ex-post principal facing an on-path belief below `gamma_bar` would
    /// raise the fine without bound, so such outcomes are replaced by total
    /// deterrence. This only happens when `gamma < gamma_bar`.
    pub fn candidates(&self, inst: Institution) -> Vec<SliceOutcome> {
        let mut out = self.raw_candidates(inst);
        if inst == Institution::ExPostScreening {
            let convicts =
                |o: &SliceOutcome| o.on_path && o.belief < self.gamma_bar - KNIFE_EDGE_TOL;
            if out.iter().any(convicts) {
                out.retain(|o| !convicts(o));
                if !out.iter().any(|o| o.regime == SliceRegime::TotalDeterrence) {
                    out.push(self.total_deterrence(inst));
                }
            }
        }
        out
    }

    fn raw_candidates(&self, inst: Institution) -> Vec<SliceOutcome> {
        match self.kind() {
            SliceKind::AllEfficient => {
                vec![self.outcome(inst, SliceRegime::AllAct, 0.0, [1.0; 2], [1.0; 2])]
            }
            SliceKind::NoneEfficient => {
                let cap = fine_b_at(self.hi);
                vec![self.outcome(inst, SliceRegime::NoneAct, cap, [0.0; 2], [0.0; 2])]
            }
            SliceKind::Mixed => self.mixed_candidates(inst),
        }
    }

    fn mixed_candidates(&self, inst: Institution) -> Vec<SliceOutcome> {
        let fu = self.fine_u();
        let fb = self.fine_b();
        let gap = fb - fu;
        let knife = gap.abs() <= KNIFE_EDGE_TOL;
        let deter_branch = gap > 0.0 || knife;
        let mixing_branch = gap < 0.0 || knife;

        let mut out: Vec<SliceOutcome> = Vec::new();
        let push_fp = |out: &mut Vec<SliceOutcome>| {
            if !out.iter().any(|o| o.regime == SliceRegime::FreePass) {
                out.push(self.free_pass(inst));
            }
        };

        match inst {
            Institution::SubjectiveCourt | Institution::ExPostScreening => {
                let ex_post = inst == Institution::ExPostScreening;
                if ex_post {
                    let fp = self.free_pass(inst);
                    if fp.belief >= self.gamma_bar - KNIFE_EDGE_TOL {
                        out.push(fp);
                    }
                }
                if deter_branch {
                    if ex_post {
                        out.push(self.total_deterrence(inst));
                    } else {
                        push_fp(&mut out);
                        out.push(self.outcome(
                            inst,
                            SliceRegime::FullDeterrence,
                            fb,
                            [0.0, 0.0],
                            [0.0, 1.0],
                        ));
                    }
                }
                if mixing_branch {
                    let eta = self.eta_b_raw();
                    if eta <= 1.0 {
                        out.push(self.outcome(
                            inst,
                            SliceRegime::BiasedMixing,
                            fb,
                            [0.0, 1.0],
                            [eta.max(0.0), 1.0],
                        ));
                    } else {
                        push_fp(&mut out);
                    }
                    let eta = self.eta_u_raw().clamp(0.0, 1.0);
                    out.push(self.outcome(
                        inst,
                        SliceRegime::UnbiasedMixing,
                        fu,
                        [0.0, eta],
                        [0.0, 1.0],
                    ));
                }
            }
            Institution::ObjectiveCourt => {
                if deter_branch {
                    push_fp(&mut out);
                    let eta = self.eta_1_raw();
                    if eta <= 1.0 {
                        out.push(self.outcome(
                            inst,
                            SliceRegime::FullDeterrence,
                            fb,
                            [0.0, 0.0],
                            [eta, 1.0],
                        ));
                    }
                }
                if mixing_branch {
                    let eta = self.eta_2_raw();
                    if eta <= 1.0 {
                        out.push(self.outcome(
                            inst,
                            SliceRegime::BiasedMixing,
                            fb,
                            [0.0, 1.0],
                            [eta, 1.0],
                        ));
                    } else {
                        push_fp(&mut out);
                    }
                }
            }
            Institution::Commitment => {
                if deter_branch {
                    push_fp(&mut out);
                    out.push(self.outcome(
                        inst,
                        SliceRegime::FullDeterrence,
                        fb,
                        [0.0, 0.0],
                        [0.0, 1.0],
                    ));
                }
                if mixing_branch {
                    for cap in [fb, fu] {
                        out.push(self.outcome(
                            inst,
                            SliceRegime::InterimEfficient,
                            cap,
                            [0.0, 1.0],
                            [0.0, 1.0],
                        ));
                    }
                }
            }
        }
        out
    }

    /// Designer-preferred candidate.
    pub fn best(&self, inst: Institution) -> SliceOutcome {
        let mut cands = self.candidates(inst).into_iter();
        let first = cands.next().expect("every slice has a candidate");
        cands.fold(
            first,
            |best, c| if c.preferred_over(&best) { c } else { best },
        )
    }
}
