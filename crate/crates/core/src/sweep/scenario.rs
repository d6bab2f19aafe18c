use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::equilibrium::Institution;
use crate::error::SweepError;
use crate::model::{InformationEnvironment, PopulationModel};

/// Parameter varied along a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    #[serde(rename = "p_x")]
    PX,
    #[serde(rename = "p_y")]
    PY,
    #[serde(rename = "beta")]
    Beta,
    #[serde(rename = "gamma")]
    Gamma,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::PX => "p_x",
            Axis::PY => "p_y",
            Axis::Beta => "beta",
            Axis::Gamma => "gamma",
        }
    }
}

/// Institution a sweep series is solved under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Subjective,
    Objective,
    Commitment,
    ExPost,
}

impl Mode {
    pub fn institution(self) -> Institution {
        match self {
            Mode::Subjective => Institution::SubjectiveCourt,
            Mode::Objective => Institution::ObjectiveCourt,
            Mode::Commitment => Institution::Commitment,
            Mode::ExPost => Institution::ExPostScreening,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Mode::Subjective => "subjective",
            Mode::Objective => "objective",
            Mode::Commitment => "commitment",
            Mode::ExPost => "ex-post",
        }
    }
}

/// Artifact a scenario asks for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Output {
    /// One row per grid point and mode.
    Table,
    /// Only the rows flagged as discontinuities.
    Jumps,
}

/// A number written either as a float or as a string fraction `"a/b"`.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(try_from = "NumberRepr")]
pub struct Number(pub f64);

#[derive(Deserialize)]
#[serde(untagged)]
enum NumberRepr {
    Float(f64),
    Int(i64),
    Text(String),
}

impl TryFrom<NumberRepr> for Number {
    type Error = String;

    fn try_from(r: NumberRepr) -> Result<Self, String> {
        match r {
            NumberRepr::Float(v) => Ok(Number(v)),
            NumberRepr::Int(v) => Ok(Number(v as f64)),
            NumberRepr::Text(s) => parse_number(&s).map(Number),
        }
    }
}

/// Parses a decimal number or a fraction `a/b`.
pub fn parse_number(s: &str) -> Result<f64, String> {
    let err = || format!("`{s}` is neither a number nor a fraction a/b");
    match s.split_once('/') {
        Some((a, b)) => {
            let a = f64::from_str(a.trim()).map_err(|_| err())?;
            let b = f64::from_str(b.trim()).map_err(|_| err())?;
            Ok(a / b)
        }
        None => f64::from_str(s.trim()).map_err(|_| err()),
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct BaseRaw {
    beta: Number,
    p_x: Number,
    p_y: Number,
    gamma: Number,
    gamma_bar: Option<Number>,
    loss: Option<Number>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepRaw {
    axis: Axis,
    start: Number,
    stop: Number,
    step: Number,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioRaw {
    name: Option<String>,
    modes: Vec<Mode>,
    outputs: Vec<Output>,
    base: BaseRaw,
    sweep: SweepRaw,
}

/// Range of one sweep axis. Grid points are `start + i * step` up to `stop`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRange {
    pub axis: Axis,
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl SweepRange {
    pub fn points(&self) -> Vec<f64> {
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|i| self.start + i as f64 * self.step).collect()
    }
}

/// A validated sweep configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub env: InformationEnvironment,
    pub pop: PopulationModel,
    pub sweep: SweepRange,
    pub modes: Vec<Mode>,
    pub outputs: Vec<Output>,
}

const BUNDLED: [(&str, &str); 4] = [
    ("fig2a", include_str!("../../scenarios/fig2a.toml")),
    ("fig2b", include_str!("../../scenarios/fig2b.toml")),
    ("fig3", include_str!("../../scenarios/fig3.toml")),
    ("fig3b", include_str!("../../scenarios/fig3b.toml")),
];

/// Names of the scenarios shipped with the crate.
pub fn bundled_names() -> Vec<&'static str> {
    BUNDLED.iter().map(|(n, _)| *n).collect()
}

impl Scenario {
    /// Parses and validates a scenario. A missing `name` is left empty.
    pub fn from_toml(text: &str) -> Result<Self, SweepError> {
        let raw: ScenarioRaw = toml::from_str(text)?;
        let invalid = |m: String| SweepError::InvalidScenario(m);
        let b = &raw.base;
        let pop = match (b.gamma_bar, b.loss) {
            (Some(gb), None) => PopulationModel::from_threshold(b.gamma.0, gb.0)?,
            (None, Some(l)) => PopulationModel::new(b.gamma.0, l.0)?,
            _ => {
                return Err(invalid(
                    "give exactly one of base.gamma_bar and base.loss".into(),
                ))
            }
        };
        let env = InformationEnvironment::new(b.beta.0, b.p_x.0, b.p_y.0)?;
        let s = &raw.sweep;
        let sweep = SweepRange {
            axis: s.axis,
            start: s.start.0,
            stop: s.stop.0,
            step: s.step.0,
        };
        if !(sweep.step > 0.0 && sweep.step.is_finite()) {
            return Err(invalid(format!(
                "sweep.step {} must be positive",
                sweep.step
            )));
        }
        if !(sweep.stop >= sweep.start) {
            return Err(invalid(format!(
                "sweep.stop {} is below sweep.start {}",
                sweep.stop, sweep.start
            )));
        }
        if raw.modes.is_empty() {
            return Err(invalid("at least one mode is required".into()));
        }
        if raw.outputs.is_empty() {
            return Err(invalid("at least one output is required".into()));
        }
        let scenario = Scenario {
            name: raw.name.unwrap_or_default(),
            env,
            pop,
            sweep,
            modes: raw.modes,
            outputs: raw.outputs,
        };
        for v in [sweep.start, sweep.stop] {
            scenario.at(v)?;
        }
        Ok(scenario)
    }

    /// Reads a scenario file; its name defaults to the file stem.
    pub fn from_file(path: &Path) -> Result<Self, SweepError> {
        let mut s = Self::from_toml(&std::fs::read_to_string(path)?)?;
        if s.name.is_empty() {
            s.name = path
                .file_stem()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_default();
        }
        Ok(s)
    }

    pub fn bundled(name: &str) -> Result<Self, SweepError> {
        let (_, text) = BUNDLED
            .iter()
            .find(|(n, _)| *n == name)
            .ok_or_else(|| SweepError::UnknownBundled(name.to_string()))?;
        Self::from_toml(text)
    }

    /// Environment and population at one value of the sweep axis.
    pub fn at(&self, v: f64) -> Result<(InformationEnvironment, PopulationModel), SweepError> {
        Ok(match self.sweep.axis {
            Axis::PX => (self.env.with_p_x(v)?, self.pop),
            Axis::PY => (self.env.with_p_y(v)?, self.pop),
            Axis::Beta => (self.env.with_beta(v)?, self.pop),
            Axis::Gamma => (
                self.env,
                PopulationModel::from_threshold(v, self.pop.gamma_bar())?,
            ),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_scenarios_parse() {
        for name in bundled_names() {
            let s = Scenario::bundled(name).unwrap();
            assert_eq!(s.name, name);
            assert!((s.env.beta() - 9.0 / 13.0).abs() < 1e-15);
            assert!((s.pop.gamma() - 0.55).abs() < 1e-15);
        }
        let a = Scenario::bundled("fig2a").unwrap();
        let pts = a.sweep.points();
        assert_eq!(pts.len(), 401);
        assert!((pts[400] - 0.95).abs() < 1e-12);
        assert!(matches!(
            Scenario::bundled("fig9"),
            Err(SweepError::UnknownBundled(_))
        ));
    }

    #[test]
    fn rejects_bad_scenarios() {
        let base = |extra: &str, sweep: &str| {
            format!(
                "modes = [\"subjective\"]\noutputs = [\"table\"]\n[base]\nbeta = 0.6\np_x = 0.7\np_y = 0.7\ngamma = 0.6\n{extra}\n[sweep]\n{sweep}\n"
            )
        };
        let ok_sweep = "axis = \"p_x\"\nstart = 0.6\nstop = 0.9\nstep = 0.1";
        assert!(Scenario::from_toml(&base("loss = 1", ok_sweep)).is_ok());
        assert!(Scenario::from_toml(&base("", ok_sweep)).is_err());
        assert!(Scenario::from_toml(&base("loss = 1\ngamma_bar = 0.5", ok_sweep)).is_err());
        let zero = "axis = \"p_x\"\nstart = 0.6\nstop = 0.9\nstep = 0";
        assert!(Scenario::from_toml(&base("loss = 1", zero)).is_err());
        let outside = "axis = \"p_y\"\nstart = 0.6\nstop = 1.2\nstep = 0.1";
        assert!(Scenario::from_toml(&base("loss = 1", outside)).is_err());
        let typo = "axis = \"p_z\"\nstart = 0.6\nstop = 0.9\nstep = 0.1";
        assert!(matches!(
            Scenario::from_toml(&base("loss = 1", typo)),
            Err(SweepError::Parse(_))
        ));
    }

    #[test]
    fn fractions() {
        assert_eq!(parse_number("9/13").unwrap(), 9.0 / 13.0);
        assert_eq!(parse_number(" 0.25 ").unwrap(), 0.25);
        assert!(parse_number("nine").is_err());
    }
}
