use thiserror::Error;

use crate::model::CaseLabel;

/// Errors raised while constructing model parameters.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("{name} = {value} is outside the open interval ({low}, {high})")]
    OutOfRange {
        name: &'static str,
        value: f64,
        low: f64,
        high: f64,
    },
    #[error("{name} must be finite, got {value}")]
    NotFinite { name: &'static str, value: f64 },
    #[error("no unverifiable precision keeps (beta = {beta}, p_x = {p_x}) in the either-positive region")]
    EmptyRegion { beta: f64, p_x: f64 },
    #[error("invalid type spectrum: {0}")]
    InvalidSpectrum(String),
    #[error("invalid signal specification: {0}")]
    InvalidSignalSpec(String),
}

/// Errors raised by the equilibrium machinery and its variants.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("operation requires the either-positive case, environment is {0:?}")]
    WrongCase(CaseLabel),
    #[error("efficiency premise fails: {0}")]
    Premise(String),
    #[error("constructed profile failed its equilibrium audit: {0}")]
    AuditFailed(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Errors raised by the continuum-signal machinery.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ContinuumError {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("unbiased cutoff {0} must exceed 1/2")]
    CutoffDomain(f64),
    #[error("infeasible parameters: {0}")]
    Infeasible(String),
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Solver(#[from] SolverError),
}

/// Errors raised by the brute-force and Monte Carlo oracles.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("grid budget exceeded: {requested} profiles requested, limit {limit}")]
    BudgetExceeded { requested: u128, limit: u128 },
    #[error("invalid oracle configuration: {0}")]
    InvalidConfig(String),
    #[error("unknown property id `{0}`")]
    UnknownProperty(String),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Continuum(#[from] ContinuumError),
}

/// Errors raised by the sweep front end.
#[derive(Debug, Error)]
pub enum SweepError {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("scenario parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("unknown bundled scenario `{0}`")]
    UnknownBundled(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Model(#[from] ModelError),
}
