//! Designer-optimal equilibria of a liability game in which an agent of
//! unknown bias acts on verifiable and unverifiable signals and a court
//! punishes failures.

pub mod continuum;
pub mod equilibrium;
pub mod error;
pub mod model;
pub mod numerics;
pub mod oracle;
pub mod sweep;
pub mod variants;

pub use error::{ContinuumError, ModelError, OracleError, SolverError, SweepError};
