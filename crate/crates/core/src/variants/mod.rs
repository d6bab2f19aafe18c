//! Alternative institutions and richer type and signal structures.

mod inaction;
mod ktypes;
mod mens_rea;
mod principal;
mod signals;

pub use inaction::{inaction_posteriors, verify_no_inaction_punishment};
pub use ktypes::{ktype_critical_fines, ktype_fine_difference, KTypeFines, TypeSpectrum};
pub use mens_rea::{
    check_py_monotone_objective, delta_hat, eta_1, eta_2, eta_gap_piecewise, objective_f1,
    objective_f2, solve_objective_mensrea, solve_with_mens_rea, MensReaMode, MonotoneWitness,
    MonotonicityReport, ObjectiveSolution,
};
pub use principal::{solve_commitment, solve_expost_screening};
pub use signals::{
    correlated_bracket, delta_extended, extended_fines, printed_delta_asymmetric,
    printed_delta_correlated, DependentSignalSpec,
};
