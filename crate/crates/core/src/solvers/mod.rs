//! Outer iterations on the skeleton system `(Id + ΠS) p = g`: damped
//! Richardson and restarted GMRES, volume recovery, energy-norm errors and
//! dense spectral diagnostics.

mod diagnostics;
mod iterate;
mod problem;

pub use diagnostics::{
    coercivity_constant, coercivity_of, dense_inductance, dense_operator, rayleigh_quotient, spectrum,
    SpectrumOf, SpectrumSummary, DENSE_CAP,
};
pub use iterate::{solve, solve_gmres, solve_richardson, Method, Solution, SolveReport, SolveStatus, SolverConfig, StopOn};
pub use problem::{energy_norm_error, ProblemOptions, SkeletonProblem};
