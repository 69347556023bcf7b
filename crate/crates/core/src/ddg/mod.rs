//! The direct discontinuous Galerkin discretization.

pub mod assembly;
pub mod banded;
pub mod flux;

pub use assembly::{
    assemble, bilinear_apply, bilinear_apply_with, load_apply, solve_problem, AssembledSystem,
    SolveReport,
};
pub use banded::{BandLu, BandMatrix};
pub use flux::{beta0_schedule, hat_flux, tilde_flux, FluxParams, NodeTrace, Schedule};
