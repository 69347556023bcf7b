//! Direct discontinuous Galerkin (DDG) solver for the singularly perturbed
//! convection-diffusion problem
//!
//! ```text
//! -eps u'' + (a u)' + b u = f  on (0, 1),   u(0) = g0, u(1) = g1,
//! ```
//!
//! with `a >= alpha > 0`, discretized on piecewise-uniform Shishkin meshes
//! with discontinuous piecewise polynomials of degree `k`.

// Negated comparisons are deliberate: they reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop, clippy::manual_is_multiple_of)]

pub mod admissibility;
pub mod basis;
pub mod ddg;
pub mod error;
pub mod field;
pub mod mesh;
pub mod norms;
pub mod problem;
pub mod projection;
pub mod study;

pub use admissibility::{AdmissibilityCheck, AdmissibilityReport};
pub use ddg::{assemble, solve_problem, AssembledSystem, FluxParams, Schedule, SolveReport};
pub use error::{Error, Result};
pub use field::{BrokenFunction, DGFunction, SampledFunction};
pub use mesh::{Mesh, ShishkinMesh};
pub use norms::{ErrorBundle, Region};
pub use problem::ProblemSpec;
pub use study::{ConfigOverrides, ConvergenceReport, ConvergenceRow, ReportFormat, RunConfig};
