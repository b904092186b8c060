//! Numerical laboratory for the two-dimensional Muskat interface equation in the
//! stable regime, on the plane, the half-plane and a horizontal strip.

// `!(x > 0.0)` is how parameter checks here reject NaN along with bad values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod evolution;
pub mod grid;
pub mod identities;
pub mod io;
pub mod kernels;
pub mod mollifier;
pub mod monitors;
pub mod norms;
pub mod profile;
pub mod report;
pub mod tolerances;

pub use config::{parse_config, parse_config_str, DtPolicy, SolverConfig};
pub use error::{Error, Result};
pub use evolution::{epsilon_continuation, lift_initial, run, SimState, Solver};
pub use grid::GridFunction;
pub use kernels::{Geometry, Interface, QuadratureSpec, RhsForm};
pub use mollifier::Mollifier;
pub use monitors::{extrema_check, stability_compare, Verdict};
pub use norms::{local_norm, maximal_function, NormKind};
pub use profile::{sample_profile, ProfileSpec};
pub use report::RunReport;
