//! Rough-driver SPDE solvers on the periodic grid.

mod config;
mod field;
mod llg;
pub mod norms;
mod ops;
mod problem;
mod scalar;

pub use config::{Equation, GridFunction, RotationMode, SolverConfig};
pub use field::{Field, SolveDiagnostics, SphereWarning};
pub use llg::{solve_llg, SPHERE_WARNING_LEVEL};
pub use norms::{discrete_norms, energy, energy_report, l2_profile, linf_l2_gap, sobolev_profile, EnergyReport, NormReport};
pub use ops::PeriodicOps;
pub use problem::{AnyDriver, Problem};
pub use scalar::{solve_heat, solve_reaction_diffusion, RD_MAX_PRINCIPLE_DT};

pub(crate) use config::{check_finite, push_state, to_state, State};
pub(crate) use llg::{check_sphere, generator, mat3, noise_map, rotation, LlgDrift};
pub(crate) use scalar::ScalarDrift;
