//! Tangent equations, the pathwise CLT experiment, Itô noise and the tensor
//! product of drivers.

mod continuity;
mod experiment;
mod fit;
mod ito;
mod product;
mod tangent;

pub use continuity::{continuity_probe, ContinuityProbe};
pub use experiment::{
    clt_experiment, clt_experiment_with, perturbed_lift, rescaled_fluctuation, CltOptions,
    ConvergenceCell, ConvergenceReport, RichardsonReport, CLT_BAND_LOWER,
};
pub(crate) use experiment::check_schedule;
pub use fit::{fit_loglog, LogLogFit};
pub use ito::{ito_solver, ito_vs_strat, stratonovich_solver, ItoComparison};
pub use product::{product_gamma, TensorDriver};
pub use tangent::{solve_tangent, CrossedMaps, ForcingAnchor, TangentConfig};
