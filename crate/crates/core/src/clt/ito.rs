//! Itô noise: the same equations driven by the Itô lift of the noise.

use rayon::prelude::*;
use serde::Serialize;

use super::experiment::check_schedule;
use super::fit::{fit_loglog, LogLogFit};
use crate::error::Result;
use crate::rp::{dilate, ito_lift, PathLift};
use crate::spde::{linf_l2_gap, Field, Problem};

/// Solution driven by `sqrt(eps)` times the noise in the Itô sense.
///
/// The noise sub-step keeps its form `u <- (1 + W + WW) u`; only the second
/// level changes, to `eps (XX - (t - s) Id / 2)`. For scalar noise this is the
/// Euler–Maruyama step `u + sqrt(eps) W u + eps (W^2 - g^2 dt) u / 2`.
pub fn ito_solver(problem: &Problem, lift: &PathLift, eps: f64) -> Result<Field> {
    problem.solve(&dilate(&ito_lift(lift)?, eps.sqrt()))
}

/// Stratonovich counterpart of [`ito_solver`].
pub fn stratonovich_solver(problem: &Problem, lift: &PathLift, eps: f64) -> Result<Field> {
    problem.solve(&dilate(lift, eps.sqrt()))
}

#[derive(Debug, Clone, Serialize)]
pub struct ItoComparison {
    pub eps: Vec<f64>,
    /// `sup_t ||X^{eps,Ito} - X^{eps,Strat}||_{L2}` with `X^eps = (u^eps - u) / sqrt(eps)`.
    pub gaps: Vec<f64>,
    pub fit: Option<LogLogFit>,
    pub band_lower: f64,
    pub passed: bool,
}

/// Gap between Itô and Stratonovich fluctuations across an `eps` schedule;
/// it vanishes like `sqrt(eps)` because the correction is of order `eps`.
pub fn ito_vs_strat(problem: &Problem, lift: &PathLift, eps: &[f64], parallel: bool) -> Result<ItoComparison> {
    check_schedule(eps, 2)?;
    let cell = |e: &f64| -> Result<f64> {
        let a = ito_solver(problem, lift, *e)?;
        let b = stratonovich_solver(problem, lift, *e)?;
        Ok(linf_l2_gap(&a, &b)? / e.sqrt())
    };
    let gaps = if parallel {
        eps.par_iter().map(cell).collect::<Result<Vec<_>>>()?
    } else {
        eps.iter().map(cell).collect::<Result<Vec<_>>>()?
    };
    let fit = fit_loglog(eps, &gaps);
    let band_lower = super::CLT_BAND_LOWER;
    Ok(ItoComparison {
        eps: eps.to_vec(),
        passed: fit.is_some_and(|f| f.slope >= band_lower),
        gaps,
        fit,
        band_lower,
    })
}
