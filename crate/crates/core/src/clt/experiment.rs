//! The pathwise CLT experiment: solutions driven by `{G + tau_sqrt(eps) W}`
//! against the tangent solution.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use super::fit::{fit_loglog, LogLogFit};
use super::tangent::{solve_tangent, TangentConfig};
use crate::error::{domain, Result};
use crate::rp::{dilate, sum_lifts, PathLift};
use crate::spde::{energy, Equation, Field};

/// Smallest fitted slope accepted: the squared error decays at least like
/// `eps^(1/2)`, less 0.1 for discretization effects.
pub const CLT_BAND_LOWER: f64 = 0.4;

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceCell {
    pub eps: f64,
    pub error: Option<f64>,
    pub included: bool,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RichardsonReport {
    pub eps: Vec<f64>,
    pub errors: Vec<f64>,
    pub fit: Option<LogLogFit>,
    /// Energy distance between the extrapolated limit and the tangent solution.
    pub limit_vs_tangent: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceReport {
    pub equation: Equation,
    pub seed: Option<u64>,
    pub cells: Vec<ConvergenceCell>,
    pub fit: Option<LogLogFit>,
    /// First `eps` at which the error stopped decreasing.
    pub floor_from: Option<f64>,
    pub degenerate: bool,
    pub band_lower: f64,
    pub passed: bool,
    /// Consecutive pairs with `eps <= 1e-2` and `e2 / e1 > (eps2 / eps1)^0.4`.
    pub bound_violations: Vec<(f64, f64)>,
    pub richardson: Option<RichardsonReport>,
}

impl ConvergenceReport {
    pub fn errors(&self) -> Vec<Option<f64>> {
        self.cells.iter().map(|c| c.error).collect()
    }

    pub fn slope(&self) -> Option<f64> {
        self.fit.map(|f| f.slope)
    }

    /// Whether the errors strictly decrease along the schedule.
    pub fn strictly_decreasing(&self) -> bool {
        let e: Vec<f64> = self.cells.iter().filter_map(|c| c.error).collect();
        e.len() == self.cells.len() && e.windows(2).all(|w| w[1] < w[0])
    }

    /// CSV table `eps,error,included` (failed cells have an empty error).
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "eps,error,included")?;
        for c in &self.cells {
            let e = c.error.map_or(String::new(), |e| e.to_string());
            writeln!(w, "{},{},{}", c.eps, e, c.included)?;
        }
        Ok(())
    }

    /// Whitespace-separated `log10(eps) log10(error)` for the fitted cells.
    pub fn write_plot_data<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for c in self.cells.iter().filter(|c| c.included) {
            if let Some(e) = c.error {
                writeln!(w, "{} {}", c.eps.log10(), e.log10())?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct CltOptions {
    /// Evaluate the cells on the current rayon pool.
    pub parallel: bool,
    /// Also measure self-convergence against a Richardson-extrapolated limit.
    pub richardson: bool,
    pub band_lower: f64,
}

impl Default for CltOptions {
    fn default() -> Self {
        Self { parallel: false, richardson: false, band_lower: CLT_BAND_LOWER }
    }
}

pub(crate) fn check_schedule(eps: &[f64], min_len: usize) -> Result<()> {
    if eps.len() < min_len {
        return domain(format!("eps schedule needs at least {min_len} values, got {}", eps.len()));
    }
    if eps.iter().any(|e| !(*e > 0.0) || !e.is_finite()) {
        return domain("eps values must be positive and finite");
    }
    if eps.windows(2).any(|w| w[1] >= w[0]) {
        return domain("eps schedule must be strictly decreasing");
    }
    Ok(())
}

/// `{G + tau_sqrt(eps) W}` with crossed maps scaled by `sqrt(eps)`.
pub fn perturbed_lift(cfg: &TangentConfig, eps: f64) -> Result<PathLift> {
    let r = eps.sqrt();
    let w = dilate(&cfg.direction, r);
    match (&cfg.base, &cfg.cross) {
        (Some(g), Some(c)) => sum_lifts(g, &w, &c.gw.scaled(r), &c.wg.scaled(r)),
        _ => Ok(w),
    }
}

/// `(u^eps - u) / sqrt(eps)`.
pub fn rescaled_fluctuation(cfg: &TangentConfig, base: &Field, eps: f64) -> Result<Field> {
    let u = cfg.problem.solve(&perturbed_lift(cfg, eps)?)?;
    let r = eps.sqrt();
    u.combine(1.0 / r, base, -1.0 / r)
}

pub fn clt_experiment(cfg: &TangentConfig) -> Result<ConvergenceReport> {
    clt_experiment_with(cfg, &CltOptions::default())
}

pub fn clt_experiment_with(cfg: &TangentConfig, opts: &CltOptions) -> Result<ConvergenceReport> {
    check_schedule(&cfg.eps, 4)?;
    cfg.check()?;
    let base = cfg.problem.solve(&cfg.base_lift()?)?;
    let tangent = solve_tangent(&base, cfg)?;
    let cell = |eps: &f64| -> Result<(f64, Option<Field>)> {
        let x = rescaled_fluctuation(cfg, &base, *eps)?;
        let e = energy(&x.combine(1.0, &tangent, -1.0)?);
        Ok((e, opts.richardson.then_some(x)))
    };
    let results: Vec<Result<(f64, Option<Field>)>> = if opts.parallel {
        cfg.eps.par_iter().map(cell).collect()
    } else {
        cfg.eps.iter().map(cell).collect()
    };

    let mut cells = Vec::with_capacity(cfg.eps.len());
    let mut fields = Vec::new();
    let mut floor_from = None;
    let mut last: Option<f64> = None;
    for (eps, r) in cfg.eps.iter().zip(results) {
        match r {
            Ok((e, x)) => {
                if floor_from.is_none() && last.is_some_and(|l| e >= l) {
                    floor_from = Some(*eps);
                }
                last = Some(e);
                cells.push(ConvergenceCell { eps: *eps, error: Some(e), included: floor_from.is_none(), failure: None });
                if let Some(x) = x {
                    fields.push((*eps, x));
                }
            }
            Err(err) => cells.push(ConvergenceCell {
                eps: *eps,
                error: None,
                included: false,
                failure: Some(err.to_string()),
            }),
        }
    }
    let degenerate = cells.iter().filter_map(|c| c.error).all(|e| e == 0.0);
    let (xs, ys): (Vec<f64>, Vec<f64>) =
        cells.iter().filter(|c| c.included).filter_map(|c| c.error.map(|e| (c.eps, e))).unzip();
    let fit = if degenerate { None } else { fit_loglog(&xs, &ys) };
    let valid: Vec<(f64, f64)> = cells.iter().filter_map(|c| c.error.map(|e| (c.eps, e))).collect();
    let bound_violations = valid
        .windows(2)
        .filter(|w| w[0].0 <= 1e-2 && w[1].1 / w[0].1 > (w[1].0 / w[0].0).powf(0.4))
        .map(|w| (w[0].0, w[1].0))
        .collect();
    let richardson = if opts.richardson { richardson(&fields, &tangent)? } else { None };
    Ok(ConvergenceReport {
        equation: cfg.problem.equation,
        seed: cfg.direction.seed(),
        passed: !degenerate && fit.is_some_and(|f| f.slope >= opts.band_lower),
        cells,
        fit,
        floor_from,
        degenerate,
        band_lower: opts.band_lower,
        bound_violations,
        richardson,
    })
}

/// With `X^eps = X + sqrt(eps) Y + ...`, the two smallest intensities give
/// `X_lim = (rho X^small - X^big) / (rho - 1)`, `rho = sqrt(eps_big / eps_small)`;
/// the remaining cells are measured against `X_lim`.
fn richardson(fields: &[(f64, Field)], tangent: &Field) -> Result<Option<RichardsonReport>> {
    if fields.len() < 3 {
        return Ok(None);
    }
    let (eps_big, big) = &fields[fields.len() - 2];
    let (eps_small, small) = &fields[fields.len() - 1];
    let rho = (eps_big / eps_small).sqrt();
    let limit = small.combine(rho / (rho - 1.0), big, -1.0 / (rho - 1.0))?;
    let mut eps = Vec::new();
    let mut errors = Vec::new();
    for (e, x) in &fields[..fields.len() - 1] {
        eps.push(*e);
        errors.push(energy(&x.combine(1.0, &limit, -1.0)?));
    }
    let fit = fit_loglog(&eps, &errors);
    Ok(Some(RichardsonReport {
        eps,
        errors,
        fit,
        limit_vs_tangent: energy(&limit.combine(1.0, tangent, -1.0)?),
    }))
}
