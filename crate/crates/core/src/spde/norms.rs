//! Discrete Sobolev norms of space-time fields.
//!
//! Spatial norms are computed from discrete Fourier coefficients with weights
//! `1 + |2 pi k|^2` (H1) and `1 + |2 pi k|^2 + |2 pi k|^4` (H2); time integrals
//! use the trapezoid rule on the field's time grid.

use serde::Serialize;

use super::field::Field;
use super::ops::PeriodicOps;
use crate::drivers::{driver_distance, RoughDriver, ZeroDriver};
use crate::error::{Error, Result};
use crate::rp::p_variation_by;

/// Squared `(L2, H1, H2)` norms of every snapshot, summed over components.
pub fn sobolev_profile(f: &Field) -> Vec<[f64; 3]> {
    let ops = PeriodicOps::new(*f.space());
    (0..f.times().len())
        .map(|k| {
            let mut acc = [0.0; 3];
            for c in 0..f.components() {
                let s = ops.sobolev_sq(&f.component(k, c));
                for i in 0..3 {
                    acc[i] += s[i];
                }
            }
            acc
        })
        .collect()
}

fn trapezoid(f: &Field, values: impl Fn(usize) -> f64) -> f64 {
    let t = f.times();
    (0..t.steps()).map(|k| 0.5 * t.dt(k) * (values(k) + values(k + 1))).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormReport {
    pub linf_l2: f64,
    pub linf_h1: f64,
    pub l2_h2: f64,
    /// p-variation in time of the L2-valued path `t -> u(t)`.
    pub time_pvar_l2: f64,
    pub p: f64,
}

pub fn discrete_norms(f: &Field, p: f64) -> Result<NormReport> {
    let prof = sobolev_profile(f);
    let sup = |i: usize| prof.iter().map(|s| s[i]).fold(0.0, f64::max).sqrt();
    let vol = f.space().cell_volume();
    let time_pvar_l2 = p_variation_by(f.times().len(), p, |j, i| {
        let sq: f64 = f.snapshot(i).iter().zip(f.snapshot(j)).map(|(a, b)| (a - b) * (a - b)).sum();
        (vol * sq).sqrt()
    })?;
    Ok(NormReport {
        linf_l2: sup(0),
        linf_h1: sup(1),
        l2_h2: trapezoid(f, |k| prof[k][2]).sqrt(),
        time_pvar_l2,
        p,
    })
}

/// `sup_t ||u||_{H1}^2 + int ||u||_{H2}^2 dt`.
pub fn energy(f: &Field) -> f64 {
    let prof = sobolev_profile(f);
    prof.iter().map(|s| s[1]).fold(0.0, f64::max) + trapezoid(f, |k| prof[k][2])
}

/// `sup_t ||a(t) - b(t)||_{L2}`.
pub fn linf_l2_gap(a: &Field, b: &Field) -> Result<f64> {
    let d = a.combine(1.0, b, -1.0)?;
    let vol = a.space().cell_volume();
    Ok((0..d.times().len())
        .map(|k| (vol * d.snapshot(k).iter().map(|v| v * v).sum::<f64>()).sqrt())
        .fold(0.0, f64::max))
}

/// `||u(t_k)||_{L2}` for every time index.
pub fn l2_profile(f: &Field) -> Vec<f64> {
    let vol = f.space().cell_volume();
    (0..f.times().len())
        .map(|k| (vol * f.snapshot(k).iter().map(|v| v * v).sum::<f64>()).sqrt())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyReport {
    /// `||u||^2_{L-inf H1} + ||u||^2_{L2 H2}`.
    pub energy: f64,
    pub initial_h1_sq: f64,
    /// `energy / ||u0||^2_{H1}`: the constant this run realizes.
    pub constant: f64,
    /// `rho(G, 0)` for the driving noise.
    pub driver_size: f64,
    /// Reference bound `(1 + max(T, 1)) exp(2 rho(G, 0))` on the constant.
    pub reference_bound: f64,
    pub passed: bool,
    /// `reference_bound - constant`.
    pub margin: f64,
    /// Whether `||u(t)||_{H1}` never increases along the run.
    pub h1_nonincreasing: bool,
}

/// Energy inequality check for a solved field. Passing `None` for the driver
/// means the run was deterministic.
pub fn energy_report(f: &Field, driver: Option<&dyn RoughDriver>) -> Result<EnergyReport> {
    let prof = sobolev_profile(f);
    let energy = prof.iter().map(|s| s[1]).fold(0.0, f64::max) + trapezoid(f, |k| prof[k][2]);
    let initial = prof[0][1];
    let driver_size = match driver {
        Some(d) => {
            if d.space() != f.space() {
                return Err(Error::GridMismatch("driver and field space grids differ".into()));
            }
            driver_distance(d, &ZeroDriver::like(d))?
        }
        None => 0.0,
    };
    let constant = if energy == 0.0 { 0.0 } else { energy / initial };
    let reference_bound = (1.0 + f.times().horizon().max(1.0)) * (2.0 * driver_size).exp();
    let h1_nonincreasing = prof.windows(2).all(|w| w[1][1] <= w[0][1] * (1.0 + 1e-12));
    Ok(EnergyReport {
        energy,
        initial_h1_sq: initial,
        constant,
        driver_size,
        reference_bound,
        passed: constant.is_finite() && constant <= reference_bound,
        margin: reference_bound - constant,
        h1_nonincreasing,
    })
}
