//! Local Lipschitz continuity of the solution map: perturb a driver along a
//! smooth direction and compare the solution gap with the driver distance.

use serde::Serialize;

use crate::drivers::driver_distance;
use crate::error::{domain, Result};
use crate::rp::{dilate, sum_lifts, young_cross, Path, PathLift};
use crate::spde::{linf_l2_gap, Problem};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContinuityProbe {
    pub delta: f64,
    /// Driver distances at `delta` and `delta / 2`.
    pub rho: [f64; 2],
    /// `sup_t ||u(W) - u(W + delta h)||_{L2}` at `delta` and `delta / 2`.
    pub gap: [f64; 2],
}

impl ContinuityProbe {
    pub fn ratios(&self) -> [f64; 2] {
        [self.gap[0] / self.rho[0], self.gap[1] / self.rho[1]]
    }

    /// `gap(delta / 2) / gap(delta)`.
    pub fn halving_factor(&self) -> f64 {
        self.gap[1] / self.gap[0]
    }
}

/// Compares `u(W)` with `u({W + delta h})` for `delta` and `delta / 2`. The
/// shifted lift uses Young crossed integrals, so `w` must have `p < 3` and
/// `h` is taken to have bounded variation.
pub fn continuity_probe(problem: &Problem, w: &PathLift, h: &Path, delta: f64) -> Result<ContinuityProbe> {
    if !(delta > 0.0) || !delta.is_finite() {
        return domain(format!("perturbation size must be positive, got {delta}"));
    }
    let hl = PathLift::piecewise_linear(w.grid().clone(), h)?;
    let wh = young_cross(w.level1(), w.p(), hl.level1(), 1.0)?;
    let hw = young_cross(hl.level1(), 1.0, w.level1(), w.p())?;
    let drv = problem.driver(w)?;
    let u = problem.solve_with(&drv)?;
    let mut rho = [0.0; 2];
    let mut gap = [0.0; 2];
    for (k, d) in [delta, 0.5 * delta].into_iter().enumerate() {
        let shifted = sum_lifts(w, &dilate(&hl, d), &wh.scaled(d), &hw.scaled(d))?;
        let sdrv = problem.driver(&shifted)?;
        rho[k] = driver_distance(drv.as_dyn(), sdrv.as_dyn())?;
        gap[k] = linf_l2_gap(&u, &problem.solve_with(&sdrv)?)?;
    }
    Ok(ContinuityProbe { delta, rho, gap })
}
