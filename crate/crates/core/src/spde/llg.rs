//! Landau–Lifschitz–Gilbert equation with an antisymmetric rough driver.

use nalgebra::{Matrix3, Rotation3, Vector3};

use super::config::{check_finite, push_state, to_state, GridFunction, RotationMode, SolverConfig, State};
use super::field::{Field, SolveDiagnostics, SphereWarning};
use super::ops::PeriodicOps;
use crate::drivers::{RoughDriver, SphericalDriver};
use crate::error::{domain, Result};

/// Drift deviations from the sphere above this are recorded as warnings.
pub const SPHERE_WARNING_LEVEL: f64 = 1e-6;

#[inline]
pub(crate) fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

#[inline]
fn at(s: &State, j: usize) -> [f64; 3] {
    [s[0][j], s[1][j], s[2][j]]
}

/// Drift sub-step for `b(u) = u'' + u x u'' + u |u'|^2`: the geometric terms
/// explicit, the Laplacian implicit (or explicit).
pub(crate) struct LlgDrift {
    ops: PeriodicOps,
    implicit: bool,
    lap: State,
    grad: State,
    lap_x: State,
    grad_x: State,
}

impl LlgDrift {
    pub(crate) fn new(ops: PeriodicOps, implicit: bool) -> Self {
        let n = ops.space().nodes();
        let z = || vec![vec![0.0; n]; 3];
        Self { ops, implicit, lap: z(), grad: z(), lap_x: z(), grad_x: z() }
    }

    fn derivatives(&mut self, u: &State) {
        for c in 0..3 {
            self.ops.laplacian(&u[c], &mut self.lap[c]);
            self.ops.gradient(&u[c], 0, &mut self.grad[c]);
        }
    }

    fn diffuse(&mut self, x: &mut State, pre: &State, use_lap_x: bool, dt: f64) {
        for c in 0..3 {
            if self.implicit {
                x[c].copy_from_slice(&pre[c]);
                self.ops.implicit_heat(dt, &mut x[c]);
            } else {
                let lap = if use_lap_x { &self.lap_x[c] } else { &self.lap[c] };
                for j in 0..x[c].len() {
                    x[c][j] = pre[c][j] + dt * lap[j];
                }
            }
        }
    }

    pub(crate) fn apply(&mut self, u: &mut State, dt: f64) {
        self.derivatives(u);
        let mut pre = u.clone();
        for j in 0..u[0].len() {
            let uj = at(u, j);
            let g = at(&self.grad, j);
            let gsq = g[0] * g[0] + g[1] * g[1] + g[2] * g[2];
            let uxl = cross(uj, at(&self.lap, j));
            for c in 0..3 {
                pre[c][j] = uj[c] + dt * (uxl[c] + uj[c] * gsq);
            }
        }
        self.diffuse(u, &pre, false, dt);
    }

    /// `x <- D'(ubar)[x]`.
    pub(crate) fn derivative(&mut self, ubar: &State, x: &mut State, dt: f64) {
        self.derivatives(ubar);
        for c in 0..3 {
            self.ops.laplacian(&x[c], &mut self.lap_x[c]);
            self.ops.gradient(&x[c], 0, &mut self.grad_x[c]);
        }
        let mut pre = x.clone();
        for j in 0..x[0].len() {
            let (u, xv) = (at(ubar, j), at(x, j));
            let (lu, lx) = (at(&self.lap, j), at(&self.lap_x, j));
            let (gu, gx) = (at(&self.grad, j), at(&self.grad_x, j));
            let gsq = gu[0] * gu[0] + gu[1] * gu[1] + gu[2] * gu[2];
            let gdot = gu[0] * gx[0] + gu[1] * gx[1] + gu[2] * gx[2];
            let (a, b) = (cross(xv, lu), cross(u, lx));
            for c in 0..3 {
                pre[c][j] = xv[c] + dt * (a[c] + b[c] + xv[c] * gsq + 2.0 * u[c] * gdot);
            }
        }
        self.diffuse(x, &pre, true, dt);
    }
}

pub(crate) fn mat3(block: &[f64]) -> Matrix3<f64> {
    Matrix3::from_row_slice(&block[..9])
}

/// Antisymmetric generator `W + Anti(WW)` of the exact noise rotation.
pub(crate) fn generator(w: &[f64], ww: &[f64]) -> Matrix3<f64> {
    let ww = mat3(ww);
    mat3(w) + 0.5 * (ww - ww.transpose())
}

/// `exp(m)` for antisymmetric `m`.
pub(crate) fn rotation(m: &Matrix3<f64>) -> Matrix3<f64> {
    let omega = Vector3::new(m[(2, 1)], m[(0, 2)], m[(1, 0)]);
    Rotation3::new(omega).into_inner()
}

/// The linear map applied in the noise sub-step.
pub(crate) fn noise_map(w: &[f64], ww: &[f64], mode: RotationMode) -> Matrix3<f64> {
    match mode {
        RotationMode::ExactExponential => rotation(&generator(w, ww)),
        RotationMode::SecondOrderAffine => Matrix3::identity() + mat3(w) + mat3(ww),
    }
}

pub(crate) fn check_sphere(u0: &GridFunction) -> Result<()> {
    if u0.components() != 3 || u0.space().dim() != 1 {
        return domain("the LLG solver needs a 3-component field in one space dimension");
    }
    for u in u0.values().chunks(3) {
        let norm = (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]).sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return domain(format!("initial magnetization has |u| = {norm}, expected 1"));
        }
    }
    Ok(())
}

/// Per step: drift sub-step, optional renormalization of `|u|`, then the noise
/// sub-step `u <- exp(W + Anti(WW)) u` (or the affine map, per `cfg.rotation`).
pub fn solve_llg(u0: &GridFunction, driver: &SphericalDriver, cfg: &SolverConfig) -> Result<Field> {
    check_sphere(u0)?;
    let space = *driver.space();
    u0.check_space(&space)?;
    let grid = driver.time_grid().clone();
    grid.ensure_matches(&cfg.time_grid()?, "solver time step and driver grid")?;
    let mut drift = LlgDrift::new(PeriodicOps::new(space), cfg.implicit_laplacian);
    let mut u = to_state(u0.values(), 3);
    let mut out = Vec::with_capacity(grid.len() * u0.values().len());
    out.extend_from_slice(u0.values());
    let len = driver.block_len();
    let (mut w, mut ww) = (vec![0.0; len], vec![0.0; len]);
    let mut diagnostics = SolveDiagnostics { implicit_laplacian: cfg.implicit_laplacian, ..Default::default() };
    for k in 0..grid.steps() {
        drift.apply(&mut u, grid.dt(k));
        let mut worst = 0.0_f64;
        for j in 0..space.nodes() {
            let v = at(&u, j);
            let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            worst = worst.max((norm - 1.0).abs());
            if cfg.renormalize {
                for c in 0..3 {
                    u[c][j] = v[c] / norm;
                }
            }
        }
        diagnostics.max_drift_sphere_deviation = diagnostics.max_drift_sphere_deviation.max(worst);
        if worst > SPHERE_WARNING_LEVEL {
            diagnostics.sphere_warnings.push(SphereWarning { step: k + 1, deviation: worst });
        }
        driver.blocks_into(k, k + 1, &mut w, &mut ww);
        for j in 0..space.nodes() {
            let r = noise_map(&w[j * 9..], &ww[j * 9..], cfg.rotation);
            let v = r * Vector3::from(at(&u, j));
            for c in 0..3 {
                u[c][j] = v[c];
            }
        }
        check_finite(&u, cfg.blow_up, k + 1, grid.points()[k + 1])?;
        push_state(&mut out, &u);
    }
    Ok(Field::from_snapshots(space, grid, 3, out, diagnostics))
}
