//! Heat and reaction-diffusion equations with a multiplicative scalar driver.

use super::config::{check_finite, push_state, to_state, Equation, GridFunction, SolverConfig, State};
use super::field::{Field, SolveDiagnostics};
use super::ops::PeriodicOps;
use crate::drivers::{RoughDriver, ScalarDriver};
use crate::error::{domain, Result};

/// Drift sub-step `D` of the splitting and its linearization.
pub(crate) struct ScalarDrift {
    ops: PeriodicOps,
    reaction: bool,
    implicit: bool,
    lap: Vec<f64>,
}

impl ScalarDrift {
    pub(crate) fn new(ops: PeriodicOps, equation: Equation, implicit: bool) -> Self {
        let nodes = ops.space().nodes();
        Self { ops, reaction: equation == Equation::ReactionDiffusion, implicit, lap: vec![0.0; nodes] }
    }

    fn finish(&mut self, x: &mut State, base: &State, dt: f64) {
        for (xc, bc) in x.iter_mut().zip(base) {
            if self.implicit {
                xc.copy_from_slice(bc);
                self.ops.implicit_heat(dt, xc);
            } else {
                self.ops.laplacian(bc, &mut self.lap);
                for j in 0..xc.len() {
                    xc[j] = bc[j] + dt * self.lap[j];
                }
            }
        }
    }

    /// `u <- D(u)`: explicit reaction, then implicit (or explicit) diffusion.
    pub(crate) fn apply(&mut self, u: &mut State, dt: f64) {
        let mut pre = u.clone();
        if self.reaction {
            for j in 0..u[0].len() {
                let sq: f64 = u.iter().map(|c| c[j] * c[j]).sum();
                for (pc, uc) in pre.iter_mut().zip(u.iter()) {
                    pc[j] = uc[j] + dt * uc[j] * (1.0 - sq);
                }
            }
        }
        self.finish(u, &pre, dt);
    }

    /// `x <- D'(ubar)[x]`.
    pub(crate) fn derivative(&mut self, ubar: &State, x: &mut State, dt: f64) {
        let mut pre = x.clone();
        if self.reaction {
            for j in 0..x[0].len() {
                let sq: f64 = ubar.iter().map(|c| c[j] * c[j]).sum();
                let dot: f64 = ubar.iter().zip(x.iter()).map(|(u, v)| u[j] * v[j]).sum();
                for c in 0..x.len() {
                    pre[c][j] = x[c][j] + dt * (x[c][j] * (1.0 - sq) - 2.0 * ubar[c][j] * dot);
                }
            }
        }
        self.finish(x, &pre, dt);
    }
}

fn solve_scalar(
    equation: Equation,
    u0: &GridFunction,
    driver: &ScalarDriver,
    cfg: &SolverConfig,
) -> Result<Field> {
    let space = *driver.space();
    u0.check_space(&space)?;
    let grid = driver.time_grid().clone();
    grid.ensure_matches(&cfg.time_grid()?, "solver time step and driver grid")?;
    let mut drift = ScalarDrift::new(PeriodicOps::new(space), equation, cfg.implicit_laplacian);
    let comps = u0.components();
    let mut u = to_state(u0.values(), comps);
    let mut out = Vec::with_capacity(grid.len() * u0.values().len());
    out.extend_from_slice(u0.values());
    let (mut w, mut ww) = (vec![0.0; space.nodes()], vec![0.0; space.nodes()]);
    for k in 0..grid.steps() {
        drift.apply(&mut u, grid.dt(k));
        driver.blocks_into(k, k + 1, &mut w, &mut ww);
        for c in u.iter_mut() {
            for j in 0..c.len() {
                c[j] *= 1.0 + w[j] + ww[j];
            }
        }
        check_finite(&u, cfg.blow_up, k + 1, grid.points()[k + 1])?;
        push_state(&mut out, &u);
    }
    let diagnostics = SolveDiagnostics { implicit_laplacian: cfg.implicit_laplacian, ..Default::default() };
    Ok(Field::from_snapshots(space, grid, comps, out, diagnostics))
}

/// Heat equation `du = Laplacian u dt + u dW`, split per step into an implicit
/// diffusion sub-step and the multiplication `u <- (1 + W + WW) u`.
pub fn solve_heat(u0: &GridFunction, driver: &ScalarDriver, cfg: &SolverConfig) -> Result<Field> {
    solve_scalar(Equation::Heat, u0, driver, cfg)
}

/// Reaction-diffusion with drift `Laplacian u + u (1 - |u|^2)`; the cubic term
/// is explicit inside the drift sub-step.
pub fn solve_reaction_diffusion(
    u0: &GridFunction,
    driver: &ScalarDriver,
    cfg: &SolverConfig,
) -> Result<Field> {
    solve_scalar(Equation::ReactionDiffusion, u0, driver, cfg)
}

/// Largest step for which the reaction-diffusion drift sub-step maps `[0, 1]`
/// into itself: `u + dt u (1 - u^2)` is monotone on `[0, 1]` iff `dt <= 1/2`,
/// and the backward-Euler diffusion is a positive averaging operator.
pub const RD_MAX_PRINCIPLE_DT: f64 = 0.5;

pub(crate) fn dispatch(
    equation: Equation,
    u0: &GridFunction,
    driver: &ScalarDriver,
    cfg: &SolverConfig,
) -> Result<Field> {
    match equation {
        Equation::Heat | Equation::ReactionDiffusion => solve_scalar(equation, u0, driver, cfg),
        Equation::Llg => domain("the LLG equation needs a spherical driver"),
    }
}
