//! The tangent equation: the derivative of the discrete solution map in the
//! direction of a second rough path.

use nalgebra::{Matrix3, Matrix6, Vector3};
use serde::{Deserialize, Serialize};

use crate::drivers::{spherical_level1, spherical_level2, RoughDriver};
use crate::error::{domain, Error, Result};
use crate::rp::{PathLift, TwoIndexMap, young_cross};
use crate::spde::{
    check_finite, check_sphere, generator, mat3, noise_map, push_state, rotation, to_state, AnyDriver,
    Field, LlgDrift, PeriodicOps, Problem, RotationMode, ScalarDrift, SolveDiagnostics, State,
};

/// Where the additive forcing of the tangent equation is evaluated within a step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ForcingAnchor {
    /// The output of the drift sub-step, which makes the tangent the exact
    /// linearization of the splitting scheme.
    #[default]
    DriftOutput,
    /// The base solution at the start of the step.
    StepStart,
}

/// Crossed integrals `[GW]` and `[WG]` between base and direction lifts.
#[derive(Debug, Clone)]
pub struct CrossedMaps {
    pub gw: TwoIndexMap,
    pub wg: TwoIndexMap,
}

impl CrossedMaps {
    /// Young crossed integrals; `qg` and `qw` are the declared variation
    /// exponents of base and direction.
    pub fn young(base: &PathLift, qg: f64, direction: &PathLift, qw: f64) -> Result<Self> {
        Ok(Self {
            gw: young_cross(base.level1(), qg, direction.level1(), qw)?,
            wg: young_cross(direction.level1(), qw, base.level1(), qg)?,
        })
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { gw: self.gw.scaled(c), wg: self.wg.scaled(c) }
    }
}

#[derive(Debug, Clone)]
pub struct TangentConfig {
    pub problem: Problem,
    /// Base lift `G`; `None` is the zero path.
    pub base: Option<PathLift>,
    pub direction: PathLift,
    /// Required whenever `base` is given.
    pub cross: Option<CrossedMaps>,
    /// Strictly decreasing noise intensities for experiments.
    pub eps: Vec<f64>,
    pub anchor: ForcingAnchor,
}

impl TangentConfig {
    pub fn new(problem: Problem, direction: PathLift) -> Self {
        Self { problem, base: None, direction, cross: None, eps: Vec::new(), anchor: ForcingAnchor::default() }
    }

    pub fn base_lift(&self) -> Result<PathLift> {
        match &self.base {
            Some(g) => Ok(g.clone()),
            None => Ok(PathLift::zero(self.problem.time_grid()?, self.problem.channels())),
        }
    }

    pub(crate) fn check(&self) -> Result<()> {
        let grid = self.problem.time_grid()?;
        grid.ensure_matches(self.direction.grid(), "direction lift")?;
        if self.direction.dim() != self.problem.channels() {
            return Err(Error::Dimension(format!(
                "direction has {} channels, problem has {}",
                self.direction.dim(),
                self.problem.channels()
            )));
        }
        if let Some(g) = &self.base {
            grid.ensure_matches(g.grid(), "base lift")?;
            if self.cross.is_none() {
                return domain("a nonzero base lift needs crossed maps with the direction");
            }
        }
        Ok(())
    }

    pub(crate) fn cross_block(&self, k: usize) -> Option<Vec<f64>> {
        self.cross.as_ref().map(|c| {
            let mut a = c.gw.block(k, k + 1);
            for (x, y) in a.iter_mut().zip(c.wg.block(k, k + 1)) {
                *x += y;
            }
            a
        })
    }
}

/// Fréchet derivative of the matrix exponential at `m` in direction `n`.
fn exp_derivative(m: &Matrix3<f64>, n: &Matrix3<f64>) -> Matrix3<f64> {
    if m.iter().all(|v| *v == 0.0) {
        return *n;
    }
    let mut big = Matrix6::zeros();
    big.fixed_view_mut::<3, 3>(0, 0).copy_from(m);
    big.fixed_view_mut::<3, 3>(3, 3).copy_from(m);
    big.fixed_view_mut::<3, 3>(0, 3).copy_from(n);
    big.exp().fixed_view::<3, 3>(0, 3).into_owned()
}

/// Solves the tangent equation along the base solution `u` (computed with the
/// configuration's base lift and zero initial perturbation).
///
/// Per step the forward splitting `u <- N_k(D(u))` is linearized: the
/// perturbation goes through the derivative of the drift sub-step and of the
/// noise map, and the direction enters additively through `W` and the crossed
/// integrals acting on the base state. Only the first level of the direction
/// lift is used.
pub fn solve_tangent(u: &Field, cfg: &TangentConfig) -> Result<Field> {
    cfg.check()?;
    let problem = &cfg.problem;
    let grid = problem.time_grid()?;
    u.times().ensure_matches(&grid, "base solution")?;
    if *u.space() != problem.space() || u.components() != problem.u0.components() {
        return Err(Error::GridMismatch("base solution does not match the problem".into()));
    }
    let driver = problem.driver(&cfg.base_lift()?)?;
    match driver {
        AnyDriver::Scalar(d) => scalar_tangent(u, cfg, &d),
        AnyDriver::Spherical(d) => {
            check_sphere(&problem.u0)?;
            llg_tangent(u, cfg, &d)
        }
    }
}

fn scalar_tangent(u: &Field, cfg: &TangentConfig, driver: &dyn RoughDriver) -> Result<Field> {
    let problem = &cfg.problem;
    let space = problem.space();
    let grid = problem.time_grid()?;
    let comps = u.components();
    let nodes = space.nodes();
    let m = problem.channels();
    let g = &problem.profiles;
    let mut drift = ScalarDrift::new(PeriodicOps::new(space), problem.equation, problem.solver.implicit_laplacian);
    let mut x: State = vec![vec![0.0; nodes]; comps];
    let mut out = Vec::with_capacity(grid.len() * nodes * comps);
    push_state(&mut out, &x);
    let (mut a, mut aa) = (vec![0.0; nodes], vec![0.0; nodes]);
    let mut forcing = vec![0.0; nodes];
    for k in 0..grid.steps() {
        let dt = grid.dt(k);
        let ubar = to_state(u.snapshot(k), comps);
        let anchor = match cfg.anchor {
            ForcingAnchor::DriftOutput => {
                let mut v = ubar.clone();
                drift.apply(&mut v, dt);
                v
            }
            ForcingAnchor::StepStart => ubar.clone(),
        };
        drift.derivative(&ubar, &mut x, dt);
        driver.blocks_into(k, k + 1, &mut a, &mut aa);
        let wk = cfg.direction.x(k, k + 1);
        let ck = cfg.cross_block(k);
        for j in 0..nodes {
            let mut f = 0.0;
            for i in 0..m {
                f += g[i][j] * wk[i];
                if let Some(c) = &ck {
                    for l in 0..m {
                        f += g[i][j] * g[l][j] * c[i * m + l];
                    }
                }
            }
            forcing[j] = f;
        }
        for c in 0..comps {
            for j in 0..nodes {
                x[c][j] = (1.0 + a[j] + aa[j]) * x[c][j] + forcing[j] * anchor[c][j];
            }
        }
        check_finite(&x, problem.solver.blow_up, k + 1, grid.points()[k + 1])?;
        push_state(&mut out, &x);
    }
    Ok(Field::from_snapshots(space, grid, comps, out, SolveDiagnostics::default()))
}

fn llg_tangent(u: &Field, cfg: &TangentConfig, driver: &dyn RoughDriver) -> Result<Field> {
    let problem = &cfg.problem;
    let solver = &problem.solver;
    let space = problem.space();
    let grid = problem.time_grid()?;
    let nodes = space.nodes();
    let g = &problem.profiles;
    let mut drift = LlgDrift::new(PeriodicOps::new(space), solver.implicit_laplacian);
    let mut x: State = vec![vec![0.0; nodes]; 3];
    let mut out = Vec::with_capacity(grid.len() * nodes * 3);
    push_state(&mut out, &x);
    let len = driver.block_len();
    let (mut w, mut ww) = (vec![0.0; len], vec![0.0; len]);
    for k in 0..grid.steps() {
        let dt = grid.dt(k);
        let ubar = to_state(u.snapshot(k), 3);
        let mut v = ubar.clone();
        drift.apply(&mut v, dt);
        drift.derivative(&ubar, &mut x, dt);
        driver.blocks_into(k, k + 1, &mut w, &mut ww);
        let wk = cfg.direction.x(k, k + 1);
        let ck = cfg.cross_block(k);
        for j in 0..nodes {
            let vj = Vector3::new(v[0][j], v[1][j], v[2][j]);
            let y = Vector3::new(x[0][j], x[1][j], x[2][j]);
            let (n, dn) = if solver.renormalize {
                let norm = vj.norm();
                let n = vj / norm;
                (n, (y - n * n.dot(&y)) / norm)
            } else {
                (vj, y)
            };
            let anchor = match cfg.anchor {
                ForcingAnchor::DriftOutput => n,
                ForcingAnchor::StepStart => Vector3::new(ubar[0][j], ubar[1][j], ubar[2][j]),
            };
            let dir1 = mat3(&spherical_level1([0, 1, 2].map(|a| g[a][j] * wk[a])).concat());
            let dir2 = match &ck {
                Some(c) => {
                    let hh: Vec<f64> = (0..9).map(|e| g[e / 3][j] * g[e % 3][j] * c[e]).collect();
                    mat3(&spherical_level2(&hh).concat())
                }
                None => Matrix3::zeros(),
            };
            let (wb, wwb) = (&w[j * 9..], &ww[j * 9..]);
            let next = match solver.rotation {
                RotationMode::ExactExponential => {
                    let m0 = generator(wb, wwb);
                    let dir = dir1 + 0.5 * (dir2 - dir2.transpose());
                    rotation(&m0) * dn + exp_derivative(&m0, &dir) * anchor
                }
                RotationMode::SecondOrderAffine => {
                    noise_map(wb, wwb, RotationMode::SecondOrderAffine) * dn + (dir1 + dir2) * anchor
                }
            };
            for c in 0..3 {
                x[c][j] = next[c];
            }
        }
        check_finite(&x, solver.blow_up, k + 1, grid.points()[k + 1])?;
        push_state(&mut out, &x);
    }
    Ok(Field::from_snapshots(space, grid, 3, out, SolveDiagnostics::default()))
}
