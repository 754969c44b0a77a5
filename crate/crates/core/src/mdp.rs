//! Cameron–Martin directions, the skeleton equation, schedules `lambda(eps)`
//! and a Monte Carlo diagnostic for exponential equivalence.

use std::io::Write;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clt::{check_schedule, rescaled_fluctuation, solve_tangent, TangentConfig};
use crate::error::{domain, Error, Result};
use crate::grid::TimeGrid;
use crate::rp::{brownian_lift, Path, PathLift};
use crate::spde::{energy, Field, Problem};

/// A finite-energy path `h` with `h_0 = 0`, stored through its derivative.
#[derive(Debug, Clone)]
pub struct CameronMartinPath {
    grid: TimeGrid,
    hdot: Path,
    h: Path,
}

impl CameronMartinPath {
    /// `hdot` holds derivative samples at the grid points; `h` is recovered
    /// by trapezoid integration.
    pub fn new(grid: TimeGrid, hdot: Path) -> Result<Self> {
        if hdot.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} derivative samples on a grid of {} points",
                hdot.len(),
                grid.len()
            )));
        }
        if hdot.values().iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("Cameron-Martin derivative".into()));
        }
        let d = hdot.dim();
        let mut h = vec![0.0; hdot.values().len()];
        for k in 0..grid.steps() {
            let dt = grid.dt(k);
            for c in 0..d {
                h[(k + 1) * d + c] =
                    h[k * d + c] + 0.5 * dt * (hdot.component(k, c) + hdot.component(k + 1, c));
            }
        }
        let h = Path::new(d, h)?;
        Ok(Self { grid, hdot, h })
    }

    pub fn from_fn(grid: TimeGrid, d: usize, f: impl Fn(f64) -> Vec<f64>) -> Result<Self> {
        let hdot = Path::from_fn(&grid, d, f)?;
        Self::new(grid, hdot)
    }

    pub fn zero(grid: TimeGrid, d: usize) -> Self {
        let len = grid.len();
        Self { grid, hdot: Path::zeros(d, len), h: Path::zeros(d, len) }
    }

    pub fn dim(&self) -> usize {
        self.hdot.dim()
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn derivative(&self) -> &Path {
        &self.hdot
    }

    pub fn values(&self) -> &Path {
        &self.h
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self { grid: self.grid.clone(), hdot: self.hdot.scaled(a), h: self.h.scaled(a) }
    }
}

/// `1/2 int |hdot|^2 dt` by the trapezoid rule.
pub fn cm_energy(h: &CameronMartinPath) -> f64 {
    let sq = |k: usize| h.hdot.point(k).iter().map(|v| v * v).sum::<f64>();
    let mut e = 0.0;
    for k in 0..h.grid.steps() {
        e += 0.5 * h.grid.dt(k) * (sq(k) + sq(k + 1));
    }
    0.5 * e
}

/// The canonical lift `(delta h, int delta h_{s,r} (x) hdot_r dr)`.
pub fn lift_cm(h: &CameronMartinPath) -> Result<PathLift> {
    PathLift::piecewise_linear(h.grid.clone(), &h.h)
}

fn skeleton_config(h: &CameronMartinPath, problem: &Problem) -> Result<TangentConfig> {
    Ok(TangentConfig::new(problem.clone(), lift_cm(h)?))
}

/// Solution of the skeleton equation: the tangent at the zero path in the
/// direction `lift_cm(h)`. `base` is the deterministic solution.
pub fn solve_skeleton(h: &CameronMartinPath, base: &Field, problem: &Problem) -> Result<Field> {
    solve_tangent(base, &skeleton_config(h, problem)?)
}

/// One admissible pair `(X^h, E(h))`; `E(h)` bounds the rate of `X^h` from above.
pub fn rate_point(h: &CameronMartinPath, base: &Field, problem: &Problem) -> Result<(Field, f64)> {
    Ok((solve_skeleton(h, base, problem)?, cm_energy(h)))
}

/// Speed `lambda(eps)` of the moderate deviation scaling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "exponent")]
pub enum LambdaSchedule {
    /// `lambda(eps) = eps^(-a)`.
    Power(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ScheduleCheck {
    /// `lambda` increases as `eps` decreases.
    pub diverges: bool,
    /// `sqrt(eps) lambda(eps)` decreases as `eps` decreases.
    pub sqrt_eps_vanishes: bool,
}

impl ScheduleCheck {
    pub fn is_valid(&self) -> bool {
        self.diverges && self.sqrt_eps_vanishes
    }
}

impl LambdaSchedule {
    /// Presets by name: `quarter`, `third`, `ldp` (`eps^(-1/2)`, rejected by
    /// validation) or `power:<a>`.
    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "quarter" => Ok(Self::Power(0.25)),
            "third" => Ok(Self::Power(1.0 / 3.0)),
            "ldp" => Ok(Self::Power(0.5)),
            _ => match name.strip_prefix("power:").map(str::parse::<f64>) {
                Some(Ok(a)) if a.is_finite() => Ok(Self::Power(a)),
                _ => domain(format!("unknown lambda schedule '{name}'")),
            },
        }
    }

    pub fn lambda(&self, eps: f64) -> f64 {
        match self {
            Self::Power(a) => eps.powf(-a),
        }
    }

    /// Checks both limits numerically along a strictly decreasing schedule:
    /// strict monotonicity between neighbours, which also covers the endpoints.
    pub fn validate(&self, eps: &[f64]) -> Result<ScheduleCheck> {
        check_schedule(eps, 2)?;
        let lam: Vec<f64> = eps.iter().map(|e| self.lambda(*e)).collect();
        let prod: Vec<f64> = eps.iter().zip(&lam).map(|(e, l)| e.sqrt() * l).collect();
        let finite = lam.iter().chain(&prod).all(|v| v.is_finite());
        Ok(ScheduleCheck {
            diverges: finite && lam.windows(2).all(|w| w[1] > w[0]),
            sqrt_eps_vanishes: finite && prod.windows(2).all(|w| w[1] < w[0]),
        })
    }
}

#[derive(Debug, Clone)]
pub struct ExpEquivalenceConfig {
    /// Problem solved for every sample; the direction is a Brownian lift on
    /// its time grid.
    pub problem: Problem,
    pub eps: Vec<f64>,
    pub schedule: LambdaSchedule,
    pub delta: f64,
    pub samples: usize,
    pub seed: u64,
    pub refinement: usize,
    pub parallel: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExpEquivalenceCell {
    pub eps: f64,
    pub lambda: f64,
    pub exceedances: usize,
    pub probability: f64,
    /// `lambda^-2 log P`, or `-log(M) / lambda^2` when no sample exceeded.
    pub statistic: f64,
    pub below_resolution: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExpEquivalenceReport {
    pub samples: usize,
    pub delta: f64,
    pub schedule: LambdaSchedule,
    pub cells: Vec<ExpEquivalenceCell>,
    /// Resolved statistics do not increase as `eps` decreases, and once a
    /// cell is below resolution all later ones are too.
    pub non_increasing: bool,
}

impl ExpEquivalenceReport {
    /// CSV table `eps,lambda,exceedances,probability,statistic,below_resolution`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "eps,lambda,exceedances,probability,statistic,below_resolution")?;
        for c in &self.cells {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                c.eps, c.lambda, c.exceedances, c.probability, c.statistic, c.below_resolution
            )?;
        }
        Ok(())
    }
}

pub const MIN_MC_SAMPLES: usize = 100;

/// Seed of sample `index` under `master`: stream `index` of a ChaCha8
/// generator keyed by `master`.
pub fn sample_seed(master: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(index);
    rng.next_u64()
}

/// Energy-norm gaps `|X^eps - X|` of one sample, one per `eps`.
fn sample_gaps(cfg: &ExpEquivalenceConfig, base: &Field, index: usize) -> Result<Vec<f64>> {
    let grid = cfg.problem.time_grid()?;
    let seed = sample_seed(cfg.seed, index as u64);
    let w = brownian_lift(seed, &grid, cfg.refinement, cfg.problem.channels())?;
    let tcfg = TangentConfig::new(cfg.problem.clone(), w);
    let x = solve_tangent(base, &tcfg)?;
    cfg.eps
        .iter()
        .map(|&e| {
            let xe = rescaled_fluctuation(&tcfg, base, e)?;
            Ok(energy(&xe.combine(1.0, &x, -1.0)?).sqrt())
        })
        .collect()
}

/// Estimates `lambda^-2 log P(|X^eps - X| / lambda > delta)` over `M`
/// independent Brownian directions. Each sample is reused across the whole
/// schedule. The trend is a diagnostic only.
pub fn exp_equivalence_mc(cfg: &ExpEquivalenceConfig) -> Result<ExpEquivalenceReport> {
    if cfg.samples < MIN_MC_SAMPLES {
        return domain(format!("need at least {MIN_MC_SAMPLES} samples, got {}", cfg.samples));
    }
    if !(cfg.delta >= 0.0) || !cfg.delta.is_finite() {
        return domain(format!("threshold must be finite and nonnegative, got {}", cfg.delta));
    }
    let check = cfg.schedule.validate(&cfg.eps)?;
    if !check.is_valid() {
        return domain(format!("lambda schedule {:?} fails validation: {check:?}", cfg.schedule));
    }
    let base = cfg.problem.solve_deterministic()?;
    let gaps: Vec<Vec<f64>> = if cfg.parallel {
        (0..cfg.samples).into_par_iter().map(|i| sample_gaps(cfg, &base, i)).collect::<Result<_>>()?
    } else {
        (0..cfg.samples).map(|i| sample_gaps(cfg, &base, i)).collect::<Result<_>>()?
    };
    let m = cfg.samples as f64;
    let cells: Vec<ExpEquivalenceCell> = cfg
        .eps
        .iter()
        .enumerate()
        .map(|(j, &eps)| {
            let lambda = cfg.schedule.lambda(eps);
            let exceedances = gaps.iter().filter(|g| g[j] / lambda > cfg.delta).count();
            let probability = exceedances as f64 / m;
            let below_resolution = exceedances == 0;
            let statistic = if below_resolution { -m.ln() } else { probability.ln() } / (lambda * lambda);
            ExpEquivalenceCell { eps, lambda, exceedances, probability, statistic, below_resolution }
        })
        .collect();
    let non_increasing = trend_non_increasing(&cells);
    Ok(ExpEquivalenceReport {
        samples: cfg.samples,
        delta: cfg.delta,
        schedule: cfg.schedule,
        cells,
        non_increasing,
    })
}

fn trend_non_increasing(cells: &[ExpEquivalenceCell]) -> bool {
    let resolved = cells.iter().take_while(|c| !c.below_resolution).count();
    cells[resolved..].iter().all(|c| c.below_resolution)
        && cells[..resolved].windows(2).all(|w| w[1].statistic <= w[0].statistic)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rp::{chen_defect, geometricity_defect, TripleSelection};

    #[test]
    fn energy_of_analytic_derivatives() {
        let grid = TimeGrid::uniform(1.0, 10_000).unwrap();
        let one = CameronMartinPath::from_fn(grid.clone(), 1, |_| vec![1.0]).unwrap();
        assert!((cm_energy(&one) - 0.5).abs() < 1e-14);
        let ramp = CameronMartinPath::from_fn(grid.clone(), 1, |t| vec![t]).unwrap();
        assert!((cm_energy(&ramp) - 1.0 / 6.0).abs() < 1e-8);
        assert_eq!(cm_energy(&CameronMartinPath::zero(grid, 2)), 0.0);
    }

    #[test]
    fn energy_is_quadratic() {
        let grid = TimeGrid::uniform(0.7, 33).unwrap();
        let h = CameronMartinPath::from_fn(grid, 2, |t| vec![t.sin(), 1.0 - t]).unwrap();
        let e = cm_energy(&h);
        assert!((cm_energy(&h.scaled(3.0)) - 9.0 * e).abs() <= 1e-14 * e);
    }

    #[test]
    fn lift_values_and_algebra() {
        let grid = TimeGrid::uniform(1.0, 10_000).unwrap();
        let h = CameronMartinPath::from_fn(grid.clone(), 2, |t| vec![1.0, 2.0 * t]).unwrap();
        let lift = lift_cm(&h).unwrap();
        let n = grid.steps();
        let xx = lift.xx(0, n);
        assert!((xx[0] - 0.5).abs() < 1e-12);
        assert!((xx[1] - 2.0 / 3.0).abs() < 1e-6);
        let sel = TripleSelection::Sampled { count: 500, seed: 3 };
        assert!(chen_defect(&lift, sel).unwrap() <= 1e-10);
        assert!(geometricity_defect(&lift) <= 1e-10);
    }

    #[test]
    fn schedules() {
        let eps: Vec<f64> = (4..=12).map(|k| 2f64.powi(-k)).collect();
        assert!(LambdaSchedule::preset("quarter").unwrap().validate(&eps).unwrap().is_valid());
        let ldp = LambdaSchedule::preset("ldp").unwrap().validate(&eps).unwrap();
        assert!(ldp.diverges && !ldp.sqrt_eps_vanishes);
        assert!(!LambdaSchedule::Power(-0.25).validate(&eps).unwrap().diverges);
        assert_eq!(LambdaSchedule::preset("power:0.2").unwrap(), LambdaSchedule::Power(0.2));
        assert!(LambdaSchedule::preset("cubic").is_err());
        assert!(LambdaSchedule::Power(0.25).validate(&[0.1]).is_err());
    }

    #[test]
    fn sample_seeds_differ() {
        let s: Vec<u64> = (0..4).map(|i| sample_seed(9, i)).collect();
        assert_eq!(s, (0..4).map(|i| sample_seed(9, i)).collect::<Vec<_>>());
        assert!(s.windows(2).all(|w| w[0] != w[1]));
    }
}
