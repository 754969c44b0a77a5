use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::path::Path;
use super::two_index::TwoIndexMap;
use super::young::young_cross_unchecked;
use crate::error::{domain, Error, Result};
use crate::grid::TimeGrid;

/// Variation exponent recorded when the caller does not declare one.
pub const DEFAULT_P: f64 = 2.5;

/// A discrete level-2 rough path on a time grid.
///
/// Level 1 is stored as the path `X_{0,t_i}`; level 2 is a [`TwoIndexMap`],
/// normally anchored at time 0 and reconstructed through Chen's relation.
#[derive(Debug, Clone)]
pub struct PathLift {
    grid: TimeGrid,
    level1: Arc<Path>,
    level2: TwoIndexMap,
    p: f64,
    geometric: bool,
    seed: Option<u64>,
    refinement: usize,
}

fn check_p(p: f64) -> Result<()> {
    if (2.0..3.0).contains(&p) {
        Ok(())
    } else {
        domain(format!("rough path exponent must lie in [2, 3), got {p}"))
    }
}

impl PathLift {
    /// Lift from level-1 samples and level-2 values `XX_{0,t_i}` (row-major
    /// `d x d` per point). The level-1 path is shifted to start at 0.
    pub fn from_anchored(
        grid: TimeGrid,
        level1: &Path,
        level2_at_zero: Vec<f64>,
        p: f64,
        geometric: bool,
    ) -> Result<Self> {
        check_p(p)?;
        if level1.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "level 1 has {} points, grid has {}",
                level1.len(),
                grid.len()
            )));
        }
        let d = level1.dim();
        if level2_at_zero.len() >= d * d && level2_at_zero[..d * d].iter().any(|v| *v != 0.0) {
            return domain("level 2 must vanish at (0, 0)");
        }
        let x = Arc::new(level1.anchored());
        let level2 = TwoIndexMap::anchored(level2_at_zero, x.clone(), x.clone())?;
        Ok(Self { grid, level1: x, level2, p, geometric, seed: None, refinement: 1 })
    }

    /// Lift with an arbitrary second level (for instance dense or corrupted
    /// data). No consistency between the levels is enforced.
    pub fn from_parts(
        grid: TimeGrid,
        level1: &Path,
        level2: TwoIndexMap,
        p: f64,
        geometric: bool,
    ) -> Result<Self> {
        check_p(p)?;
        let d = level1.dim();
        if level1.len() != grid.len() || level2.len() != grid.len() {
            return Err(Error::GridMismatch("lift levels and grid differ in length".into()));
        }
        if level2.rows() != d || level2.cols() != d {
            return Err(Error::Dimension(format!(
                "level 2 is {}x{}, expected {d}x{d}",
                level2.rows(),
                level2.cols()
            )));
        }
        Ok(Self {
            grid,
            level1: Arc::new(level1.anchored()),
            level2,
            p,
            geometric,
            seed: None,
            refinement: 1,
        })
    }

    pub fn zero(grid: TimeGrid, d: usize) -> Self {
        let len = grid.len();
        Self {
            level1: Arc::new(Path::zeros(d, len)),
            level2: TwoIndexMap::zeros(d, d, len),
            grid,
            p: DEFAULT_P,
            geometric: true,
            seed: None,
            refinement: 1,
        }
    }

    /// Exact iterated integrals of the piecewise-linear interpolant of `samples`.
    pub fn piecewise_linear(grid: TimeGrid, samples: &Path) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} samples on a grid of {} points",
                samples.len(),
                grid.len()
            )));
        }
        let x = Arc::new(samples.anchored());
        let level2 = young_cross_unchecked(x.clone(), x.clone())?;
        Ok(Self { grid, level1: x, level2, p: DEFAULT_P, geometric: true, seed: None, refinement: 1 })
    }

    pub fn with_exponent(mut self, p: f64) -> Result<Self> {
        check_p(p)?;
        self.p = p;
        Ok(self)
    }

    pub fn with_provenance(mut self, seed: Option<u64>, refinement: usize) -> Self {
        self.seed = seed;
        self.refinement = refinement;
        self
    }

    pub fn dim(&self) -> usize {
        self.level1.dim()
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn level1(&self) -> &Path {
        &self.level1
    }

    pub(crate) fn level1_arc(&self) -> Arc<Path> {
        self.level1.clone()
    }

    pub fn level2(&self) -> &TwoIndexMap {
        &self.level2
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn is_geometric(&self) -> bool {
        self.geometric
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn refinement(&self) -> usize {
        self.refinement
    }

    /// `X_{s,t}`.
    pub fn x(&self, s: usize, t: usize) -> Vec<f64> {
        self.level1.increment(s, t)
    }

    /// `XX_{s,t}`, row-major.
    pub fn xx(&self, s: usize, t: usize) -> Vec<f64> {
        self.level2.block(s, t)
    }

    /// The same lift with its second level replaced.
    pub fn with_level2(&self, level2: TwoIndexMap, geometric: bool) -> Result<Self> {
        Self::from_parts(self.grid.clone(), &self.level1, level2, self.p, geometric)
            .map(|l| l.with_provenance(self.seed, self.refinement))
    }
}

/// Which grid triples `s < r < t` a Chen check visits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TripleSelection {
    Exhaustive,
    Sampled { count: usize, seed: u64 },
    /// Exhaustive up to `threshold` grid steps, otherwise `count` sampled triples.
    Auto { threshold: usize, count: usize, seed: u64 },
}

impl Default for TripleSelection {
    fn default() -> Self {
        TripleSelection::Auto { threshold: 256, count: 10_000, seed: 0 }
    }
}

impl TripleSelection {
    /// Calls `f(s, r, t)` for every selected triple. Errors on grids without triples.
    pub fn for_each(self, len: usize, mut f: impl FnMut(usize, usize, usize)) -> Result<()> {
        if len < 3 {
            return domain("Chen check needs a grid with at least three points");
        }
        let sel = match self {
            TripleSelection::Auto { threshold, count, seed } => {
                if len - 1 <= threshold {
                    TripleSelection::Exhaustive
                } else {
                    TripleSelection::Sampled { count, seed }
                }
            }
            other => other,
        };
        match sel {
            TripleSelection::Exhaustive => {
                for s in 0..len {
                    for r in s + 1..len {
                        for t in r + 1..len {
                            f(s, r, t);
                        }
                    }
                }
            }
            TripleSelection::Sampled { count, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                for _ in 0..count {
                    let mut idx = [0usize; 3];
                    loop {
                        for v in idx.iter_mut() {
                            *v = rng.random_range(0..len);
                        }
                        idx.sort_unstable();
                        if idx[0] < idx[1] && idx[1] < idx[2] {
                            break;
                        }
                    }
                    f(idx[0], idx[1], idx[2]);
                }
            }
            TripleSelection::Auto { .. } => unreachable!(),
        }
        Ok(())
    }
}

/// Max entrywise `|XX_{s,t} - XX_{s,r} - XX_{r,t} - X_{s,r} (x) X_{r,t}|`.
pub fn chen_defect(lift: &PathLift, triples: TripleSelection) -> Result<f64> {
    let d = lift.dim();
    let m = lift.level2();
    let (mut st, mut sr, mut rt) = (vec![0.0; d * d], vec![0.0; d * d], vec![0.0; d * d]);
    let x = lift.level1();
    let mut worst = 0.0_f64;
    triples.for_each(lift.grid().len(), |s, r, t| {
        m.block_into(s, t, &mut st);
        m.block_into(s, r, &mut sr);
        m.block_into(r, t, &mut rt);
        for i in 0..d {
            let xsr = x.component(r, i) - x.component(s, i);
            for j in 0..d {
                let xrt = x.component(t, j) - x.component(r, j);
                let k = i * d + j;
                worst = worst.max((st[k] - sr[k] - rt[k] - xsr * xrt).abs());
            }
        }
    })?;
    Ok(worst)
}

/// Max over grid pairs of `|Sym(XX_{s,t}) - X_{s,t} (x) X_{s,t} / 2|`.
pub fn geometricity_defect(lift: &PathLift) -> f64 {
    let len = lift.grid().len();
    let mut worst = 0.0_f64;
    for s in 0..len {
        for t in s + 1..len {
            worst = worst.max(pair_geometricity(lift, s, t));
        }
    }
    worst
}

fn pair_geometricity(lift: &PathLift, s: usize, t: usize) -> f64 {
    let d = lift.dim();
    let xx = lift.xx(s, t);
    let x = lift.x(s, t);
    let mut worst = 0.0_f64;
    for i in 0..d {
        for j in i..d {
            let sym = 0.5 * (xx[i * d + j] + xx[j * d + i]);
            worst = worst.max((sym - 0.5 * x[i] * x[j]).abs());
        }
    }
    worst
}

/// `(eps X, eps^2 XX)`.
pub fn dilate(lift: &PathLift, eps: f64) -> PathLift {
    PathLift {
        grid: lift.grid.clone(),
        level1: Arc::new(lift.level1.scaled(eps)),
        level2: lift.level2.scaled(eps * eps),
        p: lift.p,
        geometric: lift.geometric,
        seed: lift.seed,
        refinement: lift.refinement,
    }
}

fn check_sum_inputs(x: &PathLift, y: &PathLift, xy: &TwoIndexMap, yx: &TwoIndexMap) -> Result<()> {
    x.grid.ensure_matches(&y.grid, "sum of lifts")?;
    let d = x.dim();
    if y.dim() != d {
        return Err(Error::Dimension(format!("lifts of dimension {d} and {}", y.dim())));
    }
    for (name, m) in [("[XY]", xy), ("[YX]", yx)] {
        if m.rows() != d || m.cols() != d || m.len() != x.grid.len() {
            return Err(Error::Dimension(format!(
                "{name} is {}x{} on {} points, expected {d}x{d} on {}",
                m.rows(),
                m.cols(),
                m.len(),
                x.grid.len()
            )));
        }
    }
    Ok(())
}

/// `{X + Y} = (X + Y, XX + YY + [XY] + [YX])`.
///
/// The result is stored anchored, so it satisfies Chen's relation exactly. It
/// is tagged geometric when both inputs are and the crossed maps satisfy
/// integration by parts against the inputs.
pub fn sum_lifts(x: &PathLift, y: &PathLift, xy: &TwoIndexMap, yx: &TwoIndexMap) -> Result<PathLift> {
    check_sum_inputs(x, y, xy, yx)?;
    let level1 = x.level1.combine(1.0, &y.level1, 1.0)?;
    let level2 = TwoIndexMap::lin_comb(&[(1.0, &x.level2), (1.0, &y.level2), (1.0, xy), (1.0, yx)])?;
    let at_zero = level2.values_at_zero();
    let mut out = PathLift::from_anchored(x.grid.clone(), &level1, at_zero, x.p.max(y.p), false)?;
    if x.geometric && y.geometric {
        // For anchored data, geometricity on the pairs (0, t) implies it on every pair.
        let scale = 1.0 + out.level1.max_abs().powi(2);
        let worst = (1..out.grid.len()).map(|t| pair_geometricity(&out, 0, t)).fold(0.0, f64::max);
        out.geometric = worst <= 1e-10 * scale;
    }
    Ok(out)
}

/// Element-wise difference `{X + tau_eps Y} - X`, namely
/// `(eps Y, eps^2 YY + eps [XY] + eps [YX])`.
///
/// This is not a rough path: its second level does not satisfy Chen's relation
/// with its first level.
#[derive(Debug, Clone)]
pub struct LiftIncrement {
    pub level1: Path,
    pub level2: TwoIndexMap,
}

impl LiftIncrement {
    pub fn level1_block(&self, s: usize, t: usize) -> Vec<f64> {
        self.level1.increment(s, t)
    }

    pub fn level2_block(&self, s: usize, t: usize) -> Vec<f64> {
        self.level2.block(s, t)
    }
}

pub fn increment(
    x: &PathLift,
    y: &PathLift,
    xy: &TwoIndexMap,
    yx: &TwoIndexMap,
    eps: f64,
) -> Result<LiftIncrement> {
    check_sum_inputs(x, y, xy, yx)?;
    Ok(LiftIncrement {
        level1: y.level1.scaled(eps),
        level2: TwoIndexMap::lin_comb(&[(eps * eps, &y.level2), (eps, xy), (eps, yx)])?,
    })
}

/// Joint lift of `V` with a Young-regular path `h` of declared exponent `q`:
/// level 1 `(V, h)`, level 2 blocks `(VV, [Vh]; [hV], [hh])`.
pub fn joint_lift_young(v: &PathLift, h: &Path, q: f64) -> Result<PathLift> {
    if !(q >= 1.0) || 1.0 / v.p + 1.0 / q <= 1.0 {
        return domain(format!("no Young joint lift for p = {} and q = {q}", v.p));
    }
    if h.len() != v.grid.len() {
        return Err(Error::GridMismatch(format!(
            "direction has {} points, lift grid has {}",
            h.len(),
            v.grid.len()
        )));
    }
    let h = Arc::new(h.anchored());
    let vp = v.level1_arc();
    let hh = young_cross_unchecked(h.clone(), h.clone())?;
    let vh = young_cross_unchecked(vp.clone(), h.clone())?;
    let hv = young_cross_unchecked(h.clone(), vp)?;
    let (dv, dh) = (v.dim(), h.dim());
    let d = dv + dh;
    let len = v.grid.len();
    let mut at_zero = vec![0.0; d * d * len];
    for t in 1..len {
        let out = &mut at_zero[t * d * d..(t + 1) * d * d];
        let blocks = [
            (v.level2.block(0, t), 0, 0, dv, dv),
            (vh.block(0, t), 0, dv, dv, dh),
            (hv.block(0, t), dv, 0, dh, dv),
            (hh.block(0, t), dv, dv, dh, dh),
        ];
        for (b, r0, c0, rows, cols) in blocks {
            for i in 0..rows {
                for j in 0..cols {
                    out[(r0 + i) * d + c0 + j] = b[i * cols + j];
                }
            }
        }
    }
    let level1 = v.level1.concat(&h)?;
    Ok(PathLift::from_anchored(v.grid.clone(), &level1, at_zero, v.p, v.geometric)?
        .with_provenance(v.seed, v.refinement))
}
