//! Rough drivers with a spatial component.
//!
//! A driver assigns to every grid pair `(s, t)` and every spatial node `x` a
//! pair of `n x n` matrices `(W_{s,t}(x), WW_{s,t}(x))` acting on the target
//! space `R^n`, subject to `WW_{s,t} - WW_{s,r} - WW_{r,t} = W_{r,t} W_{s,r}`.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::grid::{SpaceGrid, TimeGrid};
use crate::rp::io::{read_lift_csv, write_lift_csv};
use crate::rp::{dilate, p_variation_by, PathLift, TripleSelection};

/// Triple selection used for the Chen check recorded at construction.
pub const CONSTRUCTION_TRIPLES: TripleSelection =
    TripleSelection::Auto { threshold: 64, count: 2_000, seed: 0 };

pub trait RoughDriver: Send + Sync {
    fn time_grid(&self) -> &TimeGrid;

    fn space(&self) -> &SpaceGrid;

    /// Size `n` of the matrices acting at each node.
    fn order(&self) -> usize;

    /// Declared variation exponent of the underlying path.
    fn p(&self) -> f64;

    /// Writes `W_{s,t}(x)` and `WW_{s,t}(x)` for every node, node-major, each
    /// an `n x n` row-major block. Requires `s <= t`.
    fn blocks_into(&self, s: usize, t: usize, w: &mut [f64], ww: &mut [f64]);

    fn block_len(&self) -> usize {
        self.space().nodes() * self.order() * self.order()
    }

    fn blocks(&self, s: usize, t: usize) -> (Vec<f64>, Vec<f64>) {
        let mut w = vec![0.0; self.block_len()];
        let mut ww = vec![0.0; self.block_len()];
        self.blocks_into(s, t, &mut w, &mut ww);
        (w, ww)
    }
}

fn check_profiles(space: &SpaceGrid, profiles: &[Vec<f64>]) -> Result<()> {
    for (i, g) in profiles.iter().enumerate() {
        if g.len() != space.nodes() {
            return Err(Error::Dimension(format!(
                "profile {i} has {} samples, space grid has {} nodes",
                g.len(),
                space.nodes()
            )));
        }
        if g.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("profile {i}")));
        }
    }
    Ok(())
}

/// `W_{s,t}(x) = sum_i g_i(x) X^i_{s,t}`, `WW_{s,t}(x) = sum_{i,j} g_i(x) g_j(x) XX^{ij}_{s,t}`
/// acting by multiplication on scalar or vector fields.
#[derive(Debug, Clone)]
pub struct ScalarDriver {
    lift: PathLift,
    space: SpaceGrid,
    profiles: Vec<Vec<f64>>,
    chen_defect: f64,
}

pub fn make_scalar_driver(
    lift: &PathLift,
    space: SpaceGrid,
    profiles: Vec<Vec<f64>>,
) -> Result<ScalarDriver> {
    if profiles.len() != lift.dim() {
        return Err(Error::Dimension(format!(
            "{} profiles for a lift with {} channels",
            profiles.len(),
            lift.dim()
        )));
    }
    check_profiles(&space, &profiles)?;
    let mut driver = ScalarDriver { lift: lift.clone(), space, profiles, chen_defect: 0.0 };
    driver.chen_defect = driver_chen_defect(&driver, CONSTRUCTION_TRIPLES).unwrap_or(0.0);
    Ok(driver)
}

impl ScalarDriver {
    pub fn lift(&self) -> &PathLift {
        &self.lift
    }

    pub fn profiles(&self) -> &[Vec<f64>] {
        &self.profiles
    }

    /// Chen defect measured when the driver was built.
    pub fn recorded_chen_defect(&self) -> f64 {
        self.chen_defect
    }

    /// Driver built from the dilated lift.
    pub fn dilated(&self, eps: f64) -> Result<ScalarDriver> {
        make_scalar_driver(&dilate(&self.lift, eps), self.space, self.profiles.clone())
    }

    /// Same profiles on a different lift.
    pub fn with_lift(&self, lift: &PathLift) -> Result<ScalarDriver> {
        make_scalar_driver(lift, self.space, self.profiles.clone())
    }

    /// `W_{s,t}` at every node.
    pub fn level1(&self, s: usize, t: usize) -> Vec<f64> {
        self.blocks(s, t).0
    }

    /// `WW_{s,t}` at every node.
    pub fn level2(&self, s: usize, t: usize) -> Vec<f64> {
        self.blocks(s, t).1
    }

    pub fn is_zero(&self) -> bool {
        self.profiles.iter().all(|g| g.iter().all(|v| *v == 0.0))
            || (self.lift.level1().max_abs() == 0.0
                && self.lift.level2().values_at_zero().iter().all(|v| *v == 0.0))
    }
}

impl RoughDriver for ScalarDriver {
    fn time_grid(&self) -> &TimeGrid {
        self.lift.grid()
    }

    fn space(&self) -> &SpaceGrid {
        &self.space
    }

    fn order(&self) -> usize {
        1
    }

    fn p(&self) -> f64 {
        self.lift.p()
    }

    fn blocks_into(&self, s: usize, t: usize, w: &mut [f64], ww: &mut [f64]) {
        let m = self.lift.dim();
        let x = self.lift.x(s, t);
        let xx = self.lift.xx(s, t);
        for j in 0..self.space.nodes() {
            let (mut a, mut b) = (0.0, 0.0);
            for i in 0..m {
                let gi = self.profiles[i][j];
                a += gi * x[i];
                for k in 0..m {
                    b += gi * self.profiles[k][j] * xx[i * m + k];
                }
            }
            w[j] = a;
            ww[j] = b;
        }
    }
}

/// Antisymmetric driver for sphere-valued fields, built from a three-channel
/// lift modulated componentwise: `H^a(x) = g_a(x) X^a`,
/// `HH^{ab}(x) = g_a(x) g_b(x) XX^{ab}` with `HH^{ab}_{s,t} = int H^a_{s,r} dH^b_r`.
///
/// `W u = u x H`, and `WW` is assembled so that `WW = sum_{a,b} HH^{ab} A_b A_a`
/// with `(A_a)_{bc}` the Levi-Civita symbol.
#[derive(Debug, Clone)]
pub struct SphericalDriver {
    lift: PathLift,
    space: SpaceGrid,
    profiles: Vec<Vec<f64>>,
    chen_defect: f64,
}

pub fn make_llg_driver(
    lift: &PathLift,
    space: SpaceGrid,
    profiles: Vec<Vec<f64>>,
) -> Result<SphericalDriver> {
    if lift.dim() != 3 || profiles.len() != 3 {
        return Err(Error::Dimension(format!(
            "spherical drivers need 3 channels and 3 profiles, got {} and {}",
            lift.dim(),
            profiles.len()
        )));
    }
    check_profiles(&space, &profiles)?;
    let mut driver = SphericalDriver { lift: lift.clone(), space, profiles, chen_defect: 0.0 };
    driver.chen_defect = driver_chen_defect(&driver, CONSTRUCTION_TRIPLES).unwrap_or(0.0);
    Ok(driver)
}

/// `W` from `H`.
pub fn spherical_level1(h: [f64; 3]) -> [[f64; 3]; 3] {
    [[0.0, h[2], -h[1]], [-h[2], 0.0, h[0]], [h[1], -h[0], 0.0]]
}

/// `WW` from `HH` (row-major 3x3, `HH[a][b] = int H^a dH^b`).
pub fn spherical_level2(hh: &[f64]) -> [[f64; 3]; 3] {
    let e = |a: usize, b: usize| hh[a * 3 + b];
    [
        [-e(2, 2) - e(1, 1), e(0, 1), e(0, 2)],
        [e(1, 0), -e(2, 2) - e(0, 0), e(1, 2)],
        [e(2, 0), e(2, 1), -e(1, 1) - e(0, 0)],
    ]
}

impl SphericalDriver {
    pub fn lift(&self) -> &PathLift {
        &self.lift
    }

    pub fn profiles(&self) -> &[Vec<f64>] {
        &self.profiles
    }

    pub fn recorded_chen_defect(&self) -> f64 {
        self.chen_defect
    }

    pub fn dilated(&self, eps: f64) -> Result<SphericalDriver> {
        make_llg_driver(&dilate(&self.lift, eps), self.space, self.profiles.clone())
    }

    pub fn with_lift(&self, lift: &PathLift) -> Result<SphericalDriver> {
        make_llg_driver(lift, self.space, self.profiles.clone())
    }

    /// `H_{s,t}(x)` at node `j`.
    pub fn h(&self, s: usize, t: usize, j: usize) -> [f64; 3] {
        let x = self.lift.x(s, t);
        [0, 1, 2].map(|a| self.profiles[a][j] * x[a])
    }
}

impl RoughDriver for SphericalDriver {
    fn time_grid(&self) -> &TimeGrid {
        self.lift.grid()
    }

    fn space(&self) -> &SpaceGrid {
        &self.space
    }

    fn order(&self) -> usize {
        3
    }

    fn p(&self) -> f64 {
        self.lift.p()
    }

    fn blocks_into(&self, s: usize, t: usize, w: &mut [f64], ww: &mut [f64]) {
        let x = self.lift.x(s, t);
        let xx = self.lift.xx(s, t);
        let mut hh = [0.0; 9];
        for j in 0..self.space.nodes() {
            let g = [0, 1, 2].map(|a| self.profiles[a][j]);
            let h = [0, 1, 2].map(|a| g[a] * x[a]);
            for a in 0..3 {
                for b in 0..3 {
                    hh[a * 3 + b] = g[a] * g[b] * xx[a * 3 + b];
                }
            }
            let m1 = spherical_level1(h);
            let m2 = spherical_level2(&hh);
            for a in 0..3 {
                for b in 0..3 {
                    w[j * 9 + a * 3 + b] = m1[a][b];
                    ww[j * 9 + a * 3 + b] = m2[a][b];
                }
            }
        }
    }
}

/// The driver that is identically zero on a given time grid and space.
#[derive(Debug, Clone)]
pub struct ZeroDriver {
    grid: TimeGrid,
    space: SpaceGrid,
    order: usize,
    p: f64,
}

impl ZeroDriver {
    pub fn new(grid: TimeGrid, space: SpaceGrid, order: usize) -> Self {
        Self { grid, space, order, p: crate::rp::DEFAULT_P }
    }

    /// Zero driver on the same grids and target as `d`.
    pub fn like(d: &dyn RoughDriver) -> Self {
        Self { grid: d.time_grid().clone(), space: *d.space(), order: d.order(), p: d.p() }
    }
}

impl RoughDriver for ZeroDriver {
    fn time_grid(&self) -> &TimeGrid {
        &self.grid
    }

    fn space(&self) -> &SpaceGrid {
        &self.space
    }

    fn order(&self) -> usize {
        self.order
    }

    fn p(&self) -> f64 {
        self.p
    }

    fn blocks_into(&self, _s: usize, _t: usize, w: &mut [f64], ww: &mut [f64]) {
        w.iter_mut().chain(ww.iter_mut()).for_each(|v| *v = 0.0);
    }
}

/// Max over nodes, entries and selected triples of
/// `|WW_{s,t} - WW_{s,r} - WW_{r,t} - W_{r,t} W_{s,r}|`.
pub fn driver_chen_defect(driver: &dyn RoughDriver, triples: TripleSelection) -> Result<f64> {
    let n = driver.order();
    let len = driver.block_len();
    let [mut w_sr, mut w_rt, mut w_st, mut ww_sr, mut ww_rt, mut ww_st] =
        std::array::from_fn(|_| vec![0.0; len]);
    let mut worst = 0.0_f64;
    triples.for_each(driver.time_grid().len(), |s, r, t| {
        driver.blocks_into(s, r, &mut w_sr, &mut ww_sr);
        driver.blocks_into(r, t, &mut w_rt, &mut ww_rt);
        driver.blocks_into(s, t, &mut w_st, &mut ww_st);
        for node in 0..driver.space().nodes() {
            let o = node * n * n;
            for a in 0..n {
                for b in 0..n {
                    let mut prod = 0.0;
                    for c in 0..n {
                        prod += w_rt[o + a * n + c] * w_sr[o + c * n + b];
                    }
                    let k = o + a * n + b;
                    worst = worst.max((ww_st[k] - ww_sr[k] - ww_rt[k] - prod).abs());
                }
            }
        }
    })?;
    Ok(worst)
}

fn sup_gap(a: &[f64], b: &[f64], block: usize) -> f64 {
    a.chunks(block)
        .zip(b.chunks(block))
        .map(|(x, y)| x.iter().zip(y).map(|(u, v)| (u - v).powi(2)).sum::<f64>().sqrt())
        .fold(0.0, f64::max)
}

/// `rho(G, H)`: p-variation of the sup-over-space level-1 gap plus
/// p/2-variation of the level-2 gap, with `p` the larger declared exponent.
/// Matrix gaps are measured in the Frobenius norm.
pub fn driver_distance(g: &dyn RoughDriver, h: &dyn RoughDriver) -> Result<f64> {
    g.time_grid().ensure_matches(h.time_grid(), "driver distance")?;
    if g.space() != h.space() || g.order() != h.order() {
        return Err(Error::GridMismatch("drivers act on different spaces".into()));
    }
    let p = g.p().max(h.p());
    let len = g.block_len();
    let block = g.order() * g.order();
    let n = g.time_grid().len();
    let (mut gw, mut gww, mut hw, mut hww) =
        (vec![0.0; len], vec![0.0; len], vec![0.0; len], vec![0.0; len]);
    let mut gap1 = vec![0.0; n * n];
    let mut gap2 = vec![0.0; n * n];
    for s in 0..n {
        for t in s + 1..n {
            g.blocks_into(s, t, &mut gw, &mut gww);
            h.blocks_into(s, t, &mut hw, &mut hww);
            gap1[s * n + t] = sup_gap(&gw, &hw, block);
            gap2[s * n + t] = sup_gap(&gww, &hww, block);
        }
    }
    let v1 = p_variation_by(n, p, |j, i| gap1[j * n + i])?;
    let v2 = p_variation_by(n, p / 2.0, |j, i| gap2[j * n + i])?;
    Ok(v1 + v2)
}

/// Writes a driver as its lift (see [`crate::rp::io`]) followed by a record
/// `profiles,<channels>,<space dim>,<points per axis>` and one row of samples
/// per channel profile.
pub fn write_driver_csv<W: Write>(lift: &PathLift, space: &SpaceGrid, profiles: &[Vec<f64>], mut w: W) -> Result<()> {
    write_lift_csv(lift, &mut w)?;
    writeln!(w, "profiles,{},{},{}", profiles.len(), space.dim(), space.n())?;
    for g in profiles {
        let cells: Vec<String> = g.iter().map(|v| v.to_string()).collect();
        writeln!(w, "{}", cells.join(","))?;
    }
    Ok(())
}

/// Inverse of [`write_driver_csv`]: the lift, the space grid and the profiles.
pub fn read_driver_csv<R: BufRead>(mut r: R) -> Result<(PathLift, SpaceGrid, Vec<Vec<f64>>)> {
    let lift = read_lift_csv(&mut r)?;
    let bad = |m: &str| Error::Format(m.to_string());
    let mut line = String::new();
    r.read_line(&mut line)?;
    let head: Vec<&str> = line.trim().split(',').collect();
    if head.len() != 4 || head[0] != "profiles" {
        return Err(bad("missing profile record"));
    }
    let nums = head[1..]
        .iter()
        .map(|v| v.parse::<usize>().map_err(|_| bad("bad profile record")))
        .collect::<Result<Vec<_>>>()?;
    let space = SpaceGrid::new(nums[1], nums[2])?;
    let mut profiles = Vec::with_capacity(nums[0]);
    for _ in 0..nums[0] {
        line.clear();
        r.read_line(&mut line)?;
        let row = line
            .trim()
            .split(',')
            .map(|v| v.parse::<f64>().map_err(|_| bad("bad profile value")))
            .collect::<Result<Vec<_>>>()?;
        profiles.push(row);
    }
    check_profiles(&space, &profiles)?;
    Ok((lift, space, profiles))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rp::{brownian_lift, Path};
    use std::f64::consts::PI;

    fn setup(d: usize) -> (PathLift, SpaceGrid) {
        let grid = TimeGrid::uniform(1.0, 24).unwrap();
        (brownian_lift(4, &grid, 4, d).unwrap(), SpaceGrid::line(16).unwrap())
    }

    #[test]
    fn constant_profile_reproduces_lift() {
        let (lift, space) = setup(1);
        let drv = make_scalar_driver(&lift, space, vec![vec![1.0; 16]]).unwrap();
        let (w, ww) = drv.blocks(3, 19);
        assert!(w.iter().all(|v| *v == lift.x(3, 19)[0]));
        assert!(ww.iter().all(|v| *v == lift.xx(3, 19)[0]));
        assert!(drv.recorded_chen_defect() < 1e-12);
    }

    #[test]
    fn sine_profile_scales_level_two_by_square() {
        let (lift, space) = setup(1);
        let g = space.sample(|x| (2.0 * PI * x[0]).sin());
        let drv = make_scalar_driver(&lift, space, vec![g.clone()]).unwrap();
        let ww = drv.level2(0, 24);
        for (j, v) in ww.iter().enumerate() {
            assert!((v - g[j] * g[j] * lift.xx(0, 24)[0]).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_bad_profiles() {
        let (lift, space) = setup(1);
        let mut g = vec![1.0; 16];
        g[3] = f64::NAN;
        assert!(matches!(make_scalar_driver(&lift, space, vec![g]), Err(Error::NonFinite(_))));
        assert!(make_scalar_driver(&lift, space, vec![vec![1.0; 15]]).is_err());
        assert!(make_llg_driver(&lift, space, vec![vec![1.0; 16]; 3]).is_err());
    }

    #[test]
    fn spherical_level_one_is_antisymmetric() {
        let (lift, space) = setup(3);
        let profiles: Vec<Vec<f64>> = (0..3)
            .map(|a| space.sample(|x| 1.0 + 0.3 * (2.0 * PI * (x[0] + a as f64 / 3.0)).cos()))
            .collect();
        let drv = make_llg_driver(&lift, space, profiles).unwrap();
        let (w, _) = drv.blocks(2, 17);
        for node in w.chunks(9) {
            for a in 0..3 {
                for b in 0..3 {
                    assert_eq!(node[a * 3 + b], -node[b * 3 + a]);
                }
            }
        }
        assert!(drv.recorded_chen_defect() < 1e-10);
    }

    #[test]
    fn third_axis_driver_fixes_e3() {
        let (lift, space) = setup(3);
        let zero = vec![0.0; 16];
        let drv = make_llg_driver(&lift, space, vec![zero.clone(), zero, vec![1.0; 16]]).unwrap();
        let (w, ww) = drv.blocks(0, 24);
        let h3 = lift.x(0, 24)[2];
        let w0 = &w[..9];
        assert_eq!(w0, &[0.0, h3, 0.0, -h3, 0.0, 0.0, 0.0, 0.0, 0.0]);
        // W e3 = 0 and WW e3 = 0.
        assert_eq!([w0[2], w0[5], w0[8]], [0.0; 3]);
        assert_eq!([ww[2], ww[5], ww[8]], [0.0; 3]);
    }

    #[test]
    fn affine_step_matches_rotation_to_second_order() {
        // For a smooth lift over one short step, exp(W) - (I + W + WW) = O(h^3).
        let space = SpaceGrid::line(4).unwrap();
        let defect = |steps: usize| {
            let grid = TimeGrid::uniform(1.0, steps).unwrap();
            let path = Path::from_fn(&grid, 3, |t| vec![t.sin(), (2.0 * t).cos(), t * t]).unwrap();
            let lift = PathLift::piecewise_linear(grid, &path).unwrap();
            let drv = make_llg_driver(&lift, space, vec![vec![1.0; 4]; 3]).unwrap();
            let (w, ww) = drv.blocks(0, 1);
            let m = nalgebra::Matrix3::from_row_slice(&w[..9]);
            let exp = m.exp();
            let affine = nalgebra::Matrix3::identity() + m + nalgebra::Matrix3::from_row_slice(&ww[..9]);
            (exp - affine).abs().max()
        };
        let (coarse, fine) = (defect(16), defect(64));
        assert!(coarse / fine > 30.0, "{coarse} {fine}");
    }

    #[test]
    fn distance_to_self_and_zero() {
        let (lift, space) = setup(1);
        let drv = make_scalar_driver(&lift, space, vec![vec![0.5; 16]]).unwrap();
        assert_eq!(driver_distance(&drv, &drv).unwrap(), 0.0);
        let zero = drv.dilated(0.0).unwrap();
        let d = driver_distance(&drv, &zero).unwrap();
        let n = lift.grid().len();
        let v1 = p_variation_by(n, lift.p(), |j, i| 0.5 * lift.x(j, i)[0].abs()).unwrap();
        let v2 = p_variation_by(n, lift.p() / 2.0, |j, i| 0.25 * lift.xx(j, i)[0].abs()).unwrap();
        assert!((d - v1 - v2).abs() < 1e-12);
    }

    #[test]
    fn driver_csv_round_trip() {
        let (lift, space) = setup(1);
        let g = space.sample(|x| (2.0 * PI * x[0]).sin());
        let mut buf = Vec::new();
        write_driver_csv(&lift, &space, std::slice::from_ref(&g), &mut buf).unwrap();
        let (l2, s2, p2) = read_driver_csv(buf.as_slice()).unwrap();
        assert_eq!(s2, space);
        assert_eq!(p2, vec![g]);
        assert_eq!(l2.level1(), lift.level1());
    }
}
