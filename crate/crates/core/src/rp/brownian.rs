use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::lift::{PathLift, DEFAULT_P};
use super::path::Path;
use crate::error::{domain, Result};
use crate::grid::TimeGrid;

/// Stratonovich-type lift of a `d`-dimensional Brownian motion on `grid`.
///
/// Coarse increments come from ChaCha stream 0 of `seed`. Each coarse interval
/// `k` is refined by `log2(refinement)` rounds of Brownian-bridge midpoint
/// sampling drawn from stream `k + 1`, level by level, so a lift at refinement
/// `2R` refines the one at `R` with the same randomness. The second level is the
/// exact iterated integral of the piecewise-linear interpolant through the
/// fine points, coarse-grained by Chen's relation.
pub fn brownian_lift(seed: u64, grid: &TimeGrid, refinement: usize, d: usize) -> Result<PathLift> {
    if refinement == 0 || !refinement.is_power_of_two() {
        return domain(format!("refinement must be a power of two, got {refinement}"));
    }
    if d == 0 {
        return domain("a Brownian lift needs at least one channel");
    }
    let n = grid.steps();
    let mut coarse = ChaCha8Rng::seed_from_u64(seed);
    let mut level1 = vec![0.0; d * (n + 1)];
    let mut level2 = vec![0.0; d * d * (n + 1)];
    let mut fine = vec![0.0; d * (refinement + 1)];
    let mut inc = vec![0.0; d * d];
    for k in 0..n {
        let dt = grid.dt(k);
        for c in 0..d {
            let z: f64 = coarse.sample(StandardNormal);
            fine[refinement * d + c] = dt.sqrt() * z;
            fine[c] = 0.0;
        }
        let mut bridge = ChaCha8Rng::seed_from_u64(seed);
        bridge.set_stream(k as u64 + 1);
        let mut step = refinement;
        while step > 1 {
            let half = step / 2;
            let h = dt * step as f64 / refinement as f64;
            let sd = (0.25 * h).sqrt();
            for left in (0..refinement).step_by(step) {
                let (mid, right) = (left + half, left + step);
                for c in 0..d {
                    let z: f64 = bridge.sample(StandardNormal);
                    fine[mid * d + c] = 0.5 * (fine[left * d + c] + fine[right * d + c]) + sd * z;
                }
            }
            step = half;
        }
        inc.iter_mut().for_each(|v| *v = 0.0);
        for j in 0..refinement {
            for a in 0..d {
                let pa = fine[j * d + a];
                let da = fine[(j + 1) * d + a] - pa;
                for b in 0..d {
                    let db = fine[(j + 1) * d + b] - fine[j * d + b];
                    inc[a * d + b] += (pa + 0.5 * da) * db;
                }
            }
        }
        let (head, tail) = level1.split_at_mut((k + 1) * d);
        let x0k = &head[k * d..];
        let next = &mut tail[..d];
        for c in 0..d {
            next[c] = x0k[c] + fine[refinement * d + c];
        }
        for a in 0..d {
            for b in 0..d {
                level2[(k + 1) * d * d + a * d + b] = level2[k * d * d + a * d + b]
                    + inc[a * d + b]
                    + x0k[a] * fine[refinement * d + b];
            }
        }
    }
    let level1 = Path::new(d, level1)?;
    Ok(PathLift::from_anchored(grid.clone(), &level1, level2, DEFAULT_P, true)?
        .with_provenance(Some(seed), refinement))
}

/// Ito counterpart `XX - (t - s) Id / 2` of a lift; not geometric.
pub fn ito_lift(lift: &PathLift) -> Result<PathLift> {
    let d = lift.dim();
    let mut at_zero = lift.level2().values_at_zero();
    for (i, t) in lift.grid().points().iter().enumerate() {
        for c in 0..d {
            at_zero[i * d * d + c * d + c] -= 0.5 * t;
        }
    }
    Ok(PathLift::from_anchored(lift.grid().clone(), lift.level1(), at_zero, lift.p(), false)?
        .with_provenance(lift.seed(), lift.refinement()))
}

/// Lift of the path that interpolates `lift`'s level 1 linearly between
/// `pieces + 1` equally spaced grid indices (a Wong–Zakai approximation).
pub fn piecewise_linear_approximation(lift: &PathLift, pieces: usize) -> Result<PathLift> {
    let n = lift.grid().steps();
    if pieces == 0 || !n.is_multiple_of(pieces) {
        return domain(format!("{n} grid steps do not split into {pieces} pieces"));
    }
    let m = n / pieces;
    let times = lift.grid().points();
    let x = lift.level1();
    let d = x.dim();
    let mut values = Vec::with_capacity(d * (n + 1));
    for i in 0..=n {
        let k = (i / m).min(pieces - 1);
        let (a, b) = (k * m, (k + 1) * m);
        let w = (times[i] - times[a]) / (times[b] - times[a]);
        for c in 0..d {
            values.push((1.0 - w) * x.component(a, c) + w * x.component(b, c));
        }
    }
    PathLift::piecewise_linear(lift.grid().clone(), &Path::new(d, values)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rp::{chen_defect, geometricity_defect, TripleSelection};

    #[test]
    fn rejects_non_dyadic_refinement() {
        let g = TimeGrid::uniform(1.0, 4).unwrap();
        assert!(brownian_lift(1, &g, 3, 1).is_err());
        assert!(brownian_lift(1, &g, 0, 1).is_err());
    }

    #[test]
    fn one_dimensional_lift_is_half_square() {
        let g = TimeGrid::uniform(1.0, 64).unwrap();
        let l = brownian_lift(7, &g, 8, 1).unwrap();
        for (s, t) in [(0, 64), (5, 40), (63, 64)] {
            let x = l.x(s, t)[0];
            assert!((l.xx(s, t)[0] - 0.5 * x * x).abs() < 1e-12);
        }
    }

    #[test]
    fn level_one_shared_across_refinements() {
        let g = TimeGrid::uniform(1.0, 32).unwrap();
        let a = brownian_lift(3, &g, 1, 2).unwrap();
        let b = brownian_lift(3, &g, 64, 2).unwrap();
        assert_eq!(a.level1(), b.level1());
        assert_eq!(b.seed(), Some(3));
        assert_eq!(b.refinement(), 64);
    }

    #[test]
    fn ito_lift_geometricity_gap() {
        let g = TimeGrid::uniform(1.0, 16).unwrap();
        let l = brownian_lift(11, &g, 4, 2).unwrap();
        let ito = ito_lift(&l).unwrap();
        assert!(!ito.is_geometric());
        assert!((geometricity_defect(&ito) - 0.5).abs() < 1e-12);
        assert!(chen_defect(&ito, TripleSelection::Exhaustive).unwrap() < 1e-12);
    }

    #[test]
    fn coarsening_with_one_piece_per_step_keeps_level_one() {
        let g = TimeGrid::uniform(1.0, 16).unwrap();
        let l = brownian_lift(5, &g, 4, 2).unwrap();
        let pl = piecewise_linear_approximation(&l, 16).unwrap();
        assert_eq!(pl.level1(), l.level1());
        assert!(piecewise_linear_approximation(&l, 5).is_err());
    }
}
