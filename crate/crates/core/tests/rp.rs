use proptest::prelude::*;

use rough_clt::rp::{
    brownian_lift, chen_defect, dilate, geometricity_defect, increment, joint_lift_young, p_variation, sum_lifts,
    young_cross, Control, Path, PathLift, TripleSelection,
};
use rough_clt::TimeGrid;
use rough_clt_oracles::{pvar_bruteforce, trapezoid_cross};

const ALL: TripleSelection = TripleSelection::Exhaustive;

fn path_rows(p: &Path) -> Vec<Vec<f64>> {
    (0..p.len()).map(|i| p.point(i).to_vec()).collect()
}

#[test]
fn brownian_lifts_are_geometric_rough_paths() {
    let grid = TimeGrid::uniform(1.0, 64).unwrap();
    for seed in 0..3 {
        let lift = brownian_lift(seed, &grid, 8, 3).unwrap();
        assert!(chen_defect(&lift, ALL).unwrap() <= 1e-10);
        assert!(geometricity_defect(&lift) <= 1e-10);
        assert!(lift.is_geometric());
    }
}

#[test]
fn brownian_refinements_share_coarse_increments() {
    let grid = TimeGrid::uniform(1.0, 16).unwrap();
    let a = brownian_lift(5, &grid, 4, 2).unwrap();
    let b = brownian_lift(5, &grid, 16, 2).unwrap();
    assert_eq!(a.level1().values(), b.level1().values());
    let c = brownian_lift(6, &grid, 4, 2).unwrap();
    assert_ne!(a.level1().values(), c.level1().values());
}

#[test]
fn brownian_quadratic_variation_is_close_to_time() {
    let grid = TimeGrid::uniform(1.0, 4096).unwrap();
    let lift = brownian_lift(11, &grid, 1, 1).unwrap();
    let qv: f64 = (0..4096).map(|k| lift.x(k, k + 1)[0].powi(2)).sum();
    assert!((qv - 1.0).abs() < 0.1, "quadratic variation {qv}");
}

#[test]
fn sum_of_brownian_and_smooth_lift_is_geometric() {
    let grid = TimeGrid::uniform(1.0, 40).unwrap();
    let w = brownian_lift(1, &grid, 4, 2).unwrap();
    let h = Path::from_fn(&grid, 2, |t| vec![t.sin(), t * t]).unwrap();
    let hl = PathLift::piecewise_linear(grid.clone(), &h).unwrap();
    let wh = young_cross(w.level1(), 2.5, &h, 1.0).unwrap();
    let hw = young_cross(&h, 1.0, w.level1(), 2.5).unwrap();
    let s = sum_lifts(&w, &hl, &wh, &hw).unwrap();
    assert!(s.is_geometric());
    assert!(chen_defect(&s, ALL).unwrap() <= 1e-10);
    assert!(geometricity_defect(&s) <= 1e-10);
}

#[test]
fn joint_lift_blocks() {
    let grid = TimeGrid::uniform(1.0, 30).unwrap();
    let v = brownian_lift(2, &grid, 4, 1).unwrap();
    let h = Path::from_fn(&grid, 1, |t| vec![(3.0 * t).cos()]).unwrap();
    let j = joint_lift_young(&v, &h, 1.0).unwrap();
    assert_eq!(j.dim(), 2);
    assert!(chen_defect(&j, ALL).unwrap() <= 1e-10);
    assert!(geometricity_defect(&j) <= 1e-10);
    for (s, t) in [(0, 30), (4, 17)] {
        assert_eq!(j.x(s, t)[0], v.x(s, t)[0]);
        assert!((j.xx(s, t)[0] - v.xx(s, t)[0]).abs() <= 1e-14);
    }
    assert!(joint_lift_young(&v, &h, 2.5).is_err());
}

#[test]
fn crossed_integrals_match_analytic_values() {
    let n = 10_000;
    let grid = TimeGrid::uniform(1.0, n).unwrap();
    let t = Path::from_fn(&grid, 1, |r| vec![r]).unwrap();
    let t2 = Path::from_fn(&grid, 1, |r| vec![r * r]).unwrap();
    let a = young_cross(&t, 1.0, &t, 1.0).unwrap().block(0, n)[0];
    let b = young_cross(&t, 1.0, &t2, 1.0).unwrap().block(0, n)[0];
    assert!((a - 0.5).abs() <= 1e-6);
    assert!((b - 2.0 / 3.0).abs() <= 1e-6);
}

#[test]
fn crossed_integral_agrees_with_independent_quadrature() {
    let n = 50;
    let grid = TimeGrid::uniform(1.0, n).unwrap();
    let f = |r: f64| (4.0 * r).sin();
    let g = |r: f64| (r - 0.3).powi(3);
    let a = Path::from_fn(&grid, 1, |r| vec![f(r)]).unwrap();
    let b = Path::from_fn(&grid, 1, |r| vec![g(r)]).unwrap();
    let m = young_cross(&a, 1.0, &b, 1.0).unwrap();
    for (s, t) in [(0, 50), (10, 30), (7, 8)] {
        let oracle = trapezoid_cross(f, g, s as f64 / 50.0, t as f64 / 50.0, t - s);
        assert!((m.block(s, t)[0] - oracle).abs() <= 1e-12);
    }
}

#[test]
fn increment_matches_difference_of_sum() {
    let grid = TimeGrid::uniform(1.0, 20).unwrap();
    let x = brownian_lift(3, &grid, 2, 2).unwrap();
    let yp = Path::from_fn(&grid, 2, |t| vec![t, (2.0 * t).sin()]).unwrap();
    let y = PathLift::piecewise_linear(grid.clone(), &yp).unwrap();
    let xy = young_cross(x.level1(), 2.5, &yp, 1.0).unwrap();
    let yx = young_cross(&yp, 1.0, x.level1(), 2.5).unwrap();
    let eps = 0.3;
    let inc = increment(&x, &y, &xy, &yx, eps).unwrap();
    let s = sum_lifts(&x, &dilate(&y, eps), &xy.scaled(eps), &yx.scaled(eps)).unwrap();
    for (a, b) in [(0, 20), (3, 11)] {
        let l2: Vec<f64> = s.xx(a, b).iter().zip(x.xx(a, b)).map(|(u, v)| u - v).collect();
        for (u, v) in l2.iter().zip(inc.level2_block(a, b)) {
            assert!((u - v).abs() <= 1e-12);
        }
        for (u, v) in inc.level1_block(a, b).iter().zip(y.x(a, b)) {
            assert!((u - eps * v).abs() <= 1e-15);
        }
    }
}

#[test]
fn dilation_scales_levels_homogeneously() {
    let grid = TimeGrid::uniform(1.0, 12).unwrap();
    let x = brownian_lift(4, &grid, 2, 2).unwrap();
    let d = dilate(&x, 0.5);
    assert_eq!(d.x(2, 9), x.x(2, 9).iter().map(|v| 0.5 * v).collect::<Vec<_>>());
    assert_eq!(d.xx(2, 9), x.xx(2, 9).iter().map(|v| 0.25 * v).collect::<Vec<_>>());
    assert!(chen_defect(&d, ALL).unwrap() <= 1e-12);
}

#[test]
fn control_of_brownian_path_is_superadditive() {
    let grid = TimeGrid::uniform(1.0, 60).unwrap();
    let x = brownian_lift(8, &grid, 1, 1).unwrap();
    let w = Control::from_p_variation(x.level1(), 2.5).unwrap();
    assert!(w.superadditivity_violation() <= 1e-12);
    assert_eq!(w.eval(5, 5), 0.0);
}

fn small_path() -> impl Strategy<Value = Vec<Vec<f64>>> {
    (2usize..=10, 1usize..=3).prop_flat_map(|(len, d)| {
        prop::collection::vec(prop::collection::vec(-5.0f64..5.0, d), len)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn p_variation_equals_bruteforce(rows in small_path(), p in 1.0f64..4.0) {
        let d = rows[0].len();
        let path = Path::new(d, rows.concat()).unwrap();
        let dp = p_variation(&path, p).unwrap();
        let bf = pvar_bruteforce(&path_rows(&path), p).unwrap();
        prop_assert!((dp - bf).abs() <= 1e-12 * (1.0 + bf), "dp {} vs {}", dp, bf);
    }

    #[test]
    fn p_variation_dominates_endpoint_increment(rows in small_path(), p in 1.0f64..4.0) {
        let d = rows[0].len();
        let path = Path::new(d, rows.concat()).unwrap();
        let inc = path.increment(0, path.len() - 1);
        let norm = inc.iter().map(|v| v * v).sum::<f64>().sqrt();
        prop_assert!(p_variation(&path, p).unwrap() >= norm - 1e-12);
    }

    #[test]
    fn integration_by_parts_at_grid_level(
        a in prop::collection::vec(-3.0f64..3.0, 12),
        b in prop::collection::vec(-3.0f64..3.0, 12),
    ) {
        let pa = Path::new(2, a).unwrap();
        let pb = Path::new(2, b).unwrap();
        let ab = young_cross(&pa, 1.0, &pb, 1.0).unwrap();
        let ba = young_cross(&pb, 1.0, &pa, 1.0).unwrap();
        for s in 0..6 {
            for t in s + 1..6 {
                let (x, y) = (pa.increment(s, t), pb.increment(s, t));
                let (m, n) = (ab.block(s, t), ba.block(s, t));
                for i in 0..2 {
                    for j in 0..2 {
                        let lhs = m[i * 2 + j] + n[j * 2 + i];
                        prop_assert!((lhs - x[i] * y[j]).abs() <= 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn sum_lifts_keeps_chen(seed in 0u64..1000, scale in -2.0f64..2.0) {
        let grid = TimeGrid::uniform(1.0, 10).unwrap();
        let x = brownian_lift(seed, &grid, 2, 2).unwrap();
        let yp = Path::from_fn(&grid, 2, |t| vec![scale * t, (scale * t).cos()]).unwrap();
        let y = PathLift::piecewise_linear(grid.clone(), &yp).unwrap();
        let xy = young_cross(x.level1(), 2.5, &yp, 1.0).unwrap();
        let yx = young_cross(&yp, 1.0, x.level1(), 2.5).unwrap();
        let s = sum_lifts(&x, &y, &xy, &yx).unwrap();
        prop_assert!(chen_defect(&s, ALL).unwrap() <= 1e-10);
        prop_assert!(geometricity_defect(&s) <= 1e-10);
    }
}
