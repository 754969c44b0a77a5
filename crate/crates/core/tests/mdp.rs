use rough_clt::clt::{solve_tangent, TangentConfig};
use rough_clt::mdp::{
    cm_energy, exp_equivalence_mc, lift_cm, rate_point, solve_skeleton, CameronMartinPath, ExpEquivalenceConfig,
    LambdaSchedule,
};
use rough_clt::presets::ProblemPreset;
use rough_clt::spde::{Problem, SolverConfig};
use rough_clt::SpaceGrid;
use rough_clt_oracles::{heat_semigroup, relative_l2};

fn heat(n: usize, horizon: f64, dt: f64) -> Problem {
    ProblemPreset::HeatConstant.build(SpaceGrid::line(n).unwrap(), 1.0, SolverConfig::new(horizon, dt))
}

#[test]
fn skeleton_matches_commuting_closed_form() {
    let p = heat(128, 0.05, 1e-4);
    let grid = p.time_grid().unwrap();
    let base = p.solve_deterministic().unwrap();
    let h = CameronMartinPath::from_fn(grid.clone(), 1, |_| vec![1.0]).unwrap();
    let x = solve_skeleton(&h, &base, &p).unwrap();
    for k in [100, 500] {
        let t = grid.points()[k];
        let exact: Vec<f64> = heat_semigroup(p.u0.values(), t).iter().map(|v| t * v).collect();
        assert!(relative_l2(x.snapshot(k), &exact) <= 1e-2);
    }
}

#[test]
fn skeleton_is_zero_for_zero_direction_and_linear() {
    let p = heat(32, 0.02, 2e-4);
    let grid = p.time_grid().unwrap();
    let base = p.solve_deterministic().unwrap();
    let (x0, e0) = rate_point(&CameronMartinPath::zero(grid.clone(), 1), &base, &p).unwrap();
    assert!(x0.values().iter().all(|v| *v == 0.0));
    assert_eq!(e0, 0.0);
    let h = CameronMartinPath::from_fn(grid, 1, |t| vec![(40.0 * t).cos()]).unwrap();
    let x1 = solve_skeleton(&h, &base, &p).unwrap();
    let x2 = solve_skeleton(&h.scaled(2.0), &base, &p).unwrap();
    for (a, b) in x1.values().iter().zip(x2.values()) {
        assert!((2.0 * a - b).abs() <= 1e-10);
    }
}

#[test]
fn skeleton_uses_the_tangent_code_path() {
    let p = ProblemPreset::Llg.build(SpaceGrid::line(16).unwrap(), 1.0, SolverConfig::new(0.01, 1e-3));
    let grid = p.time_grid().unwrap();
    let base = p.solve_deterministic().unwrap();
    let h = CameronMartinPath::from_fn(grid, 3, |t| vec![t, 1.0 - t, (5.0 * t).sin()]).unwrap();
    let a = solve_skeleton(&h, &base, &p).unwrap();
    let b = solve_tangent(&base, &TangentConfig::new(p.clone(), lift_cm(&h).unwrap())).unwrap();
    assert_eq!(a.values(), b.values());
}

#[test]
fn equal_energy_directions_reach_different_states() {
    let p = heat(32, 0.02, 2e-4);
    let grid = p.time_grid().unwrap();
    let base = p.solve_deterministic().unwrap();
    let flat = CameronMartinPath::from_fn(grid.clone(), 1, |_| vec![1.0]).unwrap();
    let flip = CameronMartinPath::from_fn(grid, 1, |t| vec![if t < 0.01 { 1.0 } else { -1.0 }]).unwrap();
    let (xa, ea) = rate_point(&flat, &base, &p).unwrap();
    let (xb, eb) = rate_point(&flip, &base, &p).unwrap();
    assert_eq!(ea, eb);
    assert!(relative_l2(xa.last(), xb.last()) > 0.5);
}

#[test]
fn energy_of_scaled_path_is_quadratic() {
    let p = heat(16, 0.02, 2e-4);
    let h = CameronMartinPath::from_fn(p.time_grid().unwrap(), 1, |t| vec![t.exp()]).unwrap();
    assert!((cm_energy(&h.scaled(-0.5)) - 0.25 * cm_energy(&h)).abs() <= 1e-15);
}

fn mc(delta: f64, schedule: LambdaSchedule, samples: usize, parallel: bool) -> ExpEquivalenceConfig {
    ExpEquivalenceConfig {
        problem: heat(16, 0.01, 1e-3),
        eps: vec![0.5, 0.25, 0.125],
        schedule,
        delta,
        samples,
        seed: 1,
        refinement: 2,
        parallel,
    }
}

#[test]
fn exp_equivalence_trivial_thresholds() {
    let r = exp_equivalence_mc(&mc(0.0, LambdaSchedule::Power(0.25), 100, false)).unwrap();
    assert!(r.cells.iter().all(|c| c.probability == 1.0 && c.statistic == 0.0));
    let r = exp_equivalence_mc(&mc(1e9, LambdaSchedule::Power(0.25), 100, false)).unwrap();
    for c in &r.cells {
        assert!(c.below_resolution);
        assert_eq!(c.statistic, -(100f64).ln() / (c.lambda * c.lambda));
    }
}

#[test]
fn exp_equivalence_refuses_bad_input() {
    assert!(exp_equivalence_mc(&mc(0.1, LambdaSchedule::Power(0.5), 100, false)).is_err());
    assert!(exp_equivalence_mc(&mc(0.1, LambdaSchedule::Power(0.25), 99, false)).is_err());
    assert!(exp_equivalence_mc(&mc(-1.0, LambdaSchedule::Power(0.25), 100, false)).is_err());
}

#[test]
fn exp_equivalence_is_deterministic_across_threads() {
    let a = exp_equivalence_mc(&mc(0.01, LambdaSchedule::Power(0.25), 100, false)).unwrap();
    let b = exp_equivalence_mc(&mc(0.01, LambdaSchedule::Power(0.25), 100, true)).unwrap();
    let mut ca = Vec::new();
    let mut cb = Vec::new();
    a.write_csv(&mut ca).unwrap();
    b.write_csv(&mut cb).unwrap();
    assert_eq!(ca, cb);
}
