//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rough_clt::clt::{
    clt_experiment, clt_experiment_with, continuity_probe, ito_vs_strat, perturbed_lift, product_gamma,
    solve_tangent, CltOptions, TangentConfig,
};
use rough_clt::drivers::{make_llg_driver, make_scalar_driver};
use rough_clt::mdp::{
    cm_energy, exp_equivalence_mc, solve_skeleton, CameronMartinPath, ExpEquivalenceConfig, LambdaSchedule,
};
use rough_clt::presets::ProblemPreset;
use rough_clt::rp::{
    brownian_lift, chen_defect, geometricity_defect, ito_lift, joint_lift_young, p_variation, sum_lifts,
    young_cross, Path, PathLift, TripleSelection, TwoIndexMap,
};
use rough_clt::spde::{Field, Problem, SolverConfig};
use rough_clt::{SpaceGrid, TimeGrid};
use rough_clt_oracles::{commuting_heat_exact, heat_semigroup, pvar_bruteforce, relative_l2, Calculus};

type Outcome = Result<(bool, String), String>;

fn check(ok: bool, detail: String) -> Outcome {
    Ok((ok, detail))
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

fn standard_solver() -> SolverConfig {
    SolverConfig::new(0.05, 1e-4)
}

fn line(n: usize) -> SpaceGrid {
    SpaceGrid::line(n).unwrap()
}

fn eps_range(from: i32, to: i32) -> Vec<f64> {
    (from..=to).map(|k| 2f64.powi(-k)).collect()
}

fn max_abs_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn algebra() -> Outcome {
    let grid = TimeGrid::uniform(1.0, 512).map_err(e)?;
    let mut worst = 0.0_f64;
    for seed in 0..5 {
        let lift = brownian_lift(seed, &grid, 32, 3).map_err(e)?;
        worst = worst.max(chen_defect(&lift, TripleSelection::Sampled { count: 200_000, seed }).map_err(e)?);
        worst = worst.max(geometricity_defect(&lift));
    }
    let w = brownian_lift(7, &grid, 32, 3).map_err(e)?;
    let h = Path::from_fn(&grid, 3, |t| vec![t.sin(), t * t, (3.0 * t).cos()]).map_err(e)?;
    let hl = PathLift::piecewise_linear(grid.clone(), &h).map_err(e)?;
    let wh = young_cross(w.level1(), w.p(), &h, 1.0).map_err(e)?;
    let hw = young_cross(&h, 1.0, w.level1(), w.p()).map_err(e)?;
    let s = sum_lifts(&w, &hl, &wh, &hw).map_err(e)?;
    let j = joint_lift_young(&w, &h, 1.0).map_err(e)?;
    let mut derived = 0.0_f64;
    for l in [&s, &j] {
        derived = derived.max(chen_defect(l, TripleSelection::default()).map_err(e)?);
        derived = derived.max(geometricity_defect(l));
    }
    check(
        worst <= 1e-10 && derived <= 1e-10 && s.is_geometric(),
        format!("brownian defect {worst:.2e}, sum/joint defect {derived:.2e}"),
    )
}

fn p_variation_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0_f64;
    for _ in 0..100 {
        let len = rng.random_range(2..=10);
        let d = rng.random_range(1..=3);
        let p = rng.random_range(1.0..4.0);
        let values: Vec<f64> = (0..len * d).map(|_| rng.random_range(-3.0..3.0)).collect();
        let path = Path::new(d, values).map_err(e)?;
        let rows: Vec<Vec<f64>> = (0..len).map(|i| path.point(i).to_vec()).collect();
        let dp = p_variation(&path, p).map_err(e)?;
        let bf = pvar_bruteforce(&rows, p)?;
        worst = worst.max((dp - bf).abs());
    }
    check(worst <= 1e-12, format!("max |dp - enumeration| {worst:.2e}"))
}

fn young_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let len = 40;
    let a = Path::new(2, (0..2 * len).map(|_| rng.random_range(-1.0..1.0)).collect()).map_err(e)?;
    let b = Path::new(3, (0..3 * len).map(|_| rng.random_range(-1.0..1.0)).collect()).map_err(e)?;
    let ab = young_cross(&a, 1.0, &b, 1.0).map_err(e)?;
    let ba = young_cross(&b, 1.0, &a, 1.0).map_err(e)?;
    let mut ibp = 0.0_f64;
    for s in 0..len {
        for t in s + 1..len {
            let (x, y) = (a.increment(s, t), b.increment(s, t));
            let (m, n) = (ab.block(s, t), ba.block(s, t));
            for i in 0..2 {
                for j in 0..3 {
                    ibp = ibp.max((m[i * 3 + j] + n[j * 2 + i] - x[i] * y[j]).abs());
                }
            }
        }
    }
    let n = 10_000;
    let grid = TimeGrid::uniform(1.0, n).map_err(e)?;
    let r = Path::from_fn(&grid, 1, |t| vec![t]).map_err(e)?;
    let r2 = Path::from_fn(&grid, 1, |t| vec![t * t]).map_err(e)?;
    let half = young_cross(&r, 1.0, &r, 1.0).map_err(e)?.block(0, n)[0];
    let two_thirds = young_cross(&r, 1.0, &r2, 1.0).map_err(e)?.block(0, n)[0];
    let analytic = (half - 0.5).abs().max((two_thirds - 2.0 / 3.0).abs());
    check(ibp <= 1e-12 && analytic <= 1e-6, format!("by parts {ibp:.2e}, analytic {analytic:.2e}"))
}

fn heat_solver() -> Outcome {
    let p = ProblemPreset::HeatConstant.build(line(128), 1.0, standard_solver());
    let u = p.solve_deterministic().map_err(e)?;
    let exact = line(128).sample(|x| (-4.0 * PI * PI * 0.05).exp() * (2.0 * PI * x[0]).sin());
    let err = relative_l2(u.last(), &exact);
    check(err <= 5e-3, format!("relative L2 error {err:.2e}"))
}

fn commuting_oracle() -> Outcome {
    let p = ProblemPreset::HeatConstant.build(line(128), 1.0, standard_solver());
    let grid = p.time_grid().map_err(e)?;
    let mut worst = [0.0_f64; 2];
    for seed in [11, 12, 13] {
        let w = brownian_lift(seed, &grid, 32, 1).map_err(e)?;
        let x = w.x(0, grid.steps())[0];
        let strat = p.solve(&w).map_err(e)?;
        let ito = p.solve(&ito_lift(&w).map_err(e)?).map_err(e)?;
        for (k, (u, mode)) in [(strat, Calculus::Stratonovich), (ito, Calculus::Ito)].into_iter().enumerate() {
            let exact = commuting_heat_exact(p.u0.values(), &p.profiles[0], x, 0.05, mode)?;
            worst[k] = worst[k].max(relative_l2(u.last(), &exact));
        }
    }
    check(
        worst[0] <= 1e-2 && worst[1] <= 1e-2,
        format!("stratonovich {:.2e}, ito {:.2e}", worst[0], worst[1]),
    )
}

fn clt_rate() -> Outcome {
    let heat = ProblemPreset::HeatConstant.build(line(128), 1.0, standard_solver());
    let grid = heat.time_grid().map_err(e)?;
    let mut cfg = TangentConfig::new(heat, brownian_lift(7, &grid, 32, 1).map_err(e)?);
    cfg.eps = eps_range(4, 12);
    let r = clt_experiment(&cfg).map_err(e)?;
    let heat_slope = r.fit.map(|f| f.slope).ok_or("no heat fit")?;
    let rd = ProblemPreset::ReactionDiffusionSine.build(line(128), 1.0, standard_solver());
    let mut cfg = TangentConfig::new(rd, brownian_lift(7, &grid, 32, 1).map_err(e)?);
    cfg.eps = eps_range(4, 12);
    let r2 = clt_experiment(&cfg).map_err(e)?;
    let rd_slope = r2.fit.map(|f| f.slope).ok_or("no reaction-diffusion fit")?;
    check(
        (0.9..=1.1).contains(&heat_slope) && r2.passed,
        format!("heat slope {heat_slope:.4}, reaction-diffusion slope {rd_slope:.4} (floor {:?})", r2.floor_from),
    )
}

fn llg() -> Outcome {
    let p = ProblemPreset::Llg.build(line(128), 1.0, standard_solver());
    let grid = p.time_grid().map_err(e)?;
    let mut cfg = TangentConfig::new(p.clone(), brownian_lift(7, &grid, 32, 3).map_err(e)?);
    cfg.eps = eps_range(4, 10);
    let r = clt_experiment_with(&cfg, &CltOptions { richardson: true, ..Default::default() }).map_err(e)?;
    let mut sphere = p.solve_deterministic().map_err(e)?.max_sphere_deviation();
    for eps in &cfg.eps {
        let u = p.solve(&perturbed_lift(&cfg, *eps).map_err(e)?).map_err(e)?;
        sphere = sphere.max(u.max_sphere_deviation());
    }
    let slope = r.richardson.as_ref().and_then(|x| x.fit).map(|f| f.slope).ok_or("no Richardson fit")?;
    check(
        sphere <= 1e-10 && r.strictly_decreasing() && slope >= 0.4,
        format!(
            "sphere {sphere:.2e}, strictly decreasing {}, Richardson slope {slope:.4}",
            r.strictly_decreasing()
        ),
    )
}

fn ito_agreement() -> Outcome {
    let p = ProblemPreset::HeatConstant.build(line(128), 1.0, standard_solver());
    let grid = p.time_grid().map_err(e)?;
    let w = brownian_lift(7, &grid, 32, 1).map_err(e)?;
    let r = ito_vs_strat(&p, &w, &eps_range(4, 12), false).map_err(e)?;
    let slope = r.fit.map(|f| f.slope).ok_or("no fit")?;
    check(r.passed, format!("slope {slope:.4}"))
}

fn tangent_structure() -> Outcome {
    let mut lin = 0.0_f64;
    let mut bitwise = true;
    for preset in [ProblemPreset::HeatSine, ProblemPreset::ReactionDiffusionSine, ProblemPreset::Llg] {
        let p = preset.build(line(64), 1.0, SolverConfig::new(0.02, 2e-4));
        let grid = p.time_grid().map_err(e)?;
        let d = preset.channels();
        let base = p.solve_deterministic().map_err(e)?;
        let tangent = |w: &PathLift| -> Result<Field, String> {
            solve_tangent(&base, &TangentConfig::new(p.clone(), w.clone())).map_err(e)
        };
        let w1 = brownian_lift(1, &grid, 4, d).map_err(e)?;
        let w2 = brownian_lift(2, &grid, 4, d).map_err(e)?;
        let (a, b) = (1.3, -0.4);
        let comb = w1.level1().combine(a, w2.level1(), b).map_err(e)?;
        let w = PathLift::piecewise_linear(grid.clone(), &comb).map_err(e)?;
        let x = tangent(&w)?;
        let y = tangent(&w1)?.combine(a, &tangent(&w2)?, b).map_err(e)?;
        lin = lin.max(max_abs_gap(x.values(), y.values()));
        let other = TwoIndexMap::dense_from_fn(d, d, grid.len(), |s, t| {
            (0..d * d).map(|i| ((s * 31 + t * 7 + i) as f64).sin()).collect()
        })
        .map_err(e)?;
        let v = w1.with_level2(other, false).map_err(e)?;
        bitwise &= tangent(&w1)?.values() == tangent(&v)?.values();
    }
    check(lin <= 1e-10 && bitwise, format!("linearity {lin:.2e}, level-2 invariance bitwise {bitwise}"))
}

fn continuity() -> Outcome {
    let p = ProblemPreset::ReactionDiffusionSine.build(line(64), 1.0, SolverConfig::new(0.05, 5e-4));
    let grid = p.time_grid().map_err(e)?;
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let (mut lo, mut hi) = (f64::INFINITY, 0.0_f64);
    let (mut fmin, mut fmax) = (f64::INFINITY, 0.0_f64);
    let mut drift = 0.0_f64;
    for i in 0..20 {
        let w = brownian_lift(100 + i, &grid, 8, 1).map_err(e)?;
        let (a, f): (f64, f64) = (rng.random_range(0.5..2.0), rng.random_range(5.0..40.0));
        let h = Path::from_fn(&grid, 1, |t| vec![a * (f * t).sin()]).map_err(e)?;
        let r = continuity_probe(&p, &w, &h, 0.1).map_err(e)?;
        let q = r.ratios();
        lo = lo.min(q[0].min(q[1]));
        hi = hi.max(q[0].max(q[1]));
        drift = drift.max((q[1] / q[0]).ln().abs());
        fmin = fmin.min(r.halving_factor());
        fmax = fmax.max(r.halving_factor());
    }
    let bounded = hi.is_finite() && drift <= 2f64.ln();
    check(
        bounded && fmin >= 0.4 && fmax <= 0.6,
        format!("gap/rho in [{lo:.3}, {hi:.3}], halving factor in [{fmin:.3}, {fmax:.3}]"),
    )
}

fn skeleton() -> Outcome {
    let p = ProblemPreset::HeatConstant.build(line(128), 1.0, standard_solver());
    let grid = p.time_grid().map_err(e)?;
    let base = p.solve_deterministic().map_err(e)?;
    let h = CameronMartinPath::from_fn(grid.clone(), 1, |_| vec![1.0]).map_err(e)?;
    let x = solve_skeleton(&h, &base, &p).map_err(e)?;
    let exact: Vec<f64> = heat_semigroup(p.u0.values(), 0.05).iter().map(|v| 0.05 * v).collect();
    let err = relative_l2(x.last(), &exact);
    let unit = TimeGrid::uniform(1.0, 10_000).map_err(e)?;
    let e1 = cm_energy(&CameronMartinPath::from_fn(unit.clone(), 1, |_| vec![1.0]).map_err(e)?);
    let e2 = cm_energy(&CameronMartinPath::from_fn(unit, 1, |t| vec![t]).map_err(e)?);
    let energies = (e1 - 0.5).abs() <= 1e-12 && (e2 - 1.0 / 6.0).abs() <= 1e-8;
    let eps = eps_range(4, 12);
    let accept = LambdaSchedule::Power(0.25).validate(&eps).map_err(e)?.is_valid();
    let reject = !LambdaSchedule::Power(0.5).validate(&eps).map_err(e)?.is_valid();
    check(
        err <= 1e-2 && energies && accept && reject,
        format!("skeleton error {err:.2e}, energies {e1:.12} {e2:.12}, accept 1/4 {accept}, reject 1/2 {reject}"),
    )
}

fn product_driver() -> Outcome {
    let grid = TimeGrid::uniform(1.0, 24).map_err(e)?;
    let space = line(8);
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut worst = 0.0_f64;
    for _ in 0..5 {
        let mut smooth = |d: usize| -> Result<(PathLift, Vec<Vec<f64>>), String> {
            let c: Vec<(f64, f64, f64)> = (0..d)
                .map(|_| (rng.random_range(-2.0..2.0), rng.random_range(1.0..8.0), rng.random_range(0.0..6.0)))
                .collect();
            let path = Path::from_fn(&grid, d, |t| c.iter().map(|(a, w, _)| a * (w * t).sin()).collect()).map_err(e)?;
            let profiles = c.iter().map(|(_, _, ph)| space.sample(|x| (2.0 * PI * x[0] + ph).cos())).collect();
            Ok((PathLift::piecewise_linear(grid.clone(), &path).map_err(e)?, profiles))
        };
        let (la, ga) = smooth(3)?;
        let (lb, gb) = smooth(3)?;
        let a = make_llg_driver(&la, space, ga).map_err(e)?;
        let b = make_llg_driver(&lb, space, gb).map_err(e)?;
        worst = worst.max(product_gamma(&a, &b, TripleSelection::Exhaustive).map_err(e)?.1);
        let (lc, gc) = smooth(2)?;
        let c = make_scalar_driver(&lc, space, gc).map_err(e)?;
        worst = worst.max(product_gamma(&a, &c, TripleSelection::Exhaustive).map_err(e)?.1);
    }
    check(worst <= 1e-10, format!("max Chen defect {worst:.2e}"))
}

fn exp_equivalence() -> Outcome {
    let problem: Problem = ProblemPreset::HeatConstant.build(line(64), 2.0, SolverConfig::new(0.05, 5e-4));
    let cfg = ExpEquivalenceConfig {
        problem,
        eps: eps_range(0, 4),
        schedule: LambdaSchedule::Power(0.25),
        delta: 0.1,
        samples: 500,
        seed: 11,
        refinement: 8,
        parallel: false,
    };
    let r = exp_equivalence_mc(&cfg).map_err(e)?;
    let stats: Vec<String> = r.cells.iter().map(|c| format!("{:.3}", c.statistic)).collect();
    check(r.non_increasing, format!("statistics [{}]", stats.join(", ")))
}

struct Criterion {
    name: &'static str,
    budget: Duration,
    run: fn() -> Outcome,
}

fn main() -> ExitCode {
    let secs = Duration::from_secs;
    let criteria = [
        Criterion { name: "rough path algebra", budget: secs(5), run: algebra },
        Criterion { name: "p-variation oracle", budget: secs(5), run: p_variation_oracle },
        Criterion { name: "crossed integrals", budget: secs(5), run: young_identities },
        Criterion { name: "deterministic heat", budget: secs(10), run: heat_solver },
        Criterion { name: "commuting noise", budget: secs(20), run: commuting_oracle },
        Criterion { name: "CLT rate", budget: secs(120), run: clt_rate },
        Criterion { name: "LLG", budget: secs(180), run: llg },
        Criterion { name: "Ito vs Stratonovich", budget: secs(60), run: ito_agreement },
        Criterion { name: "tangent structure", budget: secs(10), run: tangent_structure },
        Criterion { name: "solution map continuity", budget: secs(60), run: continuity },
        Criterion { name: "skeleton and rate", budget: secs(10), run: skeleton },
        Criterion { name: "product driver", budget: secs(5), run: product_driver },
        Criterion { name: "exponential equivalence", budget: secs(120), run: exp_equivalence },
    ];
    let mut failed = 0;
    for (i, c) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let in_time = elapsed <= c.budget;
        let (ok, detail) = match outcome {
            Ok((ok, detail)) => (ok && in_time, detail),
            Err(msg) => (false, format!("error: {msg}")),
        };
        failed += usize::from(!ok);
        println!(
            "{} {:>2} {}: {} [{:.2}s of {}s]",
            if ok { "PASS" } else { "FAIL" },
            i + 1,
            c.name,
            detail,
            elapsed.as_secs_f64(),
            c.budget.as_secs()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
