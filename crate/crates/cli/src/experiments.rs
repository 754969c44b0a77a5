//! One function per subcommand. Each writes its artifacts and returns the
//! per-cell outputs with the identifiers of failed checks.

use std::io::Write;

use serde::Serialize;
use serde_json::{json, Value};

use rough_clt::clt::{clt_experiment_with, ito_vs_strat, CltOptions, TangentConfig};
use rough_clt::mdp::{exp_equivalence_mc, rate_point, CameronMartinPath, ExpEquivalenceConfig, LambdaSchedule};
use rough_clt::rp::{
    brownian_lift, chen_defect, geometricity_defect, io::write_lift_csv, p_variation,
    piecewise_linear_approximation, TripleSelection,
};
use rough_clt::spde::{energy_report, l2_profile, linf_l2_gap, sobolev_profile, Equation, Problem, SolverConfig};
use rough_clt::{Error, SpaceGrid};

use crate::artifacts::{ArtifactDir, Plot};
use crate::config::{Experiment, ExperimentConfig};

pub struct Outcome {
    pub cells: Value,
    pub failures: Vec<String>,
}

#[derive(Debug)]
pub enum RunError {
    Numeric(String),
    Io(std::io::Error),
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        Self::Io(e)
    }
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        Self::Numeric(e.to_string())
    }
}

type Run = Result<Outcome, RunError>;

const DEFECT_TOLERANCE: f64 = 1e-10;
const SPHERE_TOLERANCE: f64 = 1e-10;

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}

fn problem(cfg: &ExperimentConfig) -> Problem {
    cfg.preset.build(cfg.space(), cfg.amplitude, cfg.solver())
}

fn lift(cfg: &ExperimentConfig) -> Result<rough_clt::rp::PathLift, Error> {
    brownian_lift(cfg.lift.seed, &cfg.time_grid(), cfg.lift.refinement, cfg.preset.channels())
}

pub fn run(exp: Experiment, cfg: &ExperimentConfig, dir: &ArtifactDir, parallel: bool) -> Run {
    match exp {
        Experiment::LiftCheck => lift_check(cfg, dir),
        Experiment::Solve => solve(cfg, dir),
        Experiment::Clt => clt(cfg, dir, parallel),
        Experiment::ItoVsStrat => ito(cfg, dir, parallel),
        Experiment::WongZakai => wong_zakai(cfg, dir),
        Experiment::Mdp => mdp(cfg, dir, parallel),
        Experiment::Suite => suite(cfg, dir, parallel),
    }
}

/// `lift.csv` (the lift) and `checks.csv` with columns `check,value,threshold,passed`.
fn lift_check(cfg: &ExperimentConfig, dir: &ArtifactDir) -> Run {
    let l = lift(cfg)?;
    let chen = chen_defect(&l, TripleSelection::default())?;
    let geo = geometricity_defect(&l);
    let pvar = p_variation(l.level1(), l.p())?;
    dir.csv("lift.csv", |w| write_lift_csv(&l, w).map_err(std::io::Error::other))?;
    let rows = [
        ("chen_defect", chen, Some(DEFECT_TOLERANCE)),
        ("geometricity_defect", geo, Some(DEFECT_TOLERANCE)),
        ("p_variation", pvar, None),
    ];
    dir.csv("checks.csv", |w| {
        writeln!(w, "check,value,threshold,passed")?;
        for (name, v, t) in rows {
            let t_text = t.map_or(String::new(), |t| t.to_string());
            writeln!(w, "{name},{v},{t_text},{}", t.is_none_or(|t| v <= t))?;
        }
        Ok(())
    })?;
    let failures = rows
        .iter()
        .filter(|(_, v, t)| t.is_some_and(|t| *v > t))
        .map(|(name, v, _)| format!("{name} = {v:e}"))
        .collect();
    Ok(Outcome { cells: json!({ "chen_defect": chen, "geometricity_defect": geo, "p_variation": pvar }), failures })
}

/// `field.csv` (every snapshot), `profile.csv` with columns `t,l2_sq,h1_sq,h2_sq`,
/// `energy.json` and `profile.svg`.
fn solve(cfg: &ExperimentConfig, dir: &ArtifactDir) -> Run {
    let p = problem(cfg);
    let driver = p.driver(&lift(cfg)?)?;
    let u = p.solve_with(&driver)?;
    let report = energy_report(&u, Some(driver.as_dyn()))?;
    let profile = sobolev_profile(&u);
    let times = u.times().points().to_vec();
    dir.csv("field.csv", |w| u.write_csv(w).map_err(std::io::Error::other))?;
    dir.csv("profile.csv", |w| {
        writeln!(w, "t,l2_sq,h1_sq,h2_sq")?;
        for (t, s) in times.iter().zip(&profile) {
            writeln!(w, "{t},{},{},{}", s[0], s[1], s[2])?;
        }
        Ok(())
    })?;
    dir.json("energy.json", &report)?;
    let l2: Vec<(f64, f64)> = times.iter().copied().zip(l2_profile(&u)).collect();
    dir.svg(
        "profile.svg",
        &Plot {
            title: "L2 norm along the run".into(),
            x_label: "t".into(),
            y_label: "L2 norm".into(),
            log: false,
            series: vec![("u".into(), l2)],
        },
    )?;
    let mut failures = Vec::new();
    if !report.passed {
        failures.push(format!("energy constant {} above reference bound {}", report.constant, report.reference_bound));
    }
    let sphere = u.max_sphere_deviation();
    if p.equation == Equation::Llg && sphere > SPHERE_TOLERANCE {
        failures.push(format!("sphere deviation {sphere:e}"));
    }
    Ok(Outcome { cells: json!({ "energy": report, "sphere_deviation": sphere }), failures })
}

/// `clt.csv` with columns `eps,error,included`, `richardson.csv` with
/// `eps,error` when enabled, and `clt.svg`.
fn clt(cfg: &ExperimentConfig, dir: &ArtifactDir, parallel: bool) -> Run {
    let mut tc = TangentConfig::new(problem(cfg), lift(cfg)?);
    tc.eps = cfg.clt.eps.clone();
    let opts = CltOptions { parallel, richardson: cfg.clt.richardson, band_lower: cfg.clt.band_lower };
    let r = clt_experiment_with(&tc, &opts)?;
    dir.csv("clt.csv", |w| r.write_csv(w))?;
    let mut series =
        vec![("e(eps)".to_string(), r.cells.iter().filter_map(|c| c.error.map(|e| (c.eps, e))).collect::<Vec<_>>())];
    if let Some(rich) = &r.richardson {
        dir.csv("richardson.csv", |w| {
            writeln!(w, "eps,error")?;
            for (e, v) in rich.eps.iter().zip(&rich.errors) {
                writeln!(w, "{e},{v}")?;
            }
            Ok(())
        })?;
        series.push(("extrapolated".into(), rich.eps.iter().copied().zip(rich.errors.iter().copied()).collect()));
    }
    dir.svg(
        "clt.svg",
        &Plot { title: "CLT error".into(), x_label: "eps".into(), y_label: "energy error".into(), log: true, series },
    )?;
    let mut failures: Vec<String> =
        r.cells.iter().filter_map(|c| c.failure.as_ref().map(|f| format!("eps={}: {f}", c.eps))).collect();
    if r.degenerate {
        failures.push("all errors vanish (degenerate)".into());
    } else if !r.passed {
        failures.push(format!("fitted slope {:?} below {}", r.slope(), r.band_lower));
    }
    if let Some(rich) = &r.richardson {
        if !r.strictly_decreasing() {
            failures.push("errors not strictly decreasing".into());
        }
        if rich.fit.is_none_or(|f| f.slope < r.band_lower) {
            failures.push(format!("Richardson slope {:?} below {}", rich.fit.map(|f| f.slope), r.band_lower));
        }
    }
    Ok(Outcome { cells: to_value(&r), failures })
}

/// `ito.csv` with columns `eps,gap` and `ito.svg`.
fn ito(cfg: &ExperimentConfig, dir: &ArtifactDir, parallel: bool) -> Run {
    let r = ito_vs_strat(&problem(cfg), &lift(cfg)?, &cfg.clt.eps, parallel)?;
    dir.csv("ito.csv", |w| {
        writeln!(w, "eps,gap")?;
        for (e, g) in r.eps.iter().zip(&r.gaps) {
            writeln!(w, "{e},{g}")?;
        }
        Ok(())
    })?;
    dir.svg(
        "ito.svg",
        &Plot {
            title: "Ito vs Stratonovich fluctuations".into(),
            x_label: "eps".into(),
            y_label: "sup-L2 gap".into(),
            log: true,
            series: vec![("gap".into(), r.eps.iter().copied().zip(r.gaps.iter().copied()).collect())],
        },
    )?;
    let failures = if r.passed {
        Vec::new()
    } else {
        vec![format!("fitted slope {:?} below {}", r.fit.map(|f| f.slope), r.band_lower)]
    };
    Ok(Outcome { cells: to_value(&r), failures })
}

/// `wong_zakai.csv` with columns `pieces,gap` (sup-L2 distance to the rough solution).
fn wong_zakai(cfg: &ExperimentConfig, dir: &ArtifactDir) -> Run {
    let p = problem(cfg);
    let l = lift(cfg)?;
    let u = p.solve(&l)?;
    let mut gaps = Vec::new();
    for k in &cfg.wong_zakai.pieces {
        let v = p.solve(&piecewise_linear_approximation(&l, *k)?)?;
        gaps.push(linf_l2_gap(&u, &v)?);
    }
    let pieces = &cfg.wong_zakai.pieces;
    dir.csv("wong_zakai.csv", |w| {
        writeln!(w, "pieces,gap")?;
        for (k, g) in pieces.iter().zip(&gaps) {
            writeln!(w, "{k},{g}")?;
        }
        Ok(())
    })?;
    dir.svg(
        "wong_zakai.svg",
        &Plot {
            title: "Wong-Zakai approximation".into(),
            x_label: "pieces".into(),
            y_label: "sup-L2 gap".into(),
            log: true,
            series: vec![("gap".into(), pieces.iter().map(|k| *k as f64).zip(gaps.iter().copied()).collect())],
        },
    )?;
    let failures = gaps
        .windows(2)
        .zip(pieces.windows(2))
        .filter(|(g, _)| g[1] >= g[0])
        .map(|(_, k)| format!("gap does not decrease from {} to {} pieces", k[0], k[1]))
        .collect();
    Ok(Outcome { cells: json!({ "pieces": pieces, "gaps": gaps }), failures })
}

/// `skeleton.csv` with columns `t,l2` for the direction `hdot = 1` on every
/// channel, and `exp_equivalence.csv` (see the library for its columns).
fn mdp(cfg: &ExperimentConfig, dir: &ArtifactDir, parallel: bool) -> Run {
    let p = problem(cfg);
    let base = p.solve_deterministic()?;
    let d = cfg.preset.channels();
    let h = CameronMartinPath::from_fn(cfg.time_grid(), d, |_| vec![1.0; d])?;
    let (x, rate) = rate_point(&h, &base, &p)?;
    let times = x.times().points().to_vec();
    let l2 = l2_profile(&x);
    dir.csv("skeleton.csv", |w| {
        writeln!(w, "t,l2")?;
        for (t, v) in times.iter().zip(&l2) {
            writeln!(w, "{t},{v}")?;
        }
        Ok(())
    })?;
    let m = &cfg.mdp;
    let space = SpaceGrid::new(cfg.grid.dim, m.n)?;
    let solver = SolverConfig { rotation: cfg.grid.rotation, ..SolverConfig::new(cfg.grid.horizon, m.dt) };
    let mc = ExpEquivalenceConfig {
        problem: cfg.preset.build(space, m.amplitude, solver),
        eps: m.eps.clone(),
        schedule: LambdaSchedule::preset(&m.lambda)?,
        delta: m.delta,
        samples: m.samples,
        seed: cfg.lift.seed,
        refinement: m.refinement,
        parallel,
    };
    let r = exp_equivalence_mc(&mc)?;
    dir.csv("exp_equivalence.csv", |w| r.write_csv(w))?;
    dir.svg(
        "exp_equivalence.svg",
        &Plot {
            title: "Exponential equivalence statistic".into(),
            x_label: "eps".into(),
            y_label: "lambda^-2 log P".into(),
            log: false,
            series: vec![("statistic".into(), r.cells.iter().map(|c| (c.eps, c.statistic)).collect())],
        },
    )?;
    let failures = if r.non_increasing { Vec::new() } else { vec!["statistic increases along the schedule".into()] };
    Ok(Outcome {
        cells: json!({ "skeleton_rate_bound": rate, "skeleton_l2": l2, "exp_equivalence": r }),
        failures,
    })
}

fn suite(cfg: &ExperimentConfig, dir: &ArtifactDir, parallel: bool) -> Run {
    let mut cells = serde_json::Map::new();
    let mut failures = Vec::new();
    for exp in [
        Experiment::LiftCheck,
        Experiment::Solve,
        Experiment::Clt,
        Experiment::ItoVsStrat,
        Experiment::WongZakai,
        Experiment::Mdp,
    ] {
        let sub = dir.sub(exp.name())?;
        let name = exp.name();
        match run(exp, cfg, &sub, parallel) {
            Ok(o) => {
                failures.extend(o.failures.into_iter().map(|f| format!("{name}: {f}")));
                cells.insert(name.into(), o.cells);
            }
            Err(RunError::Numeric(msg)) => failures.push(format!("{name}: {msg}")),
            Err(e) => return Err(e),
        }
    }
    Ok(Outcome { cells: Value::Object(cells), failures })
}
