//! Experiment configuration: a TOML document in which every field has a default.

use serde::{Deserialize, Serialize};

use rough_clt::mdp::LambdaSchedule;
use rough_clt::presets::ProblemPreset;
use rough_clt::spde::{RotationMode, SolverConfig};
use rough_clt::{SpaceGrid, TimeGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    LiftCheck,
    Solve,
    Clt,
    ItoVsStrat,
    WongZakai,
    Mdp,
    Suite,
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Self::LiftCheck => "lift-check",
            Self::Solve => "solve",
            Self::Clt => "clt",
            Self::ItoVsStrat => "ito-vs-strat",
            Self::WongZakai => "wong-zakai",
            Self::Mdp => "mdp",
            Self::Suite => "suite",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSpec {
    /// Spatial dimension, 1 or 2.
    pub dim: usize,
    /// Points per axis.
    pub n: usize,
    pub dt: f64,
    pub horizon: f64,
    pub rotation: RotationMode,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { dim: 1, n: 128, dt: 1e-4, horizon: 0.05, rotation: RotationMode::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LiftSpec {
    pub seed: u64,
    /// Bridge refinement per grid step, a power of two.
    pub refinement: usize,
}

impl Default for LiftSpec {
    fn default() -> Self {
        Self { seed: 7, refinement: 32 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CltSpec {
    pub eps: Vec<f64>,
    pub richardson: bool,
    pub band_lower: f64,
}

impl Default for CltSpec {
    fn default() -> Self {
        Self { eps: dyadic(4, 12), richardson: false, band_lower: rough_clt::clt::CLT_BAND_LOWER }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WongZakaiSpec {
    /// Numbers of linear pieces, increasing; each must divide the step count.
    pub pieces: Vec<usize>,
}

impl Default for WongZakaiSpec {
    fn default() -> Self {
        Self { pieces: vec![5, 25, 125] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MdpSpec {
    pub eps: Vec<f64>,
    /// `quarter`, `third`, `ldp` or `power:<a>`.
    pub lambda: String,
    pub delta: f64,
    pub samples: usize,
    /// Noise amplitude, points per axis, time step and refinement of the Monte
    /// Carlo runs, which use a coarser grid than the other experiments.
    pub amplitude: f64,
    pub n: usize,
    pub dt: f64,
    pub refinement: usize,
}

impl Default for MdpSpec {
    fn default() -> Self {
        Self {
            eps: dyadic(0, 4),
            lambda: "quarter".into(),
            delta: 0.1,
            samples: 500,
            amplitude: 2.0,
            n: 64,
            dt: 5e-4,
            refinement: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub preset: ProblemPreset,
    pub amplitude: f64,
    pub grid: GridSpec,
    pub lift: LiftSpec,
    pub clt: CltSpec,
    pub wong_zakai: WongZakaiSpec,
    pub mdp: MdpSpec,
    pub out: String,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            experiment: Experiment::Clt,
            preset: ProblemPreset::HeatConstant,
            amplitude: 1.0,
            grid: GridSpec::default(),
            lift: LiftSpec::default(),
            clt: CltSpec::default(),
            wong_zakai: WongZakaiSpec::default(),
            mdp: MdpSpec::default(),
            out: "out".into(),
        }
    }
}

pub fn dyadic(from: i32, to: i32) -> Vec<f64> {
    (from..=to).map(|k| 2f64.powi(-k)).collect()
}

/// A schema violation at a field path.
#[derive(Debug)]
pub struct SchemaError {
    pub path: String,
    pub message: String,
}

impl std::fmt::Display for SchemaError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

fn fail<T>(path: &str, message: impl Into<String>) -> Result<T, SchemaError> {
    Err(SchemaError { path: path.into(), message: message.into() })
}

fn check_eps(path: &str, eps: &[f64], min_len: usize) -> Result<(), SchemaError> {
    if eps.len() < min_len {
        return fail(path, format!("needs at least {min_len} values, got {}", eps.len()));
    }
    if eps.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
        return fail(path, "values must be positive and finite");
    }
    if eps.windows(2).any(|w| w[1] >= w[0]) {
        return fail(path, "values must be strictly decreasing");
    }
    Ok(())
}

fn check_positive(path: &str, v: f64) -> Result<(), SchemaError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        fail(path, format!("must be positive and finite, got {v}"))
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, SchemaError> {
        toml::from_str(text).map_err(|e| SchemaError {
            path: "config".into(),
            message: e.to_string().trim_end().replace('\n', " "),
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Checks everything the selected experiment needs.
    pub fn validate(&self) -> Result<(), SchemaError> {
        let g = &self.grid;
        if SpaceGrid::new(g.dim, g.n).is_err() {
            return fail("grid", format!("need dim 1 or 2 and n >= 4, got dim {} and n {}", g.dim, g.n));
        }
        check_positive("grid.dt", g.dt)?;
        check_positive("grid.horizon", g.horizon)?;
        if TimeGrid::with_step(g.horizon, g.dt).is_err() {
            return fail("grid.dt", "must divide grid.horizon into whole steps");
        }
        if !self.amplitude.is_finite() {
            return fail("amplitude", "must be finite");
        }
        if !(self.lift.refinement.is_power_of_two()) {
            return fail("lift.refinement", "must be a power of two");
        }
        let all = self.experiment == Experiment::Suite;
        if all || self.experiment == Experiment::Clt {
            check_eps("clt.eps", &self.clt.eps, 4)?;
        }
        if all || self.experiment == Experiment::ItoVsStrat {
            check_eps("clt.eps", &self.clt.eps, 2)?;
        }
        if all || self.experiment == Experiment::WongZakai {
            let steps = self.time_grid().steps();
            let p = &self.wong_zakai.pieces;
            if p.len() < 2 || p.windows(2).any(|w| w[1] <= w[0]) {
                return fail("wong_zakai.pieces", "needs at least 2 strictly increasing values");
            }
            if let Some(bad) = p.iter().find(|k| **k == 0 || !steps.is_multiple_of(**k)) {
                return fail("wong_zakai.pieces", format!("{bad} does not divide the {steps} time steps"));
            }
        }
        if all || self.experiment == Experiment::Mdp {
            let m = &self.mdp;
            check_eps("mdp.eps", &m.eps, 2)?;
            let schedule = LambdaSchedule::preset(&m.lambda).or_else(|e| fail("mdp.lambda", e.to_string()))?;
            let checked = schedule.validate(&m.eps).or_else(|e| fail("mdp.eps", e.to_string()))?;
            if !checked.is_valid() {
                return fail("mdp.lambda", format!("schedule fails validation on mdp.eps: {checked:?}"));
            }
            if !(m.delta >= 0.0 && m.delta.is_finite()) {
                return fail("mdp.delta", "must be finite and nonnegative");
            }
            if m.samples < rough_clt::mdp::MIN_MC_SAMPLES {
                return fail("mdp.samples", format!("must be at least {}", rough_clt::mdp::MIN_MC_SAMPLES));
            }
            if SpaceGrid::new(g.dim, m.n).is_err() {
                return fail("mdp.n", "must be at least 4");
            }
            check_positive("mdp.dt", m.dt)?;
            if TimeGrid::with_step(g.horizon, m.dt).is_err() {
                return fail("mdp.dt", "must divide grid.horizon into whole steps");
            }
            if !m.refinement.is_power_of_two() {
                return fail("mdp.refinement", "must be a power of two");
            }
        }
        Ok(())
    }

    pub fn space(&self) -> SpaceGrid {
        SpaceGrid::new(self.grid.dim, self.grid.n).expect("validated")
    }

    pub fn solver(&self) -> SolverConfig {
        SolverConfig { rotation: self.grid.rotation, ..SolverConfig::new(self.grid.horizon, self.grid.dt) }
    }

    pub fn time_grid(&self) -> TimeGrid {
        TimeGrid::with_step(self.grid.horizon, self.grid.dt).expect("validated")
    }

    /// The config with the fields that cannot affect numeric output cleared.
    pub fn hash_view(&self) -> Self {
        Self { out: String::new(), ..self.clone() }
    }
}
