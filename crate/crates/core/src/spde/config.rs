use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::grid::{SpaceGrid, TimeGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Equation {
    Heat,
    ReactionDiffusion,
    Llg,
}

/// How the LLG noise sub-step acts on the magnetization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum RotationMode {
    /// `exp(W + Anti(WW))`, an exact rotation.
    #[default]
    ExactExponential,
    /// `I + W + WW`; leaves the sphere at third order.
    SecondOrderAffine,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub dt: f64,
    pub horizon: f64,
    /// Backward-Euler Laplacian; when off the Laplacian is explicit and
    /// `dt` must respect the usual `dt <= dx^2 / 2` restriction.
    pub implicit_laplacian: bool,
    pub rotation: RotationMode,
    /// Pointwise division by `|u|` after the LLG drift sub-step.
    pub renormalize: bool,
    /// Abort when any value exceeds this in magnitude.
    pub blow_up: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            dt: 1e-4,
            horizon: 0.05,
            implicit_laplacian: true,
            rotation: RotationMode::ExactExponential,
            renormalize: true,
            blow_up: 1e12,
        }
    }
}

impl SolverConfig {
    pub fn new(horizon: f64, dt: f64) -> Self {
        Self { dt, horizon, ..Self::default() }
    }

    pub fn time_grid(&self) -> Result<TimeGrid> {
        TimeGrid::with_step(self.horizon, self.dt)
    }
}

/// A nodal function `x -> R^n` on a space grid, node-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    space: SpaceGrid,
    components: usize,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(space: SpaceGrid, components: usize, values: Vec<f64>) -> Result<Self> {
        if components == 0 || values.len() != space.nodes() * components {
            return Err(Error::Dimension(format!(
                "{} values for {} nodes with {components} components",
                values.len(),
                space.nodes()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("initial datum".into()));
        }
        Ok(Self { space, components, values })
    }

    pub fn scalar(space: SpaceGrid, f: impl Fn([f64; 2]) -> f64) -> Self {
        Self { space, components: 1, values: space.sample(f) }
    }

    /// Vector function from one sampler per component.
    pub fn vector(space: SpaceGrid, fs: &[&dyn Fn([f64; 2]) -> f64]) -> Self {
        let comps: Vec<Vec<f64>> = fs.iter().map(|f| space.sample(f)).collect();
        let values = (0..space.nodes()).flat_map(|j| comps.iter().map(move |c| c[j])).collect();
        Self { space, components: fs.len(), values }
    }

    pub fn constant(space: SpaceGrid, value: &[f64]) -> Self {
        let values = (0..space.nodes()).flat_map(|_| value.iter().copied()).collect();
        Self { space, components: value.len(), values }
    }

    pub fn space(&self) -> &SpaceGrid {
        &self.space
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub(crate) fn check_space(&self, space: &SpaceGrid) -> Result<()> {
        if &self.space != space {
            return domain("initial datum and driver use different space grids");
        }
        Ok(())
    }
}

/// Component-major working copy of a nodal vector function.
pub(crate) type State = Vec<Vec<f64>>;

pub(crate) fn to_state(values: &[f64], components: usize) -> State {
    (0..components).map(|c| values.iter().skip(c).step_by(components).copied().collect()).collect()
}

pub(crate) fn push_state(out: &mut Vec<f64>, state: &State) {
    let nodes = state[0].len();
    for j in 0..nodes {
        for c in state {
            out.push(c[j]);
        }
    }
}

pub(crate) fn check_finite(state: &State, limit: f64, step: usize, time: f64) -> Result<()> {
    if state.iter().flatten().any(|v| !v.is_finite() || v.abs() > limit) {
        return Err(Error::BlowUp { step, time });
    }
    Ok(())
}
