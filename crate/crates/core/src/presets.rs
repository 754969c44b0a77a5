//! Named problems used by the experiments and the command line.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::grid::SpaceGrid;
use crate::spde::{Equation, GridFunction, Problem, SolverConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProblemPreset {
    /// Heat equation, `u0 = sin(2 pi x)`, constant profile `g = a`.
    HeatConstant,
    /// Heat equation, `u0 = sin(2 pi x)`, profile `g = a sin(2 pi x)`.
    HeatSine,
    /// `u_t = u_xx + u - u^3`, `u0 = 0.5 + 0.3 sin(2 pi x)`, `g = a sin(2 pi x)`.
    ReactionDiffusionSine,
    /// LLG with an in-plane winding datum tilted off the equator and three
    /// phase-shifted profiles `a (1 + sin(2 pi x + i) / 2)`.
    Llg,
}

impl ProblemPreset {
    pub fn equation(&self) -> Equation {
        match self {
            Self::HeatConstant | Self::HeatSine => Equation::Heat,
            Self::ReactionDiffusionSine => Equation::ReactionDiffusion,
            Self::Llg => Equation::Llg,
        }
    }

    pub fn channels(&self) -> usize {
        match self {
            Self::Llg => 3,
            _ => 1,
        }
    }

    /// The problem on `space` with noise amplitude `a`.
    pub fn build(&self, space: SpaceGrid, amplitude: f64, solver: SolverConfig) -> Problem {
        let s = |x: [f64; 2]| (2.0 * PI * x[0]).sin();
        let (u0, profiles) = match self {
            Self::HeatConstant => (GridFunction::scalar(space, s), vec![vec![amplitude; space.nodes()]]),
            Self::HeatSine => (GridFunction::scalar(space, s), vec![space.sample(|x| amplitude * s(x))]),
            Self::ReactionDiffusionSine => (
                GridFunction::scalar(space, |x| 0.5 + 0.3 * s(x)),
                vec![space.sample(|x| amplitude * s(x))],
            ),
            Self::Llg => {
                let a = |x: [f64; 2]| 0.6 * (2.0 * PI * x[0]).cos();
                let b = |x: [f64; 2]| 0.6 * s(x);
                let c = |_: [f64; 2]| 0.8;
                let profiles = (0..3)
                    .map(|i| space.sample(|x| amplitude * (1.0 + 0.5 * (2.0 * PI * x[0] + i as f64).sin())))
                    .collect();
                (GridFunction::vector(space, &[&a, &b, &c]), profiles)
            }
        };
        Problem { equation: self.equation(), u0, profiles, solver }
    }
}
