use super::config::{Equation, GridFunction, SolverConfig};
use super::field::Field;
use super::llg::solve_llg;
use super::scalar::dispatch;
use crate::drivers::{make_llg_driver, make_scalar_driver, RoughDriver, ScalarDriver, SphericalDriver};
use crate::error::{Error, Result};
use crate::grid::{SpaceGrid, TimeGrid};
use crate::rp::PathLift;

/// Either kind of driver, as built for an [`Equation`].
#[derive(Debug, Clone)]
pub enum AnyDriver {
    Scalar(ScalarDriver),
    Spherical(SphericalDriver),
}

impl AnyDriver {
    pub fn as_dyn(&self) -> &dyn RoughDriver {
        match self {
            AnyDriver::Scalar(d) => d,
            AnyDriver::Spherical(d) => d,
        }
    }
}

/// An equation together with its initial datum, noise profiles and solver
/// settings; solving it only needs a lift of the noise.
#[derive(Debug, Clone)]
pub struct Problem {
    pub equation: Equation,
    pub u0: GridFunction,
    /// One spatial profile per noise channel (three for the LLG equation).
    pub profiles: Vec<Vec<f64>>,
    pub solver: SolverConfig,
}

impl Problem {
    pub fn space(&self) -> SpaceGrid {
        *self.u0.space()
    }

    pub fn channels(&self) -> usize {
        self.profiles.len()
    }

    pub fn time_grid(&self) -> Result<TimeGrid> {
        self.solver.time_grid()
    }

    pub fn driver(&self, lift: &PathLift) -> Result<AnyDriver> {
        if lift.dim() != self.channels() {
            return Err(Error::Dimension(format!(
                "lift has {} channels, problem has {} profiles",
                lift.dim(),
                self.channels()
            )));
        }
        Ok(match self.equation {
            Equation::Llg => AnyDriver::Spherical(make_llg_driver(lift, self.space(), self.profiles.clone())?),
            _ => AnyDriver::Scalar(make_scalar_driver(lift, self.space(), self.profiles.clone())?),
        })
    }

    pub fn solve_with(&self, driver: &AnyDriver) -> Result<Field> {
        match driver {
            AnyDriver::Scalar(d) => dispatch(self.equation, &self.u0, d, &self.solver),
            AnyDriver::Spherical(d) => solve_llg(&self.u0, d, &self.solver),
        }
    }

    pub fn solve(&self, lift: &PathLift) -> Result<Field> {
        self.solve_with(&self.driver(lift)?)
    }

    /// Solution with the zero driver.
    pub fn solve_deterministic(&self) -> Result<Field> {
        self.solve(&PathLift::zero(self.time_grid()?, self.channels()))
    }
}
