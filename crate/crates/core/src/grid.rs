//! Time and space grids.

use crate::error::{domain, Error, Result};
use serde::{Deserialize, Serialize};

/// Strictly increasing time points `0 = t_0 < t_1 < ... < t_n = T`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    points: Vec<f64>,
    uniform: bool,
}

impl TimeGrid {
    /// `steps` equal intervals on `[0, horizon]`.
    pub fn uniform(horizon: f64, steps: usize) -> Result<Self> {
        if !(horizon > 0.0) || !horizon.is_finite() {
            return domain(format!("horizon must be positive and finite, got {horizon}"));
        }
        if steps == 0 {
            return domain("a time grid needs at least one interval");
        }
        let h = horizon / steps as f64;
        let mut points: Vec<f64> = (0..=steps).map(|k| k as f64 * h).collect();
        points[steps] = horizon;
        Ok(Self { points, uniform: true })
    }

    /// Uniform grid with step `dt`; `horizon / dt` must be an integer up to 1e-9.
    pub fn with_step(horizon: f64, dt: f64) -> Result<Self> {
        if !(dt > 0.0) {
            return domain(format!("time step must be positive, got {dt}"));
        }
        let ratio = horizon / dt;
        let steps = ratio.round();
        if (ratio - steps).abs() > 1e-9 * ratio.max(1.0) || steps < 1.0 {
            return domain(format!("horizon {horizon} is not a multiple of dt = {dt}"));
        }
        Self::uniform(horizon, steps as usize)
    }

    pub fn from_points(points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 {
            return domain("a time grid needs at least two points");
        }
        if points[0] != 0.0 {
            return domain("time grids start at t = 0");
        }
        if points.iter().any(|t| !t.is_finite()) {
            return Err(Error::NonFinite("time grid point".into()));
        }
        if points.windows(2).any(|w| w[1] <= w[0]) {
            return domain("time grid points must be strictly increasing");
        }
        Ok(Self { points, uniform: false })
    }

    pub(crate) fn flagged_uniform(mut self, uniform: bool) -> Self {
        self.uniform = uniform;
        self
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// Number of intervals.
    pub fn steps(&self) -> usize {
        self.points.len() - 1
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn horizon(&self) -> f64 {
        *self.points.last().unwrap()
    }

    pub fn is_uniform(&self) -> bool {
        self.uniform
    }

    pub fn dt(&self, k: usize) -> f64 {
        self.points[k + 1] - self.points[k]
    }

    /// Same number of points and coincident times (relative 1e-12).
    pub fn matches(&self, other: &TimeGrid) -> bool {
        self.points.len() == other.points.len()
            && self
                .points
                .iter()
                .zip(&other.points)
                .all(|(a, b)| (a - b).abs() <= 1e-12 * a.abs().max(1.0))
    }

    pub(crate) fn ensure_matches(&self, other: &TimeGrid, what: &str) -> Result<()> {
        if self.matches(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "{what}: time grids differ ({} vs {} points)",
                self.len(),
                other.len()
            )))
        }
    }
}

/// Periodic grid on the unit torus with `n` points per axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceGrid {
    dim: usize,
    n: usize,
}

impl SpaceGrid {
    pub fn new(dim: usize, n: usize) -> Result<Self> {
        if !(1..=2).contains(&dim) {
            return domain(format!("spatial dimension must be 1 or 2, got {dim}"));
        }
        if n < 4 {
            return domain(format!("need at least 4 points per axis, got {n}"));
        }
        Ok(Self { dim, n })
    }

    pub fn line(n: usize) -> Result<Self> {
        Self::new(1, n)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Points per axis.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Total number of nodes.
    pub fn nodes(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn dx(&self) -> f64 {
        1.0 / self.n as f64
    }

    /// Volume of one cell, `dx^dim`.
    pub fn cell_volume(&self) -> f64 {
        self.dx().powi(self.dim as i32)
    }

    /// Periodic wrap of a signed index along one axis.
    #[inline]
    pub fn wrap(&self, i: isize) -> usize {
        i.rem_euclid(self.n as isize) as usize
    }

    /// Coordinates of node `j` (row-major, last axis fastest).
    pub fn coords(&self, j: usize) -> [f64; 2] {
        let h = self.dx();
        match self.dim {
            1 => [j as f64 * h, 0.0],
            _ => [(j / self.n) as f64 * h, (j % self.n) as f64 * h],
        }
    }

    /// Samples `f` at every node.
    pub fn sample(&self, f: impl Fn([f64; 2]) -> f64) -> Vec<f64> {
        (0..self.nodes()).map(|j| f(self.coords(j))).collect()
    }
}
