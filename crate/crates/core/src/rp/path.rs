use crate::error::{Error, Result};
use crate::grid::TimeGrid;

/// A path sampled at the points of a time grid: `len` points in `R^dim`,
/// stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    dim: usize,
    values: Vec<f64>,
}

impl Path {
    pub fn new(dim: usize, values: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Dimension("paths need at least one channel".into()));
        }
        if !values.len().is_multiple_of(dim) || values.is_empty() {
            return Err(Error::Dimension(format!(
                "{} values do not split into points of dimension {dim}",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("path sample".into()));
        }
        Ok(Self { dim, values })
    }

    pub fn zeros(dim: usize, len: usize) -> Self {
        Self { dim, values: vec![0.0; dim * len] }
    }

    /// One-dimensional path from scalar samples.
    pub fn scalar(values: Vec<f64>) -> Result<Self> {
        Self::new(1, values)
    }

    /// Samples `f(t)` at every grid point.
    pub fn from_fn(grid: &TimeGrid, dim: usize, f: impl Fn(f64) -> Vec<f64>) -> Result<Self> {
        let mut values = Vec::with_capacity(dim * grid.len());
        for &t in grid.points() {
            let v = f(t);
            if v.len() != dim {
                return Err(Error::Dimension(format!(
                    "sampler returned {} values, expected {dim}",
                    v.len()
                )));
            }
            values.extend(v);
        }
        Self::new(dim, values)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of sample points.
    pub fn len(&self) -> usize {
        self.values.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    #[inline]
    pub fn component(&self, i: usize, c: usize) -> f64 {
        self.values[i * self.dim + c]
    }

    /// `x_t - x_s`.
    pub fn increment(&self, s: usize, t: usize) -> Vec<f64> {
        self.point(t)
            .iter()
            .zip(self.point(s))
            .map(|(b, a)| b - a)
            .collect()
    }

    /// The same path shifted so that it starts at the origin.
    pub fn anchored(&self) -> Path {
        let start = self.point(0).to_vec();
        let values = self
            .values
            .chunks(self.dim)
            .flat_map(|p| p.iter().zip(&start).map(|(v, s)| v - s))
            .collect();
        Path { dim: self.dim, values }
    }

    pub fn scaled(&self, a: f64) -> Path {
        Path { dim: self.dim, values: self.values.iter().map(|v| a * v).collect() }
    }

    /// Pointwise `a * self + b * other`.
    pub fn combine(&self, a: f64, other: &Path, b: f64) -> Result<Path> {
        if self.dim != other.dim || self.len() != other.len() {
            return Err(Error::Dimension(format!(
                "cannot combine paths of shape {}x{} and {}x{}",
                self.len(),
                self.dim,
                other.len(),
                other.dim
            )));
        }
        let values = self.values.iter().zip(&other.values).map(|(x, y)| a * x + b * y).collect();
        Ok(Path { dim: self.dim, values })
    }

    /// Channels of `self` followed by the channels of `other`.
    pub fn concat(&self, other: &Path) -> Result<Path> {
        if self.len() != other.len() {
            return Err(Error::GridMismatch(format!(
                "paths have {} and {} points",
                self.len(),
                other.len()
            )));
        }
        let dim = self.dim + other.dim;
        let mut values = Vec::with_capacity(dim * self.len());
        for i in 0..self.len() {
            values.extend_from_slice(self.point(i));
            values.extend_from_slice(other.point(i));
        }
        Ok(Path { dim, values })
    }

    /// Keeps channels `range`.
    pub fn channels(&self, range: std::ops::Range<usize>) -> Path {
        let dim = range.len();
        let mut values = Vec::with_capacity(dim * self.len());
        for i in 0..self.len() {
            values.extend_from_slice(&self.point(i)[range.clone()]);
        }
        Path { dim, values }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}
