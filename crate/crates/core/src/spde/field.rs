use std::io::{Read, Write};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{SpaceGrid, TimeGrid};

/// Sphere drift observed after an LLG drift sub-step, before renormalization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SphereWarning {
    pub step: usize,
    pub deviation: f64,
}

/// Bookkeeping a solver attaches to its output.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SolveDiagnostics {
    /// Largest `||u| - 1|` after the drift sub-step (LLG only).
    pub max_drift_sphere_deviation: f64,
    /// Steps whose drift sub-step left the sphere by more than 1e-6.
    pub sphere_warnings: Vec<SphereWarning>,
    pub implicit_laplacian: bool,
}

/// Space-time record `u(t_k, x_j)` in `R^n`, stored time-major, then node,
/// then component.
#[derive(Debug, Clone)]
pub struct Field {
    space: SpaceGrid,
    times: TimeGrid,
    components: usize,
    values: Vec<f64>,
    pub diagnostics: SolveDiagnostics,
}

impl Field {
    pub fn new(space: SpaceGrid, times: TimeGrid, components: usize, values: Vec<f64>) -> Result<Self> {
        let want = times.len() * space.nodes() * components;
        if components == 0 || values.len() != want {
            return Err(Error::Dimension(format!(
                "field needs {want} values, got {}",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("field value".into()));
        }
        Ok(Self { space, times, components, values, diagnostics: SolveDiagnostics::default() })
    }

    pub(crate) fn from_snapshots(
        space: SpaceGrid,
        times: TimeGrid,
        components: usize,
        values: Vec<f64>,
        diagnostics: SolveDiagnostics,
    ) -> Self {
        debug_assert_eq!(values.len(), times.len() * space.nodes() * components);
        Self { space, times, components, values, diagnostics }
    }

    pub fn zeros(space: SpaceGrid, times: TimeGrid, components: usize) -> Self {
        let len = times.len() * space.nodes() * components;
        Self { space, times, components, values: vec![0.0; len], diagnostics: Default::default() }
    }

    pub fn space(&self) -> &SpaceGrid {
        &self.space
    }

    pub fn times(&self) -> &TimeGrid {
        &self.times
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn snapshot_len(&self) -> usize {
        self.space.nodes() * self.components
    }

    /// Values at time index `k`, node-major.
    pub fn snapshot(&self, k: usize) -> &[f64] {
        let m = self.snapshot_len();
        &self.values[k * m..(k + 1) * m]
    }

    pub fn last(&self) -> &[f64] {
        self.snapshot(self.times.steps())
    }

    /// Component `c` of snapshot `k` as a nodal array.
    pub fn component(&self, k: usize, c: usize) -> Vec<f64> {
        self.snapshot(k).iter().skip(c).step_by(self.components).copied().collect()
    }

    fn check_same_shape(&self, other: &Field) -> Result<()> {
        self.times.ensure_matches(&other.times, "field combination")?;
        if self.space != other.space || self.components != other.components {
            return Err(Error::GridMismatch("fields live on different grids".into()));
        }
        Ok(())
    }

    /// `a * self + b * other`.
    pub fn combine(&self, a: f64, other: &Field, b: f64) -> Result<Field> {
        self.check_same_shape(other)?;
        let values = self.values.iter().zip(&other.values).map(|(x, y)| a * x + b * y).collect();
        Ok(Field::from_snapshots(self.space, self.times.clone(), self.components, values, Default::default()))
    }

    pub fn scaled(&self, a: f64) -> Field {
        let values = self.values.iter().map(|v| a * v).collect();
        Field::from_snapshots(self.space, self.times.clone(), self.components, values, Default::default())
    }

    /// Largest `||u(t_k, x_j)| - 1|` over the record.
    pub fn max_sphere_deviation(&self) -> f64 {
        self.values
            .chunks(self.components)
            .map(|u| (u.iter().map(|v| v * v).sum::<f64>().sqrt() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// CSV with columns `t,x[,y],u1..un`, one row per time and node.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let mut head = vec!["t".to_string(), "x".to_string()];
        if self.space.dim() == 2 {
            head.push("y".into());
        }
        head.extend((1..=self.components).map(|c| format!("u{c}")));
        writeln!(w, "{}", head.join(","))?;
        for (k, t) in self.times.points().iter().enumerate() {
            for (j, u) in self.snapshot(k).chunks(self.components).enumerate() {
                let xy = self.space.coords(j);
                let mut row = vec![t.to_string(), xy[0].to_string()];
                if self.space.dim() == 2 {
                    row.push(xy[1].to_string());
                }
                row.extend(u.iter().map(|v| v.to_string()));
                writeln!(w, "{}", row.join(","))?;
            }
        }
        Ok(())
    }

    /// Binary layout (little endian): magic `RCLTFELD`, `u32` version 1, `u64`
    /// space dim, points per axis, components, steps, `u8` uniform flag, then
    /// the times and the values as `f64`.
    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(b"RCLTFELD")?;
        w.write_all(&1u32.to_le_bytes())?;
        for v in [self.space.dim(), self.space.n(), self.components, self.times.steps()] {
            w.write_all(&(v as u64).to_le_bytes())?;
        }
        w.write_all(&[self.times.is_uniform() as u8])?;
        for v in self.times.points().iter().chain(&self.values) {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<Field> {
        let mut magic = [0u8; 12];
        r.read_exact(&mut magic)?;
        if &magic[..8] != b"RCLTFELD" || magic[8..] != 1u32.to_le_bytes() {
            return Err(Error::Format("not a field file".into()));
        }
        let mut word = [0u8; 8];
        let mut next = |r: &mut R| -> Result<u64> {
            r.read_exact(&mut word)?;
            Ok(u64::from_le_bytes(word))
        };
        let dim = next(&mut r)? as usize;
        let n = next(&mut r)? as usize;
        let components = next(&mut r)? as usize;
        let steps = next(&mut r)? as usize;
        let mut flag = [0u8; 1];
        r.read_exact(&mut flag)?;
        let space = SpaceGrid::new(dim, n)?;
        let times = (0..=steps).map(|_| next(&mut r).map(f64::from_bits)).collect::<Result<Vec<_>>>()?;
        let times = TimeGrid::from_points(times)?.flagged_uniform(flag[0] != 0);
        let count = times.len() * space.nodes() * components;
        let values = (0..count).map(|_| next(&mut r).map(f64::from_bits)).collect::<Result<Vec<_>>>()?;
        Field::new(space, times, components, values)
    }
}
