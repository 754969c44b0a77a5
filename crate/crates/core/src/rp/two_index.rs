use std::sync::Arc;

use super::path::Path;
use crate::error::{Error, Result};

/// One term `coef * left_{0,s} (x) right_{s,t}` of a Chen reconstruction rule.
#[derive(Debug, Clone)]
struct RuleTerm {
    coef: f64,
    left: Arc<Path>,
    right: Arc<Path>,
}

#[derive(Debug, Clone)]
enum Repr {
    /// Values at `(0, t_i)`; other blocks follow from
    /// `A_{s,t} = A_{0,t} - A_{0,s} - sum_k c_k l^k_{0,s} (x) r^k_{s,t}`.
    Anchored { at_zero: Vec<f64>, rule: Vec<RuleTerm> },
    /// Every block `(s, t)` stored explicitly, index `s * len + t`.
    Dense(Vec<f64>),
}

/// A two-index map `A_{s,t}` in `R^{rows x cols}` over grid pairs `s <= t`.
#[derive(Debug, Clone)]
pub struct TwoIndexMap {
    rows: usize,
    cols: usize,
    len: usize,
    repr: Repr,
}

impl TwoIndexMap {
    pub fn zeros(rows: usize, cols: usize, len: usize) -> Self {
        Self {
            rows,
            cols,
            len,
            repr: Repr::Anchored { at_zero: vec![0.0; rows * cols * len], rule: Vec::new() },
        }
    }

    /// Anchored storage with the single rule `left (x) right`.
    pub fn anchored(at_zero: Vec<f64>, left: Arc<Path>, right: Arc<Path>) -> Result<Self> {
        let (rows, cols, len) = (left.dim(), right.dim(), left.len());
        if right.len() != len {
            return Err(Error::GridMismatch(format!(
                "rule paths have {} and {} points",
                len,
                right.len()
            )));
        }
        if at_zero.len() != rows * cols * len {
            return Err(Error::Dimension(format!(
                "anchored values: expected {} entries, got {}",
                rows * cols * len,
                at_zero.len()
            )));
        }
        if at_zero.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("two-index map value".into()));
        }
        Ok(Self {
            rows,
            cols,
            len,
            repr: Repr::Anchored { at_zero, rule: vec![RuleTerm { coef: 1.0, left, right }] },
        })
    }

    /// Dense storage from a block generator; blocks with `s > t` are never read.
    pub fn dense_from_fn(
        rows: usize,
        cols: usize,
        len: usize,
        mut f: impl FnMut(usize, usize) -> Vec<f64>,
    ) -> Result<Self> {
        let bs = rows * cols;
        let mut data = vec![0.0; len * len * bs];
        for s in 0..len {
            for t in s + 1..len {
                let b = f(s, t);
                if b.len() != bs {
                    return Err(Error::Dimension(format!("block of size {} != {bs}", b.len())));
                }
                data[(s * len + t) * bs..(s * len + t + 1) * bs].copy_from_slice(&b);
            }
        }
        Ok(Self { rows, cols, len, repr: Repr::Dense(data) })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Number of grid points.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn is_anchored(&self) -> bool {
        matches!(self.repr, Repr::Anchored { .. })
    }

    /// Writes `A_{s,t}` (row-major) into `out`. Requires `s <= t`.
    pub fn block_into(&self, s: usize, t: usize, out: &mut [f64]) {
        debug_assert!(s <= t && t < self.len);
        let bs = self.rows * self.cols;
        if s == t {
            out[..bs].iter_mut().for_each(|v| *v = 0.0);
            return;
        }
        match &self.repr {
            Repr::Dense(data) => out[..bs].copy_from_slice(&data[(s * self.len + t) * bs..][..bs]),
            Repr::Anchored { at_zero, rule } => {
                let zt = &at_zero[t * bs..(t + 1) * bs];
                let zs = &at_zero[s * bs..(s + 1) * bs];
                for k in 0..bs {
                    out[k] = zt[k] - zs[k];
                }
                if s == 0 {
                    return;
                }
                for term in rule {
                    let l0 = term.left.point(0);
                    let ls = term.left.point(s);
                    let rs = term.right.point(s);
                    let rt = term.right.point(t);
                    for i in 0..self.rows {
                        let a = term.coef * (ls[i] - l0[i]);
                        if a == 0.0 {
                            continue;
                        }
                        let row = &mut out[i * self.cols..(i + 1) * self.cols];
                        for j in 0..self.cols {
                            row[j] -= a * (rt[j] - rs[j]);
                        }
                    }
                }
            }
        }
    }

    pub fn block(&self, s: usize, t: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.rows * self.cols];
        self.block_into(s, t, &mut out);
        out
    }

    /// `sum_k c_k M_k`. Anchored inputs stay anchored (their rules are merged);
    /// any dense input makes the result dense.
    pub fn lin_comb(terms: &[(f64, &TwoIndexMap)]) -> Result<TwoIndexMap> {
        let first = terms
            .first()
            .ok_or_else(|| Error::Dimension("empty linear combination".into()))?
            .1;
        let (rows, cols, len) = (first.rows, first.cols, first.len);
        for (_, m) in terms {
            if (m.rows, m.cols, m.len) != (rows, cols, len) {
                return Err(Error::Dimension(format!(
                    "cannot combine {}x{} map on {} points with {}x{} map on {} points",
                    rows, cols, len, m.rows, m.cols, m.len
                )));
            }
        }
        let bs = rows * cols;
        if terms.iter().all(|(_, m)| m.is_anchored()) {
            let mut at_zero = vec![0.0; bs * len];
            let mut merged = Vec::new();
            for (c, m) in terms {
                if let Repr::Anchored { at_zero: z, rule } = &m.repr {
                    at_zero.iter_mut().zip(z).for_each(|(a, b)| *a += c * b);
                    merged.extend(rule.iter().map(|r| RuleTerm {
                        coef: c * r.coef,
                        left: r.left.clone(),
                        right: r.right.clone(),
                    }));
                }
            }
            return Ok(TwoIndexMap { rows, cols, len, repr: Repr::Anchored { at_zero, rule: merged } });
        }
        let mut buf = vec![0.0; bs];
        TwoIndexMap::dense_from_fn(rows, cols, len, |s, t| {
            let mut acc = vec![0.0; bs];
            for (c, m) in terms {
                m.block_into(s, t, &mut buf);
                acc.iter_mut().zip(&buf).for_each(|(a, b)| *a += c * b);
            }
            acc
        })
    }

    pub fn scaled(&self, c: f64) -> TwoIndexMap {
        Self::lin_comb(&[(c, self)]).expect("single-term combination")
    }

    /// Dense copy of this map.
    pub fn to_dense(&self) -> TwoIndexMap {
        let bs = self.rows * self.cols;
        let mut buf = vec![0.0; bs];
        TwoIndexMap::dense_from_fn(self.rows, self.cols, self.len, |s, t| {
            self.block_into(s, t, &mut buf);
            buf.clone()
        })
        .expect("block sizes agree")
    }

    /// Overwrites block `(s, t)`; converts to dense storage first.
    pub fn set_block(&mut self, s: usize, t: usize, values: &[f64]) -> Result<()> {
        let bs = self.rows * self.cols;
        if values.len() != bs || s >= t || t >= self.len {
            return Err(Error::Dimension(format!("invalid block ({s},{t}) of size {}", values.len())));
        }
        if self.is_anchored() {
            *self = self.to_dense();
        }
        if let Repr::Dense(data) = &mut self.repr {
            data[(s * self.len + t) * bs..(s * self.len + t + 1) * bs].copy_from_slice(values);
        }
        Ok(())
    }

    /// Values `A_{0,t_i}` for every grid point.
    pub fn values_at_zero(&self) -> Vec<f64> {
        let bs = self.rows * self.cols;
        let mut out = vec![0.0; bs * self.len];
        for t in 1..self.len {
            self.block_into(0, t, &mut out[t * bs..(t + 1) * bs]);
        }
        out
    }
}
