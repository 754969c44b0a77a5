use super::path::Path;
use super::two_index::TwoIndexMap;
use crate::error::{domain, Result};

/// Exact p-variation of a sampled path over all partitions of its sample points.
pub fn p_variation(samples: &Path, p: f64) -> Result<f64> {
    if samples.len() < 2 {
        return domain("p-variation needs at least two samples");
    }
    p_variation_by(samples.len(), p, |j, i| {
        samples
            .point(i)
            .iter()
            .zip(samples.point(j))
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    })
}

/// Partition supremum of `(sum |d(u, v)|^p)^(1/p)` over points `0..len`, where
/// `dist(j, i)` with `j < i` is the size of the interval between them.
///
/// Dynamic programme `V(i) = max_{j<i} V(j) + dist(j, i)^p`, `O(len^2)` calls.
pub fn p_variation_by(len: usize, p: f64, mut dist: impl FnMut(usize, usize) -> f64) -> Result<f64> {
    if !(p >= 1.0) {
        return domain(format!("variation exponent must be >= 1, got {p}"));
    }
    if len < 2 {
        return Ok(0.0);
    }
    let mut v = vec![0.0_f64; len];
    for i in 1..len {
        let mut best = 0.0_f64;
        for j in 0..i {
            best = best.max(v[j] + dist(j, i).powf(p));
        }
        v[i] = best;
    }
    Ok(v[len - 1].powf(1.0 / p))
}

/// q-variation of a two-index map, interval values `A_{t_j, t_i}` in Frobenius norm.
pub fn two_index_p_variation(map: &TwoIndexMap, q: f64) -> Result<f64> {
    let mut buf = vec![0.0; map.rows() * map.cols()];
    p_variation_by(map.len(), q, |j, i| {
        map.block_into(j, i, &mut buf);
        buf.iter().map(|v| v * v).sum::<f64>().sqrt()
    })
}

/// A control `omega(s, t)` tabulated on grid pairs.
#[derive(Debug, Clone)]
pub struct Control {
    len: usize,
    values: Vec<f64>,
}

impl Control {
    /// `omega(s, t) = ||X||^p_{p-var, [s,t]}`, one dynamic programme per left endpoint.
    pub fn from_p_variation(path: &Path, p: f64) -> Result<Self> {
        if !(p >= 1.0) {
            return domain(format!("variation exponent must be >= 1, got {p}"));
        }
        let len = path.len();
        let dist = |j: usize, i: usize| -> f64 {
            path.point(i)
                .iter()
                .zip(path.point(j))
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt()
                .powf(p)
        };
        let mut values = vec![0.0; len * len];
        for s in 0..len {
            let row = &mut values[s * len..(s + 1) * len];
            for t in s + 1..len {
                let mut best = 0.0_f64;
                for j in s..t {
                    best = best.max(row[j] + dist(j, t));
                }
                row[t] = best;
            }
        }
        Ok(Self { len, values })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn eval(&self, s: usize, t: usize) -> f64 {
        self.values[s * self.len + t]
    }

    /// Largest violation `omega(s,r) + omega(r,t) - omega(s,t)` over all grid
    /// triples, clamped at zero.
    pub fn superadditivity_violation(&self) -> f64 {
        let mut worst = 0.0_f64;
        for s in 0..self.len {
            for r in s + 1..self.len {
                for t in r + 1..self.len {
                    worst = worst.max(self.eval(s, r) + self.eval(r, t) - self.eval(s, t));
                }
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar(v: &[f64]) -> Path {
        Path::scalar(v.to_vec()).unwrap()
    }

    #[test]
    fn small_examples() {
        assert!((p_variation(&scalar(&[0.0, 0.5, 1.0]), 1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((p_variation(&scalar(&[0.0, 1.0, 0.0]), 1.0).unwrap() - 2.0).abs() < 1e-15);
        let v = p_variation(&scalar(&[0.0, 1.0, 0.0]), 2.0).unwrap();
        assert!((v - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn rejects_small_exponent() {
        assert!(p_variation(&scalar(&[0.0, 1.0]), 0.5).is_err());
        assert!(p_variation(&scalar(&[0.0]), 1.0).is_err());
    }

    #[test]
    fn control_of_zigzag_is_superadditive() {
        let path = scalar(&[0.0, 1.0, -0.5, 0.3, 2.0, 1.1, 1.4]);
        let c = Control::from_p_variation(&path, 2.0).unwrap();
        assert_eq!(c.eval(3, 3), 0.0);
        assert!(c.superadditivity_violation() <= 1e-12);
        let total = p_variation(&path, 2.0).unwrap();
        assert!((c.eval(0, 6) - total * total).abs() < 1e-12);
    }
}
