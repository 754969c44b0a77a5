//! Tensor product of two drivers:
//! `Gamma = A (x) 1 + 1 (x) B`, `GGamma = AA (x) 1 + A (x) B + 1 (x) BB`.

use crate::drivers::{driver_chen_defect, RoughDriver};
use crate::error::{Error, Result};
use crate::grid::{SpaceGrid, TimeGrid};
use crate::rp::TripleSelection;

pub struct TensorDriver<'a> {
    a: &'a dyn RoughDriver,
    b: &'a dyn RoughDriver,
}

impl<'a> TensorDriver<'a> {
    pub fn new(a: &'a dyn RoughDriver, b: &'a dyn RoughDriver) -> Result<Self> {
        a.time_grid().ensure_matches(b.time_grid(), "tensor driver")?;
        if a.space() != b.space() {
            return Err(Error::GridMismatch("factor drivers use different space grids".into()));
        }
        Ok(Self { a, b })
    }
}

/// `kron(x, y)` for row-major square blocks of orders `na`, `nb`, accumulated into `out`.
fn kron_add(x: &[f64], na: usize, y: &[f64], nb: usize, out: &mut [f64]) {
    let n = na * nb;
    for i in 0..na {
        for j in 0..na {
            let xv = x[i * na + j];
            if xv == 0.0 {
                continue;
            }
            for k in 0..nb {
                for l in 0..nb {
                    out[(i * nb + k) * n + j * nb + l] += xv * y[k * nb + l];
                }
            }
        }
    }
}

fn identity(n: usize) -> Vec<f64> {
    (0..n * n).map(|e| if e / n == e % n { 1.0 } else { 0.0 }).collect()
}

impl RoughDriver for TensorDriver<'_> {
    fn time_grid(&self) -> &TimeGrid {
        self.a.time_grid()
    }

    fn space(&self) -> &SpaceGrid {
        self.a.space()
    }

    fn order(&self) -> usize {
        self.a.order() * self.b.order()
    }

    fn p(&self) -> f64 {
        self.a.p().max(self.b.p())
    }

    fn blocks_into(&self, s: usize, t: usize, w: &mut [f64], ww: &mut [f64]) {
        let (na, nb) = (self.a.order(), self.b.order());
        let (aw, aww) = self.a.blocks(s, t);
        let (bw, bww) = self.b.blocks(s, t);
        let (ia, ib) = (identity(na), identity(nb));
        let n2 = na * nb * na * nb;
        w.iter_mut().chain(ww.iter_mut()).for_each(|v| *v = 0.0);
        for node in 0..self.space().nodes() {
            let a1 = &aw[node * na * na..(node + 1) * na * na];
            let a2 = &aww[node * na * na..(node + 1) * na * na];
            let b1 = &bw[node * nb * nb..(node + 1) * nb * nb];
            let b2 = &bww[node * nb * nb..(node + 1) * nb * nb];
            let wn = &mut w[node * n2..(node + 1) * n2];
            kron_add(a1, na, &ib, nb, wn);
            kron_add(&ia, na, b1, nb, wn);
            let wwn = &mut ww[node * n2..(node + 1) * n2];
            kron_add(a2, na, &ib, nb, wwn);
            kron_add(a1, na, b1, nb, wwn);
            kron_add(&ia, na, b2, nb, wwn);
        }
    }
}

/// The tensor driver of `a` and `b` with its Chen defect over `triples`.
pub fn product_gamma<'a>(
    a: &'a dyn RoughDriver,
    b: &'a dyn RoughDriver,
    triples: TripleSelection,
) -> Result<(TensorDriver<'a>, f64)> {
    let gamma = TensorDriver::new(a, b)?;
    let defect = driver_chen_defect(&gamma, triples)?;
    Ok((gamma, defect))
}
