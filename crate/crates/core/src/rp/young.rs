use std::sync::Arc;

use super::path::Path;
use super::two_index::TwoIndexMap;
use crate::error::{domain, Error, Result};

fn check_exponents(qa: f64, qb: f64) -> Result<()> {
    if !(qa >= 1.0 && qb >= 1.0) {
        return domain(format!("variation exponents must be >= 1, got {qa} and {qb}"));
    }
    if 1.0 / qa + 1.0 / qb <= 1.0 {
        return domain(format!("Young condition 1/{qa} + 1/{qb} > 1 fails"));
    }
    Ok(())
}

/// Crossed integral `[AB]_{s,t} = int_s^t A_{s,r} (x) dB_r` by trapezoid sums.
///
/// `qa` and `qb` are the declared variation exponents of the two paths; they
/// are only checked against the Young condition. The result is stored anchored,
/// so `[AB]_{s,t} - [AB]_{s,r} - [AB]_{r,t} = A_{s,r} (x) B_{r,t}` holds exactly
/// and `[AB]_{s,t} + [BA]_{s,t}^T = A_{s,t} (x) B_{s,t}`.
pub fn young_cross(a: &Path, qa: f64, b: &Path, qb: f64) -> Result<TwoIndexMap> {
    check_exponents(qa, qb)?;
    young_cross_unchecked(Arc::new(a.clone()), Arc::new(b.clone()))
}

pub(crate) fn young_cross_unchecked(a: Arc<Path>, b: Arc<Path>) -> Result<TwoIndexMap> {
    if a.len() != b.len() {
        return Err(Error::GridMismatch(format!(
            "crossed integral of paths with {} and {} points",
            a.len(),
            b.len()
        )));
    }
    let (da, db, len) = (a.dim(), b.dim(), a.len());
    let bs = da * db;
    let mut at_zero = vec![0.0; bs * len];
    let a0 = a.point(0);
    for j in 0..len - 1 {
        let (prev, next) = at_zero.split_at_mut((j + 1) * bs);
        let prev = &prev[j * bs..];
        let next = &mut next[..bs];
        let (aj, ak) = (a.point(j), a.point(j + 1));
        let (bj, bk) = (b.point(j), b.point(j + 1));
        for p in 0..da {
            let mid = 0.5 * ((aj[p] - a0[p]) + (ak[p] - a0[p]));
            for q in 0..db {
                next[p * db + q] = prev[p * db + q] + mid * (bk[q] - bj[q]);
            }
        }
    }
    TwoIndexMap::anchored(at_zero, a, b)
}
