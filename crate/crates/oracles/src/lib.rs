//! Independent reference computations for tests.
//!
//! Nothing here depends on the main crate: every value is computed by brute
//! force, direct quadrature or a closed form, so that agreement with the
//! optimized code is evidence rather than tautology.

use std::f64::consts::PI;

/// Largest path length `pvar_bruteforce` accepts.
pub const MAX_BRUTEFORCE_POINTS: usize = 14;

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// Supremum over all partitions by enumerating every subset of interior points.
/// `interval(j, i)` is the size of the interval between points `j < i`.
pub fn partition_sup(
    len: usize,
    p: f64,
    interval: impl Fn(usize, usize) -> f64,
) -> Result<f64, String> {
    if len > MAX_BRUTEFORCE_POINTS {
        return Err(format!(
            "{len} points exceed the brute-force limit of {MAX_BRUTEFORCE_POINTS}"
        ));
    }
    if len < 2 {
        return Err("need at least two points".into());
    }
    if p < 1.0 {
        return Err(format!("exponent {p} < 1"));
    }
    let interior = len - 2;
    let mut best = 0.0_f64;
    for mask in 0u32..(1u32 << interior) {
        let mut prev = 0;
        let mut sum = 0.0;
        for k in 1..len {
            let is_cut = k == len - 1 || mask & (1 << (k - 1)) != 0;
            if is_cut {
                sum += interval(prev, k).powf(p);
                prev = k;
            }
        }
        best = best.max(sum);
    }
    Ok(best.powf(1.0 / p))
}

/// Exact p-variation of `samples` by exhaustive enumeration (at most 14 points).
pub fn pvar_bruteforce(samples: &[Vec<f64>], p: f64) -> Result<f64, String> {
    partition_sup(samples.len(), p, |j, i| euclid(&samples[j], &samples[i]))
}

/// `int_s^t (a(r) - a(s)) db(r)` by trapezoid sums on `n` uniform sub-intervals.
pub fn trapezoid_cross(
    a: impl Fn(f64) -> f64,
    b: impl Fn(f64) -> f64,
    s: f64,
    t: f64,
    n: usize,
) -> f64 {
    let h = (t - s) / n as f64;
    let a0 = a(s);
    (0..n)
        .map(|j| {
            let (r0, r1) = (s + j as f64 * h, s + (j + 1) as f64 * h);
            0.5 * ((a(r0) - a0) + (a(r1) - a0)) * (b(r1) - b(r0))
        })
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Calculus {
    Stratonovich,
    Ito,
}

/// Heat semigroup `e^{t Laplacian}` on the unit circle applied mode by mode to
/// grid samples, using a direct O(N^2) discrete Fourier transform.
pub fn heat_semigroup(u0: &[f64], t: f64) -> Vec<f64> {
    let n = u0.len();
    let mut out = vec![0.0; n];
    for k in 0..n {
        let freq = if k <= n / 2 { k as f64 } else { k as f64 - n as f64 };
        let (mut re, mut im) = (0.0, 0.0);
        for (j, u) in u0.iter().enumerate() {
            let phase = 2.0 * PI * (k * j) as f64 / n as f64;
            re += u * phase.cos();
            im -= u * phase.sin();
        }
        let decay = (-4.0 * PI * PI * freq * freq * t).exp() / n as f64;
        for (j, o) in out.iter_mut().enumerate() {
            let phase = 2.0 * PI * (k * j) as f64 / n as f64;
            *o += decay * (re * phase.cos() - im * phase.sin());
        }
    }
    out
}

/// Closed-form solution of the heat equation driven by spatially constant
/// noise `c dX`: `exp(c X_{0,t}) e^{t Laplacian} u0`, with the extra factor
/// `exp(-c^2 t / 2)` for Ito noise. Refuses non-constant profiles.
pub fn commuting_heat_exact(
    u0: &[f64],
    profile: &[f64],
    x0t: f64,
    t: f64,
    mode: Calculus,
) -> Result<Vec<f64>, String> {
    let c = *profile.first().ok_or("empty profile")?;
    if profile.iter().any(|g| *g != c) {
        return Err("closed form needs a spatially constant profile".into());
    }
    if profile.len() != u0.len() {
        return Err("profile and initial datum sizes differ".into());
    }
    let exponent = match mode {
        Calculus::Stratonovich => c * x0t,
        Calculus::Ito => c * x0t - 0.5 * c * c * t,
    };
    let factor = exponent.exp();
    Ok(heat_semigroup(u0, t).into_iter().map(|v| factor * v).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OdeRhs {
    /// `y' = y (1 - y^2)`.
    CubicReaction,
}

impl OdeRhs {
    fn eval(self, y: f64) -> f64 {
        match self {
            OdeRhs::CubicReaction => y * (1.0 - y * y),
        }
    }
}

/// Classical RK4 with fixed `step`, returning `y` at each requested time
/// (times must be non-decreasing and start at or after 0).
pub fn ode_reference(rhs: OdeRhs, y0: f64, times: &[f64], step: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(times.len());
    let (mut t, mut y) = (0.0_f64, y0);
    for &target in times {
        while t < target {
            let h = step.min(target - t);
            let k1 = rhs.eval(y);
            let k2 = rhs.eval(y + 0.5 * h * k1);
            let k3 = rhs.eval(y + 0.5 * h * k2);
            let k4 = rhs.eval(y + h * k3);
            y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            t = if target - t <= step { target } else { t + h };
        }
        out.push(y);
    }
    out
}

/// Relative L2 distance between two grid functions.
pub fn relative_l2(a: &[f64], reference: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(reference).map(|(x, y)| (x - y).powi(2)).sum();
    let den: f64 = reference.iter().map(|y| y * y).sum();
    (num / den).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bruteforce_examples() {
        let zigzag = vec![vec![0.0], vec![1.0], vec![0.0]];
        assert_eq!(pvar_bruteforce(&zigzag, 1.0).unwrap(), 2.0);
        assert!((pvar_bruteforce(&zigzag, 2.0).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        let unit = vec![vec![0.0], vec![1.0]];
        for p in [1.0, 2.0, 3.7] {
            assert_eq!(pvar_bruteforce(&unit, p).unwrap(), 1.0);
        }
        assert!(pvar_bruteforce(&vec![vec![0.0]; 15], 1.0).is_err());
    }

    #[test]
    fn trapezoid_matches_antiderivatives() {
        let v = trapezoid_cross(|r| r, |r| r * r, 0.0, 1.0, 10_000);
        assert!((v - 2.0 / 3.0).abs() < 1e-8);
        let v = trapezoid_cross(|r| r, |r| r, 0.0, 1.0, 3);
        assert!((v - 0.5).abs() < 1e-15);
    }

    #[test]
    fn heat_closed_forms() {
        let n = 32;
        let u0: Vec<f64> = (0..n).map(|j| (2.0 * PI * j as f64 / n as f64).sin()).collect();
        let t = 0.01;
        let pure = heat_semigroup(&u0, t);
        let amp = (-4.0 * PI * PI * t).exp();
        for (p, u) in pure.iter().zip(&u0) {
            assert!((p - amp * u).abs() < 1e-12);
        }
        let ones = vec![1.0; n];
        let s = commuting_heat_exact(&u0, &ones, 0.3, t, Calculus::Stratonovich).unwrap();
        let i = commuting_heat_exact(&u0, &ones, 0.3, t, Calculus::Ito).unwrap();
        let gap = (s[3] / i[3]).ln();
        assert!((gap - 0.5 * t).abs() < 1e-12);
        let zero = commuting_heat_exact(&u0, &vec![0.0; n], 0.3, t, Calculus::Ito).unwrap();
        assert!((zero[5] - pure[5]).abs() < 1e-15);
        let mut bumpy = ones.clone();
        bumpy[2] = 2.0;
        assert!(commuting_heat_exact(&u0, &bumpy, 0.3, t, Calculus::Ito).is_err());
    }

    #[test]
    fn ode_fixed_points_and_step_halving() {
        assert_eq!(ode_reference(OdeRhs::CubicReaction, 1.0, &[1.0], 1e-3), vec![1.0]);
        assert_eq!(ode_reference(OdeRhs::CubicReaction, 0.0, &[1.0], 1e-3), vec![0.0]);
        let a = ode_reference(OdeRhs::CubicReaction, 0.5, &[1.0], 1e-4)[0];
        let b = ode_reference(OdeRhs::CubicReaction, 0.5, &[1.0], 5e-5)[0];
        assert!((a - b).abs() < 1e-9);
        // Closed form y(t) = y0 e^t / sqrt(1 + y0^2 (e^{2t} - 1)).
        let e = 1f64.exp();
        let exact = 0.5 * e / (1.0 + 0.25 * (e * e - 1.0)).sqrt();
        assert!((a - exact).abs() < 1e-12);
    }
}
