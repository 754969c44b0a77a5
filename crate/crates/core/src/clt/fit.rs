use serde::Serialize;
use statrs::distribution::{ContinuousCDF, StudentsT};

/// Least-squares line through `(log x, log y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogLogFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root mean square of the residuals in log space.
    pub residual: f64,
    /// Standard error of the slope; `None` with only two points.
    pub slope_stderr: Option<f64>,
    /// Two-sided 95% Student-t interval for the slope.
    pub slope_ci95: Option<(f64, f64)>,
    pub points: usize,
}

/// Fits `log y = slope log x + intercept`. Needs at least two points with
/// positive coordinates and distinct `x`.
pub fn fit_loglog(x: &[f64], y: &[f64]) -> Option<LogLogFit> {
    let pts: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter(|(a, b)| **a > 0.0 && **b > 0.0 && a.is_finite() && b.is_finite())
        .map(|(a, b)| (a.ln(), b.ln()))
        .collect();
    let n = pts.len();
    if n < 2 {
        return None;
    }
    let nf = n as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let residual = (sse / nf).sqrt();
    let (slope_stderr, slope_ci95) = if n > 2 {
        let se = (sse / (nf - 2.0) / sxx).sqrt();
        let t = StudentsT::new(0.0, 1.0, nf - 2.0).map(|d| d.inverse_cdf(0.975)).ok();
        (Some(se), t.map(|t| (slope - t * se, slope + t * se)))
    } else {
        (None, None)
    };
    Some(LogLogFit { slope, intercept, residual, slope_stderr, slope_ci95, points: n })
}
