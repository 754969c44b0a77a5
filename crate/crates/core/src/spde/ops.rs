//! Periodic finite-difference operators and FFT-based solves on a [`SpaceGrid`].

use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::grid::SpaceGrid;

pub struct PeriodicOps {
    space: SpaceGrid,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    /// Eigenvalues of the second-difference Laplacian, one per Fourier mode.
    fd_symbol: Vec<f64>,
    /// `|2 pi k|^2` per Fourier mode.
    freq_sq: Vec<f64>,
}

impl PeriodicOps {
    pub fn new(space: SpaceGrid) -> Self {
        let n = space.n();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let h = space.dx();
        let axis_fd: Vec<f64> =
            (0..n).map(|k| -4.0 / (h * h) * (PI * k as f64 / n as f64).sin().powi(2)).collect();
        let axis_freq: Vec<f64> = (0..n)
            .map(|k| {
                let f = if k <= n / 2 { k as f64 } else { n as f64 - k as f64 };
                (2.0 * PI * f).powi(2)
            })
            .collect();
        let (fd_symbol, freq_sq) = match space.dim() {
            1 => (axis_fd, axis_freq),
            _ => {
                let mut fd = Vec::with_capacity(n * n);
                let mut fq = Vec::with_capacity(n * n);
                for a in 0..n {
                    for b in 0..n {
                        fd.push(axis_fd[a] + axis_fd[b]);
                        fq.push(axis_freq[a] + axis_freq[b]);
                    }
                }
                (fd, fq)
            }
        };
        Self { space, forward, inverse, fd_symbol, freq_sq }
    }

    pub fn space(&self) -> &SpaceGrid {
        &self.space
    }

    fn transform(&self, buf: &mut [Complex64], inverse: bool) {
        let plan = if inverse { &self.inverse } else { &self.forward };
        let n = self.space.n();
        if self.space.dim() == 1 {
            plan.process(buf);
            return;
        }
        for row in buf.chunks_mut(n) {
            plan.process(row);
        }
        let mut col = vec![Complex64::default(); n];
        for c in 0..n {
            for r in 0..n {
                col[r] = buf[r * n + c];
            }
            plan.process(&mut col);
            for r in 0..n {
                buf[r * n + c] = col[r];
            }
        }
    }

    /// Discrete Fourier coefficients of a real nodal array (unnormalized).
    pub fn spectrum(&self, data: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = data.iter().map(|v| Complex64::new(*v, 0.0)).collect();
        self.transform(&mut buf, false);
        buf
    }

    /// In place `data <- (I - dt Laplacian_h)^{-1} data`.
    pub fn implicit_heat(&self, dt: f64, data: &mut [f64]) {
        let mut buf = self.spectrum(data);
        let scale = 1.0 / self.space.nodes() as f64;
        for (c, lam) in buf.iter_mut().zip(&self.fd_symbol) {
            *c *= scale / (1.0 - dt * lam);
        }
        self.transform(&mut buf, true);
        for (d, c) in data.iter_mut().zip(&buf) {
            *d = c.re;
        }
    }

    /// Second-difference Laplacian (3-point per axis, periodic).
    pub fn laplacian(&self, src: &[f64], dst: &mut [f64]) {
        let n = self.space.n();
        let inv = 1.0 / (self.space.dx() * self.space.dx());
        match self.space.dim() {
            1 => {
                for j in 0..n {
                    let (l, r) = (src[(j + n - 1) % n], src[(j + 1) % n]);
                    dst[j] = (l - 2.0 * src[j] + r) * inv;
                }
            }
            _ => {
                for a in 0..n {
                    for b in 0..n {
                        let at = |i: usize, k: usize| src[(i % n) * n + k % n];
                        dst[a * n + b] = (at(a + n - 1, b) + at(a + 1, b) + at(a, b + n - 1)
                            + at(a, b + 1)
                            - 4.0 * at(a, b))
                            * inv;
                    }
                }
            }
        }
    }

    /// Centered difference along `axis`.
    pub fn gradient(&self, src: &[f64], axis: usize, dst: &mut [f64]) {
        let n = self.space.n();
        let inv = 0.5 / self.space.dx();
        match (self.space.dim(), axis) {
            (1, _) => {
                for j in 0..n {
                    dst[j] = (src[(j + 1) % n] - src[(j + n - 1) % n]) * inv;
                }
            }
            (_, 0) => {
                for a in 0..n {
                    for b in 0..n {
                        dst[a * n + b] = (src[((a + 1) % n) * n + b] - src[((a + n - 1) % n) * n + b]) * inv;
                    }
                }
            }
            _ => {
                for a in 0..n {
                    for b in 0..n {
                        dst[a * n + b] = (src[a * n + (b + 1) % n] - src[a * n + (b + n - 1) % n]) * inv;
                    }
                }
            }
        }
    }

    /// Squared Sobolev norms `(L2, H1, H2)` of a real nodal array, with Fourier
    /// weights `1`, `1 + |xi|^2`, `1 + |xi|^2 + |xi|^4`, `xi = 2 pi k`.
    pub fn sobolev_sq(&self, data: &[f64]) -> [f64; 3] {
        let spec = self.spectrum(data);
        let norm = (self.space.nodes() as f64).powi(2);
        let mut out = [0.0; 3];
        for (c, w) in spec.iter().zip(&self.freq_sq) {
            let p = c.norm_sqr() / norm;
            out[0] += p;
            out[1] += p * (1.0 + w);
            out[2] += p * (1.0 + w + w * w);
        }
        out
    }
}
