//! Run records and artifact files. Every CSV starts with a `#` line carrying
//! the config hash; JSON records and SVG plots embed it as well.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;

/// SHA-256 of the TOML form of the config, ignoring the output directory.
pub fn config_hash(cfg: &ExperimentConfig) -> String {
    hex::encode(Sha256::digest(cfg.hash_view().to_toml().as_bytes()))
}

#[derive(Debug, Serialize)]
pub struct Summary {
    pub passed: bool,
    /// Identifiers of the cells or checks that failed.
    pub failures: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct RunRecord {
    pub tool: &'static str,
    pub version: &'static str,
    pub experiment: &'static str,
    pub config_hash: String,
    pub config: ExperimentConfig,
    pub wall_clock_seconds: f64,
    pub cells: serde_json::Value,
    pub summary: Summary,
}

pub struct ArtifactDir {
    dir: PathBuf,
    hash: String,
}

impl ArtifactDir {
    pub fn create(dir: PathBuf, hash: String) -> io::Result<Self> {
        fs::create_dir_all(&dir)?;
        Ok(Self { dir, hash })
    }

    pub fn path(&self) -> &Path {
        &self.dir
    }

    pub fn sub(&self, name: &str) -> io::Result<Self> {
        Self::create(self.dir.join(name), self.hash.clone())
    }

    /// Writes `name` with a leading `# config-sha256` comment line.
    pub fn csv(&self, name: &str, body: impl FnOnce(&mut Vec<u8>) -> io::Result<()>) -> io::Result<()> {
        let mut buf = format!("# config-sha256 {}\n", self.hash).into_bytes();
        body(&mut buf)?;
        fs::write(self.dir.join(name), buf)
    }

    pub fn text(&self, name: &str, text: &str) -> io::Result<()> {
        fs::write(self.dir.join(name), text)
    }

    /// Writes `value` as JSON; objects gain a `config_hash` field if they lack one.
    pub fn json<T: Serialize>(&self, name: &str, value: &T) -> io::Result<()> {
        let mut v = serde_json::to_value(value).map_err(io::Error::other)?;
        if let Some(map) = v.as_object_mut() {
            map.entry("config_hash").or_insert_with(|| self.hash.clone().into());
        }
        let text = serde_json::to_string_pretty(&v).map_err(io::Error::other)?;
        fs::write(self.dir.join(name), text + "\n")
    }

    pub fn svg(&self, name: &str, plot: &Plot) -> io::Result<()> {
        fs::write(self.dir.join(name), plot.render(&self.hash))
    }
}

/// A line plot of one or more series, optionally on log-log axes.
pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log: bool,
    pub series: Vec<(String, Vec<(f64, f64)>)>,
}

const COLOURS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

impl Plot {
    fn render(&self, hash: &str) -> String {
        let (w, h, m) = (640.0, 420.0, 60.0);
        let tf = |v: f64| if self.log { v.log10() } else { v };
        let pts: Vec<(f64, f64)> = self
            .series
            .iter()
            .flat_map(|(_, s)| s.iter().map(|(x, y)| (tf(*x), tf(*y))))
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .collect();
        let mut out = String::new();
        let _ = writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}">"#);
        let _ = writeln!(out, "<!-- config-sha256 {hash} -->");
        let _ = writeln!(out, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
        let _ = writeln!(out, r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#, w / 2.0, self.title);
        if pts.is_empty() {
            out.push_str("</svg>\n");
            return out;
        }
        let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
        for (x, y) in &pts {
            x0 = x0.min(*x);
            x1 = x1.max(*x);
            y0 = y0.min(*y);
            y1 = y1.max(*y);
        }
        let span = |a: f64, b: f64| if b > a { b - a } else { 1.0 };
        let (sx, sy) = (span(x0, x1), span(y0, y1));
        let px = |x: f64| m + (x - x0) / sx * (w - 2.0 * m);
        let py = |y: f64| h - m - (y - y0) / sy * (h - 2.0 * m);
        let _ = writeln!(
            out,
            r#"<rect x="{m}" y="{m}" width="{}" height="{}" fill="none" stroke="black"/>"#,
            w - 2.0 * m,
            h - 2.0 * m
        );
        let axis = |lo: f64, hi: f64| {
            if self.log {
                format!("10^{lo:.2} .. 10^{hi:.2}")
            } else {
                format!("{lo:.3e} .. {hi:.3e}")
            }
        };
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="middle" font-size="12">{} [{}]</text>"#,
            w / 2.0,
            h - 20.0,
            self.x_label,
            axis(x0, x1)
        );
        let _ = writeln!(
            out,
            r#"<text x="16" y="{}" font-size="12" transform="rotate(-90 16 {})" text-anchor="middle">{} [{}]</text>"#,
            h / 2.0,
            h / 2.0,
            self.y_label,
            axis(y0, y1)
        );
        for (i, (name, s)) in self.series.iter().enumerate() {
            let colour = COLOURS[i % COLOURS.len()];
            let line: Vec<String> = s
                .iter()
                .map(|(x, y)| (tf(*x), tf(*y)))
                .filter(|(x, y)| x.is_finite() && y.is_finite())
                .map(|(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
                .collect();
            let _ = writeln!(out, r#"<polyline fill="none" stroke="{colour}" stroke-width="2" points="{}"/>"#, line.join(" "));
            let _ = writeln!(
                out,
                r#"<text x="{}" y="{}" font-size="12" fill="{colour}">{name}</text>"#,
                m + 10.0,
                m + 16.0 * (i as f64 + 1.0)
            );
        }
        out.push_str("</svg>\n");
        out
    }
}
