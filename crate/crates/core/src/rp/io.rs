//! Lift serialization.
//!
//! CSV layout: optional `#` comment lines, a header record
//! `d,n,p,geometric,seed,refinement,uniform`, its values, a column-name record
//! `t,X1..Xd,XX11..XXdd`, then one row per grid point with level 1 and the
//! row-major level 2 anchored at time 0. Floats use Rust's shortest
//! round-trip formatting, so reading back reproduces every bit.
//!
//! Binary layout (little endian): magic `RCLTLIFT`, `u32` version 1, `u64` d,
//! `u64` n, `f64` p, `u8` geometric, `u8` uniform, `u8` has-seed, `u64` seed,
//! `u64` refinement, then the same rows as the CSV body as `f64`.

use std::io::{BufRead, Read, Write};

use super::{Path, PathLift};
use crate::error::{Error, Result};
use crate::grid::TimeGrid;

const MAGIC: &[u8; 8] = b"RCLTLIFT";
const HEADER: &str = "d,n,p,geometric,seed,refinement,uniform";

fn format_err(msg: impl Into<String>) -> Error {
    Error::Format(msg.into())
}

fn rows(lift: &PathLift) -> Result<Vec<Vec<f64>>> {
    if !lift.level2().is_anchored() {
        return Err(format_err("only anchored lifts can be serialized"));
    }
    let d = lift.dim();
    let at_zero = lift.level2().values_at_zero();
    Ok(lift
        .grid()
        .points()
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let mut row = Vec::with_capacity(1 + d + d * d);
            row.push(*t);
            row.extend_from_slice(lift.level1().point(i));
            row.extend_from_slice(&at_zero[i * d * d..(i + 1) * d * d]);
            row
        })
        .collect())
}

fn assemble(
    d: usize,
    p: f64,
    geometric: bool,
    uniform: bool,
    seed: Option<u64>,
    refinement: usize,
    rows: Vec<Vec<f64>>,
) -> Result<PathLift> {
    let times: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    let grid = TimeGrid::from_points(times)?.flagged_uniform(uniform);
    let mut level1 = Vec::with_capacity(d * rows.len());
    let mut level2 = Vec::with_capacity(d * d * rows.len());
    for r in &rows {
        level1.extend_from_slice(&r[1..1 + d]);
        level2.extend_from_slice(&r[1 + d..]);
    }
    Ok(PathLift::from_anchored(grid, &Path::new(d, level1)?, level2, p, geometric)?
        .with_provenance(seed, refinement))
}

pub fn write_lift_csv<W: Write>(lift: &PathLift, mut w: W) -> Result<()> {
    let d = lift.dim();
    writeln!(w, "{HEADER}")?;
    let seed = lift.seed().map_or("-".to_string(), |s| s.to_string());
    writeln!(
        w,
        "{d},{},{},{},{seed},{},{}",
        lift.grid().steps(),
        lift.p(),
        lift.is_geometric(),
        lift.refinement(),
        lift.grid().is_uniform()
    )?;
    let mut names = vec!["t".to_string()];
    names.extend((1..=d).map(|i| format!("X{i}")));
    for i in 1..=d {
        names.extend((1..=d).map(|j| format!("XX{i}{j}")));
    }
    writeln!(w, "{}", names.join(","))?;
    for row in rows(lift)? {
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        writeln!(w, "{}", cells.join(","))?;
    }
    Ok(())
}

fn parse<T: std::str::FromStr>(field: &str, what: &str) -> Result<T> {
    field.trim().parse().map_err(|_| format_err(format!("cannot parse {what} from {field:?}")))
}

pub fn read_lift_csv<R: BufRead>(r: R) -> Result<PathLift> {
    let mut lines = r.lines().filter(|l| !matches!(l, Ok(s) if s.starts_with('#') || s.is_empty()));
    let mut next = || -> Result<String> {
        lines.next().ok_or_else(|| format_err("unexpected end of lift file"))?.map_err(Error::from)
    };
    if next()? != HEADER {
        return Err(format_err("missing lift header"));
    }
    let meta = next()?;
    let f: Vec<&str> = meta.split(',').collect();
    if f.len() != 7 {
        return Err(format_err("lift header needs 7 fields"));
    }
    let d: usize = parse(f[0], "d")?;
    let n: usize = parse(f[1], "n")?;
    let p: f64 = parse(f[2], "p")?;
    let geometric: bool = parse(f[3], "geometric")?;
    let seed = if f[4].trim() == "-" { None } else { Some(parse(f[4], "seed")?) };
    let refinement: usize = parse(f[5], "refinement")?;
    let uniform: bool = parse(f[6], "uniform")?;
    next()?;
    let width = 1 + d + d * d;
    let mut rows = Vec::with_capacity(n + 1);
    for _ in 0..=n {
        let line = next()?;
        let row = line.split(',').map(|c| parse::<f64>(c, "value")).collect::<Result<Vec<_>>>()?;
        if row.len() != width {
            return Err(format_err(format!("row has {} values, expected {width}", row.len())));
        }
        rows.push(row);
    }
    assemble(d, p, geometric, uniform, seed, refinement, rows)
}

pub fn write_lift_binary<W: Write>(lift: &PathLift, mut w: W) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&1u32.to_le_bytes())?;
    w.write_all(&(lift.dim() as u64).to_le_bytes())?;
    w.write_all(&(lift.grid().steps() as u64).to_le_bytes())?;
    w.write_all(&lift.p().to_le_bytes())?;
    w.write_all(&[
        lift.is_geometric() as u8,
        lift.grid().is_uniform() as u8,
        lift.seed().is_some() as u8,
    ])?;
    w.write_all(&lift.seed().unwrap_or(0).to_le_bytes())?;
    w.write_all(&(lift.refinement() as u64).to_le_bytes())?;
    for row in rows(lift)? {
        for v in row {
            w.write_all(&v.to_le_bytes())?;
        }
    }
    Ok(())
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    Ok(f64::from_bits(read_u64(r)?))
}

pub fn read_lift_binary<R: Read>(mut r: R) -> Result<PathLift> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(format_err("not a lift file"));
    }
    let mut version = [0u8; 4];
    r.read_exact(&mut version)?;
    if u32::from_le_bytes(version) != 1 {
        return Err(format_err("unsupported lift file version"));
    }
    let d = read_u64(&mut r)? as usize;
    let n = read_u64(&mut r)? as usize;
    let p = read_f64(&mut r)?;
    let mut flags = [0u8; 3];
    r.read_exact(&mut flags)?;
    let seed = read_u64(&mut r)?;
    let refinement = read_u64(&mut r)? as usize;
    let width = 1 + d + d * d;
    let mut rows = Vec::with_capacity(n + 1);
    for _ in 0..=n {
        rows.push((0..width).map(|_| read_f64(&mut r)).collect::<Result<Vec<_>>>()?);
    }
    let seed = (flags[2] != 0).then_some(seed);
    assemble(d, p, flags[0] != 0, flags[1] != 0, seed, refinement, rows)
}
