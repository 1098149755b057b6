//! Fluid state snapshots in a text and a little-endian binary format.
//!
//! Binary layout: magic `IFEDSNP1`, then `nx`, `ny` as `u64`, then `dx`,
//! `origin[0]`, `origin[1]`, `time` as `f64`, then the x-face, y-face and
//! pressure arrays as `f64`.

use std::io::{BufRead, Read, Write};

use super::{CellField, MacGrid, StaggeredField};
use crate::error::{IfedError, Result};

const MAGIC: &[u8; 8] = b"IFEDSNP1";

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub grid: MacGrid,
    pub time: f64,
    pub velocity: StaggeredField,
    pub pressure: CellField,
}

pub fn write_snapshot_binary(s: &Snapshot, mut w: impl Write) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&(s.grid.nx as u64).to_le_bytes())?;
    w.write_all(&(s.grid.ny as u64).to_le_bytes())?;
    for v in [s.grid.dx, s.grid.origin[0], s.grid.origin[1], s.time] {
        w.write_all(&v.to_le_bytes())?;
    }
    for v in s.velocity.u.iter().chain(&s.velocity.v).chain(&s.pressure.data) {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_snapshot_binary(mut r: impl Read) -> Result<Snapshot> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(IfedError::Parse("not an ifed snapshot".into()));
    }
    let mut b = [0u8; 8];
    let mut next_u64 = |r: &mut dyn Read| -> Result<u64> {
        r.read_exact(&mut b)?;
        Ok(u64::from_le_bytes(b))
    };
    let nx = next_u64(&mut r)? as usize;
    let ny = next_u64(&mut r)? as usize;
    if nx < 2 || ny < 2 || nx.saturating_mul(ny) > 1 << 28 {
        return Err(IfedError::Parse(format!("bad snapshot grid {nx}x{ny}")));
    }
    let mut f = |r: &mut dyn Read| -> Result<f64> { Ok(f64::from_bits(next_u64(r)?)) };
    let dx = f(&mut r)?;
    let origin = [f(&mut r)?, f(&mut r)?];
    let time = f(&mut r)?;
    if !(dx > 0.0) {
        return Err(IfedError::Parse(format!("bad snapshot spacing {dx}")));
    }
    let grid = MacGrid::new(nx, ny, dx, origin);
    let mut read_n = |n: usize| -> Result<Vec<f64>> { (0..n).map(|_| f(&mut r)).collect() };
    let u = read_n(grid.u_len())?;
    let v = read_n(grid.v_len())?;
    let data = read_n(grid.cell_count())?;
    Ok(Snapshot {
        grid,
        time,
        velocity: StaggeredField { u, v },
        pressure: CellField { data },
    })
}

/// Human-readable dump: a header line, then one `kind i j x y value` line
/// per unknown.
pub fn write_snapshot_text(s: &Snapshot, mut w: impl Write) -> Result<()> {
    let g = &s.grid;
    writeln!(
        w,
        "# ifed-snapshot nx={} ny={} dx={:.17e} origin={:.17e},{:.17e} time={:.17e}",
        g.nx, g.ny, g.dx, g.origin[0], g.origin[1], s.time
    )?;
    for j in 0..g.ny {
        for i in 0..=g.nx {
            let x = g.u_position(i, j);
            writeln!(w, "u {i} {j} {:.10e} {:.10e} {:.17e}", x[0], x[1], s.velocity.u[g.u_index(i, j)])?;
        }
    }
    for j in 0..=g.ny {
        for i in 0..g.nx {
            let x = g.v_position(i, j);
            writeln!(w, "v {i} {j} {:.10e} {:.10e} {:.17e}", x[0], x[1], s.velocity.v[g.v_index(i, j)])?;
        }
    }
    for j in 0..g.ny {
        for i in 0..g.nx {
            let x = g.cell_center(i, j);
            writeln!(w, "p {i} {j} {:.10e} {:.10e} {:.17e}", x[0], x[1], s.pressure.data[g.cell_index(i, j)])?;
        }
    }
    Ok(())
}

/// Reads the values of a text snapshot back, given its grid.
pub fn read_snapshot_text(grid: &MacGrid, r: impl BufRead) -> Result<Snapshot> {
    let mut s = Snapshot {
        grid: *grid,
        time: 0.0,
        velocity: StaggeredField::zeros(grid),
        pressure: CellField::zeros(grid),
    };
    for line in r.lines() {
        let line = line?;
        if let Some(rest) = line.strip_prefix("# ifed-snapshot") {
            if let Some(t) = rest.split_whitespace().find_map(|kv| kv.strip_prefix("time=")) {
                s.time = t.parse().map_err(|_| IfedError::Parse(format!("bad time {t}")))?;
            }
            continue;
        }
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 6 {
            continue;
        }
        let bad = || IfedError::Parse(format!("bad snapshot line: {line}"));
        let i: usize = f[1].parse().map_err(|_| bad())?;
        let j: usize = f[2].parse().map_err(|_| bad())?;
        let val: f64 = f[5].parse().map_err(|_| bad())?;
        let slot = match f[0] {
            "u" if i <= grid.nx && j < grid.ny => &mut s.velocity.u[grid.u_index(i, j)],
            "v" if i < grid.nx && j <= grid.ny => &mut s.velocity.v[grid.v_index(i, j)],
            "p" if i < grid.nx && j < grid.ny => &mut s.pressure.data[grid.cell_index(i, j)],
            _ => return Err(bad()),
        };
        *slot = val;
    }
    Ok(s)
}
