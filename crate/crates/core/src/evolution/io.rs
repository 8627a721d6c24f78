//! Trajectory export: CSV summaries and binary state snapshots.
//!
//! Snapshot layout, all little-endian: `n_points: u64`, `L: f64`,
//! `α: f64`, then `n_points` real samples `u(x_j)` as `f64`.

use std::io::{Read, Write};

use super::Trajectory;
use crate::error::{Error, Result};
use crate::spectral::{sobolev_norm, Field, Grid1D};

/// Header of a binary snapshot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnapshotHeader {
    pub n_points: u64,
    pub domain_length: f64,
    pub alpha: f64,
}

/// Writes `t, l2, h_s, mean` rows, one per recorded state.
pub fn write_trajectory_csv(traj: &Trajectory, s_probe: f64, mut out: impl Write) -> Result<()> {
    writeln!(out, "t,l2,h_s,mean")?;
    for (t, state) in traj.times.iter().zip(&traj.states) {
        writeln!(
            out,
            "{:e},{:e},{:e},{:e}",
            t,
            sobolev_norm(state, 0.0),
            sobolev_norm(state, s_probe),
            state.mean()
        )?;
    }
    Ok(())
}

pub fn write_snapshot(u: &Field, alpha: f64, mut out: impl Write) -> Result<()> {
    out.write_all(&(u.grid.n_points() as u64).to_le_bytes())?;
    out.write_all(&u.grid.domain_length().to_le_bytes())?;
    out.write_all(&alpha.to_le_bytes())?;
    for v in &u.values {
        out.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_snapshot(mut input: impl Read) -> Result<(SnapshotHeader, Field)> {
    let mut word = [0u8; 8];
    let mut next = |input: &mut dyn Read| -> Result<[u8; 8]> {
        input.read_exact(&mut word)?;
        Ok(word)
    };
    let n_points = u64::from_le_bytes(next(&mut input)?);
    let domain_length = f64::from_le_bytes(next(&mut input)?);
    let alpha = f64::from_le_bytes(next(&mut input)?);
    let n = usize::try_from(n_points)
        .map_err(|_| Error::InvalidGrid(format!("snapshot claims {n_points} points")))?;
    let grid = Grid1D::new(n, domain_length)?;
    let mut values = Vec::with_capacity(n);
    for _ in 0..n {
        values.push(f64::from_le_bytes(next(&mut input)?));
    }
    Ok((
        SnapshotHeader {
            n_points,
            domain_length,
            alpha,
        },
        Field::new(grid, values)?,
    ))
}
