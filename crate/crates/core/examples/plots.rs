//! Writes SVG charts of a sharpness sweep and an H^s decay history.
//!
//! `cargo run --release --example plots -- [output dir]`

use std::path::PathBuf;

use dkdv::bilinear::sharpness_sweep;
use dkdv::evolution::{decay_diagnostic, solve_ivp};
use dkdv::harness::{emit_plot, PlotData};
use dkdv::spectral::{Field, Grid1D, ModelParams};

fn main() -> dkdv::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "plots".into()));
    let n1 = [16.0, 32.0, 64.0, 128.0, 256.0];
    let rep = sharpness_sweep(-0.9, 0.25, &n1, &ModelParams::default())?;
    emit_plot(PlotData::Sweep(&rep), &dir.join("sweep.svg"), None)?;

    let grid = Grid1D::new(256, 32.0 * std::f64::consts::PI)?;
    let u0 = Field::from_fn(grid, |x| 2.0 / (x / 2.0).cosh().powi(2));
    let traj = solve_ivp(&u0, 2.0, 1e-3, &ModelParams::new(0.5, -0.5)?, 20)?;
    let decay = decay_diagnostic(&traj, -0.5);
    emit_plot(
        PlotData::Decay {
            label: "H^-1/2 norm",
            times: &decay.times,
            values: &decay.norms,
        },
        &dir.join("decay.svg"),
        None,
    )?;
    println!("wrote {0}/sweep.svg and {0}/decay.svg", dir.display());
    Ok(())
}
