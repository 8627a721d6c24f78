//! Solves the Duhamel formulation by Picard iteration and compares the
//! fixed point with the direct integrator.
//!
//! `cargo run --release --example picard -- [size in H^-1/2]`

use dkdv::evolution::{picard_direct_difference, picard_solve, PicardConfig};
use dkdv::spectral::{sobolev_norm, Field, Grid1D, ModelParams};

fn main() -> dkdv::Result<()> {
    let size: f64 = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(0.1);
    let params = ModelParams::new(1.0, -0.5)?;
    let grid = Grid1D::new(256, 32.0 * std::f64::consts::PI)?;
    let shape = Field::from_fn(grid, |x| (-x * x / 4.0).exp());
    let scale = size / sobolev_norm(&shape.forward(), -0.5);
    let u0 = Field::from_fn(grid, |x| scale * (-x * x / 4.0).exp());

    let cfg = PicardConfig::default();
    let out = picard_solve(&u0, &cfg, &params)?;
    println!(
        "gamma = {:.4}, quadrature defect = {:.2e}",
        out.gamma, out.quadrature_defect
    );
    for (k, inc) in out.increments.iter().enumerate() {
        let r = if k == 0 {
            String::new()
        } else {
            format!("  r = {:.4}", out.ratios[k - 1])
        };
        println!("k = {k:2}  |u^(k+1) - u^k|_Z = {inc:.3e}{r}");
    }
    let diff = picard_direct_difference(&u0, &out, &cfg, &params)?;
    println!("max L2 distance to ETD-RK4 on [0, T/2]: {diff:.3e}");
    Ok(())
}
