//! Integrates a sech² bump with ETD-RK4 and prints the norm history.
//!
//! `cargo run --release --example solve -- [alpha] [T]`

use dkdv::evolution::{decay_diagnostic, solve_ivp};
use dkdv::spectral::{sobolev_norm, Field, Grid1D, ModelParams};

fn main() -> dkdv::Result<()> {
    let mut args = std::env::args().skip(1);
    let alpha: f64 = args.next().and_then(|a| a.parse().ok()).unwrap_or(0.5);
    let t_final: f64 = args.next().and_then(|a| a.parse().ok()).unwrap_or(2.0);
    let params = ModelParams::new(alpha, -0.5)?;
    let grid = Grid1D::new(512, 64.0 * std::f64::consts::PI)?;
    let u0 = Field::from_fn(grid, |x| 3.0 / (x / 2.0).cosh().powi(2));

    let traj = solve_ivp(&u0, t_final, 1e-3, &params, 100)?;
    let decay = decay_diagnostic(&traj, -0.5);
    println!("{:>8} {:>14} {:>14} {:>14}", "t", "L2", "H^-1/2", "mean");
    for (t, state) in traj.times.iter().zip(&traj.states) {
        println!(
            "{t:8.3} {:14.8e} {:14.8e} {:14.8e}",
            sobolev_norm(state, 0.0),
            sobolev_norm(state, -0.5),
            state.mean()
        );
    }
    println!("H^-1/2 nonincreasing: {}", decay.nonincreasing);
    Ok(())
}
