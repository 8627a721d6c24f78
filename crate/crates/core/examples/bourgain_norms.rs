//! X^{b,s} norms of a time-localized free wave for a few exponents, next
//! to the two quantities the norm is equivalent to.
//!
//! `cargo run --release --example bourgain_norms`

use dkdv::bourgain::{xbs_equivalent_parts, xbs_norm_any, SpaceTimeGrid};
use dkdv::evolution::free_evolution;
use dkdv::spectral::{sobolev_norm, Field, Grid1D};

fn main() -> dkdv::Result<()> {
    let alpha = 0.75;
    let grid = Grid1D::new(128, 16.0 * std::f64::consts::PI)?;
    let st = SpaceTimeGrid::new(grid, 256, 4.0)?;
    let phi = Field::from_fn(grid, |x| (-x * x / 2.0).exp() * (3.0 * x).cos());
    let wave = free_evolution(&phi, st, alpha);

    println!(
        "alpha = {alpha}, |phi|_L2 = {:.5}",
        sobolev_norm(&phi.forward(), 0.0)
    );
    println!(
        "{:>6} {:>6} {:>12} {:>12} {:>12}",
        "b", "s", "X^{b,s}", "free part", "smooth part"
    );
    for b in [0.0, 0.25, 0.5] {
        for s in [-0.5, 0.0] {
            let norm = xbs_norm_any(&wave, b, s, alpha);
            let (free, smooth) = xbs_equivalent_parts(&wave, b, s, alpha);
            println!("{b:6.2} {s:6.2} {norm:12.5} {free:12.5} {smooth:12.5}");
        }
    }
    Ok(())
}
