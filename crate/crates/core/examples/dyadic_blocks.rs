//! Compares the measured extremizer value of each (+-) block with the
//! dyadic bound and prints the table as CSV.
//!
//! `cargo run --release --example dyadic_blocks -- [largest N]`

use dkdv::bilinear::{block_table_csv, BlockRow};
use dkdv::harness::{block_family, BlocksSection};

fn main() -> dkdv::Result<()> {
    let n_high_max = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(128.0);
    let section = BlocksSection {
        n_high_max,
        ..BlocksSection::default()
    };
    let rows = block_family(&section)?
        .into_iter()
        .map(BlockRow::measure)
        .collect::<dkdv::Result<Vec<_>>>()?;
    block_table_csv(&rows, std::io::stdout().lock())?;
    let lo = rows.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
    let hi = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    eprintln!(
        "{} blocks, measured/bound in [{lo:.4}, {hi:.4}]",
        rows.len()
    );
    Ok(())
}
