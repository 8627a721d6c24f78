//! Runs every linear-estimate check and prints the verdicts as JSON lines.
//!
//! `cargo run --release --example lemma_suite -- [trials] [seed]`

use dkdv::bourgain::{lemma_check, LemmaKind};
use dkdv::spectral::ModelParams;

fn main() -> dkdv::Result<()> {
    let mut args = std::env::args().skip(1);
    let trials = args.next().and_then(|a| a.parse().ok()).unwrap_or(10);
    let seed = args.next().and_then(|a| a.parse().ok()).unwrap_or(7);
    let params = ModelParams::new(1.0, -0.9)?;
    for kind in LemmaKind::ALL {
        let start = std::time::Instant::now();
        let verdict = lemma_check(kind, trials, &params, seed)?;
        println!(
            "{}  ({:.2?})",
            serde_json::to_string(&verdict)?,
            start.elapsed()
        );
    }
    Ok(())
}
