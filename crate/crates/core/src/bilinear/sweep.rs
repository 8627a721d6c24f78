//! Sharpness sweeps: the weighted block ratio along the critical family
//! `N₃ ≪ N₁ ∼ N₂`, `L₃ ∼ N₃N₁²`, `L₁ ∼ L₂`, fitted on a log-log scale.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::blocks::{dyadic_round, DyadicBlock};
use super::trilinear::block_lower_bound_slab;
use crate::error::{Error, Result};
use crate::spectral::ModelParams;

/// Fitted slopes above this count as growth.
pub const DIVERGENCE_THRESHOLD: f64 = 0.05;

/// Largest high frequency a sweep will assemble.
pub const MAX_N1: f64 = 256.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Bounded,
    Divergent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub s: f64,
    pub alpha: f64,
    pub delta: f64,
    pub n1_values: Vec<f64>,
    pub ratios: Vec<f64>,
    pub fitted_slope: f64,
    pub slope_stderr: f64,
    pub predicted_slope: f64,
    pub verdict: Verdict,
}

impl SweepReport {
    /// Columns `N1,ratio,log2N1,logratio`, both logarithms base 2.
    pub fn write_csv(&self, mut out: impl Write) -> Result<()> {
        writeln!(out, "N1,ratio,log2N1,logratio")?;
        for (n, r) in self.n1_values.iter().zip(&self.ratios) {
            writeln!(out, "{},{:e},{:e},{:e}", n, r, n.log2(), r.log2())?;
        }
        Ok(())
    }
}

/// Growth exponent of the weighted ratio in `N₁` at `δ = 0`.
pub fn predicted_slope(s: f64, alpha: f64) -> f64 {
    if alpha <= 0.5 {
        -2.0 * s - 1.5
    } else {
        -2.0 * s - 1.25 - alpha / 2.0 + (alpha - 0.5) * (s + 0.5)
    }
}

/// Extremizer block for high frequency `N₁`: low frequency
/// `N₃ = 1` (`α ≤ 1/2`) or `N₁^{α-1/2}`, input modulations `N₁` or
/// `N₁^{2α}`, output modulation `2N₃N₁²`; all rounded to powers of two.
/// The low wave sits in the first slot.
pub fn sweep_block(n1: f64, alpha: f64) -> Result<DyadicBlock> {
    let (low, l) = if alpha <= 0.5 {
        (1.0, n1)
    } else {
        (
            dyadic_round(n1.powf(alpha - 0.5)),
            dyadic_round(n1.powf(2.0 * alpha)),
        )
    };
    DyadicBlock::new([low, n1, n1], [2.0 * low * n1 * n1, l, l])
}

/// Least-squares slope of `y` on `x` and its standard error.
fn fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    if x.len() < 3 {
        return (slope, 0.0);
    }
    let rss: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - my - slope * (a - mx)).powi(2))
        .sum();
    (slope, (rss / (n - 2.0) / sxx).sqrt())
}

/// Weighted ratio
/// `N₃^{1+s} N₁^{-2s} B / (max(N₃N₁², N₃^{2α})^{1/2-δ} max(L₁, N₁^{2α})^{1/2} max(L₂, N₂^{2α})^{1/2})`
/// with `B` the measured block lower bound; `L₁, L₂` are the two input modulations.
fn weighted_ratio(block: &DyadicBlock, s: f64, alpha: f64, delta: f64) -> Result<f64> {
    let (low, high) = (block.n1, block.n2);
    let lb = block_lower_bound_slab(block)?;
    let out = (low * high * high)
        .max(low.powf(2.0 * alpha))
        .powf(0.5 - delta);
    let dissip = high.powf(2.0 * alpha);
    let ins = block.l2.max(dissip).sqrt() * block.l3.max(dissip).sqrt();
    Ok(low.powf(1.0 + s) * high.powf(-2.0 * s) * lb / (out * ins))
}

/// Evaluates the weighted ratio for every admissible `N₁` in `n1_list`
/// and classifies the fitted growth. `N₁` values with `N₁ < 4N₃` or
/// `N₁ > 256` are skipped; fewer than three remaining points is an error.
pub fn sharpness_sweep(
    s: f64,
    alpha: f64,
    n1_list: &[f64],
    params: &ModelParams,
) -> Result<SweepReport> {
    super::s_alpha(alpha)?;
    let p = ModelParams {
        alpha,
        s,
        ..*params
    };
    p.validate()?;
    if n1_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::param("n1_list", "must be strictly increasing"));
    }
    let mut blocks = Vec::new();
    for &n1 in n1_list {
        let b = sweep_block(n1, alpha)?;
        if n1 >= 4.0 * b.n1 && n1 <= MAX_N1 {
            blocks.push(b);
        }
    }
    if blocks.len() < 3 {
        return Err(Error::Insufficient(format!(
            "only {} resolvable N1 values (need 3)",
            blocks.len()
        )));
    }
    let ratios = blocks
        .par_iter()
        .map(|b| weighted_ratio(b, s, alpha, p.delta))
        .collect::<Result<Vec<f64>>>()?;
    let n1_values: Vec<f64> = blocks.iter().map(|b| b.n2).collect();
    let x: Vec<f64> = n1_values.iter().map(|n| n.ln()).collect();
    let y: Vec<f64> = ratios.iter().map(|r| r.ln()).collect();
    let (fitted_slope, slope_stderr) = fit(&x, &y);
    Ok(SweepReport {
        s,
        alpha,
        delta: p.delta,
        n1_values,
        ratios,
        fitted_slope,
        slope_stderr,
        predicted_slope: predicted_slope(s, alpha),
        verdict: if fitted_slope > DIVERGENCE_THRESHOLD {
            Verdict::Divergent
        } else {
            Verdict::Bounded
        },
    })
}
