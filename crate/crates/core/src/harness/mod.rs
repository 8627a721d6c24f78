//! Batch driver behind the `dkdv` binary: loads a configuration, runs one
//! experiment and persists its artifacts under `<out>/<subcommand>/`.
//!
//! Exit status is 0 on success, 2 when inputs fail validation and 3 when
//! the numerics fail (blow-up, non-convergence, dissipation violated). On
//! failure an `error.json` report is written next to the outputs.

mod config;
mod output;
mod plot;

pub use config::{
    load_config, random_field, BlocksSection, ExperimentConfig, GridSection, InitialData,
    IoSection, RunSection, SweepSection, VerifySection, DEFAULTS_HELP,
};
pub use output::{write_atomic, write_json_atomic, Manifest, RunDir, MANIFEST};
pub use plot::{data_csv, emit_plot, render_svg, PlotData, LOG_FLOOR};

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use log::{info, warn};
use rayon::prelude::*;
use serde::Serialize;

use crate::bilinear::{block_table_csv, sharpness_sweep, BlockRow, DyadicBlock, SweepReport};
use crate::bourgain::{lemma_check_with, LemmaKind};
use crate::error::{Error, Result};
use crate::evolution::{
    decay_diagnostic, picard_direct_difference, picard_solve, solve_ivp, write_snapshot,
    write_trajectory_csv, QUADRATURE_WARNING,
};
use crate::spectral::sobolev_norm;

/// Experiments the driver can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Subcommand {
    Solve,
    Picard,
    Decay,
    BilinearSweep,
    Blocks,
    Verify,
}

impl Subcommand {
    pub const ALL: [Subcommand; 6] = [
        Subcommand::Solve,
        Subcommand::Picard,
        Subcommand::Decay,
        Subcommand::BilinearSweep,
        Subcommand::Blocks,
        Subcommand::Verify,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Subcommand::Solve => "solve",
            Subcommand::Picard => "picard",
            Subcommand::Decay => "decay",
            Subcommand::BilinearSweep => "bilinear-sweep",
            Subcommand::Blocks => "blocks",
            Subcommand::Verify => "verify",
        }
    }

    /// Whether `--jobs` applies.
    fn fans_out(self) -> bool {
        matches!(
            self,
            Subcommand::BilinearSweep | Subcommand::Blocks | Subcommand::Verify
        )
    }
}

impl fmt::Display for Subcommand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Subcommand {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Subcommand::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::param("subcommand", format!("unknown subcommand `{s}`")))
    }
}

/// Command-line overrides applied on top of the configuration file.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub jobs: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub resume: bool,
}

/// Outcome of [`run_subcommand`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RunStatus {
    Completed {
        files: Vec<String>,
    },
    /// `--resume` found a finished run with the same configuration.
    Skipped,
}

/// Exit status for a result: 0, 2 (validation) or 3 (numerical failure).
pub fn exit_code(result: &Result<RunStatus>) -> u8 {
    match result {
        Ok(_) => 0,
        Err(e) if e.is_numerical() => 3,
        Err(_) => 2,
    }
}

#[derive(Debug, Serialize)]
struct ErrorReport<'a> {
    subcommand: &'a str,
    exit_code: u8,
    kind: &'static str,
    message: String,
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::InvalidGrid(_) => "invalid_grid",
        Error::InvalidParameter { .. } => "invalid_parameter",
        Error::ShapeMismatch(_) => "shape_mismatch",
        Error::Hypothesis(_) => "hypothesis",
        Error::UnderResolved { .. } => "under_resolved",
        Error::ZeroDenominator(_) => "zero_denominator",
        Error::Insufficient(_) => "insufficient",
        Error::Stability { .. } => "stability",
        Error::BlowUp { .. } => "blow_up",
        Error::NonConvergence { .. } => "non_convergence",
        Error::Config { .. } => "config",
        Error::Io(_) => "io",
        Error::Json(_) => "json",
    }
}

/// Output root: `DKDV_OUT`, then `--out`, then `io.out`.
pub fn output_root(cfg: &ExperimentConfig, opts: &RunOptions) -> PathBuf {
    if let Some(env) = std::env::var_os("DKDV_OUT").filter(|v| !v.is_empty()) {
        return PathBuf::from(env);
    }
    opts.out.clone().unwrap_or_else(|| cfg.io.out.clone())
}

/// Loads `config_path`, runs `sub` and writes `error.json` on failure.
pub fn run_from_path(sub: Subcommand, config_path: &Path, opts: &RunOptions) -> Result<RunStatus> {
    let cfg = match load_config(config_path) {
        Ok(c) => c,
        Err(e) => {
            let root = output_root(&ExperimentConfig::default(), opts);
            report_error(sub, &root.join(sub.name()), &e);
            return Err(e);
        }
    };
    let dir = output_root(&cfg, opts).join(sub.name());
    let result = run_subcommand(sub, &cfg, opts);
    if let Err(e) = &result {
        report_error(sub, &dir, e);
    }
    result
}

fn report_error(sub: Subcommand, dir: &Path, e: &Error) {
    let code = if e.is_numerical() { 3 } else { 2 };
    let report = ErrorReport {
        subcommand: sub.name(),
        exit_code: code,
        kind: error_kind(e),
        message: e.to_string(),
    };
    if let Err(w) = write_json_atomic(&dir.join("error.json"), &report) {
        warn!("could not write error report: {w}");
    }
}

/// Runs one experiment from a validated configuration.
pub fn run_subcommand(
    sub: Subcommand,
    cfg: &ExperimentConfig,
    opts: &RunOptions,
) -> Result<RunStatus> {
    let mut cfg = cfg.clone();
    if let Some(seed) = opts.seed {
        cfg.io.seed = seed;
    }
    cfg.validate()?;
    let dir = output_root(&cfg, opts).join(sub.name());
    let mut snapshot = serde_json::to_value(&cfg)?;
    // The output location does not change what is computed.
    if let Some(io) = snapshot.get_mut("io").and_then(|v| v.as_object_mut()) {
        io.remove("out");
    }
    let mut run = RunDir::new(dir)?;
    if opts.resume {
        if let Some(m) = run.previous_manifest() {
            if m.subcommand == sub.name() && m.config == snapshot {
                info!(
                    "{sub}: finished run found in {}, skipping",
                    run.dir.display()
                );
                return Ok(RunStatus::Skipped);
            }
        }
    }
    let _ = std::fs::remove_file(run.path("error.json"));
    let work = |run: &mut RunDir| -> Result<()> {
        match sub {
            Subcommand::Solve => solve(&cfg, run),
            Subcommand::Picard => picard(&cfg, run),
            Subcommand::Decay => decay(&cfg, run),
            Subcommand::BilinearSweep => bilinear_sweep(&cfg, run),
            Subcommand::Blocks => blocks(&cfg, run),
            Subcommand::Verify => verify(&cfg, run),
        }
    };
    match opts.jobs.filter(|_| sub.fans_out()) {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::param("jobs", e.to_string()))?;
            pool.install(|| work(&mut run))?;
        }
        None => work(&mut run)?,
    }
    let manifest = run.finish(sub.name(), snapshot)?;
    Ok(RunStatus::Completed {
        files: manifest.files,
    })
}

fn svg_stamp(cfg: &ExperimentConfig) -> Option<String> {
    cfg.io.svg_timestamp.then(|| {
        let secs = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        format!("unix={secs}")
    })
}

fn plot(cfg: &ExperimentConfig, run: &mut RunDir, name: &str, data: PlotData<'_>) -> Result<()> {
    emit_plot(data, &run.path(name), svg_stamp(cfg).as_deref())?;
    run.record(name);
    run.record(&Path::new(name).with_extension("csv").to_string_lossy());
    Ok(())
}

#[derive(Debug, Serialize)]
struct SolveSummary {
    t_final: f64,
    dt: f64,
    records: usize,
    l2_initial: f64,
    l2_final: f64,
    mean_initial: f64,
    max_mean_drift: f64,
}

fn solve(cfg: &ExperimentConfig, run: &mut RunDir) -> Result<()> {
    let grid = cfg.grid.grid_x()?;
    let u0 = cfg.initial.build(grid, cfg.model.s, cfg.io.seed);
    let r = &cfg.run;
    let traj = solve_ivp(&u0, r.t_final, r.dt, &cfg.model, r.record_every)?;
    let mut csv = Vec::new();
    write_trajectory_csv(&traj, r.s_probe, &mut csv)?;
    run.write("trajectory.csv", &csv)?;
    let mut bin = Vec::new();
    write_snapshot(
        &traj.last().expect("nonempty").inverse(),
        cfg.model.alpha,
        &mut bin,
    )?;
    run.write("final.bin", &bin)?;
    let norms = traj.l2_norms();
    let means = traj.means();
    let summary = SolveSummary {
        t_final: *traj.times.last().expect("nonempty"),
        dt: r.dt,
        records: traj.len(),
        l2_initial: norms[0],
        l2_final: *norms.last().expect("nonempty"),
        mean_initial: means[0],
        max_mean_drift: means
            .iter()
            .map(|m| (m - means[0]).abs())
            .fold(0.0, f64::max),
    };
    run.write_json("summary.json", &summary)?;
    plot(
        cfg,
        run,
        "l2.svg",
        PlotData::Decay {
            label: "L2 norm",
            times: &traj.times,
            values: &norms,
        },
    )
}

#[derive(Debug, Serialize)]
struct PicardReport {
    iterations: usize,
    increments: Vec<f64>,
    ratios: Vec<f64>,
    gamma: f64,
    quadrature_defect: f64,
    quadrature_warning: bool,
    /// `L²` distance to the direct solver at the quadrature nodes in `[0, T/2]`.
    direct_l2_difference: f64,
}

fn picard(cfg: &ExperimentConfig, run: &mut RunDir) -> Result<()> {
    let grid = cfg.grid.grid_x()?;
    let u0 = cfg.initial.build(grid, cfg.model.s, cfg.io.seed);
    let out = picard_solve(&u0, &cfg.picard, &cfg.model)?;
    let diff = picard_direct_difference(&u0, &out, &cfg.picard, &cfg.model)?;
    if out.quadrature_defect > QUADRATURE_WARNING {
        warn!(
            "Duhamel quadrature defect {:e} exceeds {QUADRATURE_WARNING:e}",
            out.quadrature_defect
        );
    }
    let report = PicardReport {
        iterations: out.iterations,
        increments: out.increments.clone(),
        ratios: out.ratios.clone(),
        gamma: out.gamma,
        quadrature_defect: out.quadrature_defect,
        quadrature_warning: out.quadrature_defect > QUADRATURE_WARNING,
        direct_l2_difference: diff,
    };
    run.write_json("picard.json", &report)?;
    let k: Vec<f64> = (1..=out.increments.len()).map(|k| k as f64).collect();
    plot(
        cfg,
        run,
        "increments.svg",
        PlotData::Decay {
            label: "Z-norm increment",
            times: &k,
            values: &out.increments,
        },
    )
}

fn decay(cfg: &ExperimentConfig, run: &mut RunDir) -> Result<()> {
    let grid = cfg.grid.grid_x()?;
    let u0 = cfg.initial.build(grid, cfg.model.s, cfg.io.seed);
    let r = &cfg.run;
    let traj = solve_ivp(&u0, r.t_final, r.dt, &cfg.model, r.record_every)?;
    let diag = decay_diagnostic(&traj, r.s_probe);
    run.write_json("decay.json", &diag)?;
    plot(
        cfg,
        run,
        "decay.svg",
        PlotData::Decay {
            label: "H^s norm",
            times: &diag.times,
            values: &diag.norms,
        },
    )?;
    if !diag.nonincreasing {
        let worst = diag
            .norms
            .windows(2)
            .position(|w| w[0] > 0.0 && (w[1] - w[0]) / w[0] == diag.max_relative_increase)
            .map(|i| diag.times[i + 1])
            .unwrap_or(0.0);
        return Err(Error::Stability {
            time: worst,
            growth: diag.max_relative_increase,
            norm: format!("H^{}", r.s_probe),
        });
    }
    info!(
        "H^{} norm {:e} -> {:e}",
        r.s_probe,
        sobolev_norm(&traj.states[0], r.s_probe),
        diag.norms.last().copied().unwrap_or(0.0)
    );
    Ok(())
}

fn tag(v: f64) -> String {
    format!("{v}").replace('-', "m")
}

fn bilinear_sweep(cfg: &ExperimentConfig, run: &mut RunDir) -> Result<()> {
    let sw = &cfg.sweep;
    let pairs: Vec<(f64, f64)> = sw
        .alpha
        .iter()
        .flat_map(|&a| sw.s.iter().map(move |&s| (a, s)))
        .collect();
    let reports: Vec<SweepReport> = pairs
        .par_iter()
        .map(|&(a, s)| sharpness_sweep(s, a, &sw.n1_list, &cfg.model))
        .collect::<Result<_>>()?;
    for rep in &reports {
        let stem = format!("sweep_a{}_s{}", tag(rep.alpha), tag(rep.s));
        run.write_json(&format!("{stem}.json"), rep)?;
        plot(cfg, run, &format!("{stem}.svg"), PlotData::Sweep(rep))?;
    }
    run.write_json("sweeps.json", &reports)
}

/// The block family of the `blocks` section.
pub fn block_family(section: &BlocksSection) -> Result<Vec<DyadicBlock>> {
    let mut out = Vec::new();
    for &n1 in &section.n_low {
        let mut n2 = 4.0 * n1;
        while n2 <= section.n_high_max {
            for l2 in [n1 * n2, n1 * n1 * n2] {
                for l3 in [1.0, l2] {
                    let b = DyadicBlock::new([n1, n2, n2], [2.0 * n1 * n2 * n2, l2, l3])?;
                    if !out.contains(&b) {
                        out.push(b);
                    }
                }
            }
            n2 *= 2.0;
        }
    }
    Ok(out)
}

#[derive(Debug, Serialize)]
struct BlockSummary {
    blocks: usize,
    min_ratio: f64,
    max_ratio: f64,
    spread: f64,
    rows: Vec<BlockRow>,
}

fn blocks(cfg: &ExperimentConfig, run: &mut RunDir) -> Result<()> {
    let family = block_family(&cfg.blocks)?;
    if family.is_empty() {
        return Err(Error::Insufficient("block family is empty".into()));
    }
    let rows: Vec<BlockRow> = family
        .par_iter()
        .map(|b| BlockRow::measure(*b))
        .collect::<Result<_>>()?;
    let mut csv = Vec::new();
    block_table_csv(&rows, &mut csv)?;
    run.write("blocks.csv", &csv)?;
    let min_ratio = rows.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
    let max_ratio = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    run.write_json(
        "blocks.json",
        &BlockSummary {
            blocks: rows.len(),
            min_ratio,
            max_ratio,
            spread: max_ratio / min_ratio,
            rows,
        },
    )
}

fn verify(cfg: &ExperimentConfig, run: &mut RunDir) -> Result<()> {
    let v = &cfg.verify;
    let mut failed = Vec::new();
    for kind in LemmaKind::ALL {
        let verdict = lemma_check_with(kind, v.trials, &cfg.model, cfg.io.seed, &v.lemma)?;
        info!(
            "{kind}: worst ratio {:e}, pass {}",
            verdict.worst_ratio, verdict.pass
        );
        if !verdict.pass {
            failed.push(kind.name());
        }
        run.write_json(&format!("lemma_{}.json", kind.name()), &verdict)?;
    }
    if !failed.is_empty() {
        warn!("lemma checks failed: {}", failed.join(", "));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subcommand_names_round_trip() {
        for s in Subcommand::ALL {
            assert_eq!(s.name().parse::<Subcommand>().unwrap(), s);
        }
        assert!("bogus".parse::<Subcommand>().is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Ok(RunStatus::Skipped)), 0);
        assert_eq!(exit_code(&Err(Error::param("dt", "bad"))), 2);
        assert_eq!(exit_code(&Err(Error::BlowUp { time: 1.0 })), 3);
        assert_eq!(
            exit_code(&Err(Error::NonConvergence {
                iterations: 3,
                ratios: vec![]
            })),
            3
        );
    }

    #[test]
    fn default_block_family_spans_scales() {
        let fam = block_family(&BlocksSection::default()).unwrap();
        assert!(fam.len() >= 10);
        let nmax: Vec<f64> = fam.iter().map(|b| b.n_sorted()[0]).collect();
        assert_eq!(nmax.iter().cloned().fold(f64::INFINITY, f64::min), 4.0);
        assert_eq!(nmax.iter().cloned().fold(0.0, f64::max), 128.0);
        assert!(fam.iter().all(|b| b.plus_minus_index() == Some(0)));
    }
}
