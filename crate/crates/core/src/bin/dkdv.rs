use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use dkdv::harness::{exit_code, run_from_path, RunOptions, RunStatus, Subcommand, DEFAULTS_HELP};

#[derive(Parser, Debug)]
#[command(name = "dkdv", version, about = "Dissipative KdV numerical laboratory", after_help = DEFAULTS_HELP)]
struct Cli {
    /// solve | picard | decay | bilinear-sweep | blocks | verify
    subcommand: String,
    /// JSON configuration; missing sections take their defaults.
    #[arg(long)]
    config: PathBuf,
    /// Worker threads for sweeps, block tables and lemma checks.
    #[arg(long)]
    jobs: Option<usize>,
    /// Overrides `io.seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Output root; `DKDV_OUT` takes precedence.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Skip when a finished run with the same configuration exists.
    #[arg(long)]
    resume: bool,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let sub: Subcommand = match cli.subcommand.parse() {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let opts = RunOptions {
        jobs: cli.jobs,
        seed: cli.seed,
        out: cli.out,
        resume: cli.resume,
    };
    let result = run_from_path(sub, &cli.config, &opts);
    match &result {
        Ok(RunStatus::Completed { files }) => log::info!("{sub}: wrote {} files", files.len()),
        Ok(RunStatus::Skipped) => log::info!("{sub}: up to date"),
        Err(e) => eprintln!("error: {e}"),
    }
    ExitCode::from(exit_code(&result))
}
