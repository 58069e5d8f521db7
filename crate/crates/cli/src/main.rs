use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use wavelet_te_cli::{execute, Config, Verb};

#[derive(Parser)]
#[command(name = "wavelet-te", version, about = "Multiscale wavelet transfer entropy analyses")]
struct Cli {
    #[command(subcommand)]
    verb: Command,
    /// TOML configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override a configuration key, e.g. `--set estimator.k=6`.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    overrides: Vec<String>,
    /// Output directory (overrides output.dir).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads, 0 for all cores (overrides run.workers).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Base seed for the estimator, surrogates and simulation.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Record per-stage wall times in the manifest.
    #[arg(long, global = true)]
    timings: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Same-band TE over time for every band, scale and direction.
    Intraband,
    /// Band-pair TE matrices for one window.
    Cfc,
    /// Coherence and Granger causality spectrograms.
    Baselines,
    /// AM/PM cross-frequency coupling study over an SNR grid.
    Simulate,
    /// Autocorrelation, Cao and Ragwitz embedding diagnostics.
    Diagnose,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut overrides = cli.overrides.clone();
    if let Some(o) = &cli.out {
        overrides.push(format!("output.dir='{}'", o.display()));
    }
    if let Some(w) = cli.workers {
        overrides.push(format!("run.workers={w}"));
    }
    if let Some(s) = cli.seed {
        for key in ["estimator.seed", "significance.seed", "simulation.seed"] {
            overrides.push(format!("{key}={s}"));
        }
    }
    let verb = match cli.verb {
        Command::Intraband => Verb::Intraband,
        Command::Cfc => Verb::Cfc,
        Command::Baselines => Verb::Baselines,
        Command::Simulate => Verb::Simulate,
        Command::Diagnose => Verb::Diagnose,
    };
    let run = Config::load(cli.config.as_deref(), &overrides)
        .and_then(|cfg| execute(verb, &cfg, &cfg.output.dir, cli.timings).map(|m| (m, cfg.output.dir)));
    match run {
        Ok((m, dir)) => {
            eprintln!("wrote {} files to {}", m.files.len() + 1, dir.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
