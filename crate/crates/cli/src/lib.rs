//! Batch front end for multiscale wavelet transfer entropy analyses.

pub mod config;
pub mod error;
pub mod heatmap;
pub mod output;
pub mod pipelines;

use std::collections::BTreeMap;
use std::path::Path;

pub use config::Config;
pub use error::{CliError, Result};
use output::{Output, RunManifest};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verb {
    Intraband,
    Cfc,
    Baselines,
    Simulate,
    Diagnose,
}

impl Verb {
    pub fn name(self) -> &'static str {
        match self {
            Verb::Intraband => "intraband",
            Verb::Cfc => "cfc",
            Verb::Baselines => "baselines",
            Verb::Simulate => "simulate",
            Verb::Diagnose => "diagnose",
        }
    }
}

/// Runs one verb with `cfg.run.workers` threads and writes the manifest.
pub fn execute(verb: Verb, cfg: &Config, out_dir: &Path, timings: bool) -> Result<RunManifest> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.run.workers)
        .build()
        .map_err(|e| CliError::Pool(e.to_string()))?;
    pool.install(|| {
        let mut out = Output::new(out_dir, timings)?;
        if cfg.segmentation.drop_final {
            out.convention("final window of the arithmetic grid dropped".to_string());
        }
        match verb {
            Verb::Intraband => pipelines::run_intraband(cfg, &mut out)?,
            Verb::Cfc => pipelines::run_cfc(cfg, &mut out)?,
            Verb::Baselines => pipelines::run_baselines(cfg, &mut out)?,
            Verb::Simulate => pipelines::run_simulate(cfg, &mut out)?,
            Verb::Diagnose => pipelines::run_diagnose(cfg, &mut out)?,
        }
        let seeds = BTreeMap::from([
            ("estimator".to_string(), cfg.estimator.seed),
            ("significance".to_string(), cfg.significance.seed),
            ("simulation".to_string(), cfg.simulation.seed),
        ]);
        out.finish(verb.name(), cfg.snapshot(), seeds)
    })
}
