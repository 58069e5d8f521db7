//! Amplitude- and phase-modulation coupling generators.
//!
//! A message `m(t) = Σ a_m cos(2π f_m t)` with six components in (1–8) Hz
//! drives either an amplitude-modulated multi-tone carrier in (33–64) Hz
//! or a phase-modulated 50 Hz tone, after a fixed interaction delay.
//!
//! Seed splitting: from a trial seed, stream `[0]` draws the message,
//! `[1]` the carrier, `[2]` and `[3]` the noise added to `x` and `y`, and
//! `[4]` the replacement message of a null-control trial. Experiment trial
//! seeds are `derive_seed(seed, [snr_index, trial_index])`.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{derive_seed, stream};
use crate::signal::add_noise_at_snr;
use crate::TimeSeries;

pub const COMPONENTS: usize = 6;
pub const RAYLEIGH_SCALE: f64 = 0.5;
pub const MESSAGE_BAND: (f64, f64) = (1.0, 8.0);
pub const CARRIER_BAND: (f64, f64) = (33.0, 64.0);
pub const PM_CARRIER_HZ: f64 = 50.0;
pub const PM_INDEX: f64 = 3.0;
/// Physical interaction delay, 10 samples at 1024 Hz.
pub const DELAY_SECONDS: f64 = 0.0098;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Modulation {
    Am,
    Pm,
}

impl std::fmt::Display for Modulation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Modulation::Am => "am",
            Modulation::Pm => "pm",
        })
    }
}

impl std::str::FromStr for Modulation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "am" => Ok(Modulation::Am),
            "pm" => Ok(Modulation::Pm),
            other => Err(Error::invalid(format!("unknown modulation '{other}', expected am or pm"))),
        }
    }
}

/// A sum of cosines with zero phase.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToneSet {
    pub amplitudes: Vec<f64>,
    pub freqs: Vec<f64>,
}

impl ToneSet {
    fn draw<R: Rng>(rng: &mut R, band: (f64, f64)) -> ToneSet {
        let mut amplitudes = Vec::with_capacity(COMPONENTS);
        let mut freqs = Vec::with_capacity(COMPONENTS);
        for _ in 0..COMPONENTS {
            amplitudes.push(rayleigh(rng, RAYLEIGH_SCALE));
            freqs.push(rng.random_range(band.0..band.1));
        }
        ToneSet { amplitudes, freqs }
    }

    pub fn at(&self, t: f64) -> f64 {
        self.amplitudes
            .iter()
            .zip(&self.freqs)
            .map(|(a, f)| a * (2.0 * std::f64::consts::PI * f * t).cos())
            .sum()
    }
}

/// Inverse-CDF Rayleigh draw.
fn rayleigh<R: Rng>(rng: &mut R, scale: f64) -> f64 {
    let u: f64 = rng.random();
    scale * (-2.0 * (1.0 - u).ln()).sqrt()
}

/// Delay in samples at rate `fs`.
pub fn delay_samples(fs: f64) -> usize {
    (fs * DELAY_SECONDS).round() as usize
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModulationTrial {
    pub kind: Modulation,
    pub message: TimeSeries,
    pub modulated: TimeSeries,
    pub u_samples: usize,
    pub seed: u64,
    pub message_tones: ToneSet,
    /// Carrier tones; a single 50 Hz component for phase modulation.
    pub carrier_tones: ToneSet,
}

fn check(fs: f64, duration: f64) -> Result<usize> {
    if !(fs >= 256.0) || !fs.is_finite() {
        return Err(Error::invalid(format!("sampling rate must be at least 256 Hz, got {fs}")));
    }
    let n = (fs * duration).round();
    if !(n >= 2.0) {
        return Err(Error::invalid(format!("duration {duration} s gives fewer than 2 samples")));
    }
    Ok(n as usize)
}

fn build(
    kind: Modulation,
    fs: f64,
    n: usize,
    seed: u64,
    message_tones: ToneSet,
    carrier_tones: ToneSet,
) -> Result<ModulationTrial> {
    let u = delay_samples(fs);
    let lag = u as f64 / fs;
    let mut message = Vec::with_capacity(n);
    let mut modulated = Vec::with_capacity(n);
    for i in 0..n {
        let t = i as f64 / fs;
        let m_lag = message_tones.at(t - lag);
        message.push(message_tones.at(t));
        modulated.push(match kind {
            Modulation::Am => (1.0 + m_lag) * carrier_tones.at(t),
            Modulation::Pm => {
                carrier_tones.amplitudes[0]
                    * (2.0 * std::f64::consts::PI * carrier_tones.freqs[0] * t + PM_INDEX * m_lag).cos()
            }
        });
    }
    Ok(ModulationTrial {
        kind,
        message: TimeSeries::new(message, fs, "message")?,
        modulated: TimeSeries::new(modulated, fs, "modulated")?,
        u_samples: u,
        seed,
        message_tones,
        carrier_tones,
    })
}

/// `s(t) = (1 + m(t − u)) c(t)`.
pub fn gen_am_trial(fs: f64, duration: f64, seed: u64) -> Result<ModulationTrial> {
    let n = check(fs, duration)?;
    let m = ToneSet::draw(&mut stream(seed, &[0]), MESSAGE_BAND);
    let c = ToneSet::draw(&mut stream(seed, &[1]), CARRIER_BAND);
    build(Modulation::Am, fs, n, seed, m, c)
}

/// `s(t) = a_c cos(2π·50·t + 3 m(t − u))`.
pub fn gen_pm_trial(fs: f64, duration: f64, seed: u64) -> Result<ModulationTrial> {
    let n = check(fs, duration)?;
    let m = ToneSet::draw(&mut stream(seed, &[0]), MESSAGE_BAND);
    let a_c = rayleigh(&mut stream(seed, &[1]), RAYLEIGH_SCALE);
    let c = ToneSet { amplitudes: vec![a_c], freqs: vec![PM_CARRIER_HZ] };
    build(Modulation::Pm, fs, n, seed, m, c)
}

pub fn gen_trial(kind: Modulation, fs: f64, duration: f64, seed: u64) -> Result<ModulationTrial> {
    match kind {
        Modulation::Am => gen_am_trial(fs, duration, seed),
        Modulation::Pm => gen_pm_trial(fs, duration, seed),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub kind: Modulation,
    pub snr_grid: Vec<f64>,
    pub trials_per_snr: usize,
    pub fs: f64,
    pub duration: f64,
    pub seed: u64,
    /// Replace the message in `x` by an independent message.
    pub null_control: bool,
}

impl ExperimentConfig {
    pub fn new(kind: Modulation, snr_grid: Vec<f64>, seed: u64) -> Self {
        ExperimentConfig { kind, snr_grid, trials_per_snr: 10, fs: 1024.0, duration: 1.0, seed, null_control: false }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentTrial {
    pub snr_db: f64,
    pub snr_index: usize,
    pub trial: usize,
    pub seed: u64,
    pub x: TimeSeries,
    pub y: TimeSeries,
    pub u_samples: usize,
}

/// `x = m + w_x`, `y = s + w_y`, each noise scaled to its own signal's
/// power at the given SNR.
pub fn gen_experiment(cfg: &ExperimentConfig) -> Result<Vec<ExperimentTrial>> {
    let jobs: Vec<(usize, usize)> = (0..cfg.snr_grid.len())
        .flat_map(|i| (0..cfg.trials_per_snr).map(move |j| (i, j)))
        .collect();
    jobs.par_iter()
        .map(|&(i, j)| {
            let seed = derive_seed(cfg.seed, &[i as u64, j as u64]);
            let trial = gen_trial(cfg.kind, cfg.fs, cfg.duration, seed)?;
            let snr = cfg.snr_grid[i];
            let source = if cfg.null_control {
                let n = trial.message.len();
                let tones = ToneSet::draw(&mut stream(seed, &[4]), MESSAGE_BAND);
                let v = (0..n).map(|k| tones.at(k as f64 / cfg.fs)).collect();
                TimeSeries::new(v, cfg.fs, "message")?
            } else {
                trial.message.clone()
            };
            let x = add_noise_at_snr(&source, snr, &mut stream(seed, &[2]))?.with_label("x");
            let y = add_noise_at_snr(&trial.modulated, snr, &mut stream(seed, &[3]))?.with_label("y");
            Ok(ExperimentTrial { snr_db: snr, snr_index: i, trial: j, seed, x, y, u_samples: trial.u_samples })
        })
        .collect()
}
