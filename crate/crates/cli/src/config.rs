//! Run configuration. Every section and key is optional; defaults give the
//! physiological pipeline shape (fs 1024 Hz, J = 6, base delays 8/4/2/1,
//! d = 8, u = 25 ms, scales 4 and 1, 512-sample windows with 50% overlap).

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use wavelet_te::embedding::{interaction_delay_samples, EmbeddingSpec};
use wavelet_te::infotheory::{KnnParams, SearchStrategy};
use wavelet_te::baselines::{Criterion, WelchParams};
use wavelet_te::signal::Format;
use wavelet_te::simgen::Modulation;
use wavelet_te::swt::{self, band_map, IteratedFilters};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub input: InputConfig,
    pub segmentation: SegmentationConfig,
    pub wavelet: WaveletConfig,
    pub embedding: EmbeddingConfig,
    pub estimator: EstimatorConfig,
    pub significance: SignificanceConfig,
    pub preprocess: PreprocessConfig,
    pub cfc: CfcConfig,
    pub baselines: BaselinesConfig,
    pub diagnose: DiagnoseConfig,
    pub simulation: SimulationConfig,
    pub output: OutputConfig,
    pub run: RunConfig,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            input: InputConfig::default(),
            segmentation: SegmentationConfig::default(),
            wavelet: WaveletConfig::default(),
            embedding: EmbeddingConfig::default(),
            estimator: EstimatorConfig::default(),
            significance: SignificanceConfig::default(),
            preprocess: PreprocessConfig::default(),
            cfc: CfcConfig::default(),
            baselines: BaselinesConfig::default(),
            diagnose: DiagnoseConfig::default(),
            simulation: SimulationConfig::default(),
            output: OutputConfig::default(),
            run: RunConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InputConfig {
    pub paths: Vec<PathBuf>,
    pub format: Format,
    pub fs: f64,
    /// Labels (or zero-based indices) of the source and destination channels.
    pub channels: [String; 2],
}

impl Default for InputConfig {
    fn default() -> Self {
        InputConfig { paths: vec![], format: Format::Csv, fs: 1024.0, channels: ["0".into(), "1".into()] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SegmentationConfig {
    pub window: usize,
    pub hop: usize,
    /// Drop the last window of the arithmetic grid (19 windows become 18
    /// for a 5 s trial at 1024 Hz).
    pub drop_final: bool,
}

impl Default for SegmentationConfig {
    fn default() -> Self {
        SegmentationConfig { window: 512, hop: 256, drop_final: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WaveletConfig {
    pub levels: usize,
    pub filter: String,
}

impl Default for WaveletConfig {
    fn default() -> Self {
        WaveletConfig { levels: 6, filter: "d4".into() }
    }
}

impl WaveletConfig {
    pub fn filters(&self) -> Result<IteratedFilters> {
        let proto = match self.filter.to_ascii_lowercase().as_str() {
            "d4" | "db2" | "daubechies4" => swt::daubechies_d4(),
            other => return Err(CliError::Config(format!("unknown wavelet filter '{other}' (supported: d4)"))),
        };
        Ok(swt::build_iterated_filters(&proto, self.levels)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmbeddingConfig {
    /// Band keys, lowest frequency first.
    pub bands: Vec<String>,
    pub base_delays: Vec<usize>,
    pub scales: Vec<usize>,
    pub dim: usize,
    pub u_ms: f64,
}

impl Default for EmbeddingConfig {
    fn default() -> Self {
        EmbeddingConfig {
            bands: ["delta_theta", "alpha", "beta", "low_gamma"].map(String::from).to_vec(),
            base_delays: vec![8, 4, 2, 1],
            scales: vec![4, 1],
            dim: 8,
            u_ms: 25.0,
        }
    }
}

fn band_delays(bands: &[String], delays: &[usize]) -> Result<Vec<(String, usize)>> {
    if bands.len() != delays.len() {
        return Err(CliError::Config(format!(
            "{} bands but {} base delays",
            bands.len(),
            delays.len()
        )));
    }
    Ok(bands.iter().cloned().zip(delays.iter().copied()).collect())
}

/// Every band must exist in the decomposition for this rate and depth.
fn check_bands(bands: &[String], fs: f64, levels: usize) -> Result<()> {
    let map = band_map(fs, levels);
    for b in bands {
        if !map.iter().any(|m| m.matches(b)) {
            let known: Vec<&str> = map.iter().map(|m| m.key.as_str()).collect();
            return Err(CliError::Config(format!(
                "band '{b}' does not exist at fs = {fs} Hz with {levels} levels (available: {})",
                known.join(", ")
            )));
        }
    }
    Ok(())
}

impl EmbeddingConfig {
    pub fn spec(&self, scale: usize, fs: f64, levels: usize) -> Result<EmbeddingSpec> {
        check_bands(&self.bands, fs, levels)?;
        let base = band_delays(&self.bands, &self.base_delays)?;
        Ok(EmbeddingSpec::new(base, scale, self.dim, interaction_delay_samples(self.u_ms, fs))?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EstimatorConfig {
    pub k: usize,
    pub jitter: f64,
    pub seed: u64,
    pub search: SearchStrategy,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        let d = KnnParams::default();
        EstimatorConfig { k: d.k, jitter: d.jitter_amplitude, seed: d.seed, search: d.search }
    }
}

impl EstimatorConfig {
    pub fn params(&self) -> Result<KnnParams> {
        let p = KnnParams { k: self.k, jitter_amplitude: self.jitter, seed: self.seed, search: self.search };
        p.validate()?;
        Ok(p)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SignificanceConfig {
    pub n_surrogates: usize,
    pub level: f64,
    pub seed: u64,
}

impl Default for SignificanceConfig {
    fn default() -> Self {
        SignificanceConfig { n_surrogates: 1000, level: 0.95, seed: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PreprocessConfig {
    pub notch: bool,
    pub notch_hz: f64,
    pub notch_bandwidth: f64,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        PreprocessConfig { notch: true, notch_hz: 50.0, notch_bandwidth: 2.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CfcConfig {
    /// Window index on the segmentation grid; the first window when unset.
    pub window: Option<usize>,
    /// Alternatively, start time in seconds; must fall on the grid.
    pub start_s: Option<f64>,
}

impl Default for CfcConfig {
    fn default() -> Self {
        CfcConfig { window: None, start_s: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BaselinesConfig {
    pub welch_len: usize,
    pub welch_hop: usize,
    pub var_max_order: usize,
    pub criterion: Criterion,
    pub gc_freq_max: f64,
    pub gc_freq_step: f64,
    /// Surrogate thresholds for GC; coherence uses the closed form.
    pub gc_surrogates: bool,
}

impl Default for BaselinesConfig {
    fn default() -> Self {
        let w = WelchParams::default();
        BaselinesConfig {
            welch_len: w.sub_len,
            welch_hop: w.sub_hop,
            var_max_order: 40,
            criterion: Criterion::Bic,
            gc_freq_max: 100.0,
            gc_freq_step: 1.0,
            gc_surrogates: true,
        }
    }
}

impl BaselinesConfig {
    pub fn welch(&self) -> WelchParams {
        WelchParams { sub_len: self.welch_len, sub_hop: self.welch_hop }
    }

    pub fn gc_freqs(&self) -> Result<Vec<f64>> {
        if !(self.gc_freq_step > 0.0 && self.gc_freq_max >= 0.0) {
            return Err(CliError::Config("gc_freq_step must be positive and gc_freq_max non-negative".into()));
        }
        let n = (self.gc_freq_max / self.gc_freq_step).floor() as usize;
        Ok((0..=n).map(|i| i as f64 * self.gc_freq_step).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiagnoseConfig {
    pub max_lag: usize,
    pub cao_d_max: usize,
    pub ragwitz_taus: Vec<usize>,
    pub ragwitz_dims: Vec<usize>,
    pub ragwitz_k: usize,
}

impl Default for DiagnoseConfig {
    fn default() -> Self {
        DiagnoseConfig {
            max_lag: 256,
            cao_d_max: 10,
            ragwitz_taus: vec![1, 2, 4, 8, 16, 32],
            ragwitz_dims: (1..=8).collect(),
            ragwitz_k: 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulationConfig {
    pub kinds: Vec<Modulation>,
    pub snr_db: Vec<f64>,
    pub trials: usize,
    pub fs: f64,
    pub duration: f64,
    pub dim: usize,
    /// Per-band delays in samples, same order as `embedding.bands`.
    pub delays: Vec<usize>,
    pub u_samples: usize,
    pub null_control: bool,
    pub seed: u64,
    /// Source and destination bands of the planted coupling.
    pub true_source: String,
    pub true_destination: String,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        SimulationConfig {
            kinds: vec![Modulation::Am, Modulation::Pm],
            snr_db: vec![20.0, 10.0, 5.0, 0.0],
            trials: 10,
            fs: 1024.0,
            duration: 1.0,
            dim: 6,
            delays: vec![32, 16, 8, 4],
            u_samples: 10,
            null_control: false,
            seed: 5,
            true_source: "delta_theta".into(),
            true_destination: "low_gamma".into(),
        }
    }
}

impl SimulationConfig {
    pub fn spec(&self, bands: &[String], levels: usize) -> Result<EmbeddingSpec> {
        check_bands(bands, self.fs, levels)?;
        let base = band_delays(bands, &self.delays)?;
        Ok(EmbeddingSpec::new(base, 1, self.dim, self.u_samples)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    /// Pixel size of one TE matrix cell.
    pub cell_size: usize,
    /// Pixel size of one spectrogram cell.
    pub spectrogram_cell: usize,
    pub heatmaps: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { dir: PathBuf::from("out"), cell_size: 24, spectrogram_cell: 4, heatmaps: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Worker threads; 0 uses every core. Never affects results.
    pub workers: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig { workers: 0 }
    }
}

/// Parses a `--set` value as a TOML literal, falling back to a bare string.
fn parse_value(raw: &str) -> toml::Value {
    let doc = format!("v = {raw}");
    match doc.parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").unwrap_or_else(|| toml::Value::String(raw.into())),
        Err(_) => toml::Value::String(raw.into()),
    }
}

/// Applies `section.key=value` to a raw table.
pub fn apply_override(table: &mut toml::Table, assignment: &str) -> Result<()> {
    let (key, value) = assignment
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("override '{assignment}' is not of the form key=value")))?;
    let path: Vec<&str> = key.trim().split('.').collect();
    if path.iter().any(|p| p.is_empty()) {
        return Err(CliError::Config(format!("malformed key '{key}'")));
    }
    let mut cur = table;
    for part in &path[..path.len() - 1] {
        let entry = cur.entry(part.to_string()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = entry
            .as_table_mut()
            .ok_or_else(|| CliError::Config(format!("'{part}' in '{key}' is not a section")))?;
    }
    cur.insert(path[path.len() - 1].to_string(), parse_value(value.trim()));
    Ok(())
}

impl Config {
    pub fn from_toml(text: &str, overrides: &[String]) -> Result<Config> {
        let mut table: toml::Table = text.parse().map_err(|e: toml::de::Error| CliError::Config(e.to_string()))?;
        for o in overrides {
            apply_override(&mut table, o)?;
        }
        let cfg: Config = toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Config> {
        let text = match path {
            Some(p) => std::fs::read_to_string(p)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", p.display())))?,
            None => String::new(),
        };
        Config::from_toml(&text, overrides)
    }

    pub fn validate(&self) -> Result<()> {
        let seg = &self.segmentation;
        if seg.window == 0 || seg.hop == 0 {
            return Err(CliError::Config("segmentation window and hop must be positive".into()));
        }
        if self.embedding.scales.is_empty() {
            return Err(CliError::Config("embedding.scales must not be empty".into()));
        }
        for &s in &self.embedding.scales {
            self.embedding.spec(s, self.input.fs, self.wavelet.levels)?;
        }
        self.simulation.spec(&self.embedding.bands, self.wavelet.levels)?;
        for b in [&self.simulation.true_source, &self.simulation.true_destination] {
            if !self.embedding.bands.contains(b) {
                return Err(CliError::Config(format!("simulation band '{b}' is not in embedding.bands")));
            }
        }
        self.estimator.params()?;
        self.wavelet.filters()?;
        let lvl = self.significance.level;
        if !(lvl > 0.0 && lvl < 1.0) {
            return Err(CliError::Config(format!("significance.level must lie in (0, 1), got {lvl}")));
        }
        if self.cfc.window.is_some() && self.cfc.start_s.is_some() {
            return Err(CliError::Config("set only one of cfc.window and cfc.start_s".into()));
        }
        Ok(())
    }

    /// TOML snapshot without the worker count and output directory, which
    /// never change results.
    pub fn snapshot(&self) -> toml::Table {
        let mut t = toml::Table::try_from(self).expect("config serializes");
        if let Some(run) = t.get_mut("run").and_then(toml::Value::as_table_mut) {
            run.remove("workers");
        }
        if let Some(out) = t.get_mut("output").and_then(toml::Value::as_table_mut) {
            out.remove("dir");
        }
        t
    }
}
