//! Surrogate confidence levels and the closed-form coherence threshold.
//!
//! A surrogate ensemble is `n` pairs of independent white Gaussian
//! sequences with prescribed variances, run through exactly the statistic
//! used on the data. Surrogate `i` draws from the stream
//! `rng::stream(seed, &[i])`, and evaluations are collected in index
//! order, so distributions do not depend on the worker count.

use std::io::Write;
use std::path::Path;

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::embedding::EmbeddingSpec;
use crate::error::{Error, Result};
use crate::infotheory::{intraband_te, te_matrix, KnnParams};
use crate::rng;
use crate::swt::{swt_decompose, IteratedFilters};
use crate::TimeSeries;

pub const MIN_SURROGATES: usize = 100;

/// Linear interpolation between order statistics of ascending `sorted`:
/// position `p·(n−1)`.
pub fn percentile(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty(), "percentile of an empty sample");
    let p = p.clamp(0.0, 1.0);
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    let frac = pos - lo as f64;
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurrogateSample {
    pub index: usize,
    pub seed: u64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurrogateDistribution {
    pub statistic: String,
    /// Ascending.
    pub values: Vec<f64>,
    pub cl95: f64,
    /// Evaluations in surrogate order.
    pub samples: Vec<SurrogateSample>,
}

impl SurrogateDistribution {
    pub fn from_samples(statistic: impl Into<String>, samples: Vec<SurrogateSample>) -> Self {
        let mut values: Vec<f64> = samples.iter().map(|s| s.value).collect();
        values.sort_by(f64::total_cmp);
        let cl95 = percentile(&values, 0.95);
        SurrogateDistribution { statistic: statistic.into(), values, cl95, samples }
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn cl(&self, level: f64) -> f64 {
        percentile(&self.values, level)
    }

    /// Fraction of surrogates at or above `value`.
    pub fn exceedance(&self, value: f64) -> f64 {
        let below = self.values.partition_point(|&v| v < value);
        (self.values.len() - below) as f64 / self.values.len() as f64
    }

    /// `index,seed,value`, one surrogate per row.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("index,seed,value\n");
        for x in &self.samples {
            s.push_str(&format!("{},{},{}\n", x.index, x.seed, x.value));
        }
        s
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut f = std::fs::File::create(path)?;
        f.write_all(self.to_csv().as_bytes())?;
        Ok(())
    }

    pub fn read_csv(statistic: impl Into<String>, path: &Path) -> Result<Self> {
        let ingest = |message: String| Error::Ingestion { path: path.to_path_buf(), message };
        let mut rdr = csv::Reader::from_path(path).map_err(|e| ingest(e.to_string()))?;
        let mut samples = Vec::new();
        for (row, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| ingest(e.to_string()))?;
            let field = |i: usize| {
                rec.get(i).ok_or_else(|| ingest(format!("row {}: missing column {i}", row + 2)))
            };
            let bad = |e: &dyn std::fmt::Display| ingest(format!("row {}: {e}", row + 2));
            samples.push(SurrogateSample {
                index: field(0)?.parse().map_err(|e| bad(&e))?,
                seed: field(1)?.parse().map_err(|e| bad(&e))?,
                value: field(2)?.parse().map_err(|e| bad(&e))?,
            });
        }
        if samples.is_empty() {
            return Err(ingest("no surrogate rows".into()));
        }
        Ok(SurrogateDistribution::from_samples(statistic, samples))
    }
}

/// Shape of the surrogate ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurrogateConfig {
    /// Samples per sequence; match the analysed segment length.
    pub len: usize,
    pub var_x: f64,
    pub var_y: f64,
    pub n: usize,
    pub seed: u64,
}

impl SurrogateConfig {
    pub fn new(len: usize, n: usize, seed: u64) -> Self {
        SurrogateConfig { len, var_x: 1.0, var_y: 1.0, n, seed }
    }

    fn validate(&self) -> Result<()> {
        if self.n < MIN_SURROGATES {
            return Err(Error::invalid(format!(
                "at least {MIN_SURROGATES} surrogates are required, got {}",
                self.n
            )));
        }
        if !(self.var_x > 0.0 && self.var_y > 0.0 && self.var_x.is_finite() && self.var_y.is_finite()) {
            return Err(Error::invalid("surrogate variances must be positive and finite"));
        }
        if self.len == 0 {
            return Err(Error::invalid("surrogate length must be positive"));
        }
        Ok(())
    }

    pub fn surrogate_seed(&self, index: usize) -> u64 {
        rng::derive_seed(self.seed, &[index as u64])
    }

    /// The `index`-th independent pair.
    pub fn pair(&self, index: usize) -> (Vec<f64>, Vec<f64>) {
        let mut g = rng::stream(self.seed, &[index as u64]);
        let (sx, sy) = (self.var_x.sqrt(), self.var_y.sqrt());
        let x = (0..self.len).map(|_| sx * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut g)).collect();
        let y = (0..self.len).map(|_| sy * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut g)).collect();
        (x, y)
    }
}

/// Evaluates a vector-valued statistic on every surrogate pair, giving one
/// distribution per component.
pub fn surrogate_cls<F>(names: &[String], cfg: &SurrogateConfig, statistic: F) -> Result<Vec<SurrogateDistribution>>
where
    F: Fn(&[f64], &[f64]) -> Result<Vec<f64>> + Sync,
{
    cfg.validate()?;
    let evals: Vec<Vec<f64>> = (0..cfg.n)
        .into_par_iter()
        .map(|i| {
            let (x, y) = cfg.pair(i);
            let v = statistic(&x, &y).map_err(|e| Error::Surrogate { index: i, source: Box::new(e) })?;
            if v.len() != names.len() {
                return Err(Error::Surrogate {
                    index: i,
                    source: Box::new(Error::invalid(format!(
                        "statistic returned {} values for {} names",
                        v.len(),
                        names.len()
                    ))),
                });
            }
            Ok(v)
        })
        .collect::<Result<_>>()?;
    Ok(names
        .iter()
        .enumerate()
        .map(|(c, name)| {
            let samples = evals
                .iter()
                .enumerate()
                .map(|(i, v)| SurrogateSample { index: i, seed: cfg.surrogate_seed(i), value: v[c] })
                .collect();
            SurrogateDistribution::from_samples(name.clone(), samples)
        })
        .collect())
}

/// Single-statistic form of [`surrogate_cls`].
pub fn surrogate_cl<F>(name: &str, cfg: &SurrogateConfig, statistic: F) -> Result<SurrogateDistribution>
where
    F: Fn(&[f64], &[f64]) -> Result<f64> + Sync,
{
    let mut v = surrogate_cls(&[name.to_string()], cfg, |x, y| statistic(x, y).map(|s| vec![s]))?;
    Ok(v.remove(0))
}

/// `1 − (1 − confidence)^{1/(L−1)}` for magnitude-squared coherence
/// averaged over `L` independent segments.
pub fn coherence_cl(n_segments: usize, confidence: f64) -> Result<f64> {
    if n_segments < 2 {
        return Err(Error::invalid(format!("coherence needs at least 2 segments, got {n_segments}")));
    }
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(Error::invalid(format!("confidence must lie in (0, 1), got {confidence}")));
    }
    Ok(1.0 - (1.0 - confidence).powf(1.0 / (n_segments - 1) as f64))
}

/// The band-pair TE statistic used on data: decompose both signals, then
/// TE for every cell, flattened `[dst][src]` row-major.
pub fn te_matrix_statistic<'a>(
    filters: &'a IteratedFilters,
    spec: &'a EmbeddingSpec,
    params: &'a KnnParams,
    fs: f64,
) -> impl Fn(&[f64], &[f64]) -> Result<Vec<f64>> + Sync + 'a {
    move |x, y| {
        let dx = swt_decompose(&TimeSeries::new(x.to_vec(), fs, "x")?, filters)?;
        let dy = swt_decompose(&TimeSeries::new(y.to_vec(), fs, "y")?, filters)?;
        Ok(te_matrix(&dx, &dy, spec, params)?.values.into_iter().flatten().collect())
    }
}

/// Same-band TE per band of the schedule.
pub fn intraband_statistic<'a>(
    filters: &'a IteratedFilters,
    spec: &'a EmbeddingSpec,
    params: &'a KnnParams,
    fs: f64,
) -> impl Fn(&[f64], &[f64]) -> Result<Vec<f64>> + Sync + 'a {
    move |x, y| {
        let dx = swt_decompose(&TimeSeries::new(x.to_vec(), fs, "x")?, filters)?;
        let dy = swt_decompose(&TimeSeries::new(y.to_vec(), fs, "y")?, filters)?;
        Ok(intraband_te(&dx, &dy, spec, params)?.into_iter().map(|r| r.value).collect())
    }
}

/// Surrogate distributions for every band pair, `dists[dst][src]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandPairCls {
    pub bands: Vec<String>,
    pub dists: Vec<Vec<SurrogateDistribution>>,
}

impl BandPairCls {
    pub fn cl_matrix(&self) -> Vec<Vec<f64>> {
        self.dists.iter().map(|r| r.iter().map(|d| d.cl95).collect()).collect()
    }
}

pub fn per_band_cls(
    spec: &EmbeddingSpec,
    filters: &IteratedFilters,
    fs: f64,
    params: &KnnParams,
    cfg: &SurrogateConfig,
) -> Result<BandPairCls> {
    let bands: Vec<String> = spec.bands().map(str::to_string).collect();
    let names: Vec<String> =
        bands.iter().flat_map(|d| bands.iter().map(move |s| format!("{s}->{d}"))).collect();
    let flat = surrogate_cls(&names, cfg, te_matrix_statistic(filters, spec, params, fs))?;
    let n = bands.len();
    let mut it = flat.into_iter();
    let dists = (0..n).map(|_| it.by_ref().take(n).collect()).collect();
    Ok(BandPairCls { bands, dists })
}

/// Surrogate distributions of same-band TE, one per band.
pub fn intraband_cls(
    spec: &EmbeddingSpec,
    filters: &IteratedFilters,
    fs: f64,
    params: &KnnParams,
    cfg: &SurrogateConfig,
) -> Result<Vec<SurrogateDistribution>> {
    let names: Vec<String> = spec.bands().map(|b| format!("{b}->{b}")).collect();
    surrogate_cls(&names, cfg, intraband_statistic(filters, spec, params, fs))
}
