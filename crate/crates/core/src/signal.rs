//! Time series, recording ingestion and the small preprocessing toolbox
//! shared by every pipeline.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A uniformly sampled, finite-valued signal.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    samples: Vec<f64>,
    fs: f64,
    label: String,
}

impl TimeSeries {
    pub fn new(samples: Vec<f64>, fs: f64, label: impl Into<String>) -> Result<Self> {
        if !(fs > 0.0 && fs.is_finite()) {
            return Err(Error::invalid(format!("sampling rate must be positive, got {fs}")));
        }
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("non-finite sample at index {i}")));
        }
        Ok(TimeSeries { samples, fs, label: label.into() })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn fs(&self) -> f64 {
        self.fs
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.fs
    }

    /// Same metadata, new samples. Samples are checked for finiteness.
    pub fn with_samples(&self, samples: Vec<f64>) -> Result<Self> {
        TimeSeries::new(samples, self.fs, self.label.clone())
    }

    pub(crate) fn with_samples_unchecked(&self, samples: Vec<f64>) -> Self {
        debug_assert!(samples.iter().all(|v| v.is_finite()));
        TimeSeries { samples, fs: self.fs, label: self.label.clone() }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Mean square of the samples.
    pub fn power(&self) -> f64 {
        power(&self.samples)
    }
}

/// A window of one channel taken by [`segment`].
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub parent: String,
    pub start_index: usize,
    pub samples: Vec<f64>,
}

impl Segment {
    pub fn to_series(&self, fs: f64) -> TimeSeries {
        TimeSeries { samples: self.samples.clone(), fs, label: self.parent.clone() }
    }
}

/// On-disk recording layouts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    /// Header row of channel labels, one column per channel.
    Csv,
    /// Little-endian f64, channel-major, described by a `<path>.json` sidecar.
    RawF64,
}

/// Sidecar describing a raw binary recording.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawSidecar {
    pub channels: usize,
    pub length: usize,
    #[serde(default)]
    pub labels: Vec<String>,
}

/// Path of the sidecar that accompanies a raw binary recording.
pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

fn ingestion(path: &Path, message: impl Into<String>) -> Error {
    Error::Ingestion { path: path.to_path_buf(), message: message.into() }
}

/// Reads every channel of a recording.
pub fn load_recording(path: &Path, format: Format, fs: f64) -> Result<Vec<TimeSeries>> {
    let channels = match format {
        Format::Csv => read_csv(path)?,
        Format::RawF64 => read_raw(path)?,
    };
    channels
        .into_iter()
        .map(|(label, samples)| TimeSeries::new(samples, fs, label))
        .collect()
}

fn read_csv(path: &Path) -> Result<Vec<(String, Vec<f64>)>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| ingestion(path, e.to_string()))?;
    let labels: Vec<String> = reader
        .headers()
        .map_err(|e| ingestion(path, e.to_string()))?
        .iter()
        .map(str::to_owned)
        .collect();
    if labels.is_empty() {
        return Err(ingestion(path, "missing header row"));
    }
    let mut columns = vec![Vec::new(); labels.len()];
    for (row, record) in reader.records().enumerate() {
        // Row numbers are 1-based and count the header line.
        let line = row + 2;
        let record = record.map_err(|e| match e.kind() {
            csv::ErrorKind::UnequalLengths { expected_len, len, .. } => ingestion(
                path,
                format!("ragged row {line}: expected {expected_len} columns, found {len}"),
            ),
            _ => ingestion(path, e.to_string()),
        })?;
        for (col, cell) in record.iter().enumerate() {
            let value: f64 = cell.parse().map_err(|_| {
                ingestion(path, format!("non-numeric cell {cell:?} at row {line}, column {}", col + 1))
            })?;
            if !value.is_finite() {
                return Err(ingestion(
                    path,
                    format!("non-finite value at row {line}, column {}", col + 1),
                ));
            }
            columns[col].push(value);
        }
    }
    Ok(labels.into_iter().zip(columns).collect())
}

fn read_raw(path: &Path) -> Result<Vec<(String, Vec<f64>)>> {
    let side = sidecar_path(path);
    let sidecar: RawSidecar = serde_json::from_reader(BufReader::new(
        File::open(&side).map_err(|e| ingestion(&side, e.to_string()))?,
    ))
    .map_err(|e| ingestion(&side, e.to_string()))?;
    let mut bytes = Vec::new();
    BufReader::new(File::open(path).map_err(|e| ingestion(path, e.to_string()))?)
        .read_to_end(&mut bytes)?;
    let expected = sidecar.channels * sidecar.length * 8;
    if bytes.len() != expected {
        return Err(ingestion(
            path,
            format!("expected {expected} bytes for {} x {} doubles, found {}", sidecar.channels, sidecar.length, bytes.len()),
        ));
    }
    let values: Vec<f64> = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect();
    let mut out = Vec::with_capacity(sidecar.channels);
    for ch in 0..sidecar.channels {
        let samples = values[ch * sidecar.length..(ch + 1) * sidecar.length].to_vec();
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return Err(ingestion(path, format!("non-finite value in channel {ch} at sample {i}")));
        }
        let label = sidecar.labels.get(ch).cloned().unwrap_or_else(|| format!("ch{ch}"));
        out.push((label, samples));
    }
    Ok(out)
}

/// Writes channels in the given format. CSV values use the shortest
/// representation that parses back to the identical double.
pub fn save_recording(path: &Path, format: Format, channels: &[TimeSeries]) -> Result<()> {
    let len = channels.first().map_or(0, TimeSeries::len);
    if channels.iter().any(|c| c.len() != len) {
        return Err(Error::invalid("all channels must have equal length"));
    }
    match format {
        Format::Csv => {
            let mut out = BufWriter::new(File::create(path)?);
            let header: Vec<&str> = channels.iter().map(TimeSeries::label).collect();
            writeln!(out, "{}", header.join(","))?;
            for i in 0..len {
                let row: Vec<String> = channels.iter().map(|c| c.samples[i].to_string()).collect();
                writeln!(out, "{}", row.join(","))?;
            }
            out.flush()?;
        }
        Format::RawF64 => {
            let mut out = BufWriter::new(File::create(path)?);
            for c in channels {
                for v in &c.samples {
                    out.write_all(&v.to_le_bytes())?;
                }
            }
            out.flush()?;
            let sidecar = RawSidecar {
                channels: channels.len(),
                length: len,
                labels: channels.iter().map(|c| c.label.clone()).collect(),
            };
            let file = File::create(sidecar_path(path))?;
            serde_json::to_writer_pretty(file, &sidecar).map_err(std::io::Error::other)?;
        }
    }
    Ok(())
}

/// Fully contained windows starting at `0, hop, 2*hop, ...`.
pub fn segment(ts: &TimeSeries, win: usize, hop: usize) -> Result<Vec<Segment>> {
    if win == 0 || hop == 0 {
        return Err(Error::invalid("window and hop must be positive"));
    }
    let n = ts.len();
    if win > n {
        return Err(Error::WindowExceedsSignal { window: win, len: n });
    }
    Ok((0..=(n - win) / hop)
        .map(|i| {
            let start = i * hop;
            Segment {
                parent: ts.label.clone(),
                start_index: start,
                samples: ts.samples[start..start + win].to_vec(),
            }
        })
        .collect())
}

/// Normalized biquad coefficients `(b, a)` with `a[0] = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Biquad {
    pub b: [f64; 3],
    pub a: [f64; 3],
}

impl Biquad {
    /// Notch with zeros on the unit circle at `±2π f0/fs` and poles at radius
    /// `1 - π bandwidth / fs`, scaled to unit gain at DC.
    pub fn notch(f0: f64, bandwidth: f64, fs: f64) -> Result<Self> {
        if !(f0 > 0.0 && f0 < fs / 2.0) {
            return Err(Error::invalid(format!("notch frequency {f0} Hz must lie in (0, {}) Hz", fs / 2.0)));
        }
        let r = 1.0 - std::f64::consts::PI * bandwidth / fs;
        if !(bandwidth > 0.0 && r > 0.0) {
            return Err(Error::invalid(format!("invalid notch bandwidth {bandwidth} Hz")));
        }
        let c = (2.0 * std::f64::consts::PI * f0 / fs).cos();
        let a = [1.0, -2.0 * r * c, r * r];
        let g = (a[0] + a[1] + a[2]) / (2.0 - 2.0 * c);
        Ok(Biquad { b: [g, -2.0 * c * g, g], a })
    }

    /// Pole radius, which fixes the transient time constant `1 / (1 - r)`.
    pub fn pole_radius(&self) -> f64 {
        self.a[2].sqrt()
    }

    /// Complex frequency response at `omega` rad/sample.
    pub fn response(&self, omega: f64) -> num_complex::Complex64 {
        let z1 = num_complex::Complex64::from_polar(1.0, -omega);
        let z2 = z1 * z1;
        (self.b[0] + self.b[1] * z1 + self.b[2] * z2) / (self.a[0] + self.a[1] * z1 + self.a[2] * z2)
    }

    fn dc_gain(&self) -> f64 {
        self.b.iter().sum::<f64>() / self.a.iter().sum::<f64>()
    }

    /// Transposed direct form II from state `(z1, z2)`.
    fn run_from(&self, x: &[f64], mut z1: f64, mut z2: f64) -> Vec<f64> {
        let Biquad { b, a } = *self;
        x.iter()
            .map(|&v| {
                let y = b[0] * v + z1;
                z1 = b[1] * v - a[1] * y + z2;
                z2 = b[2] * v - a[2] * y;
                y
            })
            .collect()
    }

    /// One causal pass. The constant part `x[0]` starts from its steady
    /// state; for the remainder the initial state is the least-squares choice
    /// that minimizes output energy over the first few time constants, which
    /// cancels the start-up transient. Both choices are linear in `x`.
    fn pass(&self, x: &[f64]) -> Vec<f64> {
        let n = x.len();
        let x0 = x[0];
        let g = self.dc_gain();
        let rest: Vec<f64> = x.iter().map(|v| v - x0).collect();
        let mut y = self.run_from(&rest, 0.0, 0.0);
        let m = ((6.0 / (1.0 - self.pole_radius())).ceil() as usize).clamp(2, n);
        let zeros = vec![0.0; m];
        let o1 = self.run_from(&zeros, 1.0, 0.0);
        let o2 = self.run_from(&zeros, 0.0, 1.0);
        let dot = |p: &[f64], q: &[f64]| p.iter().zip(q).map(|(a, b)| a * b).sum::<f64>();
        let (g11, g12, g22) = (dot(&o1, &o1), dot(&o1, &o2), dot(&o2, &o2));
        let (r1, r2) = (dot(&o1, &y[..m]), dot(&o2, &y[..m]));
        let det = g11 * g22 - g12 * g12;
        let (d1, d2) = if det > 1e-12 * g11 * g22 {
            ((-r1 * g22 + r2 * g12) / det, (r1 * g12 - r2 * g11) / det)
        } else {
            (0.0, 0.0)
        };
        let free = self.run_from(&vec![0.0; n], d1, d2);
        for (v, f) in y.iter_mut().zip(free) {
            *v += f + g * x0;
        }
        y
    }

    /// Zero-phase forward-backward filtering.
    pub fn filtfilt(&self, x: &[f64]) -> Vec<f64> {
        if x.len() < 2 {
            return x.to_vec();
        }
        let mut y = self.pass(x);
        y.reverse();
        let mut y = self.pass(&y);
        y.reverse();
        y
    }
}

/// Zero-phase second-order notch at `f0` Hz.
pub fn notch_filter(ts: &TimeSeries, f0: f64, bandwidth: f64) -> Result<TimeSeries> {
    let filter = Biquad::notch(f0, bandwidth, ts.fs)?;
    Ok(ts.with_samples_unchecked(filter.filtfilt(&ts.samples)))
}

/// Adds white Gaussian noise with power `power(ts) / 10^(snr_db/10)`.
pub fn add_noise_at_snr<R: Rng + ?Sized>(ts: &TimeSeries, snr_db: f64, rng: &mut R) -> Result<TimeSeries> {
    let p = ts.power();
    if p <= 0.0 {
        return Err(Error::ZeroPower);
    }
    let sd = (p / 10f64.powf(snr_db / 10.0)).sqrt();
    let samples = ts
        .samples
        .iter()
        .map(|&v| {
            let w: f64 = rng.sample(StandardNormal);
            v + sd * w
        })
        .collect();
    Ok(ts.with_samples_unchecked(samples))
}

/// Standardizes to zero mean and unit sample standard deviation.
pub fn zscore(ts: &TimeSeries) -> Result<TimeSeries> {
    zscore_slice(&ts.samples).map(|s| ts.with_samples_unchecked(s))
}

pub fn zscore_slice(x: &[f64]) -> Result<Vec<f64>> {
    if x.len() < 2 {
        return Err(Error::ZeroVariance);
    }
    let m = mean(x);
    let sd = variance(x).sqrt();
    if !(sd > 0.0) || sd <= f64::EPSILON * m.abs() {
        return Err(Error::ZeroVariance);
    }
    Ok(x.iter().map(|v| (v - m) / sd).collect())
}

pub fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Unbiased sample variance.
pub fn variance(x: &[f64]) -> f64 {
    let m = mean(x);
    x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (x.len() as f64 - 1.0)
}

pub fn power(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64
}

pub fn rms(x: &[f64]) -> f64 {
    power(x).sqrt()
}
