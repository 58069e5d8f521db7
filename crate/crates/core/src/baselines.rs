//! Linear baselines: magnitude-squared coherence spectrograms and
//! VAR-based Granger causality in the time and frequency domains.
//!
//! Channel 0 of every two-channel model is `x`, channel 1 is `y`.

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::significance::{coherence_cl, surrogate_cls, SurrogateConfig, SurrogateDistribution};
use crate::signal;
use crate::TimeSeries;

/// Inner averaging for coherence estimates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WelchParams {
    pub sub_len: usize,
    pub sub_hop: usize,
}

impl Default for WelchParams {
    fn default() -> Self {
        WelchParams { sub_len: 256, sub_hop: 128 }
    }
}

fn hann(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| 0.5 - 0.5 * (2.0 * std::f64::consts::PI * i as f64 / n as f64).cos())
        .collect()
}

/// Coherence averaged over Hann-tapered, mean-removed sub-segments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coherence {
    pub freqs: Vec<f64>,
    pub values: Vec<f64>,
    pub n_segments: usize,
}

pub fn welch_coherence(x: &[f64], y: &[f64], fs: f64, p: &WelchParams) -> Result<Coherence> {
    if x.len() != y.len() {
        return Err(Error::RowMismatch(format!("x has {} samples, y {}", x.len(), y.len())));
    }
    if p.sub_len < 2 || p.sub_hop == 0 {
        return Err(Error::invalid("sub-segment length must be at least 2 and hop positive"));
    }
    let n_seg = if x.len() >= p.sub_len { (x.len() - p.sub_len) / p.sub_hop + 1 } else { 0 };
    if n_seg < 2 {
        return Err(Error::invalid(format!(
            "coherence needs at least 2 sub-segments of {} samples, window has {}",
            p.sub_len,
            x.len()
        )));
    }
    let w = hann(p.sub_len);
    let fft = FftPlanner::new().plan_fft_forward(p.sub_len);
    let bins = p.sub_len / 2 + 1;
    let (mut sxx, mut syy) = (vec![0.0; bins], vec![0.0; bins]);
    let mut sxy = vec![Complex64::new(0.0, 0.0); bins];
    let tapered = |s: &[f64]| -> Vec<Complex64> {
        let m = signal::mean(s);
        s.iter().zip(&w).map(|(v, w)| Complex64::new((v - m) * w, 0.0)).collect()
    };
    for k in 0..n_seg {
        let r = k * p.sub_hop..k * p.sub_hop + p.sub_len;
        let (mut fx, mut fy) = (tapered(&x[r.clone()]), tapered(&y[r]));
        fft.process(&mut fx);
        fft.process(&mut fy);
        for b in 0..bins {
            sxx[b] += fx[b].norm_sqr();
            syy[b] += fy[b].norm_sqr();
            sxy[b] += fx[b] * fy[b].conj();
        }
    }
    let values = (0..bins)
        .map(|b| {
            let den = sxx[b] * syy[b];
            if den > 0.0 {
                (sxy[b].norm_sqr() / den).min(1.0)
            } else {
                0.0
            }
        })
        .collect();
    let freqs = (0..bins).map(|b| b as f64 * fs / p.sub_len as f64).collect();
    Ok(Coherence { freqs, values, n_segments: n_seg })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoherenceSpectrogram {
    /// `values[window][bin]`, each in [0, 1].
    pub values: Vec<Vec<f64>>,
    pub freqs: Vec<f64>,
    /// Window centres in seconds.
    pub times: Vec<f64>,
    pub cl95: f64,
    pub n_segments: usize,
    pub welch: WelchParams,
}

impl CoherenceSpectrogram {
    /// Rows are frequency bins, columns window centres.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("freq_hz");
        for t in &self.times {
            s.push_str(&format!(",{t}"));
        }
        s.push('\n');
        for (b, f) in self.freqs.iter().enumerate() {
            s.push_str(&f.to_string());
            for w in &self.values {
                s.push_str(&format!(",{}", w[b]));
            }
            s.push('\n');
        }
        s
    }
}

pub fn coherence_spectrogram(
    x: &TimeSeries,
    y: &TimeSeries,
    win: usize,
    hop: usize,
    welch: &WelchParams,
) -> Result<CoherenceSpectrogram> {
    if x.len() != y.len() {
        return Err(Error::RowMismatch(format!("x has {} samples, y {}", x.len(), y.len())));
    }
    let segs = signal::segment(x, win, hop)?;
    let fs = x.fs();
    let results: Vec<Coherence> = segs
        .par_iter()
        .map(|s| {
            let r = s.start_index..s.start_index + win;
            welch_coherence(&x.samples()[r.clone()], &y.samples()[r], fs, welch)
        })
        .collect::<Result<_>>()?;
    let n_segments = results[0].n_segments;
    Ok(CoherenceSpectrogram {
        freqs: results[0].freqs.clone(),
        times: segs.iter().map(|s| (s.start_index as f64 + win as f64 / 2.0) / fs).collect(),
        values: results.into_iter().map(|c| c.values).collect(),
        cl95: coherence_cl(n_segments, 0.95)?,
        n_segments,
        welch: *welch,
    })
}

/// Two-channel vector autoregression without intercept (data are demeaned).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarModel {
    pub order: usize,
    /// `coeffs[k][i][j]`: effect of channel `j` at lag `k+1` on channel `i`.
    pub coeffs: Vec<[[f64; 2]; 2]>,
    pub std_errors: Vec<[[f64; 2]; 2]>,
    /// Maximum-likelihood residual covariance.
    pub resid_cov: [[f64; 2]; 2],
    /// Residual variances of univariate AR models of the same order fitted
    /// on the same sample, per channel.
    pub restricted_var: [f64; 2],
    pub n_obs: usize,
    pub spectral_radius: f64,
}

impl VarModel {
    pub fn is_stable(&self) -> bool {
        self.spectral_radius < 1.0
    }
}

/// Lagged cross-products from a common starting sample.
struct Gram {
    /// Regressors ordered `[x_{t-1}, y_{t-1}, x_{t-2}, …]`.
    zz: DMatrix<f64>,
    zy: DMatrix<f64>,
    yy: Matrix2<f64>,
    n: usize,
}

impl Gram {
    fn new(x: &[f64], y: &[f64], max_lag: usize, start: usize) -> Gram {
        let n = x.len() - start;
        let p = 2 * max_lag;
        let mut z = DMatrix::zeros(n, p);
        let mut t = DMatrix::zeros(n, 2);
        for r in 0..n {
            let s = start + r;
            for k in 1..=max_lag {
                z[(r, 2 * (k - 1))] = x[s - k];
                z[(r, 2 * (k - 1) + 1)] = y[s - k];
            }
            t[(r, 0)] = x[s];
            t[(r, 1)] = y[s];
        }
        let tt = t.transpose() * &t;
        Gram {
            zz: z.transpose() * &z,
            zy: z.transpose() * &t,
            yy: Matrix2::new(tt[(0, 0)], tt[(0, 1)], tt[(1, 0)], tt[(1, 1)]),
            n,
        }
    }

    /// Least squares on the regressor subset `idx` for target column `col`
    /// (`None` for both columns).
    fn solve(&self, idx: &[usize], order: usize) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
        let k = idx.len();
        let g = DMatrix::from_fn(k, k, |i, j| self.zz[(idx[i], idx[j])]);
        let c = DMatrix::from_fn(k, 2, |i, j| self.zy[(idx[i], j)]);
        let chol = g.cholesky().ok_or(Error::Singular { order })?;
        let b = chol.solve(&c);
        if b.iter().any(|v| !v.is_finite()) {
            return Err(Error::Singular { order });
        }
        Ok((b, chol.inverse()))
    }

    fn fit(&self, m: usize) -> Result<VarModel> {
        let n = self.n as f64;
        if m == 0 {
            let s = self.yy / n;
            let cov = [[s[(0, 0)], s[(0, 1)]], [s[(1, 0)], s[(1, 1)]]];
            return Ok(VarModel {
                order: 0,
                coeffs: vec![],
                std_errors: vec![],
                resid_cov: cov,
                restricted_var: [cov[0][0], cov[1][1]],
                n_obs: self.n,
                spectral_radius: 0.0,
            });
        }
        let idx: Vec<usize> = (0..2 * m).collect();
        let (b, inv) = self.solve(&idx, m)?;
        let c = DMatrix::from_fn(2 * m, 2, |i, j| self.zy[(i, j)]);
        let explained = c.transpose() * &b;
        let mut cov = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                cov[i][j] = (self.yy[(i, j)] - 0.5 * (explained[(i, j)] + explained[(j, i)])) / n;
            }
        }
        let mut restricted_var = [0.0; 2];
        for (ch, r) in restricted_var.iter_mut().enumerate() {
            let own: Vec<usize> = (0..m).map(|k| 2 * k + ch).collect();
            let (br, _) = self.solve(&own, m)?;
            let fit: f64 = own.iter().enumerate().map(|(i, &row)| self.zy[(row, ch)] * br[(i, ch)]).sum();
            *r = (self.yy[(ch, ch)] - fit) / n;
        }
        let coeffs: Vec<[[f64; 2]; 2]> = (0..m)
            .map(|k| [[b[(2 * k, 0)], b[(2 * k + 1, 0)]], [b[(2 * k, 1)], b[(2 * k + 1, 1)]]])
            .collect();
        let se = |k: usize, i: usize, j: usize| (cov[i][i] * inv[(2 * k + j, 2 * k + j)]).max(0.0).sqrt();
        let std_errors = (0..m).map(|k| [[se(k, 0, 0), se(k, 0, 1)], [se(k, 1, 0), se(k, 1, 1)]]).collect();
        Ok(VarModel {
            order: m,
            spectral_radius: spectral_radius(&coeffs),
            coeffs,
            std_errors,
            resid_cov: cov,
            restricted_var,
            n_obs: self.n,
        })
    }
}

fn spectral_radius(coeffs: &[[[f64; 2]; 2]]) -> f64 {
    let m = coeffs.len();
    if m == 0 {
        return 0.0;
    }
    let mut c = DMatrix::zeros(2 * m, 2 * m);
    for (k, a) in coeffs.iter().enumerate() {
        for i in 0..2 {
            for j in 0..2 {
                c[(i, 2 * k + j)] = a[i][j];
            }
        }
    }
    for r in 2..2 * m {
        c[(r, r - 2)] = 1.0;
    }
    c.complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn demeaned_pair(x: &TimeSeries, y: &TimeSeries) -> Result<(Vec<f64>, Vec<f64>)> {
    if x.len() != y.len() {
        return Err(Error::RowMismatch(format!("x has {} samples, y {}", x.len(), y.len())));
    }
    let d = |s: &[f64]| {
        let m = signal::mean(s);
        s.iter().map(|v| v - m).collect::<Vec<f64>>()
    };
    Ok((d(x.samples()), d(y.samples())))
}

fn check_length(n: usize, m: usize) -> Result<()> {
    if n <= 2 * m + 10 {
        return Err(Error::invalid(format!(
            "{n} samples are too few for order {m}; need more than {}",
            2 * m + 10
        )));
    }
    Ok(())
}

/// Least-squares VAR(m) fit on samples `m..N`.
pub fn fit_var(x: &TimeSeries, y: &TimeSeries, m: usize) -> Result<VarModel> {
    let (x, y) = demeaned_pair(x, y)?;
    check_length(x.len(), m)?;
    Gram::new(&x, &y, m, m).fit(m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    Bic,
    Aicc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderSelection {
    pub order: usize,
    pub criterion: Criterion,
    /// Criterion value for orders `1..=m_max`.
    pub values: Vec<f64>,
    pub n_eff: usize,
}

fn criterion_value(c: Criterion, cov: &[[f64; 2]; 2], m: usize, n: usize) -> f64 {
    let det = cov[0][0] * cov[1][1] - cov[0][1] * cov[1][0];
    let (p, n) = ((4 * m) as f64, n as f64);
    match c {
        Criterion::Bic => det.ln() + n.ln() * p / n,
        Criterion::Aicc => det.ln() + 2.0 * p / n + 2.0 * p * (p + 1.0) / (n - p - 1.0),
    }
}

/// Fits orders `1..=m_max` on the common sample `m_max..N` and returns the
/// criterion minimizer, ties going to the smaller order.
pub fn select_order(x: &TimeSeries, y: &TimeSeries, m_max: usize, criterion: Criterion) -> Result<OrderSelection> {
    if m_max == 0 {
        return Err(Error::invalid("m_max must be at least 1"));
    }
    let (x, y) = demeaned_pair(x, y)?;
    check_length(x.len(), m_max)?;
    let gram = Gram::new(&x, &y, m_max, m_max);
    let mut values = Vec::with_capacity(m_max);
    for m in 1..=m_max {
        let model = gram.fit(m)?;
        values.push(criterion_value(criterion, &model.resid_cov, m, gram.n));
    }
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v < values[best] {
            best = i;
        }
    }
    Ok(OrderSelection { order: best + 1, criterion, values, n_eff: gram.n })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    XToY,
    YToX,
}

impl Direction {
    /// (source, target) channel indices.
    fn channels(self) -> (usize, usize) {
        match self {
            Direction::XToY => (0, 1),
            Direction::YToX => (1, 0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GcValue {
    /// Nats, never negative.
    pub value: f64,
    /// The raw log-ratio was negative and has been set to zero.
    pub clipped: bool,
}

/// `ln(restricted residual variance / full residual variance)` of the
/// target channel.
pub fn gc_time_domain(model: &VarModel, direction: Direction) -> Result<GcValue> {
    let (_, t) = direction.channels();
    let (r, f) = (model.restricted_var[t], model.resid_cov[t][t]);
    if !(r > 0.0 && f > 0.0) {
        return Err(Error::NonPositiveVariance(format!("restricted {r}, full {f}")));
    }
    let raw = (r / f).ln();
    Ok(if raw < 0.0 { GcValue { value: 0.0, clipped: true } } else { GcValue { value: raw, clipped: false } })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GcSpectrum {
    pub freqs: Vec<f64>,
    pub x_to_y: Vec<f64>,
    pub y_to_x: Vec<f64>,
}

/// `H(ω) = (I − Σ_k A_k e^{−iωk})^{-1}`.
fn transfer(model: &VarModel, omega: f64) -> [[Complex64; 2]; 2] {
    let one = Complex64::new(1.0, 0.0);
    let mut a = [[one, Complex64::new(0.0, 0.0)], [Complex64::new(0.0, 0.0), one]];
    for (k, c) in model.coeffs.iter().enumerate() {
        let e = Complex64::from_polar(1.0, -omega * (k + 1) as f64);
        for i in 0..2 {
            for j in 0..2 {
                a[i][j] -= c[i][j] * e;
            }
        }
    }
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    [[a[1][1] / det, -a[0][1] / det], [-a[1][0] / det, a[0][0] / det]]
}

/// Geweke spectral Granger causality on `freqs` (Hz) at sampling rate `fs`.
pub fn gc_spectrum(model: &VarModel, freqs: &[f64], fs: f64) -> Result<GcSpectrum> {
    let s = &model.resid_cov;
    let mut x_to_y = Vec::with_capacity(freqs.len());
    let mut y_to_x = Vec::with_capacity(freqs.len());
    for (idx, &f) in freqs.iter().enumerate() {
        let h = transfer(model, 2.0 * std::f64::consts::PI * f / fs);
        // S = H Σ H*
        let spec = |i: usize, j: usize| -> Complex64 {
            let mut acc = Complex64::new(0.0, 0.0);
            for a in 0..2 {
                for b in 0..2 {
                    acc += h[i][a] * s[a][b] * h[j][b].conj();
                }
            }
            acc
        };
        for dir in [Direction::XToY, Direction::YToX] {
            let (src, tgt) = dir.channels();
            let stt = spec(tgt, tgt).re;
            let partial = s[src][src] - s[src][tgt] * s[src][tgt] / s[tgt][tgt];
            let intrinsic = stt - partial * h[tgt][src].norm_sqr();
            if !(intrinsic > 0.0 && stt > 0.0) {
                return Err(Error::NonPositiveSpectrum { index: idx });
            }
            let v = (stt / intrinsic).ln();
            match dir {
                Direction::XToY => x_to_y.push(v),
                Direction::YToX => y_to_x.push(v),
            }
        }
    }
    Ok(GcSpectrum { freqs: freqs.to_vec(), x_to_y, y_to_x })
}

/// Largest order the spectrogram will consider for a window of `len`.
pub fn max_order_for(len: usize, m_max: usize) -> usize {
    m_max.min(len.saturating_sub(11) / 2)
}

/// One window of a GC spectrogram.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GcWindow {
    pub start: usize,
    pub order: Option<usize>,
    pub spectrum: Option<GcSpectrum>,
    /// Why the window is masked.
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GcSpectrogram {
    pub freqs: Vec<f64>,
    pub times: Vec<f64>,
    pub windows: Vec<GcWindow>,
    pub criterion: Criterion,
    pub m_max: usize,
    /// Per-frequency thresholds, when computed.
    pub cl95_x_to_y: Option<Vec<f64>>,
    pub cl95_y_to_x: Option<Vec<f64>>,
}

impl GcSpectrogram {
    /// `NaN` marks masked windows. Rows are frequency bins.
    pub fn to_csv(&self, direction: Direction) -> String {
        let mut s = String::from("freq_hz");
        for t in &self.times {
            s.push_str(&format!(",{t}"));
        }
        s.push('\n');
        for (b, f) in self.freqs.iter().enumerate() {
            s.push_str(&f.to_string());
            for w in &self.windows {
                let v = w.spectrum.as_ref().map_or(f64::NAN, |sp| match direction {
                    Direction::XToY => sp.x_to_y[b],
                    Direction::YToX => sp.y_to_x[b],
                });
                s.push_str(&format!(",{v}"));
            }
            s.push('\n');
        }
        s
    }

    pub fn with_cls(mut self, x_to_y: Vec<f64>, y_to_x: Vec<f64>) -> Self {
        self.cl95_x_to_y = Some(x_to_y);
        self.cl95_y_to_x = Some(y_to_x);
        self
    }
}

/// Order selection, fit and spectrum for one window of samples.
pub fn gc_window(x: &[f64], y: &[f64], fs: f64, m_max: usize, criterion: Criterion, freqs: &[f64]) -> Result<(usize, GcSpectrum)> {
    let tx = TimeSeries::new(x.to_vec(), fs, "x")?;
    let ty = TimeSeries::new(y.to_vec(), fs, "y")?;
    let m_cap = max_order_for(x.len(), m_max);
    if m_cap == 0 {
        return Err(Error::invalid(format!("window of {} samples is too short for any order", x.len())));
    }
    let sel = select_order(&tx, &ty, m_cap, criterion)?;
    let model = fit_var(&tx, &ty, sel.order)?;
    if !model.is_stable() {
        return Err(Error::invalid(format!(
            "fitted order {} model is unstable (spectral radius {:.4})",
            sel.order, model.spectral_radius
        )));
    }
    Ok((sel.order, gc_spectrum(&model, freqs, fs)?))
}

pub fn gc_spectrogram(
    x: &TimeSeries,
    y: &TimeSeries,
    win: usize,
    hop: usize,
    m_max: usize,
    criterion: Criterion,
    freqs: &[f64],
) -> Result<GcSpectrogram> {
    if x.len() != y.len() {
        return Err(Error::RowMismatch(format!("x has {} samples, y {}", x.len(), y.len())));
    }
    let segs = signal::segment(x, win, hop)?;
    let fs = x.fs();
    let windows = segs
        .par_iter()
        .map(|s| {
            let r = s.start_index..s.start_index + win;
            match gc_window(&x.samples()[r.clone()], &y.samples()[r], fs, m_max, criterion, freqs) {
                Ok((order, sp)) => GcWindow { start: s.start_index, order: Some(order), spectrum: Some(sp), error: None },
                Err(e) => GcWindow { start: s.start_index, order: None, spectrum: None, error: Some(e.to_string()) },
            }
        })
        .collect();
    Ok(GcSpectrogram {
        freqs: freqs.to_vec(),
        times: segs.iter().map(|s| (s.start_index as f64 + win as f64 / 2.0) / fs).collect(),
        windows,
        criterion,
        m_max,
        cl95_x_to_y: None,
        cl95_y_to_x: None,
    })
}

/// Surrogate thresholds for [`gc_spectrogram`] cells: the identical
/// per-window pipeline on independent white pairs of window length.
/// Returns `(x→y, y→x)` distributions per frequency.
pub fn gc_spectrogram_cls(
    fs: f64,
    m_max: usize,
    criterion: Criterion,
    freqs: &[f64],
    cfg: &SurrogateConfig,
) -> Result<(Vec<SurrogateDistribution>, Vec<SurrogateDistribution>)> {
    let names: Vec<String> = ["x->y", "y->x"]
        .iter()
        .flat_map(|d| freqs.iter().map(move |f| format!("gc {d} @ {f} Hz")))
        .collect();
    let mut all = surrogate_cls(&names, cfg, |x, y| {
        let (_, sp) = gc_window(x, y, fs, m_max, criterion, freqs)?;
        Ok(sp.x_to_y.into_iter().chain(sp.y_to_x).collect())
    })?;
    let back = all.split_off(freqs.len());
    Ok((all, back))
}
