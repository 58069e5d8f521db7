//! Undecimated dyadic wavelet decomposition.
//!
//! A two-channel prototype pair `(h0, h1)` is iterated into one filter per
//! channel:
//!
//! ```text
//! H_{J,0}(z) = prod_{k=0}^{J-1} H0(z^{2^k})
//! H_{j,1}(z) = H1(z^{2^{j-1}}) prod_{k=0}^{j-2} H0(z^{2^k})
//! ```
//!
//! and each channel is the circular convolution of the input with its
//! filter. Nothing is downsampled, so every component keeps the input
//! length and the transform commutes with circular shifts. Filters are
//! applied centred on their energy centroid so components of different
//! bands stay time-aligned; the per-channel offsets are kept in the
//! decomposition and undone by [`swt_reconstruct`].

use std::f64::consts::SQRT_2;
use std::io::Write as _;
use std::path::Path;

use crate::{Error, Result, TimeSeries};

/// Low-pass/high-pass prototype pair.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterPair {
    h0: Vec<f64>,
    h1: Vec<f64>,
}

impl FilterPair {
    pub fn new(h0: Vec<f64>, h1: Vec<f64>) -> Result<Self> {
        if h0.is_empty() || h1.is_empty() {
            return Err(Error::invalid("prototype filters must be non-empty"));
        }
        if h0.iter().chain(&h1).any(|v| !v.is_finite()) {
            return Err(Error::invalid("prototype filters must be finite"));
        }
        Ok(FilterPair { h0, h1 })
    }

    /// Orthogonal pair whose high-pass is the alternating-sign reversal
    /// `h1[n] = (-1)^n h0[L-1-n]`.
    pub fn from_lowpass(h0: Vec<f64>) -> Result<Self> {
        let l = h0.len();
        let h1 = (0..l)
            .map(|n| if n % 2 == 0 { h0[l - 1 - n] } else { -h0[l - 1 - n] })
            .collect();
        FilterPair::new(h0, h1)
    }

    pub fn lowpass(&self) -> &[f64] {
        &self.h0
    }

    pub fn highpass(&self) -> &[f64] {
        &self.h1
    }

    /// Length of the longer prototype.
    pub fn len(&self) -> usize {
        self.h0.len().max(self.h1.len())
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Checks `sum(h0) = √2`, `sum(h1) = 0` and double-shift orthonormality
    /// of `h0`, all within `tol`.
    pub fn is_orthogonal(&self, tol: f64) -> bool {
        let s0: f64 = self.h0.iter().sum();
        let s1: f64 = self.h1.iter().sum();
        if (s0 - SQRT_2).abs() > tol || s1.abs() > tol {
            return false;
        }
        let l = self.h0.len();
        (0..l.div_ceil(2)).all(|k| {
            let c: f64 = (0..l.saturating_sub(2 * k)).map(|n| self.h0[n] * self.h0[n + 2 * k]).sum();
            (c - if k == 0 { 1.0 } else { 0.0 }).abs() <= tol
        })
    }
}

/// Four-tap orthogonal Daubechies pair (two vanishing moments).
pub fn daubechies_d4() -> FilterPair {
    let s3 = 3f64.sqrt();
    let d = 4.0 * SQRT_2;
    FilterPair::from_lowpass(vec![(1.0 + s3) / d, (3.0 + s3) / d, (3.0 - s3) / d, (1.0 - s3) / d])
        .expect("finite taps")
}

/// Inserts `factor - 1` zeros between taps, realizing `H(z^factor)`.
pub fn upsample(h: &[f64], factor: usize) -> Vec<f64> {
    if h.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0.0; (h.len() - 1) * factor + 1];
    for (i, &v) in h.iter().enumerate() {
        out[i * factor] = v;
    }
    out
}

/// Full linear convolution.
pub fn convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0.0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Channel filters for a `levels`-scale decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct IteratedFilters {
    levels: usize,
    detail: Vec<Vec<f64>>,
    approx: Vec<f64>,
    proto: FilterPair,
}

impl IteratedFilters {
    pub fn levels(&self) -> usize {
        self.levels
    }

    /// `h_{j,1}` for `j = 1..=levels`, index `j - 1`.
    pub fn detail(&self) -> &[Vec<f64>] {
        &self.detail
    }

    /// `h_{J,0}`.
    pub fn approx(&self) -> &[f64] {
        &self.approx
    }

    pub fn prototype(&self) -> &FilterPair {
        &self.proto
    }

    /// Filters in component order: details `1..=J`, then the approximation.
    pub fn channels(&self) -> impl Iterator<Item = &[f64]> {
        self.detail.iter().map(Vec::as_slice).chain(std::iter::once(self.approx.as_slice()))
    }

    pub fn max_len(&self) -> usize {
        self.channels().map(<[f64]>::len).max().unwrap_or(0)
    }
}

pub fn build_iterated_filters(proto: &FilterPair, levels: usize) -> Result<IteratedFilters> {
    if levels < 1 {
        return Err(Error::invalid("the number of scales must be at least 1"));
    }
    let mut detail = Vec::with_capacity(levels);
    // Running product prod_{k<j-1} H0(z^{2^k}); empty product is the unit impulse.
    let mut low = vec![1.0];
    for j in 1..=levels {
        let factor = 1usize << (j - 1);
        detail.push(convolve(&upsample(&proto.h1, factor), &low));
        low = convolve(&upsample(&proto.h0, factor), &low);
    }
    Ok(IteratedFilters { levels, detail, approx: low, proto: proto.clone() })
}

/// Frequency band of one decomposition channel.
#[derive(Debug, Clone, PartialEq)]
pub struct Band {
    /// ASCII identifier (`"beta"`, or `"d2"`/`"a6"` when no name fits).
    pub key: String,
    /// Display label (`"β"`, `"128-256 Hz"`).
    pub label: String,
    /// Channel identifier, `"d{j}"` for details and `"a{J}"` for the approximation.
    pub channel: String,
    pub f_low: f64,
    pub f_high: f64,
}

impl Band {
    pub fn matches(&self, name: &str) -> bool {
        self.key == name || self.channel == name || self.label == name
    }
}

const NAMED_BANDS: &[(f64, f64, &str, &str)] = &[
    (0.0, 4.0, "delta", "δ"),
    (4.0, 8.0, "theta", "θ"),
    (0.0, 8.0, "delta_theta", "δ/θ"),
    (8.0, 16.0, "alpha", "α"),
    (16.0, 32.0, "beta", "β"),
    (32.0, 64.0, "low_gamma", "low γ"),
    (64.0, 128.0, "high_gamma", "high γ"),
];

fn name_band(channel: String, f_low: f64, f_high: f64) -> Band {
    let named = NAMED_BANDS
        .iter()
        .find(|(lo, hi, _, _)| (lo - f_low).abs() < 1e-9 && (hi - f_high).abs() < 1e-9);
    match named {
        Some(&(_, _, key, label)) => Band { key: key.into(), label: label.into(), channel, f_low, f_high },
        None => Band {
            key: channel.clone(),
            label: format!("{f_low}-{f_high} Hz"),
            channel,
            f_low,
            f_high,
        },
    }
}

/// Nominal band edges of every channel, details `1..=J` then the approximation.
/// Named neural bands are assigned when the edges match exactly, which
/// happens for sampling rates that are powers of two times 256 Hz.
pub fn band_map(fs: f64, levels: usize) -> Vec<Band> {
    let mut bands: Vec<Band> = (1..=levels)
        .map(|j| {
            let hi = fs / f64::from(1u32 << j);
            name_band(format!("d{j}"), hi / 2.0, hi)
        })
        .collect();
    bands.push(name_band(format!("a{levels}"), 0.0, fs / f64::from(1u32 << (levels + 1))));
    bands
}

/// `y[n] = sum_k h[k] x[(n + offset - k) mod N]`.
fn circular_filter(x: &[f64], h: &[f64], offset: usize) -> Vec<f64> {
    let n = x.len();
    let l = h.len();
    let base = l - 1 - offset;
    let ext: Vec<f64> = (0..n + l - 1)
        .map(|i| x[(i + n * l - base) % n])
        .collect();
    (0..n)
        .map(|i| {
            let window = &ext[i..i + l];
            h.iter().zip(window.iter().rev()).map(|(a, b)| a * b).sum()
        })
        .collect()
}

/// Rounded energy centroid `sum n h[n]^2 / sum h[n]^2`.
pub fn centering_offset(h: &[f64]) -> usize {
    let e: f64 = h.iter().map(|v| v * v).sum();
    let c: f64 = h.iter().enumerate().map(|(n, v)| n as f64 * v * v).sum();
    (c / e).round() as usize
}

/// Components `x_{1,1}, ..., x_{J,1}, x_{J,0}` with their bands.
#[derive(Debug, Clone, PartialEq)]
pub struct SubbandDecomposition {
    components: Vec<TimeSeries>,
    bands: Vec<Band>,
    offsets: Vec<usize>,
    levels: usize,
    proto: FilterPair,
}

impl SubbandDecomposition {
    pub fn components(&self) -> &[TimeSeries] {
        &self.components
    }

    pub fn bands(&self) -> &[Band] {
        &self.bands
    }

    /// Circular advance applied to each channel to centre its filter.
    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn len(&self) -> usize {
        self.components.first().map_or(0, TimeSeries::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.bands.iter().position(|b| b.matches(name))
    }

    pub fn component(&self, name: &str) -> Result<&TimeSeries> {
        self.index_of(name)
            .map(|i| &self.components[i])
            .ok_or_else(|| Error::UnknownBand(name.to_owned()))
    }

    pub fn band(&self, name: &str) -> Result<&Band> {
        self.index_of(name).map(|i| &self.bands[i]).ok_or_else(|| Error::UnknownBand(name.to_owned()))
    }

    /// Builds a decomposition from externally supplied components (for
    /// instance a scaled or summed decomposition), keeping this one's
    /// layout.
    pub fn with_components(&self, components: Vec<TimeSeries>) -> Result<Self> {
        if components.len() != self.components.len()
            || components.iter().any(|c| c.len() != self.len())
        {
            return Err(Error::invalid("component layout does not match the decomposition"));
        }
        Ok(SubbandDecomposition { components, ..self.clone() })
    }

    /// CSV with one column per component, header = band labels.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let header: Vec<&str> = self.bands.iter().map(|b| b.label.as_str()).collect();
        out.push_str(&header.join(","));
        out.push('\n');
        for i in 0..self.len() {
            let row: Vec<String> = self.components.iter().map(|c| c.samples()[i].to_string()).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut f = std::fs::File::create(path)?;
        f.write_all(self.to_csv().as_bytes())?;
        Ok(())
    }
}

pub fn swt_decompose(ts: &TimeSeries, filt: &IteratedFilters) -> Result<SubbandDecomposition> {
    let longest = filt.max_len();
    if ts.len() < longest {
        return Err(Error::SignalTooShort { len: ts.len(), filter_len: longest });
    }
    let bands = band_map(ts.fs(), filt.levels);
    let mut components = Vec::with_capacity(bands.len());
    let mut offsets = Vec::with_capacity(bands.len());
    for (h, band) in filt.channels().zip(&bands) {
        let off = centering_offset(h);
        let y = circular_filter(ts.samples(), h, off);
        components.push(TimeSeries::new(y, ts.fs(), format!("{} {}", ts.label(), band.key))?);
        offsets.push(off);
    }
    Ok(SubbandDecomposition { components, bands, offsets, levels: filt.levels, proto: filt.proto.clone() })
}

fn rotate_right(x: &[f64], by: usize) -> Vec<f64> {
    let n = x.len();
    let by = by % n;
    let mut out = Vec::with_capacity(n);
    out.extend_from_slice(&x[n - by..]);
    out.extend_from_slice(&x[..n - by]);
    out
}

/// Inverts [`swt_decompose`] by recursive two-channel synthesis with the
/// time-reversed prototypes and a gain of 1/2 per stage.
pub fn swt_reconstruct(dec: &SubbandDecomposition, proto: &FilterPair) -> Result<TimeSeries> {
    if dec.components.len() != dec.levels + 1 || dec.offsets.len() != dec.components.len() {
        return Err(Error::invalid("decomposition does not have J + 1 components"));
    }
    if *proto != dec.proto {
        return Err(Error::invalid("prototype filters do not match the decomposition"));
    }
    let n = dec.len();
    // Undo the centring advance on every channel.
    let raw: Vec<Vec<f64>> = dec
        .components
        .iter()
        .zip(&dec.offsets)
        .map(|(c, &off)| rotate_right(c.samples(), off))
        .collect();
    let mut approx = raw[dec.levels].clone();
    for j in (1..=dec.levels).rev() {
        let step = 1usize << (j - 1);
        let detail = &raw[j - 1];
        approx = (0..n)
            .map(|t| {
                let lo: f64 = proto.h0.iter().enumerate().map(|(k, h)| h * approx[(t + k * step) % n]).sum();
                let hi: f64 = proto.h1.iter().enumerate().map(|(k, h)| h * detail[(t + k * step) % n]).sum();
                0.5 * (lo + hi)
            })
            .collect();
    }
    let label = dec.components[0].label().rsplit_once(' ').map_or("", |(s, _)| s).to_owned();
    TimeSeries::new(approx, dec.components[0].fs(), label)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use num_complex::Complex64;
    use rand::Rng;
    use rand_distr::StandardNormal;
    use std::f64::consts::PI;

    fn noise(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = stream(seed, &[]);
        (0..n).map(|_| rng.sample(StandardNormal)).collect()
    }

    fn series(x: Vec<f64>) -> TimeSeries {
        TimeSeries::new(x, 1024.0, "x").unwrap()
    }

    fn dtft(h: &[f64], w: f64) -> Complex64 {
        h.iter().enumerate().map(|(n, &v)| v * Complex64::from_polar(1.0, -w * n as f64)).sum()
    }

    /// Solves the D4 design equations by Newton's method from a rough guess:
    /// normalization, orthonormality, double-shift orthogonality and two
    /// vanishing moments of the alternating-flip high-pass.
    fn d4_oracle() -> [f64; 4] {
        let f = |h: &[f64; 4]| -> [f64; 4] {
            [
                h[0] * h[2] + h[1] * h[3],
                h[0] - h[1] + h[2] - h[3],
                -h[1] + 2.0 * h[2] - 3.0 * h[3],
                h.iter().map(|v| v * v).sum::<f64>() - 1.0,
            ]
        };
        let mut h = [0.5, 0.8, 0.2, -0.1];
        for _ in 0..50 {
            let r = f(&h);
            let mut jac = nalgebra::Matrix4::zeros();
            for c in 0..4 {
                let mut hp = h;
                hp[c] += 1e-7;
                let rp = f(&hp);
                for k in 0..4 {
                    jac[(k, c)] = (rp[k] - r[k]) / 1e-7;
                }
            }
            let step = jac.lu().solve(&nalgebra::Vector4::from(r)).unwrap();
            for c in 0..4 {
                h[c] -= step[c];
            }
        }
        h
    }

    #[test]
    fn d4_matches_design_equations() {
        let p = daubechies_d4();
        assert!(p.is_orthogonal(1e-12));
        assert!((p.lowpass().iter().sum::<f64>() - SQRT_2).abs() < 1e-12);
        assert!((p.lowpass().iter().map(|v| v * v).sum::<f64>() - 1.0).abs() < 1e-12);
        let m0: f64 = p.highpass().iter().sum();
        let m1: f64 = p.highpass().iter().enumerate().map(|(n, v)| n as f64 * v).sum();
        assert!(m0.abs() < 1e-10 && m1.abs() < 1e-10);
        let oracle = d4_oracle();
        for (a, b) in oracle.iter().zip(p.lowpass()) {
            assert!((a - b).abs() < 1e-10, "{oracle:?} vs {:?}", p.lowpass());
        }
        // Orthonormal solution of the system also satisfies sum(h0) = √2.
        assert!((oracle.iter().sum::<f64>() - SQRT_2).abs() < 1e-10);
    }

    #[test]
    fn iterated_filter_lengths() {
        let p = daubechies_d4();
        let f1 = build_iterated_filters(&p, 1).unwrap();
        assert_eq!(f1.detail()[0], p.highpass());
        assert_eq!(f1.approx(), p.lowpass());
        let f2 = build_iterated_filters(&p, 2).unwrap();
        assert_eq!(f2.detail()[1].len(), 10);
        // h1(z^2) h0(z), convolved by hand
        let h0 = p.lowpass();
        let h1 = p.highpass();
        let mut hand = vec![0.0; 10];
        for (i, a) in h1.iter().enumerate() {
            for (k, b) in h0.iter().enumerate() {
                hand[2 * i + k] += a * b;
            }
        }
        for (a, b) in hand.iter().zip(&f2.detail()[1]) {
            assert!((a - b).abs() < 1e-15);
        }
        let l = 4usize;
        let f7 = build_iterated_filters(&p, 7).unwrap();
        for j in 1..=7usize {
            let half = 1usize << (j - 1);
            assert_eq!(f7.detail()[j - 1].len(), (l - 1) * half + (l - 1) * (half - 1) + 1);
        }
        assert_eq!(f7.approx().len(), (l - 1) * ((1 << 7) - 1) + 1);
        assert!(build_iterated_filters(&p, 0).is_err());
    }

    #[test]
    fn half_band_complementarity() {
        let p = daubechies_d4();
        for j in 1..=7u32 {
            let scale = f64::from(1u32 << (j - 1));
            for i in 0..4096 {
                let w = 2.0 * PI * i as f64 / 4096.0;
                let s = dtft(p.lowpass(), scale * w).norm_sqr() + dtft(p.highpass(), scale * w).norm_sqr();
                assert!((s - 2.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn band_map_tables() {
        let b = band_map(1024.0, 6);
        assert_eq!(b.len(), 7);
        assert_eq!((b[4].f_low, b[4].f_high, b[4].label.as_str()), (16.0, 32.0, "β"));
        assert_eq!((b[3].f_low, b[3].f_high, b[3].label.as_str()), (32.0, 64.0, "low γ"));
        assert_eq!((b[5].label.as_str(), b[5].key.as_str()), ("α", "alpha"));
        assert_eq!((b[6].f_low, b[6].f_high, b[6].label.as_str()), (0.0, 8.0, "δ/θ"));
        assert_eq!(b[0].label, "256-512 Hz");
        let b = band_map(512.0, 5);
        assert_eq!((b[3].f_low, b[3].f_high), (16.0, 32.0));
        let b = band_map(1024.0, 7);
        assert_eq!(b[6].label, "θ");
        assert_eq!(b[7].label, "δ");
        assert_eq!(b[2].label, "high γ");
        let b = band_map(1000.0, 6);
        assert_eq!(b[4].key, "d5");
    }

    #[test]
    fn impulse_gives_filters() {
        let filt = build_iterated_filters(&daubechies_d4(), 4).unwrap();
        let n = 128;
        let mut x = vec![0.0; n];
        x[0] = 1.0;
        let dec = swt_decompose(&series(x), &filt).unwrap();
        for ((c, h), &off) in dec.components().iter().zip(filt.channels()).zip(dec.offsets()) {
            for t in 0..n {
                let idx = (t + off) % n;
                let expect = if idx < h.len() { h[idx] } else { 0.0 };
                assert_eq!(c.samples()[t], expect);
            }
        }
    }

    #[test]
    fn sinusoid_lands_in_beta() {
        let filt = build_iterated_filters(&daubechies_d4(), 6).unwrap();
        let x: Vec<f64> = (0..4096).map(|i| (2.0 * PI * 24.0 * i as f64 / 1024.0).sin()).collect();
        let dec = swt_decompose(&series(x), &filt).unwrap();
        let energy: Vec<f64> = dec.components().iter().map(|c| c.power()).collect();
        let total: f64 = energy.iter().sum();
        let beta = energy[dec.index_of("beta").unwrap()];
        // D4 is only moderately selective: about 78% of a 24 Hz tone stays in
        // the 16-32 Hz channel, the rest leaks mainly into 32-64 Hz.
        assert!(beta / total >= 0.75, "share {}", beta / total);
        assert!(energy.iter().all(|&e| e <= beta));
        // Oracle: squared channel responses at 24 Hz.
        let w = 2.0 * PI * 24.0 / 1024.0;
        let gains: Vec<f64> = filt.channels().map(|h| dtft(h, w).norm_sqr()).collect();
        let share = gains[4] / gains.iter().sum::<f64>();
        assert!((share - beta / total).abs() < 1e-3);
    }

    #[test]
    fn shift_equivariance() {
        let filt = build_iterated_filters(&daubechies_d4(), 5).unwrap();
        let x = noise(512, 5);
        let shifted = rotate_right(&x, 17);
        let a = swt_decompose(&series(x), &filt).unwrap();
        let b = swt_decompose(&series(shifted), &filt).unwrap();
        for (ca, cb) in a.components().iter().zip(b.components()) {
            let expect = rotate_right(ca.samples(), 17);
            for (u, v) in expect.iter().zip(cb.samples()) {
                assert!((u - v).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn perfect_reconstruction() {
        let p = daubechies_d4();
        for levels in 1..=7 {
            let filt = build_iterated_filters(&p, levels).unwrap();
            let x = noise(4096, levels as u64);
            let dec = swt_decompose(&series(x.clone()), &filt).unwrap();
            let y = swt_reconstruct(&dec, &p).unwrap();
            let err = x.iter().zip(y.samples()).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            let norm = x.iter().map(|a| a * a).sum::<f64>().sqrt();
            assert!(err / norm <= 1e-10, "J={levels}: {}", err / norm);
        }
    }

    #[test]
    fn reconstruct_degenerate_inputs() {
        let p = daubechies_d4();
        let filt = build_iterated_filters(&p, 3).unwrap();
        let z = swt_decompose(&series(vec![0.0; 64]), &filt).unwrap();
        assert!(swt_reconstruct(&z, &p).unwrap().samples().iter().all(|&v| v == 0.0));
        let c = swt_decompose(&series(vec![2.5; 64]), &filt).unwrap();
        for v in swt_reconstruct(&c, &p).unwrap().samples() {
            assert!((v - 2.5).abs() < 1e-12);
        }
        let other = FilterPair::from_lowpass(vec![SQRT_2 / 2.0, SQRT_2 / 2.0]).unwrap();
        assert!(swt_reconstruct(&c, &other).is_err());
    }

    #[test]
    fn too_short_signal() {
        let filt = build_iterated_filters(&daubechies_d4(), 6).unwrap();
        assert!(matches!(
            swt_decompose(&series(vec![1.0; 100]), &filt),
            Err(Error::SignalTooShort { .. })
        ));
    }

    #[test]
    fn linearity() {
        let filt = build_iterated_filters(&daubechies_d4(), 4).unwrap();
        let (x, y) = (noise(256, 1), noise(256, 2));
        let combo: Vec<f64> = x.iter().zip(&y).map(|(a, b)| 1.5 * a - 2.0 * b).collect();
        let (dx, dy, dc) = (
            swt_decompose(&series(x), &filt).unwrap(),
            swt_decompose(&series(y), &filt).unwrap(),
            swt_decompose(&series(combo), &filt).unwrap(),
        );
        for k in 0..dc.components().len() {
            for t in 0..256 {
                let lin = 1.5 * dx.components()[k].samples()[t] - 2.0 * dy.components()[k].samples()[t];
                assert!((dc.components()[k].samples()[t] - lin).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn csv_layout() {
        let filt = build_iterated_filters(&daubechies_d4(), 2).unwrap();
        let dec = swt_decompose(&series(noise(16, 3)), &filt).unwrap();
        let csv = dec.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "256-512 Hz,128-256 Hz,0-128 Hz");
        assert_eq!(lines.count(), 16);
    }
}
