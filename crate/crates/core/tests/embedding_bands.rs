//! Embedding diagnostics on wavelet subbands of 1/f noise.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::{num_complex::Complex64, FftPlanner};
use wavelet_te::embedding::{acf, cao_e1, first_zero, ragwitz_mspe_with, RagwitzOptions};
use wavelet_te::swt::{build_iterated_filters, daubechies_d4, swt_decompose};
use wavelet_te::TimeSeries;

fn pink_noise(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut spec: Vec<Complex64> =
        (0..n).map(|_| Complex64::new(StandardNormal.sample(&mut rng), 0.0)).collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(n).process(&mut spec);
    for (k, c) in spec.iter_mut().enumerate() {
        let f = k.min(n - k) as f64;
        *c *= if f == 0.0 { 0.0 } else { 1.0 / f.sqrt() };
    }
    planner.plan_fft_inverse(n).process(&mut spec);
    spec.iter().map(|c| c.re / n as f64).collect()
}

/// Detail subbands ordered from low to high frequency.
fn bands() -> Vec<Vec<f64>> {
    let ts = TimeSeries::new(pink_noise(4096, 5), 1024.0, "pink").unwrap();
    let filt = build_iterated_filters(&daubechies_d4(), 6).unwrap();
    let dec = swt_decompose(&ts, &filt).unwrap();
    ["d6", "d5", "d4", "d3"]
        .iter()
        .map(|name| dec.component(name).unwrap().samples().to_vec())
        .collect()
}

#[test]
fn acf_zero_moves_to_shorter_lags_with_frequency() {
    let zeros: Vec<usize> = bands()
        .iter()
        .map(|b| first_zero(&acf(b, 400).unwrap()).expect("zero crossing"))
        .collect();
    assert!(zeros.windows(2).all(|w| w[0] > w[1]), "first zeros {zeros:?}");
}

#[test]
fn ragwitz_surface_on_subbands() {
    for b in bands() {
        let var = b.iter().map(|v| v * v).sum::<f64>() / b.len() as f64;
        let s = ragwitz_mspe_with(&b, &[1, 2, 4, 8], &[1, 2, 3], RagwitzOptions::default()).unwrap();
        assert!(s.mspe.iter().flatten().all(|v| v.is_finite() && *v >= 0.0));
        let best = s.mspe[s.dims.iter().position(|&d| d == s.best_dim).unwrap()]
            [s.taus.iter().position(|&t| t == s.best_tau).unwrap()];
        // one-step prediction of an oversampled band is far better than the mean
        assert!(best < 0.25 * var, "best {best}, variance {var}");
    }
}

#[test]
fn cao_runs_at_acf_delay_per_band() {
    for b in bands() {
        let tau = first_zero(&acf(&b, 400).unwrap()).unwrap();
        let curve = cao_e1(&b, tau, 6).unwrap();
        assert_eq!(curve.e1.len(), 5);
        assert!(curve.e1.iter().all(|v| v.is_finite() && *v > 0.0));
    }
}
