//! Multiscale wavelet-domain transfer entropy.
//!
//! The crate decomposes pairs of uniformly sampled signals into dyadic
//! frequency bands with an undecimated (stationary) wavelet transform,
//! embeds every band with band-specific delays, and estimates directed
//! information flow between bands with k-nearest-neighbour estimators.
//! Significance comes from surrogate ensembles of independent Gaussian
//! pairs. Coherence and VAR-based Granger causality are provided as linear
//! baselines, and [`simgen`] generates the amplitude/phase modulation
//! benchmarks used to validate cross-frequency detection.
//!
//! Module map:
//!
//! - [`signal`]: time-series container, ingestion, segmentation, notch
//!   filtering, noise injection.
//! - [`swt`]: Daubechies filters, iterated filter construction, circular
//!   stationary wavelet decomposition and reconstruction.
//! - [`embedding`]: delay vectors, the dyadic multiscale delay schedule,
//!   autocorrelation, Cao and Ragwitz diagnostics.
//! - [`infotheory`]: Kozachenko-Leonenko entropy, KSG conditional mutual
//!   information, transfer entropy and band-pair matrices.
//! - [`significance`]: surrogate distributions and closed-form coherence
//!   confidence levels.
//! - [`neighbors`]: max-norm k-d tree and brute-force neighbour search.
//! - [`baselines`]: coherence spectrograms and Granger causality.
//! - [`simgen`]: AM/PM cross-frequency coupling generators.

pub mod baselines;
pub mod embedding;
mod error;
pub mod infotheory;
pub mod neighbors;
pub mod rng;
pub mod signal;
pub mod significance;
pub mod simgen;
pub mod swt;

pub use error::{Error, Result};
pub use signal::TimeSeries;
