//! Signals, Gaussian-window STFT, spectrogram zeros, white noise, synthetic
//! test signals and scalar quality metrics.

mod io;
mod metrics;
mod stft;
mod synth;
mod window;
mod zeros;

pub use io::{read_csv_signal, read_wav, write_csv_signal, write_wav, WavFormat};
pub use metrics::{nsm, qrf, MAD_TO_SIGMA};
pub use stft::{stft, GridGeometry, SpectrogramGrid, StftConfig, StftGrid};
pub use synth::{synth, ChirpParams, HermiteParams, ImpulseParams, SharpAttackParams, SynthKind};
pub use window::gaussian_window;
pub use zeros::{find_zeros, ZeroSet, WHITE_NOISE_ZERO_DENSITY_COMPLEX, WHITE_NOISE_ZERO_DENSITY_REAL};

use crate::{Error, Result};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

/// A uniformly sampled signal. Real signals carry a zero imaginary part.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    samples: Vec<Complex64>,
    sample_rate: f64,
}

impl TimeSeries {
    /// Build a series from complex samples, validating finiteness.
    pub fn new(samples: Vec<Complex64>, sample_rate: f64) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::invalid("time series must contain at least one sample"));
        }
        if !(sample_rate > 0.0) {
            return Err(Error::invalid(format!("sample rate must be > 0, got {sample_rate}")));
        }
        if samples.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::invalid("time series contains non-finite samples"));
        }
        Ok(Self { samples, sample_rate })
    }

    pub fn from_real(samples: Vec<f64>, sample_rate: f64) -> Result<Self> {
        Self::new(samples.into_iter().map(|x| Complex64::new(x, 0.0)).collect(), sample_rate)
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        false // N >= 1 by construction
    }

    /// True when every sample has an exactly zero imaginary part.
    pub fn is_real(&self) -> bool {
        self.samples.iter().all(|z| z.im == 0.0)
    }

    /// Squared l2 norm of the samples.
    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Elementwise sum; lengths must match.
    pub fn add(&self, other: &TimeSeries) -> Result<TimeSeries> {
        if self.len() != other.len() {
            return Err(Error::invalid(format!(
                "length mismatch: {} vs {}",
                self.len(),
                other.len()
            )));
        }
        let samples = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| a + b)
            .collect();
        TimeSeries::new(samples, self.sample_rate)
    }

    pub fn scaled(&self, c: f64) -> TimeSeries {
        TimeSeries {
            samples: self.samples.iter().map(|z| z * c).collect(),
            sample_rate: self.sample_rate,
        }
    }
}

/// White Gaussian noise model: real or circular complex, with total per-sample
/// variance `variance` and a reproducible seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub kind: NoiseKind,
    pub variance: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseKind {
    Real,
    Complex,
}

impl NoiseModel {
    pub fn new(kind: NoiseKind, variance: f64, seed: u64) -> Result<Self> {
        if !(variance > 0.0) {
            return Err(Error::invalid(format!("noise variance must be > 0, got {variance}")));
        }
        Ok(Self { kind, variance, seed })
    }

    pub fn real(seed: u64) -> Self {
        Self { kind: NoiseKind::Real, variance: 1.0, seed }
    }

    pub fn complex(seed: u64) -> Self {
        Self { kind: NoiseKind::Complex, variance: 1.0, seed }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// Draw `n` i.i.d. Gaussian samples from the model, reproducibly per seed.
///
/// The complex case is `(xi_1 + i xi_2)/sqrt(2)` scaled to the requested
/// variance, so the total per-sample variance splits evenly between the real
/// and imaginary parts.
pub fn white_noise(n: usize, model: &NoiseModel) -> TimeSeries {
    assert!(n >= 1, "white_noise requires n >= 1");
    let mut rng = ChaCha8Rng::seed_from_u64(model.seed);
    let sigma = model.variance.sqrt();
    let samples: Vec<Complex64> = match model.kind {
        NoiseKind::Real => (0..n)
            .map(|_| {
                let z: f64 = StandardNormal.sample(&mut rng);
                Complex64::new(sigma * z, 0.0)
            })
            .collect(),
        NoiseKind::Complex => {
            let half = sigma / 2f64.sqrt();
            (0..n)
                .map(|_| {
                    let re: f64 = StandardNormal.sample(&mut rng);
                    let im: f64 = StandardNormal.sample(&mut rng);
                    Complex64::new(half * re, half * im)
                })
                .collect()
        }
    };
    TimeSeries { samples, sample_rate: 1.0 }
}

/// Scale factor `c` such that `f + c*xi` has the requested expected SNR,
/// `SNR(h) = 10 log10(||f||^2 / E[||c xi||^2])`.
pub fn noise_scale_for_snr(f: &TimeSeries, model: &NoiseModel, snr_db: f64) -> Result<f64> {
    let sig_energy = f.energy();
    if sig_energy <= 0.0 {
        return Err(Error::invalid("mix_at_snr requires a nonzero signal"));
    }
    let noise_energy = f.len() as f64 * model.variance;
    Ok((sig_energy / (noise_energy * 10f64.powf(snr_db / 10.0))).sqrt())
}

/// Mix `f` with white noise scaled so the expected SNR equals `snr_db` exactly.
pub fn mix_at_snr(f: &TimeSeries, model: &NoiseModel, snr_db: f64) -> Result<TimeSeries> {
    let c = noise_scale_for_snr(f, model, snr_db)?;
    let xi = white_noise(f.len(), model);
    f.add(&xi.scaled(c))
}
