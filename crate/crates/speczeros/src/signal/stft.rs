//! Discrete Gaussian-window STFT and spectrogram grids.
//!
//! The continuous transform `V_g(f)(u,v) = \int f(t) conj(g(t-u)) e^{-2i pi t v} dt`
//! is approximated by Riemann sums on a sample grid with period
//! `T_s = 1/sqrt(n_fft)`, which makes the Gaussian window isotropic in the
//! normalized plane coordinates `(u, v) = (n hop, m) / sqrt(n_fft)`.
//!
//! The phase convention is absolute time (the DFT kernel is indexed by the
//! absolute sample position modulo `n_fft`), so the frequency-axis sum of a
//! column reproduces the signal sample at that column exactly. When
//! `n_fft == N` the transform wraps circularly and is an exact isometry;
//! otherwise the signal is zero-padded and the isometry holds for signals
//! supported away from the borders.

use super::{gaussian_window, TimeSeries};
use crate::{Error, Result};
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

/// STFT discretization parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StftConfig {
    /// FFT length; `None` means the signal length (circular transform).
    pub n_fft: Option<usize>,
    /// Samples per time step.
    pub hop: usize,
    /// Window half-width in standard deviations of `g`; the default is wide
    /// enough that the 1e-12 amplitude truncation decides the support.
    pub window_sigmas: f64,
}

impl Default for StftConfig {
    fn default() -> Self {
        Self { n_fft: None, hop: 1, window_sigmas: 16.0 }
    }
}

/// Shared geometry of an STFT/spectrogram grid and its mapping to the
/// normalized time-frequency plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridGeometry {
    /// Frequency bins (matrix rows).
    pub rows: usize,
    /// Time columns.
    pub cols: usize,
    pub hop: usize,
    pub n_fft: usize,
    /// Factor mapping grid indices `(col*hop, row)` to plane coordinates.
    pub plane_scale: f64,
    /// Real input: only bins `0..=n_fft/2` are stored.
    pub onesided: bool,
    pub signal_len: usize,
    /// Whether the transform wrapped circularly (`n_fft == signal_len`).
    pub circular: bool,
    pub sample_rate: f64,
}

impl GridGeometry {
    pub fn u_of_col(&self, col: usize) -> f64 {
        (col * self.hop) as f64 * self.plane_scale
    }

    pub fn v_of_row(&self, row: usize) -> f64 {
        row as f64 * self.plane_scale
    }

    /// Plane rectangle covered by the grid: `(u_max, v_max)` with the origin
    /// at `(0, 0)`.
    pub fn plane_extent(&self) -> (f64, f64) {
        (self.u_of_col(self.cols - 1), self.v_of_row(self.rows - 1))
    }

    pub fn cell_area(&self) -> f64 {
        self.hop as f64 * self.plane_scale * self.plane_scale
    }
}

/// Complex STFT values on a regular grid, rows = frequency bins.
#[derive(Debug, Clone)]
pub struct StftGrid {
    values: Vec<Complex64>,
    window: Vec<f64>,
    geom: GridGeometry,
}

impl StftGrid {
    /// Assemble a grid from raw parts; sizes must match the geometry.
    pub fn from_parts(values: Vec<Complex64>, window: Vec<f64>, geom: GridGeometry) -> Self {
        assert_eq!(values.len(), geom.rows * geom.cols, "value matrix shape mismatch");
        assert!(window.len() % 2 == 1, "window length must be odd");
        Self { values, window, geom }
    }

    pub fn geometry(&self) -> &GridGeometry {
        &self.geom
    }

    pub fn rows(&self) -> usize {
        self.geom.rows
    }

    pub fn cols(&self) -> usize {
        self.geom.cols
    }

    pub fn value(&self, row: usize, col: usize) -> Complex64 {
        self.values[row * self.geom.cols + col]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Analysis window samples (odd length, peak at the center).
    pub fn window(&self) -> &[f64] {
        &self.window
    }

    /// Signal energy carried by the grid, `sum |V|^2 / n_fft`, with onesided
    /// grids unfolded by Hermitian symmetry.
    pub fn energy(&self) -> f64 {
        let mut total = 0.0;
        for m in 0..self.geom.rows {
            let w = self.bin_weight(m);
            let mut row_sum = 0.0;
            for n in 0..self.geom.cols {
                row_sum += self.value(m, n).norm_sqr();
            }
            total += w * row_sum;
        }
        total / self.geom.n_fft as f64
    }

    /// Hermitian unfolding weight of a stored bin (2 for interior bins of a
    /// onesided grid, 1 otherwise).
    pub fn bin_weight(&self, row: usize) -> f64 {
        if !self.geom.onesided {
            return 1.0;
        }
        let nyquist = self.geom.n_fft % 2 == 0 && row == self.geom.n_fft / 2;
        if row == 0 || nyquist {
            1.0
        } else {
            2.0
        }
    }

    /// Squared-modulus spectrogram on the same grid.
    pub fn spectrogram(&self) -> SpectrogramGrid {
        SpectrogramGrid {
            s: self.values.iter().map(|z| z.norm_sqr()).collect(),
            geom: self.geom,
        }
    }
}

/// Nonnegative squared STFT moduli on a regular grid.
#[derive(Debug, Clone)]
pub struct SpectrogramGrid {
    s: Vec<f64>,
    geom: GridGeometry,
}

impl SpectrogramGrid {
    /// Build from raw values; all entries must be finite and nonnegative.
    pub fn from_values(s: Vec<f64>, geom: GridGeometry) -> Result<Self> {
        if s.len() != geom.rows * geom.cols {
            return Err(Error::invalid("spectrogram size does not match geometry"));
        }
        if s.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::invalid("spectrogram entries must be finite and >= 0"));
        }
        Ok(Self { s, geom })
    }

    pub fn geometry(&self) -> &GridGeometry {
        &self.geom
    }

    pub fn rows(&self) -> usize {
        self.geom.rows
    }

    pub fn cols(&self) -> usize {
        self.geom.cols
    }

    pub fn value(&self, row: usize, col: usize) -> f64 {
        self.s[row * self.geom.cols + col]
    }

    pub fn values(&self) -> &[f64] {
        &self.s
    }

    pub fn total(&self) -> f64 {
        self.s.iter().sum()
    }
}

/// Compute the Gaussian-window STFT of `signal`.
///
/// Real inputs are analyzed on the nonnegative frequency bins only
/// (`0..=n_fft/2`); complex inputs use all bins.
pub fn stft(signal: &TimeSeries, config: &StftConfig) -> Result<StftGrid> {
    let n = signal.len();
    let n_fft = config.n_fft.unwrap_or(n);
    if config.hop < 1 {
        return Err(Error::invalid("hop must be >= 1"));
    }
    if n_fft < 1 {
        return Err(Error::invalid("n_fft must be >= 1"));
    }
    let plane_scale = 1.0 / (n_fft as f64).sqrt();
    let window = gaussian_window(config.window_sigmas, plane_scale)?;
    if window.len() > n_fft {
        return Err(Error::invalid(format!(
            "n_fft = {n_fft} is shorter than the window ({} samples)",
            window.len()
        )));
    }
    if n < window.len() {
        return Err(Error::invalid(format!(
            "signal ({n} samples) is shorter than the window ({} samples)",
            window.len()
        )));
    }
    let half = window.len() / 2;
    let onesided = signal.is_real();
    let rows = if onesided { n_fft / 2 + 1 } else { n_fft };
    let cols = n.div_ceil(config.hop);
    let circular = n_fft == n;
    let geom = GridGeometry {
        rows,
        cols,
        hop: config.hop,
        n_fft,
        plane_scale,
        onesided,
        signal_len: n,
        circular,
        sample_rate: signal.sample_rate(),
    };

    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(n_fft);
    let mut buf = vec![Complex64::new(0.0, 0.0); n_fft];
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    let samples = signal.samples();
    let mut values = vec![Complex64::new(0.0, 0.0); rows * cols];

    for col in 0..cols {
        buf.fill(Complex64::new(0.0, 0.0));
        let center = (col * config.hop) as i64;
        for (k, &w) in window.iter().enumerate() {
            let j = center + k as i64 - half as i64;
            let sample = if circular {
                samples[j.rem_euclid(n as i64) as usize]
            } else if j < 0 || j >= n as i64 {
                continue;
            } else {
                samples[j as usize]
            };
            // indexing the DFT kernel by absolute position keeps the phase
            // convention of the continuous transform
            let pos = j.rem_euclid(n_fft as i64) as usize;
            buf[pos] = sample * w;
        }
        fft.process_with_scratch(&mut buf, &mut scratch);
        for m in 0..rows {
            values[m * cols + col] = buf[m];
        }
    }

    Ok(StftGrid { values, window, geom })
}
