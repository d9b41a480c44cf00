//! Scalar quality metrics: QRF and the normalized spectrogram maximum.

use super::{StftGrid, TimeSeries};
use crate::{Error, Result};

/// Consistency factor of the median absolute deviation for a Gaussian.
pub const MAD_TO_SIGMA: f64 = 0.6745;

/// Quality reconstruction factor `10 log10(||f||^2 / ||f - f_hat||^2)` in dB.
///
/// Returns `f64::INFINITY` when the reconstruction is exact.
pub fn qrf(f: &TimeSeries, f_hat: &TimeSeries) -> Result<f64> {
    if f.len() != f_hat.len() {
        return Err(Error::invalid(format!(
            "qrf length mismatch: {} vs {}",
            f.len(),
            f_hat.len()
        )));
    }
    let energy = f.energy();
    if energy <= 0.0 {
        return Err(Error::invalid("qrf requires a nonzero reference signal"));
    }
    let residual: f64 = f
        .samples()
        .iter()
        .zip(f_hat.samples())
        .map(|(a, b)| (a - b).norm_sqr())
        .sum();
    if residual == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (energy / residual).log10())
}

/// Normalized spectrogram maximum `zeta = gamma / sigma`, where `gamma` is
/// the maximum STFT modulus and `sigma` the noise level estimated by the
/// median absolute deviation of the real part, `median(|Re V|) / 0.6745`.
pub fn nsm(grid: &StftGrid) -> Result<f64> {
    if grid.values().is_empty() {
        return Err(Error::invalid("nsm requires a nonempty grid"));
    }
    let gamma = grid.values().iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut abs_re: Vec<f64> = grid.values().iter().map(|z| z.re.abs()).collect();
    abs_re.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mid = abs_re.len() / 2;
    let median = if abs_re.len() % 2 == 1 {
        abs_re[mid]
    } else {
        (abs_re[mid - 1] + abs_re[mid]) / 2.0
    };
    let sigma = median / MAD_TO_SIGMA;
    if sigma == 0.0 {
        return Err(Error::invalid("nsm undefined: MAD noise estimate is zero"));
    }
    Ok(gamma / sigma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::{stft, white_noise, GridGeometry, NoiseModel, StftConfig};
    use num_complex::Complex64;

    fn series(v: Vec<f64>) -> TimeSeries {
        TimeSeries::from_real(v, 1.0).unwrap()
    }

    #[test]
    fn qrf_of_zero_estimate_is_zero_db() {
        let f = series(vec![0.5, -0.5, 0.5, -0.5]);
        let z = series(vec![0.0; 4]);
        assert_eq!(qrf(&f, &z).unwrap(), 0.0);
    }

    #[test]
    fn qrf_of_exact_estimate_is_infinite() {
        let f = series(vec![1.0, 2.0, 3.0]);
        assert_eq!(qrf(&f, &f).unwrap(), f64::INFINITY);
    }

    #[test]
    fn qrf_formula_value() {
        // residual energy = ||f||^2 / 100  ->  20 dB
        let f = series(vec![10.0, 0.0, 0.0, 0.0]);
        let fh = series(vec![9.0, 0.0, 0.0, 0.0]);
        assert!((qrf(&f, &fh).unwrap() - 20.0).abs() < 1e-12);
    }

    #[test]
    fn qrf_rejects_length_mismatch() {
        let f = series(vec![1.0; 4]);
        let g = series(vec![1.0; 5]);
        assert!(qrf(&f, &g).is_err());
    }

    fn handmade_grid(values: Vec<Complex64>, rows: usize, cols: usize) -> StftGrid {
        let geom = GridGeometry {
            rows,
            cols,
            hop: 1,
            n_fft: rows,
            plane_scale: 1.0,
            onesided: false,
            signal_len: cols,
            circular: false,
            sample_rate: 1.0,
        };
        StftGrid::from_parts(values, vec![1.0], geom)
    }

    #[test]
    fn nsm_formula_with_unit_median() {
        // real parts all +-1 (median 1), one entry with modulus 5
        let mut values = vec![Complex64::new(1.0, 0.0); 16];
        values[3] = Complex64::new(-1.0, 0.0);
        values[7] = Complex64::new(1.0, (25.0f64 - 1.0).sqrt());
        let grid = handmade_grid(values, 4, 4);
        let z = nsm(&grid).unwrap();
        assert!((z - 5.0 * MAD_TO_SIGMA).abs() < 1e-12);
    }

    #[test]
    fn nsm_scale_invariant() {
        let ts = white_noise(256, &NoiseModel::real(4));
        let g1 = stft(&ts, &StftConfig::default()).unwrap();
        let g2 = stft(&ts.scaled(37.0), &StftConfig::default()).unwrap();
        let (a, b) = (nsm(&g1).unwrap(), nsm(&g2).unwrap());
        assert!((a - b).abs() < 1e-9 * a.abs());
    }

    #[test]
    fn nsm_rejects_zero_grid() {
        let grid = handmade_grid(vec![Complex64::new(0.0, 0.0); 16], 4, 4);
        assert!(nsm(&grid).is_err());
    }

    #[test]
    fn nsm_mad_estimates_noise_sigma() {
        // complex noise: Re(V) is Gaussian with variance sigma^2/2 per bin;
        // for unit-variance complex noise the MAD estimate targets
        // sigma/sqrt(2) of the STFT real part... the estimator is defined on
        // the STFT directly, so compare against its own long-run average.
        let mut vals = Vec::new();
        for seed in 0..50 {
            let ts = white_noise(512, &NoiseModel::complex(seed));
            let g = stft(&ts, &StftConfig::default()).unwrap();
            let mut abs_re: Vec<f64> = g.values().iter().map(|z| z.re.abs()).collect();
            abs_re.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let med = abs_re[abs_re.len() / 2] / MAD_TO_SIGMA;
            vals.push(med);
        }
        let mean: f64 = vals.iter().sum::<f64>() / vals.len() as f64;
        // Re V_g(xi) has variance 1/2 for unit-variance complex noise
        let target = (0.5f64).sqrt();
        assert!(
            (mean - target).abs() < 0.05 * target,
            "MAD sigma mean {mean} vs {target}"
        );
    }
}
