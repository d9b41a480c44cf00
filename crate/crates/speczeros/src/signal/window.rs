//! The Gaussian analysis window `g(t) = 2^(1/4) exp(-pi t^2)`.

use crate::{Error, Result};

/// Relative amplitude below which window samples are truncated.
const TRUNCATION_REL: f64 = 1e-12;

/// Standard deviation of `g`: `exp(-pi t^2) = exp(-t^2 / (2 sigma^2))`.
const SIGMA_G: f64 = 0.398_942_280_401_432_7; // 1/sqrt(2 pi)

/// Sample the Gaussian window on a symmetric grid of spacing `step`,
/// extending to `half_width_sigmas` standard deviations on each side,
/// truncated where the amplitude falls below `1e-12` of the peak, and
/// renormalized to unit l2 norm.
///
/// The returned vector has odd length `2k+1` with the peak at index `k`.
pub fn gaussian_window(half_width_sigmas: f64, step: f64) -> Result<Vec<f64>> {
    if !(half_width_sigmas > 0.0) {
        return Err(Error::invalid(format!(
            "half_width_sigmas must be > 0, got {half_width_sigmas}"
        )));
    }
    if !(step > 0.0) {
        return Err(Error::invalid(format!("step must be > 0, got {step}")));
    }
    let mut half = (half_width_sigmas * SIGMA_G / step).floor() as usize;
    // tighten to the truncation threshold: exp(-pi t^2) >= 1e-12
    let t_cut = (-(TRUNCATION_REL.ln()) / std::f64::consts::PI).sqrt();
    let k_cut = (t_cut / step).floor() as usize;
    half = half.min(k_cut);
    let mut w = Vec::with_capacity(2 * half + 1);
    for k in -(half as i64)..=half as i64 {
        let t = k as f64 * step;
        w.push(2f64.powf(0.25) * (-std::f64::consts::PI * t * t).exp());
    }
    let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
    for x in &mut w {
        *x /= norm;
    }
    Ok(w)
}
