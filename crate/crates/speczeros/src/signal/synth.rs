//! Synthetic test signals. All generators return real, unit-energy signals
//! at sample rate 1.

use super::TimeSeries;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Linear chirp occupying the middle half of the observation window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChirpParams {
    /// Instantaneous frequency at the start of the support, cycles/sample.
    pub f_start: f64,
    /// Instantaneous frequency at the end of the support, cycles/sample.
    pub f_end: f64,
}

impl Default for ChirpParams {
    fn default() -> Self {
        Self { f_start: 0.1, f_end: 0.4 }
    }
}

/// Evenly spaced unit impulses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImpulseParams {
    pub count: usize,
}

impl Default for ImpulseParams {
    fn default() -> Self {
        Self { count: 4 }
    }
}

/// Exponentially damped tone with an instantaneous onset at N/4.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SharpAttackParams {
    /// Tone frequency, cycles/sample.
    pub frequency: f64,
    /// Decay time constant as a fraction of N.
    pub decay_frac: f64,
}

impl Default for SharpAttackParams {
    fn default() -> Self {
        Self { frequency: 0.2, decay_frac: 0.125 }
    }
}

/// Hermite function of the given order, sampled on the grid that makes the
/// Gaussian window isotropic (period `1/sqrt(N)`), centered in the window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HermiteParams {
    pub order: usize,
}

impl Default for HermiteParams {
    fn default() -> Self {
        Self { order: 20 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SynthKind {
    Chirp(ChirpParams),
    Impulses(ImpulseParams),
    SharpAttack(SharpAttackParams),
    Hermite(HermiteParams),
}

impl SynthKind {
    /// Parse a kind name with default parameters; unknown names are
    /// invalid-argument errors.
    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "chirp" => Ok(SynthKind::Chirp(Default::default())),
            "impulses" => Ok(SynthKind::Impulses(Default::default())),
            "sharp_attack" => Ok(SynthKind::SharpAttack(Default::default())),
            "hermite" => Ok(SynthKind::Hermite(Default::default())),
            other => Err(Error::invalid(format!("unknown synthetic signal kind '{other}'"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SynthKind::Chirp(_) => "chirp",
            SynthKind::Impulses(_) => "impulses",
            SynthKind::SharpAttack(_) => "sharp_attack",
            SynthKind::Hermite(_) => "hermite",
        }
    }
}

/// Generate a unit-energy synthetic test signal of length `n >= 64`.
pub fn synth(kind: SynthKind, n: usize) -> Result<TimeSeries> {
    if n < 64 {
        return Err(Error::invalid(format!("synthetic signals need n >= 64, got {n}")));
    }
    let mut v = vec![0.0f64; n];
    match kind {
        SynthKind::Chirp(p) => {
            if !(p.f_start >= 0.0 && p.f_end > p.f_start && p.f_end <= 0.5) {
                return Err(Error::invalid("chirp frequencies must satisfy 0 <= f_start < f_end <= 0.5"));
            }
            let start = n / 4;
            let len = n / 2;
            for (x, slot) in v[start..start + len].iter_mut().enumerate() {
                let x = x as f64;
                let phase = 2.0
                    * std::f64::consts::PI
                    * (p.f_start * x + (p.f_end - p.f_start) * x * x / (2.0 * len as f64));
                *slot = phase.cos();
            }
        }
        SynthKind::Impulses(p) => {
            if p.count == 0 {
                return Err(Error::invalid("impulse count must be >= 1"));
            }
            for i in 0..p.count {
                let pos = (i + 1) * n / (p.count + 1);
                v[pos] = 1.0;
            }
        }
        SynthKind::SharpAttack(p) => {
            let onset = n / 4;
            let tau = p.decay_frac * n as f64;
            for (x, slot) in v[onset..].iter_mut().enumerate() {
                let x = x as f64;
                *slot = (-x / tau).exp()
                    * (2.0 * std::f64::consts::PI * p.frequency * x).cos();
            }
        }
        SynthKind::Hermite(p) => {
            let scale = (2.0 * std::f64::consts::PI).sqrt() / (n as f64).sqrt();
            for (j, slot) in v.iter_mut().enumerate() {
                let x = (j as f64 - n as f64 / 2.0) * scale;
                *slot = hermite_function(p.order, x);
            }
        }
    }
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::invalid("synthetic signal is identically zero"));
    }
    for x in &mut v {
        *x /= norm;
    }
    TimeSeries::from_real(v, 1.0)
}

/// Orthonormal Hermite function `phi_k(x)` via the stable three-term
/// recurrence; `phi_0(x) = pi^(-1/4) exp(-x^2/2)`.
fn hermite_function(order: usize, x: f64) -> f64 {
    let mut prev = 0.0;
    let mut cur = std::f64::consts::PI.powf(-0.25) * (-x * x / 2.0).exp();
    for k in 0..order {
        let k = k as f64;
        let next = x * (2.0 / (k + 1.0)).sqrt() * cur - (k / (k + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_kinds_have_unit_energy() {
        for kind in [
            SynthKind::Chirp(Default::default()),
            SynthKind::Impulses(Default::default()),
            SynthKind::SharpAttack(Default::default()),
            SynthKind::Hermite(Default::default()),
        ] {
            let ts = synth(kind, 512).unwrap();
            assert!((ts.energy() - 1.0).abs() < 1e-9, "{}", kind.name());
        }
    }

    #[test]
    fn chirp_support_is_the_centered_middle_half() {
        let n = 1024;
        let ts = synth(SynthKind::Chirp(Default::default()), n).unwrap();
        let nonzero: Vec<usize> = ts
            .samples()
            .iter()
            .enumerate()
            .filter(|(_, z)| z.re != 0.0)
            .map(|(i, _)| i)
            .collect();
        assert_eq!(*nonzero.first().unwrap(), n / 4);
        assert_eq!(*nonzero.last().unwrap(), n / 4 + n / 2 - 1);
        assert_eq!(nonzero.len(), n / 2);
    }

    #[test]
    fn hermite_order_zero_matches_gaussian_closed_form() {
        let n = 256;
        let ts = synth(SynthKind::Hermite(HermiteParams { order: 0 }), n).unwrap();
        let scale = (2.0 * std::f64::consts::PI).sqrt() / (n as f64).sqrt();
        let mut expected: Vec<f64> = (0..n)
            .map(|j| {
                let x = (j as f64 - n as f64 / 2.0) * scale;
                (-x * x / 2.0).exp()
            })
            .collect();
        let norm = expected.iter().map(|x| x * x).sum::<f64>().sqrt();
        for x in &mut expected {
            *x /= norm;
        }
        for (a, e) in ts.samples().iter().zip(&expected) {
            assert!((a.re - e).abs() < 1e-12);
        }
    }

    #[test]
    fn hermite_high_order_stays_finite() {
        let ts = synth(SynthKind::Hermite(HermiteParams { order: 120 }), 4096).unwrap();
        assert!((ts.energy() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn four_impulses_evenly_spaced() {
        let n = 1000;
        let ts = synth(SynthKind::Impulses(Default::default()), n).unwrap();
        let at: Vec<usize> = ts
            .samples()
            .iter()
            .enumerate()
            .filter(|(_, z)| z.re != 0.0)
            .map(|(i, _)| i)
            .collect();
        assert_eq!(at, vec![200, 400, 600, 800]);
    }

    #[test]
    fn unknown_kind_name_is_invalid() {
        assert!(SynthKind::from_name("wavelet").is_err());
    }

    #[test]
    fn too_short_is_invalid() {
        assert!(synth(SynthKind::Chirp(Default::default()), 63).is_err());
    }
}
