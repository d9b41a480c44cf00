//! Accumulated persistence function and the Monte Carlo global envelope test.

use crate::tda::PersistencePair;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Right-continuous nondecreasing step function
/// `APF(m) = sum_i l_i I(m_i <= m)` over the rotated-rescaled diagram, where
/// `m_i = (b_i + d_i)/2` is the half-life and `l_i = d_i - b_i` the total
/// life of a component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApfCurve {
    /// `(m, cumulative value)` knots, sorted by m with distinct m.
    knots: Vec<(f64, f64)>,
}

impl ApfCurve {
    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    pub fn eval(&self, m: f64) -> f64 {
        match self.knots.binary_search_by(|(km, _)| km.partial_cmp(&m).unwrap()) {
            Ok(i) => self.knots[i].1,
            Err(0) => 0.0,
            Err(i) => self.knots[i - 1].1,
        }
    }

    /// Total accumulated persistence (the value at and beyond the last knot).
    pub fn total(&self) -> f64 {
        self.knots.last().map(|(_, v)| *v).unwrap_or(0.0)
    }

    pub fn max_knot(&self) -> f64 {
        self.knots.last().map(|(m, _)| *m).unwrap_or(0.0)
    }
}

/// Build the APF of the finite pairs of the given dimension; the immortal
/// component is excluded.
pub fn apf(pairs: &[PersistencePair], dim: u8) -> ApfCurve {
    let mut events: Vec<(f64, f64)> = pairs
        .iter()
        .filter(|p| p.dim == dim && p.death.is_finite())
        .map(|p| ((p.birth + p.death) / 2.0, p.death - p.birth))
        .collect();
    events.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut knots: Vec<(f64, f64)> = Vec::with_capacity(events.len());
    let mut acc = 0.0;
    for (m, l) in events {
        acc += l;
        match knots.last_mut() {
            Some((km, kv)) if *km == m => *kv = acc,
            _ => knots.push((m, acc)),
        }
    }
    ApfCurve { knots }
}

/// Result of the envelope test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApfOutcome {
    pub reject: bool,
    /// Max deviation of the observed curve from the pointwise mean.
    pub t_obs: f64,
    /// Deviations of the simulated curves.
    pub t_sim: Vec<f64>,
}

/// Monte Carlo global envelope test on APF curves.
///
/// Draws `L` curves from `null_sampler`, computes
/// `t_l = max_m (APF_l(m) - mean APF(m))` on the union grid of all knots and
/// rejects when the observed deviation ranks among the top `alpha (L+1)` of
/// all `L+1` values. `alpha (L+1)` must be an integer.
///
/// `literal_transcription` switches to rejecting when `t_0` is at least the
/// `alpha(L+1)`-th smallest value of the ascending order, a reading under
/// which large observed deviations are *less* likely to reject; it exists for
/// comparison and is off by default.
pub fn apf_envelope_test(
    obs: &ApfCurve,
    l: usize,
    alpha: f64,
    mut null_sampler: impl FnMut(usize) -> Result<ApfCurve>,
    literal_transcription: bool,
) -> Result<ApfOutcome> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid(format!("alpha must lie in (0,1), got {alpha}")));
    }
    let l_star_f = alpha * (l + 1) as f64;
    let l_star = l_star_f.round() as usize;
    if (l_star_f - l_star as f64).abs() > 1e-9 || l_star == 0 {
        return Err(Error::invalid(format!(
            "alpha (L+1) = {l_star_f} must be a positive integer"
        )));
    }
    let mut curves = Vec::with_capacity(l + 1);
    curves.push(obs.clone());
    for i in 1..=l {
        curves.push(null_sampler(i)?);
    }
    let mut grid: Vec<f64> = curves
        .iter()
        .flat_map(|c| c.knots().iter().map(|(m, _)| *m))
        .collect();
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    grid.dedup();
    if grid.is_empty() {
        grid.push(0.0);
    }

    let values: Vec<Vec<f64>> =
        curves.iter().map(|c| grid.iter().map(|m| c.eval(*m)).collect()).collect();
    let mut mean = vec![0.0; grid.len()];
    for row in &values {
        for (m, v) in mean.iter_mut().zip(row) {
            *m += v;
        }
    }
    for m in &mut mean {
        *m /= (l + 1) as f64;
    }
    let t: Vec<f64> = values
        .iter()
        .map(|row| {
            row.iter()
                .zip(&mean)
                .map(|(v, m)| v - m)
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();

    let t_obs = t[0];
    let reject = if literal_transcription {
        let mut sorted = t.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        t_obs >= sorted[l_star - 1]
    } else {
        let at_least = t[1..].iter().filter(|s| **s >= t_obs).count();
        at_least < l_star
    };
    Ok(ApfOutcome { reject, t_obs, t_sim: t[1..].to_vec() })
}
