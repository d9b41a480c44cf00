//! Synthetic-p-value harness for the sequential estimator's error rates.
//!
//! With k* true components, per-step miss probabilities `eps_l` for
//! `l <= k*`, and independent uniform p-values beyond k* (the delta = 0
//! regime), the closed forms are
//! `P(n < k*) = sum_j eps_{j+1} prod_{l<=j} (1-eps_l)` and
//! `P(n > k*) = alpha_{k*+1} prod_{l<=k*} (1-eps_l)`.

use super::testing::{sequential_hole_count, AlphaSchedule};
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct FwerScenario {
    /// True number of components.
    pub k_star: usize,
    /// Miss probability of step l (probability that `p_l >= alpha_l`),
    /// one entry per step `1..=k_star`.
    pub miss_probs: Vec<f64>,
    pub schedule: AlphaSchedule,
    /// Total number of ranks simulated (must exceed `k_star`).
    pub k_total: usize,
    pub trials: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FwerOutcome {
    pub under_empirical: f64,
    pub under_closed_form: f64,
    pub over_empirical: f64,
    pub over_closed_form: f64,
    pub exact_empirical: f64,
    /// Histogram of the estimate over `0..=k_total`.
    pub histogram: Vec<usize>,
}

/// Simulate the sequential rule on synthetic p-values and report empirical
/// under/over-estimation rates next to the closed-form values.
pub fn fwer_harness(scenario: &FwerScenario) -> Result<FwerOutcome> {
    if scenario.miss_probs.len() != scenario.k_star {
        return Err(Error::invalid(format!(
            "need {} miss probabilities, got {}",
            scenario.k_star,
            scenario.miss_probs.len()
        )));
    }
    if scenario.k_total <= scenario.k_star {
        return Err(Error::invalid("k_total must exceed k_star"));
    }
    if scenario.trials == 0 {
        return Err(Error::invalid("trials must be >= 1"));
    }
    if scenario.miss_probs.iter().any(|e| !(0.0..=1.0).contains(e)) {
        return Err(Error::invalid("miss probabilities must lie in [0,1]"));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(scenario.seed);
    let mut histogram = vec![0usize; scenario.k_total + 1];
    let mut pvals = vec![0.0f64; scenario.k_total];
    for _ in 0..scenario.trials {
        for l in 0..scenario.k_total {
            let alpha_l = scenario.schedule.alpha_at(l + 1)?;
            pvals[l] = if l < scenario.k_star {
                // a powered test: reject with probability 1 - eps_l
                let miss: bool = rng.random_bool(scenario.miss_probs[l]);
                if miss {
                    alpha_l + (1.0 - alpha_l) * rng.random::<f64>()
                } else {
                    alpha_l * rng.random::<f64>()
                }
            } else {
                rng.random::<f64>() // true null: uniform
            };
        }
        let (n_hat, _) = sequential_hole_count(&pvals, &scenario.schedule)?;
        histogram[n_hat] += 1;
    }

    let trials = scenario.trials as f64;
    let under_empirical =
        histogram[..scenario.k_star].iter().sum::<usize>() as f64 / trials;
    let over_empirical =
        histogram[scenario.k_star + 1..].iter().sum::<usize>() as f64 / trials;
    let exact_empirical = histogram[scenario.k_star] as f64 / trials;

    let mut survive = 1.0;
    let mut under_closed_form = 0.0;
    for &eps in &scenario.miss_probs {
        under_closed_form += survive * eps;
        survive *= 1.0 - eps;
    }
    let over_closed_form = survive * scenario.schedule.alpha_at(scenario.k_star + 1)?;

    Ok(FwerOutcome {
        under_empirical,
        under_closed_form,
        over_empirical,
        over_closed_form,
        exact_empirical,
        histogram,
    })
}
