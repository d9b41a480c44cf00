//! Empirical p-values, alpha schedules, simultaneous and sequential tests.

use super::{NoiseReference, StatKind, StatisticVector};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Per-rank significance schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaSchedule {
    alpha: f64,
    rule: ScheduleRule,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "rule")]
pub enum ScheduleRule {
    /// `alpha_k = alpha / K`.
    Bonferroni { k_total: usize },
    /// `alpha_k = alpha / k^m`.
    Polynomial { m: f64 },
    /// `alpha_k = alpha * beta^k`.
    Geometric { beta: f64 },
}

impl AlphaSchedule {
    pub fn bonferroni(alpha: f64, k_total: usize) -> Result<Self> {
        Self::new(alpha, ScheduleRule::Bonferroni { k_total })
    }

    pub fn polynomial(alpha: f64, m: f64) -> Result<Self> {
        Self::new(alpha, ScheduleRule::Polynomial { m })
    }

    pub fn geometric(alpha: f64, beta: f64) -> Result<Self> {
        Self::new(alpha, ScheduleRule::Geometric { beta })
    }

    pub fn new(alpha: f64, rule: ScheduleRule) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::invalid(format!("alpha must lie in (0,1), got {alpha}")));
        }
        match rule {
            ScheduleRule::Bonferroni { k_total } if k_total < 1 => {
                return Err(Error::invalid("bonferroni needs K >= 1"))
            }
            ScheduleRule::Polynomial { m } if !(m >= 0.0) => {
                return Err(Error::invalid(format!("polynomial decay needs m >= 0, got {m}")))
            }
            ScheduleRule::Geometric { beta } if !(beta > 0.0 && beta < 1.0) => {
                return Err(Error::invalid(format!("geometric decay needs beta in (0,1), got {beta}")))
            }
            _ => {}
        }
        Ok(Self { alpha, rule })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn rule(&self) -> ScheduleRule {
        self.rule
    }

    /// Significance level of the k-th test, `k >= 1`.
    pub fn alpha_at(&self, k: usize) -> Result<f64> {
        if k < 1 {
            return Err(Error::invalid("alpha_at is defined for k >= 1"));
        }
        Ok(match self.rule {
            ScheduleRule::Bonferroni { k_total } => self.alpha / k_total as f64,
            ScheduleRule::Polynomial { m } => self.alpha / (k as f64).powf(m),
            ScheduleRule::Geometric { beta } => self.alpha * beta.powi(k as i32),
        })
    }

    pub fn describe(&self) -> String {
        match self.rule {
            ScheduleRule::Bonferroni { k_total } => {
                format!("bonferroni(alpha={}, K={})", self.alpha, k_total)
            }
            ScheduleRule::Polynomial { m } => format!("polynomial(alpha={}, m={})", self.alpha, m),
            ScheduleRule::Geometric { beta } => {
                format!("geometric(alpha={}, beta={})", self.alpha, beta)
            }
        }
    }
}

/// Empirical p-values `p_k = (1/B) sum_j I(X_(k),j > X_(k),obs)`; ties count
/// as non-exceedance.
pub fn p_values(obs: &StatisticVector, reference: &NoiseReference) -> Result<Vec<f64>> {
    if obs.kind() != reference.params().kind {
        return Err(Error::invalid(format!(
            "statistic kind mismatch: observed {} vs reference {}",
            obs.kind().name(),
            reference.params().kind.name()
        )));
    }
    if obs.k() != reference.params().k {
        return Err(Error::invalid(format!(
            "K mismatch: observed {} vs reference {}",
            obs.k(),
            reference.params().k
        )));
    }
    let b = reference.b() as f64;
    let mut pvals = Vec::with_capacity(obs.k());
    for (k, &x_obs) in obs.values().iter().enumerate() {
        let exceed = (0..reference.b()).filter(|&j| reference.value(j, k) > x_obs).count();
        pvals.push(exceed as f64 / b);
    }
    Ok(pvals)
}

/// Simultaneous multiple test: detected iff `p_k < alpha/K` for some k.
/// The detection test uses the Bonferroni schedule; other rules are rejected.
pub fn simultaneous_test(pvals: &[f64], schedule: &AlphaSchedule) -> Result<bool> {
    if !matches!(schedule.rule(), ScheduleRule::Bonferroni { .. }) {
        return Err(Error::invalid(
            "the simultaneous detection test requires a Bonferroni schedule",
        ));
    }
    for (i, p) in pvals.iter().enumerate() {
        if *p < schedule.alpha_at(i + 1)? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Sequential hole-count estimator: the smallest `k >= 0` with
/// `p_(k+1) >= alpha_(k+1)`, or K when every test rejects. Returns the
/// estimate together with the per-step levels used.
pub fn sequential_hole_count(pvals: &[f64], schedule: &AlphaSchedule) -> Result<(usize, Vec<f64>)> {
    let mut alphas = Vec::with_capacity(pvals.len());
    for k in 1..=pvals.len() {
        alphas.push(schedule.alpha_at(k)?);
    }
    let n_hat = pvals
        .iter()
        .zip(&alphas)
        .position(|(p, a)| *p >= *a)
        .unwrap_or(pvals.len());
    Ok((n_hat, alphas))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Decision {
    Detected,
    NotDetected,
}

/// One detected component in a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentReport {
    pub birth: f64,
    pub death: f64,
    pub distance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub energy: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mask_ref: Option<String>,
}

/// Outcome of a detection or hole-count run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub statistic: StatKind,
    pub pvalues: Vec<f64>,
    pub alphas: Vec<f64>,
    pub schedule: String,
    pub decision: Decision,
    pub n_holes: usize,
    pub components: Vec<ComponentReport>,
}
