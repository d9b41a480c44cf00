//! Test statistics, Monte Carlo reference distributions, empirical p-values,
//! multiple hypothesis tests, hole-count estimation and the accumulated
//! persistence envelope test.

mod apf;
mod harness;
mod reference;
mod testing;

pub use apf::{apf, apf_envelope_test, ApfCurve, ApfOutcome};
pub use harness::{fwer_harness, FwerOutcome, FwerScenario};
pub use reference::{build_noise_reference, build_noise_references, NoiseReference, ReferenceParams};
pub use testing::{
    p_values, sequential_hole_count, simultaneous_test, AlphaSchedule, ComponentReport, Decision,
    ScheduleRule, TestReport,
};

use crate::signal::SpectrogramGrid;
use crate::tda::{
    minimum_volume, rasterize_volume, stable_volume, top_components, tune_epsilon, Volume,
    ZeroTopology,
};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Which scalar is extracted per ranked component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StatKind {
    /// Distance of the birth-death pair to the diagonal.
    Dist,
    /// Spectrogram energy fraction inside the minimum-volume mask.
    EnergyMv,
    /// Spectrogram energy fraction inside the stable-volume mask.
    EnergySv,
}

impl StatKind {
    pub fn name(&self) -> &'static str {
        match self {
            StatKind::Dist => "dist",
            StatKind::EnergyMv => "energy_mv",
            StatKind::EnergySv => "energy_sv",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "dist" => Ok(StatKind::Dist),
            "energy_mv" => Ok(StatKind::EnergyMv),
            "energy_sv" => Ok(StatKind::EnergySv),
            other => Err(Error::invalid(format!("unknown statistic kind '{other}'"))),
        }
    }
}

/// How the stable-volume bandwidth is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EpsPolicy {
    Fixed { epsilon: f64 },
    /// Plateau search over `[0, eps_max]`, per component.
    Tuned { eps_max: f64 },
}

impl Default for EpsPolicy {
    fn default() -> Self {
        EpsPolicy::Tuned { eps_max: 0.15 }
    }
}

/// Top-K statistics of one analyzed signal, indexed by the distance ranking
/// of the components. Distance statistics are non-increasing by construction;
/// energy statistics follow the distance order of their components, which the
/// ranking deliberately does not re-sort.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatisticVector {
    kind: StatKind,
    values: Vec<f64>,
}

impl StatisticVector {
    pub fn new(kind: StatKind, values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::invalid("statistics must be finite and nonnegative"));
        }
        Ok(Self { kind, values })
    }

    pub fn kind(&self) -> StatKind {
        self.kind
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn k(&self) -> usize {
        self.values.len()
    }
}

/// Resolve the volume of one component under the configured policy.
pub(crate) fn component_volume(
    topo: &ZeroTopology,
    pair: &crate::tda::PersistencePair,
    stable: bool,
    eps: &EpsPolicy,
) -> Result<Volume> {
    if !stable {
        return minimum_volume(&topo.tree, pair);
    }
    let epsilon = match eps {
        EpsPolicy::Fixed { epsilon } => *epsilon,
        EpsPolicy::Tuned { eps_max } => tune_epsilon(&topo.tree, pair, *eps_max)?,
    };
    stable_volume(&topo.tree, pair, epsilon)
}

/// Fraction of total spectrogram energy inside a volume's rasterized mask.
pub fn volume_energy(spec: &SpectrogramGrid, topo: &ZeroTopology, vol: &Volume) -> Result<f64> {
    let total = spec.total();
    if total <= 0.0 {
        return Err(Error::invalid("energy statistic undefined on a zero spectrogram"));
    }
    let mask = rasterize_volume(vol, &topo.filtration, topo.triangulation.points(), spec.geometry());
    let mut inside = 0.0;
    for row in 0..mask.rows() {
        for col in 0..mask.cols() {
            if mask.get(row, col) {
                inside += spec.value(row, col);
            }
        }
    }
    Ok(inside / total)
}

/// Extract the top-K statistics of an analyzed signal: components are ranked
/// by distance to the diagonal; missing components pad with zeros.
pub fn statistic_vector(
    spec: &SpectrogramGrid,
    topo: &ZeroTopology,
    kind: StatKind,
    k: usize,
    eps: &EpsPolicy,
) -> Result<StatisticVector> {
    if k < 1 {
        return Err(Error::invalid("statistic vector needs K >= 1"));
    }
    let top = top_components(&topo.tree, &topo.h1, k, false);
    let mut values = Vec::with_capacity(k);
    match kind {
        StatKind::Dist => {
            values.extend(top.iter().map(|p| p.distance_to_diagonal()));
        }
        StatKind::EnergyMv | StatKind::EnergySv => {
            let stable = kind == StatKind::EnergySv;
            for pair in &top {
                let vol = component_volume(topo, pair, stable, eps)?;
                values.push(volume_energy(spec, topo, &vol)?);
            }
        }
    }
    values.resize(k, 0.0);
    StatisticVector::new(kind, values)
}
