//! End-to-end glue: signal -> STFT -> zeros -> topology, plus the
//! simultaneous detection frontend.

use crate::signal::{
    find_zeros, stft, NoiseKind, SpectrogramGrid, StftConfig, StftGrid, TimeSeries, ZeroSet,
};
use crate::stats::{
    build_noise_reference, p_values, sequential_hole_count, simultaneous_test, statistic_vector,
    AlphaSchedule, ComponentReport, Decision, EpsPolicy, NoiseReference, ReferenceParams, StatKind,
    TestReport,
};
use crate::tda::{analyze_zeros, top_components, ZeroTopology};
use crate::{Result, StageExt};
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Parameters of the analysis stages shared by every command.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    pub stft: StftConfig,
    /// Zero-exclusion border width in plane units.
    pub margin: f64,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        // No margin by default: the circular transform has no time-border
        // artifacts, onesided grids mirror across DC/Nyquist, and the axis
        // zeros there are what caps the corridor a full-band component
        // (an impulse, a sharp attack) carves through the zero pattern.
        // Without the caps such corridors never close into holes.
        Self { stft: StftConfig::default(), margin: 0.0 }
    }
}

/// All per-signal stages bundled for downstream queries.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub stft: StftGrid,
    pub spectrogram: SpectrogramGrid,
    pub zeros: ZeroSet,
    pub topology: ZeroTopology,
}

/// Run signal -> STFT -> spectrogram -> zeros -> filtration/tree/diagrams.
pub fn analyze(signal: &TimeSeries, cfg: &AnalysisConfig) -> Result<Analysis> {
    let grid = stft(signal, &cfg.stft).stage("stft")?;
    let spectrogram = grid.spectrogram();
    let zeros = find_zeros(&spectrogram, cfg.margin).stage("zeros")?;
    let topology = analyze_zeros(&zeros).stage("topology")?;
    Ok(Analysis { stft: grid, spectrogram, zeros, topology })
}

/// Configuration of the simultaneous (Bonferroni) detection test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectConfig {
    pub analysis: AnalysisConfig,
    pub statistic: StatKind,
    /// Number of ranked components tested.
    pub k: usize,
    pub alpha: f64,
    pub eps: EpsPolicy,
    /// Monte Carlo replicates in the noise reference.
    pub b: usize,
    pub noise_kind: NoiseKind,
    /// Root seed of the reference replicates.
    pub ref_seed: u64,
}

impl Default for DetectConfig {
    fn default() -> Self {
        // K = 30 ranked components; B = 600 replicates keep the Bonferroni
        // level alpha/K = 1/600 attainable on the Monte Carlo p-value grid
        // (p < 1/600 only for p = 0, which has null probability 1/601), so
        // the family-wise error stays below alpha.
        Self {
            analysis: AnalysisConfig::default(),
            statistic: StatKind::EnergySv,
            k: 30,
            alpha: 0.05,
            eps: EpsPolicy::default(),
            b: 600,
            noise_kind: NoiseKind::Real,
            ref_seed: 7_000_000,
        }
    }
}

impl DetectConfig {
    /// Reference parameters matching this configuration for a signal of
    /// length `n`.
    pub fn reference_params(&self, n: usize) -> ReferenceParams {
        ReferenceParams {
            n,
            stft: self.analysis.stft,
            margin: self.analysis.margin,
            noise_kind: self.noise_kind,
            variance: 1.0,
            kind: self.statistic,
            k: self.k,
            eps: self.eps,
            b: self.b,
            seed: self.ref_seed,
        }
    }
}

/// Detection report against a prebuilt noise reference.
pub fn detect_with_reference(
    signal: &TimeSeries,
    cfg: &DetectConfig,
    reference: &NoiseReference,
) -> Result<TestReport> {
    let analysis = analyze(signal, &cfg.analysis)?;
    let obs = statistic_vector(
        &analysis.spectrogram,
        &analysis.topology,
        cfg.statistic,
        cfg.k,
        &cfg.eps,
    )
    .stage("statistics")?;
    let pvals = p_values(&obs, reference).stage("p-values")?;
    let schedule = AlphaSchedule::bonferroni(cfg.alpha, cfg.k)?;
    let detected = simultaneous_test(&pvals, &schedule)?;
    let (n_holes, alphas) = sequential_hole_count(&pvals, &schedule)?;
    let components = report_components(&analysis, cfg.k, obs.kind(), &obs);
    Ok(TestReport {
        statistic: cfg.statistic,
        pvalues: pvals,
        alphas,
        schedule: schedule.describe(),
        decision: if detected { Decision::Detected } else { Decision::NotDetected },
        n_holes,
        components,
    })
}

/// Full detection run: builds (or loads) the reference, then tests.
pub fn detect(
    signal: &TimeSeries,
    cfg: &DetectConfig,
    cache_dir: Option<&Path>,
) -> Result<TestReport> {
    let reference =
        build_noise_reference(&cfg.reference_params(signal.len()), cache_dir).stage("reference")?;
    detect_with_reference(signal, cfg, &reference)
}

pub(crate) fn report_components(
    analysis: &Analysis,
    k: usize,
    kind: StatKind,
    obs: &crate::stats::StatisticVector,
) -> Vec<ComponentReport> {
    let top = top_components(&analysis.topology.tree, &analysis.topology.h1, k, false);
    top.iter()
        .enumerate()
        .map(|(i, p)| ComponentReport {
            birth: p.birth,
            death: p.death,
            distance: p.distance_to_diagonal(),
            energy: match kind {
                StatKind::Dist => None,
                _ => obs.values().get(i).copied(),
            },
            mask_ref: None,
        })
        .collect()
}
