//! Declarative run configuration: a TOML file plus flag overrides
//! (flags win). The schema is documented in docs/FORMATS.md.

use serde::Deserialize;
use speczeros::pipeline::{AnalysisConfig, DetectConfig};
use speczeros::reconstruct::{DenoiseConfig, VolumeChoice};
use speczeros::signal::{
    mix_at_snr, read_csv_signal, read_wav, synth, white_noise, NoiseKind, NoiseModel, StftConfig,
    SynthKind, TimeSeries,
};
use speczeros::stats::{AlphaSchedule, EpsPolicy, StatKind};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub signal: SignalSection,
    #[serde(default)]
    pub stft: StftSection,
    #[serde(default)]
    pub analysis: AnalysisSection,
    #[serde(default)]
    pub test: TestSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct SignalSection {
    /// "file" | "synth" | "noise"
    pub source: Option<String>,
    pub path: Option<PathBuf>,
    /// chirp | impulses | sharp_attack | hermite
    pub kind: Option<String>,
    pub n: Option<usize>,
    /// Mix the synthetic signal with white noise at this SNR (dB).
    pub snr_db: Option<f64>,
    pub noise_seed: Option<u64>,
    pub sample_rate: Option<f64>,
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct StftSection {
    /// 0 or absent means the signal length.
    pub n_fft: Option<usize>,
    pub hop: Option<usize>,
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct AnalysisSection {
    pub margin: Option<f64>,
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct TestSection {
    pub statistic: Option<String>,
    pub k: Option<usize>,
    pub alpha: Option<f64>,
    /// bonferroni | polynomial | geometric
    pub schedule: Option<String>,
    pub m: Option<f64>,
    pub beta: Option<f64>,
    pub b: Option<usize>,
    pub eps_max: Option<f64>,
    /// A nonnegative value fixes epsilon instead of tuning.
    pub eps_fixed: Option<f64>,
    /// minimum | stable
    pub volumes: Option<String>,
    pub non_overlapping: Option<bool>,
    pub ref_seed: Option<u64>,
    /// real | complex
    pub noise_kind: Option<String>,
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: Option<PathBuf>,
}

/// Flag-level overrides; every field beats the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub input: Option<PathBuf>,
    pub synth: Option<String>,
    pub noise: bool,
    pub n: Option<usize>,
    pub snr_db: Option<f64>,
    pub noise_seed: Option<u64>,
    pub sample_rate: Option<f64>,
    pub statistic: Option<String>,
    pub k: Option<usize>,
    pub alpha: Option<f64>,
    pub schedule: Option<String>,
    pub b: Option<usize>,
    pub volumes: Option<String>,
    pub out_dir: Option<PathBuf>,
    pub n_fft: Option<usize>,
    pub hop: Option<usize>,
    pub margin: Option<f64>,
}

pub fn usage_error(msg: impl Into<String>) -> speczeros::Error {
    speczeros::Error::InvalidArgument(msg.into())
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, speczeros::Error> {
        match path {
            None => Ok(RunConfig::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| speczeros::Error::io(format!("read config {}", p.display()), e))?;
                toml::from_str(&text)
                    .map_err(|e| usage_error(format!("config {}: {e}", p.display())))
            }
        }
    }

    pub fn apply(&mut self, o: &Overrides) {
        let s = &mut self.signal;
        if let Some(p) = &o.input {
            s.source = Some("file".into());
            s.path = Some(p.clone());
        }
        if let Some(kind) = &o.synth {
            s.source = Some("synth".into());
            s.kind = Some(kind.clone());
        }
        if o.noise {
            s.source = Some("noise".into());
        }
        if o.n.is_some() {
            s.n = o.n;
        }
        if o.snr_db.is_some() {
            s.snr_db = o.snr_db;
        }
        if o.noise_seed.is_some() {
            s.noise_seed = o.noise_seed;
        }
        if o.sample_rate.is_some() {
            s.sample_rate = o.sample_rate;
        }
        if o.n_fft.is_some() {
            self.stft.n_fft = o.n_fft;
        }
        if o.hop.is_some() {
            self.stft.hop = o.hop;
        }
        if o.margin.is_some() {
            self.analysis.margin = o.margin;
        }
        let t = &mut self.test;
        if o.statistic.is_some() {
            t.statistic = o.statistic.clone();
        }
        if o.k.is_some() {
            t.k = o.k;
        }
        if o.alpha.is_some() {
            t.alpha = o.alpha;
        }
        if o.schedule.is_some() {
            t.schedule = o.schedule.clone();
        }
        if o.b.is_some() {
            t.b = o.b;
        }
        if o.volumes.is_some() {
            t.volumes = o.volumes.clone();
        }
        if o.out_dir.is_some() {
            self.output.dir = o.out_dir.clone();
        }
    }

    pub fn stft_config(&self) -> StftConfig {
        StftConfig {
            n_fft: match self.stft.n_fft {
                None | Some(0) => None,
                Some(n) => Some(n),
            },
            hop: self.stft.hop.unwrap_or(1),
            ..StftConfig::default()
        }
    }

    pub fn analysis_config(&self) -> AnalysisConfig {
        AnalysisConfig {
            stft: self.stft_config(),
            margin: self.analysis.margin.unwrap_or(AnalysisConfig::default().margin),
        }
    }

    pub fn statistic(&self) -> Result<StatKind, speczeros::Error> {
        match self.test.statistic.as_deref() {
            None => Ok(StatKind::EnergySv),
            Some(name) => StatKind::from_name(name),
        }
    }

    pub fn eps_policy(&self) -> EpsPolicy {
        match self.test.eps_fixed {
            Some(e) if e >= 0.0 => EpsPolicy::Fixed { epsilon: e },
            _ => EpsPolicy::Tuned { eps_max: self.test.eps_max.unwrap_or(0.15) },
        }
    }

    pub fn noise_kind(&self) -> Result<NoiseKind, speczeros::Error> {
        match self.test.noise_kind.as_deref() {
            None | Some("real") => Ok(NoiseKind::Real),
            Some("complex") => Ok(NoiseKind::Complex),
            Some(other) => Err(usage_error(format!("unknown noise kind '{other}'"))),
        }
    }

    pub fn schedule(&self, k: usize) -> Result<AlphaSchedule, speczeros::Error> {
        let alpha = self.test.alpha.unwrap_or(0.05);
        match self.test.schedule.as_deref() {
            None | Some("geometric") => AlphaSchedule::geometric(alpha, self.test.beta.unwrap_or(0.5)),
            Some("bonferroni") => AlphaSchedule::bonferroni(alpha, k),
            Some("polynomial") => AlphaSchedule::polynomial(alpha, self.test.m.unwrap_or(2.0)),
            Some(other) => Err(usage_error(format!("unknown schedule '{other}'"))),
        }
    }

    pub fn detect_config(&self) -> Result<DetectConfig, speczeros::Error> {
        let d = DetectConfig::default();
        Ok(DetectConfig {
            analysis: self.analysis_config(),
            statistic: self.statistic()?,
            k: self.test.k.unwrap_or(d.k),
            alpha: self.test.alpha.unwrap_or(d.alpha),
            eps: self.eps_policy(),
            b: self.test.b.unwrap_or(d.b),
            noise_kind: self.noise_kind()?,
            ref_seed: self.test.ref_seed.unwrap_or(d.ref_seed),
        })
    }

    pub fn denoise_config(&self) -> Result<DenoiseConfig, speczeros::Error> {
        let d = DenoiseConfig::default();
        let k = self.test.k.unwrap_or(d.k);
        Ok(DenoiseConfig {
            analysis: self.analysis_config(),
            statistic: self.statistic()?,
            k,
            schedule: self.schedule(k)?,
            eps: self.eps_policy(),
            volumes: match self.test.volumes.as_deref() {
                None | Some("stable") => VolumeChoice::Stable,
                Some("minimum") => VolumeChoice::Minimum,
                Some(other) => return Err(usage_error(format!("unknown volume kind '{other}'"))),
            },
            non_overlapping: self.test.non_overlapping.unwrap_or(false),
            b: self.test.b.unwrap_or(d.b),
            noise_kind: self.noise_kind()?,
            ref_seed: self.test.ref_seed.unwrap_or(d.ref_seed),
        })
    }

    pub fn out_dir(&self) -> PathBuf {
        self.output.dir.clone().unwrap_or_else(|| PathBuf::from("out"))
    }

    /// Resolve the input signal per the [signal] section.
    pub fn load_signal(&self) -> Result<TimeSeries, speczeros::Error> {
        let s = &self.signal;
        match s.source.as_deref() {
            Some("file") => {
                let path = s
                    .path
                    .as_ref()
                    .ok_or_else(|| usage_error("signal.source = \"file\" requires signal.path"))?;
                if !path.exists() {
                    return Err(usage_error(format!("input file {} does not exist", path.display())));
                }
                match path.extension().and_then(|e| e.to_str()) {
                    Some("wav") => read_wav(path),
                    _ => read_csv_signal(path, s.sample_rate),
                }
            }
            Some("synth") => {
                let name = s.kind.as_deref().unwrap_or("chirp");
                let kind = SynthKind::from_name(name)?;
                let n = s.n.unwrap_or(1024);
                let clean = synth(kind, n)?;
                match s.snr_db {
                    None => Ok(clean),
                    Some(snr) => {
                        let model = NoiseModel::real(s.noise_seed.unwrap_or(1));
                        mix_at_snr(&clean, &model, snr)
                    }
                }
            }
            Some("noise") | None => {
                let n = s.n.unwrap_or(1024);
                let model = match self.noise_kind()? {
                    NoiseKind::Real => NoiseModel::real(s.noise_seed.unwrap_or(1)),
                    NoiseKind::Complex => NoiseModel::complex(s.noise_seed.unwrap_or(1)),
                };
                Ok(white_noise(n, &model))
            }
            Some(other) => Err(usage_error(format!("unknown signal source '{other}'"))),
        }
    }
}
