//! Command implementations.

use crate::binomial::clopper_pearson;
use crate::config::{usage_error, RunConfig};
use speczeros::pipeline::{analyze, detect_with_reference};
use speczeros::reconstruct::{denoise_pipeline, denoise_pipeline_full, DenoiseConfig, VolumeChoice};
use speczeros::signal::{
    mix_at_snr, nsm, read_csv_signal, read_wav, stft, synth, white_noise, write_csv_signal,
    write_wav, NoiseModel, SynthKind, TimeSeries, WavFormat,
};
use speczeros::stats::{
    apf, apf_envelope_test, build_noise_reference, build_noise_references, p_values,
    simultaneous_test, statistic_vector, AlphaSchedule, ApfCurve, Decision, StatKind, TestReport,
};
use speczeros::{Error, Result};
use std::io::Write;
use std::path::{Path, PathBuf};

pub fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(format!("create {}", dir.display()), e))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut f = std::fs::File::create(path)
        .map_err(|e| Error::io(format!("create {}", path.display()), e))?;
    f.write_all(text.as_bytes())
        .map_err(|e| Error::io(format!("write {}", path.display()), e))
}

fn write_report(dir: &Path, report: &TestReport) -> Result<PathBuf> {
    ensure_dir(dir)?;
    let path = dir.join("report.json");
    let json = serde_json::to_string_pretty(report)
        .map_err(|e| Error::invalid(format!("serialize report: {e}")))?;
    write_text(&path, &json)?;
    Ok(path)
}

/// `detect`: simultaneous Bonferroni test; exit 0 when detected, 1 otherwise.
pub fn cmd_detect(config: &RunConfig, cache: Option<&Path>) -> Result<i32> {
    let signal = config.load_signal()?;
    let cfg = config.detect_config()?;
    let reference = build_noise_reference(&cfg.reference_params(signal.len()), cache)?;
    let report = detect_with_reference(&signal, &cfg, &reference)?;
    let path = write_report(&config.out_dir(), &report)?;
    let detected = report.decision == Decision::Detected;
    println!(
        "decision: {} (statistic {}, alpha {}, K {}), report: {}",
        if detected { "detected" } else { "not-detected" },
        report.statistic.name(),
        cfg.alpha,
        cfg.k,
        path.display()
    );
    Ok(if detected { 0 } else { 1 })
}

/// `reconstruct`: sequential hole count and masked inversion; writes the
/// estimate, the domain mask and the report. Exit 0 when components were
/// found, 1 on a clean not-detected.
pub fn cmd_reconstruct(config: &RunConfig, cache: Option<&Path>) -> Result<i32> {
    let signal = config.load_signal()?;
    let cfg = config.denoise_config()?;
    let reference = build_noise_reference(&cfg.reference_params(signal.len()), cache)?;
    let (estimate, domain, mut report) = denoise_pipeline_full(&signal, &cfg, &reference)?;
    let dir = config.out_dir();
    ensure_dir(&dir)?;
    write_csv_signal(&dir.join("reconstruction.csv"), &estimate)?;
    if estimate.is_real() && estimate.sample_rate() >= 8.0 {
        write_wav(&dir.join("reconstruction.wav"), &estimate, WavFormat::Float32)?;
    }
    write_text(&dir.join("mask.csv"), &domain.mask().to_csv())?;
    for c in &mut report.components {
        c.mask_ref = Some("mask.csv".into());
    }
    let path = write_report(&dir, &report)?;
    println!(
        "n_holes: {} ({}), outputs in {}, report: {}",
        report.n_holes,
        report.schedule,
        dir.display(),
        path.display()
    );
    Ok(if report.n_holes > 0 { 0 } else { 1 })
}

/// `zeros`: dump the zero set as CSV or JSON, optionally with the
/// spectrogram matrix.
pub fn cmd_zeros(
    config: &RunConfig,
    format: &str,
    out: Option<&Path>,
    spectrogram_out: Option<&Path>,
) -> Result<i32> {
    let signal = config.load_signal()?;
    let a = analyze(&signal, &config.analysis_config())?;
    let geom = a.spectrogram.geometry();
    if let Some(path) = spectrogram_out {
        let mut t = String::new();
        for r in 0..a.spectrogram.rows() {
            let row: Vec<String> =
                (0..a.spectrogram.cols()).map(|c| a.spectrogram.value(r, c).to_string()).collect();
            t.push_str(&row.join(","));
            t.push('\n');
        }
        emit(Some(path), &t)?;
    }
    let text = match format {
        "csv" => {
            let mut t = String::from("u,v\n");
            for p in a.zeros.points() {
                t.push_str(&format!("{},{}\n", p[0], p[1]));
            }
            t
        }
        "json" => {
            let doc = serde_json::json!({
                "grid": { "rows": geom.rows, "cols": geom.cols, "hop": geom.hop,
                          "n_fft": geom.n_fft, "onesided": geom.onesided },
                "scale": geom.plane_scale,
                "margin": a.zeros.margin(),
                "zeros": a.zeros.points(),
            });
            serde_json::to_string_pretty(&doc).expect("json serializes")
        }
        other => return Err(usage_error(format!("unknown format '{other}' (csv|json)"))),
    };
    emit(out, &text)?;
    Ok(0)
}

/// `diagram`: dump the persistence diagram as CSV (birth,death,dim) or JSON,
/// optionally with the filtration debug dump.
pub fn cmd_diagram(
    config: &RunConfig,
    format: &str,
    out: Option<&Path>,
    filtration_out: Option<&Path>,
) -> Result<i32> {
    let signal = config.load_signal()?;
    let a = analyze(&signal, &config.analysis_config())?;
    if let Some(path) = filtration_out {
        emit(Some(path), &a.topology.filtration.dump_csv())?;
    }
    let pairs = a.topology.h0.iter().chain(a.topology.h1.iter());
    let text = match format {
        "csv" => {
            let mut t = String::from("birth,death,dim\n");
            for p in pairs {
                t.push_str(&format!("{},{},{}\n", p.birth, p.death, p.dim));
            }
            t
        }
        "json" => serde_json::to_string_pretty(
            &pairs.collect::<Vec<_>>(),
        )
        .expect("json serializes"),
        other => return Err(usage_error(format!("unknown format '{other}' (csv|json)"))),
    };
    emit(out, &text)?;
    Ok(0)
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(p) => {
            if let Some(dir) = p.parent() {
                if !dir.as_os_str().is_empty() {
                    ensure_dir(dir)?;
                }
            }
            write_text(p, text)
        }
    }
}

/// `synth`: generate a test signal and write it as WAV or CSV by extension.
pub fn cmd_synth(
    kind: &str,
    n: usize,
    snr_db: Option<f64>,
    seed: u64,
    sample_rate: f64,
    out: &Path,
) -> Result<i32> {
    let clean = synth(SynthKind::from_name(kind)?, n)?;
    let signal = match snr_db {
        None => clean,
        Some(snr) => mix_at_snr(&clean, &NoiseModel::real(seed), snr)?,
    };
    let signal = TimeSeries::new(signal.samples().to_vec(), sample_rate)?;
    match out.extension().and_then(|e| e.to_str()) {
        Some("wav") => write_wav(out, &signal, WavFormat::Float32)?,
        _ => write_csv_signal(out, &signal)?,
    }
    println!("wrote {}", out.display());
    Ok(0)
}

/// `noise-ref`: populate the reference cache for the given statistic kinds.
pub fn cmd_noise_ref(config: &RunConfig, kinds: &str, cache: &Path) -> Result<i32> {
    let n = config.signal.n.unwrap_or(1024);
    let cfg = config.detect_config()?;
    let mut parsed = Vec::new();
    for name in kinds.split(',') {
        parsed.push(StatKind::from_name(name.trim())?);
    }
    let base = cfg.reference_params(n);
    let refs = build_noise_references(&base, &parsed, Some(cache))?;
    for r in &refs {
        println!(
            "{}: B={} K={} hash={} (cache {})",
            r.params().kind.name(),
            r.b(),
            r.k(),
            r.hash(),
            cache.display()
        );
    }
    Ok(0)
}

/// `stratify`: compute the normalized spectrogram maximum per input file and
/// report the Z_i subset memberships (zeta >= i).
pub fn cmd_stratify(config: &RunConfig, files: &[PathBuf], out: Option<&Path>) -> Result<i32> {
    if files.is_empty() {
        return Err(usage_error("stratify needs at least one input file"));
    }
    let stft_cfg = config.stft_config();
    let mut text = String::from("file,n,nsm,z2,z3,z4,z5,z6,z7\n");
    for path in files {
        let signal = match path.extension().and_then(|e| e.to_str()) {
            Some("wav") => read_wav(path)?,
            _ => read_csv_signal(path, config.signal.sample_rate)?,
        };
        let grid = stft(&signal, &stft_cfg)?;
        let zeta = nsm(&grid)?;
        let memberships: Vec<String> =
            (2..=7).map(|i| ((zeta >= i as f64) as u8).to_string()).collect();
        text.push_str(&format!(
            "{},{},{},{}\n",
            path.display(),
            signal.len(),
            zeta,
            memberships.join(",")
        ));
    }
    emit(out, &text)?;
    Ok(0)
}

/// Detection methods compared by the power bench, mirroring the
/// distance/energy simple and simultaneous variants plus the APF envelope
/// test. The ranked-envelope baseline is a documented hook, not implemented.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PowerMethod {
    FirstDist,
    BonferroniDist,
    FirstEnergyMv,
    FirstEnergySv,
    BonferroniEnergyMv,
    BonferroniEnergySv,
    ApfEnvelope,
}

impl PowerMethod {
    pub const ALL: [PowerMethod; 7] = [
        PowerMethod::FirstDist,
        PowerMethod::BonferroniDist,
        PowerMethod::FirstEnergyMv,
        PowerMethod::FirstEnergySv,
        PowerMethod::BonferroniEnergyMv,
        PowerMethod::BonferroniEnergySv,
        PowerMethod::ApfEnvelope,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            PowerMethod::FirstDist => "first-dist",
            PowerMethod::BonferroniDist => "bonferroni-dist",
            PowerMethod::FirstEnergyMv => "first-energy-mv",
            PowerMethod::FirstEnergySv => "first-energy-sv",
            PowerMethod::BonferroniEnergyMv => "bonferroni-energy-mv",
            PowerMethod::BonferroniEnergySv => "bonferroni-energy-sv",
            PowerMethod::ApfEnvelope => "apf-envelope",
        }
    }

    fn kind(&self) -> Option<StatKind> {
        match self {
            PowerMethod::FirstDist | PowerMethod::BonferroniDist => Some(StatKind::Dist),
            PowerMethod::FirstEnergyMv | PowerMethod::BonferroniEnergyMv => Some(StatKind::EnergyMv),
            PowerMethod::FirstEnergySv | PowerMethod::BonferroniEnergySv => Some(StatKind::EnergySv),
            PowerMethod::ApfEnvelope => None,
        }
    }

    fn simple(&self) -> bool {
        matches!(
            self,
            PowerMethod::FirstDist | PowerMethod::FirstEnergyMv | PowerMethod::FirstEnergySv
        )
    }
}

pub struct PowerRow {
    pub method: &'static str,
    pub snr_db: f64,
    pub trials: usize,
    pub detections: usize,
    pub power: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// Detection power over an SNR grid for every method, on a shared set of
/// trial signals (paired across methods).
pub fn power_bench(
    config: &RunConfig,
    snrs: &[f64],
    trials: usize,
    kind: SynthKind,
    apf_l: usize,
    cache: Option<&Path>,
) -> Result<Vec<PowerRow>> {
    let cfg = config.detect_config()?;
    let n = config.signal.n.unwrap_or(1024);
    let clean = synth(kind, n)?;
    let schedule = AlphaSchedule::bonferroni(cfg.alpha, cfg.k)?;
    let schedule_one = AlphaSchedule::bonferroni(cfg.alpha, 1)?;

    let kinds = [StatKind::Dist, StatKind::EnergyMv, StatKind::EnergySv];
    let base = cfg.reference_params(n);
    let refs = build_noise_references(&base, &kinds, cache)?;
    let refs_one: Vec<_> = refs.iter().map(|r| r.truncated(1)).collect();

    // null APF curves, simulated once and replayed for every trial
    let apf_nulls: Vec<ApfCurve> = (0..apf_l)
        .map(|i| {
            let noise = white_noise(n, &NoiseModel { kind: cfg.noise_kind, variance: 1.0, seed: base.seed + 10_000 + i as u64 });
            let a = analyze(&noise, &cfg.analysis)?;
            Ok(apf(&a.topology.h1, 1))
        })
        .collect::<Result<_>>()?;

    let mut detections = vec![vec![0usize; snrs.len()]; PowerMethod::ALL.len()];
    for (si, &snr) in snrs.iter().enumerate() {
        for trial in 0..trials {
            let model = NoiseModel::real(base.seed + 50_000 + trial as u64);
            let signal = mix_at_snr(&clean, &model, snr)?;
            let a = analyze(&signal, &cfg.analysis)?;
            for (mi, method) in PowerMethod::ALL.iter().enumerate() {
                let detected = match method.kind() {
                    Some(kind) => {
                        let ki = kinds.iter().position(|k| *k == kind).unwrap();
                        if method.simple() {
                            let obs = statistic_vector(&a.spectrogram, &a.topology, kind, 1, &cfg.eps)?;
                            let p = p_values(&obs, &refs_one[ki])?;
                            simultaneous_test(&p, &schedule_one)?
                        } else {
                            let obs =
                                statistic_vector(&a.spectrogram, &a.topology, kind, cfg.k, &cfg.eps)?;
                            let p = p_values(&obs, &refs[ki])?;
                            simultaneous_test(&p, &schedule)?
                        }
                    }
                    None => {
                        let obs_curve = apf(&a.topology.h1, 1);
                        let mut it = apf_nulls.iter();
                        apf_envelope_test(&obs_curve, apf_l, cfg.alpha, |_| {
                            Ok(it.next().expect("enough null curves").clone())
                        }, false)?
                        .reject
                    }
                };
                if detected {
                    detections[mi][si] += 1;
                }
            }
        }
    }

    let mut rows = Vec::new();
    for (mi, method) in PowerMethod::ALL.iter().enumerate() {
        for (si, &snr) in snrs.iter().enumerate() {
            let d = detections[mi][si];
            let (lo, hi) = clopper_pearson(d, trials, 0.95);
            rows.push(PowerRow {
                method: method.name(),
                snr_db: snr,
                trials,
                detections: d,
                power: d as f64 / trials as f64,
                ci_low: lo,
                ci_high: hi,
            });
        }
    }
    Ok(rows)
}

pub fn power_rows_to_csv(rows: &[PowerRow]) -> String {
    let mut t = String::from("method,snr_db,trials,detections,power,ci_low,ci_high\n");
    for r in rows {
        t.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.method, r.snr_db, r.trials, r.detections, r.power, r.ci_low, r.ci_high
        ));
    }
    t
}

pub struct QrfRow {
    pub variant: String,
    pub snr_db: f64,
    pub trials: usize,
    pub mean_qrf_db: f64,
    pub mean_gain_db: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub mean_n_holes: f64,
}

/// Reconstruction QRF over an SNR grid for the minimum/stable volume variants
/// at two significance levels, paired across variants.
pub fn qrf_bench(
    config: &RunConfig,
    snrs: &[f64],
    trials: usize,
    kind: SynthKind,
    cache: Option<&Path>,
) -> Result<Vec<QrfRow>> {
    let base_cfg = config.denoise_config()?;
    let n = config.signal.n.unwrap_or(1024);
    let clean = synth(kind, n)?;
    let alpha_low = base_cfg.schedule.alpha();
    let alpha_high = (alpha_low * 3.0).min(0.45);
    let variants: Vec<(String, DenoiseConfig)> = vec![
        (
            format!("mv-alpha{alpha_low}"),
            DenoiseConfig {
                volumes: VolumeChoice::Minimum,
                ..base_cfg
            },
        ),
        (
            format!("sv-alpha{alpha_low}"),
            DenoiseConfig { volumes: VolumeChoice::Stable, ..base_cfg },
        ),
        (
            format!("sv-alpha{alpha_high}"),
            DenoiseConfig {
                volumes: VolumeChoice::Stable,
                schedule: rescaled(&base_cfg.schedule, alpha_high)?,
                ..base_cfg
            },
        ),
    ];
    let reference = build_noise_reference(&base_cfg.reference_params(n), cache)?;

    let mut rows = Vec::new();
    for (name, cfg) in &variants {
        for &snr in snrs {
            let mut qrfs = Vec::with_capacity(trials);
            let mut holes = 0usize;
            for trial in 0..trials {
                let model = NoiseModel::real(base_cfg.ref_seed + 90_000 + trial as u64);
                let h = mix_at_snr(&clean, &model, snr)?;
                let (estimate, report) = denoise_pipeline(&h, cfg, &reference)?;
                qrfs.push(speczeros::signal::qrf(&clean, &estimate)?);
                holes += report.n_holes;
            }
            let mean = qrfs.iter().sum::<f64>() / trials as f64;
            let var = qrfs.iter().map(|q| (q - mean).powi(2)).sum::<f64>()
                / (trials.max(2) - 1) as f64;
            let half = 1.96 * (var / trials as f64).sqrt();
            rows.push(QrfRow {
                variant: name.clone(),
                snr_db: snr,
                trials,
                mean_qrf_db: mean,
                mean_gain_db: mean - snr,
                ci_low: mean - snr - half,
                ci_high: mean - snr + half,
                mean_n_holes: holes as f64 / trials as f64,
            });
        }
    }
    Ok(rows)
}

fn rescaled(schedule: &AlphaSchedule, alpha: f64) -> Result<AlphaSchedule> {
    AlphaSchedule::new(alpha, schedule.rule())
}

pub fn qrf_rows_to_csv(rows: &[QrfRow]) -> String {
    let mut t =
        String::from("variant,snr_db,trials,mean_qrf_db,mean_gain_db,gain_ci_low,gain_ci_high,mean_n_holes\n");
    for r in rows {
        t.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.variant,
            r.snr_db,
            r.trials,
            r.mean_qrf_db,
            r.mean_gain_db,
            r.ci_low,
            r.ci_high,
            r.mean_n_holes
        ));
    }
    t
}
