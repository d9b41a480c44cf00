//! `speczeros`: detection, hole counting and reconstruction of signals from
//! the topology of Gaussian spectrogram zeros.
//!
//! Exit codes: 0 success/detected, 1 clean not-detected, 2 usage error,
//! 3 runtime error.

use clap::{Args, Parser, Subcommand};
use speczeros_cli::commands;
use speczeros_cli::config::{self, Overrides, RunConfig};
use speczeros::signal::SynthKind;
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "speczeros", version, about)]
struct Cli {
    /// TOML configuration file; command-line flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Noise-reference cache directory (env SPECZEROS_CACHE_DIR, then
    /// ./speczeros-cache). "none" disables caching.
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct SignalFlags {
    /// Input signal file (.wav or single-column .csv).
    #[arg(long)]
    input: Option<PathBuf>,
    /// Generate a synthetic signal: chirp | impulses | sharp_attack | hermite.
    #[arg(long, conflicts_with = "input")]
    synth: Option<String>,
    /// Analyze pure white noise.
    #[arg(long, conflicts_with_all = ["input", "synth"])]
    noise: bool,
    /// Signal length for synthetic sources.
    #[arg(long)]
    n: Option<usize>,
    /// Mix the synthetic signal with white noise at this SNR (dB).
    #[arg(long, allow_negative_numbers = true)]
    snr: Option<f64>,
    /// Seed of the mixed-in noise.
    #[arg(long)]
    noise_seed: Option<u64>,
    /// Sample rate for CSV inputs.
    #[arg(long)]
    sample_rate: Option<f64>,
}

#[derive(Args, Clone, Default)]
struct TestFlags {
    /// Test statistic: dist | energy_mv | energy_sv.
    #[arg(long)]
    statistic: Option<String>,
    /// Number of ranked components tested.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Significance schedule: bonferroni | polynomial | geometric.
    #[arg(long)]
    schedule: Option<String>,
    /// Monte Carlo replicates in the noise reference.
    #[arg(long)]
    b: Option<usize>,
    /// Volumes for the signal domain: minimum | stable.
    #[arg(long)]
    volumes: Option<String>,
    #[arg(long)]
    n_fft: Option<usize>,
    #[arg(long)]
    hop: Option<usize>,
    /// Zero-exclusion margin in plane units.
    #[arg(long)]
    margin: Option<f64>,
    /// Output directory.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Test a signal for the presence of any component.
    Detect {
        #[command(flatten)]
        signal: SignalFlags,
        #[command(flatten)]
        test: TestFlags,
    },
    /// Estimate the number of components and reconstruct the signal.
    Reconstruct {
        #[command(flatten)]
        signal: SignalFlags,
        #[command(flatten)]
        test: TestFlags,
    },
    /// Monte Carlo benchmark tables (detection power or reconstruction QRF).
    Bench {
        /// power | qrf
        mode: String,
        /// Comma-separated SNR grid in dB.
        #[arg(long, default_value = "-5,0,5,10", allow_hyphen_values = true)]
        snr: String,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        /// Synthetic signal kind under test.
        #[arg(long, default_value = "chirp")]
        signal_kind: String,
        /// Null simulations of the APF envelope test.
        #[arg(long, default_value_t = 19)]
        apf_l: usize,
        #[command(flatten)]
        test: TestFlags,
    },
    /// Populate the noise-reference cache.
    NoiseRef {
        /// Comma-separated statistic kinds.
        #[arg(long, default_value = "dist,energy_mv,energy_sv")]
        kinds: String,
        #[arg(long)]
        n: Option<usize>,
        #[command(flatten)]
        test: TestFlags,
    },
    /// Rank input files by normalized spectrogram maximum.
    Stratify {
        files: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a synthetic test signal file.
    Synth {
        /// chirp | impulses | sharp_attack | hermite
        #[arg(long, default_value = "chirp")]
        kind: String,
        #[arg(long, default_value_t = 1024)]
        n: usize,
        #[arg(long, allow_negative_numbers = true)]
        snr: Option<f64>,
        #[arg(long, default_value_t = 1)]
        noise_seed: u64,
        #[arg(long, default_value_t = 1.0)]
        sample_rate: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Dump the spectrogram zero set.
    Zeros {
        #[command(flatten)]
        signal: SignalFlags,
        #[arg(long, default_value = "csv")]
        format: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        margin: Option<f64>,
        /// Also write the spectrogram matrix as CSV.
        #[arg(long)]
        spectrogram_out: Option<PathBuf>,
    },
    /// Dump the persistence diagram.
    Diagram {
        #[command(flatten)]
        signal: SignalFlags,
        #[arg(long, default_value = "csv")]
        format: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        margin: Option<f64>,
        /// Also write the filtration dump ((r, v1, v2, v3) rows).
        #[arg(long)]
        filtration_out: Option<PathBuf>,
    },
}

fn overrides(signal: &SignalFlags, test: &TestFlags) -> Overrides {
    Overrides {
        input: signal.input.clone(),
        synth: signal.synth.clone(),
        noise: signal.noise,
        n: signal.n,
        snr_db: signal.snr,
        noise_seed: signal.noise_seed,
        sample_rate: signal.sample_rate,
        statistic: test.statistic.clone(),
        k: test.k,
        alpha: test.alpha,
        schedule: test.schedule.clone(),
        b: test.b,
        volumes: test.volumes.clone(),
        out_dir: test.out_dir.clone(),
        n_fft: test.n_fft,
        hop: test.hop,
        margin: test.margin,
    }
}

fn cache_dir(flag: &Option<PathBuf>) -> Option<PathBuf> {
    let dir = flag
        .clone()
        .or_else(|| std::env::var_os("SPECZEROS_CACHE_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("speczeros-cache"));
    if dir.as_os_str() == "none" {
        None
    } else {
        Some(dir)
    }
}

fn parse_snrs(s: &str) -> Result<Vec<f64>, speczeros::Error> {
    let parsed: Result<Vec<f64>, _> = s.split(',').map(|x| x.trim().parse::<f64>()).collect();
    parsed.map_err(|e| config::usage_error(format!("bad --snr list '{s}': {e}")))
}

fn run(cli: Cli) -> Result<i32, speczeros::Error> {
    let cache = cache_dir(&cli.cache_dir);
    match &cli.command {
        Command::Detect { signal, test } => {
            let mut config = RunConfig::load(cli.config.as_deref())?;
            config.apply(&overrides(signal, test));
            commands::cmd_detect(&config, cache.as_deref())
        }
        Command::Reconstruct { signal, test } => {
            let mut config = RunConfig::load(cli.config.as_deref())?;
            config.apply(&overrides(signal, test));
            commands::cmd_reconstruct(&config, cache.as_deref())
        }
        Command::Bench { mode, snr, trials, signal_kind, apf_l, test } => {
            let mut config = RunConfig::load(cli.config.as_deref())?;
            config.apply(&overrides(&SignalFlags::default(), test));
            let snrs = parse_snrs(snr)?;
            if snrs.is_empty() || *trials < 1 {
                return Err(config::usage_error("bench needs a nonempty SNR grid and trials >= 1"));
            }
            let kind = SynthKind::from_name(signal_kind)?;
            let dir = config.out_dir();
            commands::ensure_dir(&dir)?;
            match mode.as_str() {
                "power" => {
                    let rows =
                        commands::power_bench(&config, &snrs, *trials, kind, *apf_l, cache.as_deref())?;
                    let csv = commands::power_rows_to_csv(&rows);
                    let path = dir.join("power.csv");
                    commands::write_text(&path, &csv)?;
                    print!("{csv}");
                    println!("# wrote {}", path.display());
                    Ok(0)
                }
                "qrf" => {
                    let rows = commands::qrf_bench(&config, &snrs, *trials, kind, cache.as_deref())?;
                    let csv = commands::qrf_rows_to_csv(&rows);
                    let path = dir.join("qrf.csv");
                    commands::write_text(&path, &csv)?;
                    print!("{csv}");
                    println!("# wrote {}", path.display());
                    Ok(0)
                }
                "rank-envelope" => Err(config::usage_error(
                    "the ranked-envelope baseline is a hook only; see docs/FORMATS.md",
                )),
                other => Err(config::usage_error(format!("unknown bench mode '{other}' (power|qrf)"))),
            }
        }
        Command::NoiseRef { kinds, n, test } => {
            let mut config = RunConfig::load(cli.config.as_deref())?;
            config.apply(&overrides(&SignalFlags::default(), test));
            if let Some(n) = n {
                config.signal.n = Some(*n);
            }
            let cache = cache.ok_or_else(|| config::usage_error("noise-ref requires a cache directory"))?;
            commands::cmd_noise_ref(&config, kinds, &cache)
        }
        Command::Stratify { files, out } => {
            let config = RunConfig::load(cli.config.as_deref())?;
            commands::cmd_stratify(&config, files, out.as_deref())
        }
        Command::Synth { kind, n, snr, noise_seed, sample_rate, out } => {
            commands::cmd_synth(kind, *n, *snr, *noise_seed, *sample_rate, out)
        }
        Command::Zeros { signal, format, out, margin, spectrogram_out } => {
            let mut config = RunConfig::load(cli.config.as_deref())?;
            let mut o = overrides(signal, &TestFlags::default());
            o.margin = *margin;
            config.apply(&o);
            commands::cmd_zeros(&config, format, out.as_deref(), spectrogram_out.as_deref())
        }
        Command::Diagram { signal, format, out, margin, filtration_out } => {
            let mut config = RunConfig::load(cli.config.as_deref())?;
            let mut o = overrides(signal, &TestFlags::default());
            o.margin = *margin;
            config.apply(&o);
            commands::cmd_diagram(&config, format, out.as_deref(), filtration_out.as_deref())
        }
    }
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {err}");
            let code = match &err {
                speczeros::Error::InvalidArgument(msg)
                    if msg.starts_with("config ")
                        || msg.starts_with("unknown ")
                        || msg.starts_with("bad ")
                        || msg.contains("requires") =>
                {
                    2
                }
                _ => 3,
            };
            std::process::exit(code);
        }
    }
}
