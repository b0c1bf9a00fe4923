//! `isidec` — experiment driver for blind decoding on ISI channels.

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use isidec_cli::config::{AxisSpec, ExperimentConfig, Kind, TapList};
use isidec_cli::{dispatch, CliError};

#[derive(Parser)]
#[command(
    name = "isidec",
    version,
    about = "Blind decoding experiments on ISI channels: Monte Carlo error rates, \
             error-exponent surfaces, lattice estimation, and spectrum checks",
    after_help = "Set ISIDEC_THREADS to cap worker threads; outputs do not depend on it."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo campaign: blind vs. channel-aware decoding error rates
    Simulate(RunArgs),
    /// Error exponents for a single channel and rate (JSON)
    Exponents(RunArgs),
    /// Exponent surface over an SNR x rate grid (CSV)
    Surface(RunArgs),
    /// One seeded transmission through the lattice estimator (JSON)
    Estimate(RunArgs),
    /// Distance between the operator spectrum and its limit (JSON)
    Szego(RunArgs),
}

/// Flags shared by every subcommand; each one overrides the matching
/// config-file field.
#[derive(Args)]
struct RunArgs {
    /// JSON configuration file; inline flags override its fields
    #[arg(long, value_name = "PATH")]
    config: Option<std::path::PathBuf>,
    /// Block length
    #[arg(long)]
    n: Option<usize>,
    /// Codebook size
    #[arg(long)]
    messages: Option<usize>,
    /// Monte Carlo trials
    #[arg(long)]
    trials: Option<usize>,
    /// Channel taps, comma separated
    #[arg(long, value_name = "T0,T1,...")]
    h: Option<TapList>,
    /// Noise variance
    #[arg(long)]
    sigma2: Option<f64>,
    /// Code rate in nats per symbol
    #[arg(long)]
    rate: Option<f64>,
    /// SNR axis in dB
    #[arg(long = "snr-db", value_name = "START:STOP:COUNT")]
    snr_db: Option<AxisSpec>,
    /// Rate axis in nats
    #[arg(long = "rate-axis", value_name = "START:STOP:COUNT")]
    rate_axis: Option<AxisSpec>,
    /// Master seed for all random streams
    #[arg(long)]
    seed: Option<u64>,
    /// Output path (simulate appends .trials.csv / .summary.json)
    #[arg(long, value_name = "PATH")]
    out: Option<std::path::PathBuf>,
    /// Lattice spacing override
    #[arg(long)]
    gamma: Option<f64>,
    /// Lattice tap-bound override
    #[arg(long = "tap-bound")]
    tap_bound: Option<f64>,
    /// Fitted-memory override (default: channel length minus one)
    #[arg(long = "isi-len")]
    isi_len: Option<usize>,
    /// Lower variance-lattice bound override
    #[arg(long = "sigma2-min")]
    sigma2_min: Option<f64>,
    /// Upper variance-lattice bound override
    #[arg(long = "sigma2-max")]
    sigma2_max: Option<f64>,
}

/// Loads the config file (if any), checks it agrees with the subcommand,
/// and applies inline overrides.
fn build_config(kind: Kind, args: &RunArgs) -> Result<ExperimentConfig, CliError> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                CliError::Runtime(format!("cannot read config {}: {e}", path.display()))
            })?;
            serde_json::from_str::<ExperimentConfig>(&text).map_err(|e| {
                CliError::Usage(format!("invalid config {}: {e}", path.display()))
            })?
        }
        None => ExperimentConfig::default(),
    };
    if let Some(k) = cfg.kind {
        if k != kind {
            return Err(CliError::Usage(format!(
                "kind: config file says {k}, but the subcommand is {kind}"
            )));
        }
    }
    cfg.kind = Some(kind);

    if let Some(v) = args.n {
        cfg.n = v;
    }
    if let Some(v) = args.messages {
        cfg.messages = v;
    }
    if let Some(v) = args.trials {
        cfg.trials = v;
    }
    if let Some(taps) = &args.h {
        cfg.h = Some(taps.0.clone());
    }
    if let Some(v) = args.sigma2 {
        cfg.sigma2 = v;
    }
    if let Some(v) = args.rate {
        cfg.rate = v;
    }
    if let Some(axis) = &args.snr_db {
        cfg.snr_db = axis.clone();
    }
    if let Some(axis) = &args.rate_axis {
        cfg.rate_axis = axis.clone();
    }
    if let Some(v) = args.seed {
        cfg.seed = v;
    }
    if let Some(path) = &args.out {
        cfg.out = Some(path.clone());
    }
    if let Some(v) = args.gamma {
        cfg.gamma = Some(v);
    }
    if let Some(v) = args.tap_bound {
        cfg.tap_bound = Some(v);
    }
    if let Some(v) = args.isi_len {
        cfg.isi_len = Some(v);
    }
    if let Some(v) = args.sigma2_min {
        cfg.sigma2_min = Some(v);
    }
    if let Some(v) = args.sigma2_max {
        cfg.sigma2_max = Some(v);
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Applies the optional ISIDEC_THREADS cap before any parallel work runs.
fn configure_threads() {
    let Ok(raw) = std::env::var("ISIDEC_THREADS") else {
        return;
    };
    match raw.parse::<usize>() {
        Ok(k) if k >= 1 => {
            if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(k).build_global() {
                log::warn!("could not apply ISIDEC_THREADS={k}: {e}");
            }
        }
        _ => log::warn!("ISIDEC_THREADS must be a positive integer (got {raw:?}); ignoring"),
    }
}

fn execute(kind: Kind, args: &RunArgs) -> Result<(), CliError> {
    let cfg = build_config(kind, args)?;
    let output = dispatch(&cfg)?;
    for (path, content) in &output.files {
        std::fs::write(path, content).map_err(|e| {
            CliError::Runtime(format!("cannot write {}: {e}", path.display()))
        })?;
        log::info!("wrote {}", path.display());
    }
    if let Some(text) = output.stdout {
        print!("{text}");
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    configure_threads();
    let (kind, args) = match &cli.command {
        Command::Simulate(a) => (Kind::Simulate, a),
        Command::Exponents(a) => (Kind::Exponents, a),
        Command::Surface(a) => (Kind::Surface, a),
        Command::Estimate(a) => (Kind::Estimate, a),
        Command::Szego(a) => (Kind::Szego, a),
    };
    match execute(kind, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
