//! Experiment runners: pure functions from a configuration to output
//! text, plus the dispatcher that routes results to files or stdout.
//!
//! Every runner derives all randomness from the config seed through the
//! library's stream hierarchy, keyed by trial index and role, so results
//! are byte-identical across reruns and across thread counts: parallel
//! iteration only ever fills pre-indexed slots.

use std::path::{Path, PathBuf};

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use isidec::channel::{transmit, Codebook};
use isidec::decoder::{decode_ml_csi, decode_mmi, DecodeOutcome, DecodeReason};
use isidec::exponents::{
    exponent_surface, gallager_exponent, universal_exponent, ExponentSurface, MinimizerOptions,
    SurfaceOptions,
};
use isidec::grid::{
    estimate_isi_type, is_conditionally_typical, residual_correlations, ParamGrid,
};
use isidec::spectral::{mutual_information, ChannelParams, IsiVector};
use isidec::streams::StreamKey;
use isidec::toeplitz::szego_check;

use crate::config::{ExperimentConfig, Kind};
use crate::CliError;

/// Exact header of the per-trial CSV.
pub const TRIALS_CSV_HEADER: &str = "trial,tx,rx_mmi,reason,rx_ml,h_hat,sigma2_hat,mi";
/// Exact header of the surface CSV.
pub const SURFACE_CSV_HEADER: &str = "snr_db,rate_nats,e_new,e_gallager,difference,converged";
/// Normal quantile for the 95% Wilson interval.
const WILSON_Z: f64 = 1.959_963_984_540_054;

fn runtime(msg: String) -> CliError {
    CliError::Runtime(msg)
}

fn check_kind(cfg: &ExperimentConfig, expected: Kind) -> Result<(), CliError> {
    match cfg.kind {
        Some(k) if k != expected => Err(CliError::Usage(format!(
            "kind: configuration says {k}, but this runner is {expected}"
        ))),
        _ => Ok(()),
    }
}

fn channel_from(cfg: &ExperimentConfig) -> Result<ChannelParams, CliError> {
    let taps = cfg.require_h()?.to_vec();
    let h = IsiVector::new(taps).map_err(|e| CliError::Usage(format!("h: {e}")))?;
    ChannelParams::new(h, cfg.sigma2).map_err(|e| CliError::Usage(format!("sigma2: {e}")))
}

/// Lattice for the experiment: schedule from `n`, fitted memory from the
/// channel length, then any explicit overrides.
fn build_grid(cfg: &ExperimentConfig, channel_memory: usize) -> Result<ParamGrid, CliError> {
    if cfg.n < 16 {
        return Err(CliError::Usage(format!(
            "n: the lattice schedule needs n >= 16 (got {})",
            cfg.n
        )));
    }
    let mut grid = ParamGrid::for_block_len(cfg.n)?;
    grid.isi_len = cfg.isi_len.unwrap_or(channel_memory);
    if let Some(v) = cfg.gamma {
        grid.gamma = v;
    }
    if let Some(v) = cfg.tap_bound {
        grid.tap_bound = v;
    }
    if let Some(v) = cfg.sigma2_min {
        grid.sigma2_min = v;
    }
    if let Some(v) = cfg.sigma2_max {
        grid.sigma2_max = v;
    }
    grid.validate().map_err(|e| CliError::Usage(format!("grid overrides: {e}")))?;
    Ok(grid)
}

/// Wilson 95% confidence interval for `successes` out of `trials`.
pub fn wilson_interval(successes: usize, trials: usize) -> [f64; 2] {
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = WILSON_Z * WILSON_Z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = WILSON_Z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    // At the boundary counts the exact endpoints are 0 and 1; pin them so
    // rounding residue cannot leak into reported intervals.
    let lo = if successes == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if successes == trials { 1.0 } else { (center + half).min(1.0) };
    [lo, hi]
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

/// One Monte Carlo trial, as written to the per-trial CSV.
#[derive(Debug, Clone)]
pub struct TrialRecord {
    /// Trial index.
    pub trial: u64,
    /// Transmitted message.
    pub tx: usize,
    /// Blind decision, absent on tie or outage.
    pub rx_mmi: Option<usize>,
    /// Blind decode classification.
    pub reason: DecodeReason,
    /// Informed (channel-aware) decision.
    pub rx_ml: usize,
    /// Top-scoring candidate's estimated taps.
    pub h_hat: Vec<f64>,
    /// Top-scoring candidate's estimated variance.
    pub sigma2_hat: f64,
    /// Top-scoring candidate's information score.
    pub mi: f64,
}

fn reason_str(r: DecodeReason) -> &'static str {
    match r {
        DecodeReason::Ok => "ok",
        DecodeReason::Tie => "tie",
        DecodeReason::Outage => "outage",
    }
}

fn record_from(trial: u64, tx: usize, blind: &DecodeOutcome, rx_ml: usize) -> TrialRecord {
    let top = &blind.scores[blind.winner()];
    TrialRecord {
        trial,
        tx,
        rx_mmi: blind.decoded,
        reason: blind.reason,
        rx_ml,
        h_hat: top.h_hat.taps().to_vec(),
        sigma2_hat: top.sigma2_hat,
        mi: top.mi,
    }
}

fn trials_csv(records: &[TrialRecord]) -> String {
    let mut out = String::from(TRIALS_CSV_HEADER);
    out.push('\n');
    for r in records {
        let rx = match r.rx_mmi {
            Some(j) => j.to_string(),
            None => "NONE".to_string(),
        };
        let taps = r
            .h_hat
            .iter()
            .map(|t| t.to_string())
            .collect::<Vec<_>>()
            .join(";");
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.trial,
            r.tx,
            rx,
            reason_str(r.reason),
            r.rx_ml,
            taps,
            r.sigma2_hat,
            r.mi
        ));
    }
    out
}

/// Campaign summary with Wilson 95% intervals for both decoders.
#[derive(Debug, Clone, Serialize)]
pub struct SimulationSummary {
    /// Always `"simulate"`.
    pub kind: &'static str,
    /// Block length.
    pub n: usize,
    /// Codebook size.
    pub messages: usize,
    /// Number of trials.
    pub trials: usize,
    /// Master seed.
    pub seed: u64,
    /// True channel taps.
    pub h: Vec<f64>,
    /// True noise variance.
    pub sigma2: f64,
    /// Code rate `ln(messages) / n`.
    pub rate_nats: f64,
    /// Blind decoding errors (any trial whose decision is not the
    /// transmitted message, ties and outages included).
    pub mmi_errors: usize,
    /// Blind block-error rate.
    pub mmi_error_rate: f64,
    /// Wilson 95% interval for the blind error rate.
    pub mmi_wilson95: [f64; 2],
    /// Informed decoding errors.
    pub ml_errors: usize,
    /// Informed block-error rate.
    pub ml_error_rate: f64,
    /// Wilson 95% interval for the informed error rate.
    pub ml_wilson95: [f64; 2],
    /// Trials refused because the two best scores were indistinguishable.
    pub ties: usize,
    /// Trials refused because the winning estimate hit the lattice boundary.
    pub outages: usize,
}

/// Everything a simulate run produces.
#[derive(Debug, Clone)]
pub struct MonteCarloOutput {
    /// Per-trial records in trial order.
    pub records: Vec<TrialRecord>,
    /// Campaign summary.
    pub summary: SimulationSummary,
}

impl MonteCarloOutput {
    /// The per-trial CSV, header plus one line per trial.
    pub fn trials_csv(&self) -> String {
        trials_csv(&self.records)
    }

    /// The summary as pretty JSON with a trailing newline.
    pub fn summary_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.summary).expect("summary serialises");
        s.push('\n');
        s
    }
}

/// Runs a Monte Carlo campaign: `trials` independent transmissions, each
/// decoded blindly and with full channel knowledge.
pub fn run_montecarlo(cfg: &ExperimentConfig) -> Result<MonteCarloOutput, CliError> {
    check_kind(cfg, Kind::Simulate)?;
    cfg.validate()?;
    let truth = channel_from(cfg)?;
    let grid = build_grid(cfg, truth.h().memory())?;
    let cb = Codebook::generate(cfg.messages, cfg.n, cfg.seed).map_err(|e| runtime(e.to_string()))?;

    log::info!(
        "simulate: n={} messages={} trials={} seed={}",
        cfg.n,
        cfg.messages,
        cfg.trials,
        cfg.seed
    );
    let records: Vec<TrialRecord> = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|trial| -> Result<TrialRecord, CliError> {
            let tx = StreamKey::new(cfg.seed)
                .with_index(trial)
                .with_label("message")
                .rng()
                .random_range(0..cfg.messages);
            let noise_seed = StreamKey::new(cfg.seed).with_index(trial).with_label("noise").value();
            let t = transmit(cb.word(tx), &truth, noise_seed);
            let blind = decode_mmi(&t.y, &cb, &grid).map_err(|e| runtime(e.to_string()))?;
            let rx_ml = decode_ml_csi(&t.y, &cb, &truth).map_err(|e| runtime(e.to_string()))?;
            Ok(record_from(trial, tx, &blind, rx_ml))
        })
        .collect::<Result<_, _>>()?;

    let mmi_errors = records.iter().filter(|r| r.rx_mmi != Some(r.tx)).count();
    let ml_errors = records.iter().filter(|r| r.rx_ml != r.tx).count();
    let ties = records.iter().filter(|r| r.reason == DecodeReason::Tie).count();
    let outages = records.iter().filter(|r| r.reason == DecodeReason::Outage).count();
    let summary = SimulationSummary {
        kind: "simulate",
        n: cfg.n,
        messages: cfg.messages,
        trials: cfg.trials,
        seed: cfg.seed,
        h: truth.h().taps().to_vec(),
        sigma2: cfg.sigma2,
        rate_nats: cb.rate_nats(),
        mmi_errors,
        mmi_error_rate: mmi_errors as f64 / cfg.trials as f64,
        mmi_wilson95: wilson_interval(mmi_errors, cfg.trials),
        ml_errors,
        ml_error_rate: ml_errors as f64 / cfg.trials as f64,
        ml_wilson95: wilson_interval(ml_errors, cfg.trials),
        ties,
        outages,
    };
    Ok(MonteCarloOutput { records, summary })
}

// ---------------------------------------------------------------------------
// surface
// ---------------------------------------------------------------------------

/// The surface as CSV: exact header, then rows in SNR-major order.
pub fn surface_csv(s: &ExponentSurface) -> String {
    let mut out = String::from(SURFACE_CSV_HEADER);
    out.push('\n');
    for (i, snr) in s.snr_db_axis.iter().enumerate() {
        for (j, rate) in s.rate_axis.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                snr,
                rate,
                s.e_new[i][j],
                s.e_gallager[i][j],
                s.difference[i][j],
                s.converged[i][j]
            ));
        }
    }
    out
}

/// Evaluates both exponents over the configured SNR x rate grid.
pub fn run_surface(cfg: &ExperimentConfig) -> Result<String, CliError> {
    check_kind(cfg, Kind::Surface)?;
    cfg.validate()?;
    let taps = cfg.require_h()?.to_vec();
    let h = IsiVector::new(taps).map_err(|e| CliError::Usage(format!("h: {e}")))?;
    let surface = exponent_surface(
        &h,
        &cfg.snr_db.values(),
        &cfg.rate_axis.values(),
        &SurfaceOptions::default(),
    )
    .map_err(|e| runtime(e.to_string()))?;
    Ok(surface_csv(&surface))
}

// ---------------------------------------------------------------------------
// exponents
// ---------------------------------------------------------------------------

/// Single-point exponent evaluation.
#[derive(Debug, Clone, Serialize)]
pub struct ExponentsReport {
    /// Always `"exponents"`.
    pub kind: &'static str,
    /// Channel taps.
    pub h: Vec<f64>,
    /// Noise variance.
    pub sigma2: f64,
    /// Rate the exponents are evaluated at.
    pub rate_nats: f64,
    /// Information rate of the channel (nats).
    pub mutual_information: f64,
    /// The estimation-penalised exponent.
    pub e_new: f64,
    /// Whether its minimiser converged within budget.
    pub e_new_converged: bool,
    /// The classical random-coding exponent.
    pub e_gallager: f64,
    /// Maximising tilt parameter of the classical exponent.
    pub gallager_rho: f64,
    /// Whether the one-dimensional maximisation converged.
    pub e_gallager_converged: bool,
}

/// Evaluates both exponents for one channel and rate.
pub fn run_exponents(cfg: &ExperimentConfig) -> Result<ExponentsReport, CliError> {
    check_kind(cfg, Kind::Exponents)?;
    cfg.validate()?;
    let truth = channel_from(cfg)?;
    let new = universal_exponent(cfg.rate, &truth, &MinimizerOptions::default());
    let gallager = gallager_exponent(cfg.rate, &truth);
    Ok(ExponentsReport {
        kind: "exponents",
        h: truth.h().taps().to_vec(),
        sigma2: cfg.sigma2,
        rate_nats: cfg.rate,
        mutual_information: mutual_information(&truth),
        e_new: new.value,
        e_new_converged: new.converged,
        e_gallager: gallager.value,
        gallager_rho: gallager.rho,
        e_gallager_converged: gallager.converged,
    })
}

// ---------------------------------------------------------------------------
// estimate
// ---------------------------------------------------------------------------

/// One seeded transmission pushed through the lattice estimator.
#[derive(Debug, Clone, Serialize)]
pub struct EstimateReport {
    /// Always `"estimate"`.
    pub kind: &'static str,
    /// Block length.
    pub n: usize,
    /// Master seed.
    pub seed: u64,
    /// True channel taps.
    pub h_truth: Vec<f64>,
    /// True noise variance.
    pub sigma2_truth: f64,
    /// Estimated lattice taps.
    pub h_hat: Vec<f64>,
    /// Estimated lattice variance.
    pub sigma2_hat: f64,
    /// Residual power behind the variance estimate.
    pub residual_power: f64,
    /// Whether the estimate is strictly inside the lattice.
    pub interior: bool,
    /// Whether the pair is conditionally typical for the estimate.
    pub typical: bool,
    /// Residual/input correlations per lag.
    pub residual_correlations: Vec<f64>,
    /// Information rate of the estimated channel.
    pub mi_hat: f64,
}

/// Transmits one random block over the configured channel and reports
/// the blind estimate with its diagnostics.
pub fn run_estimate(cfg: &ExperimentConfig) -> Result<EstimateReport, CliError> {
    check_kind(cfg, Kind::Estimate)?;
    cfg.validate()?;
    let truth = channel_from(cfg)?;
    let grid = build_grid(cfg, truth.h().memory())?;
    let cb = Codebook::generate(1, cfg.n, cfg.seed).map_err(|e| runtime(e.to_string()))?;
    let noise_seed = StreamKey::new(cfg.seed).with_index(0).with_label("noise").value();
    let t = transmit(cb.word(0), &truth, noise_seed);

    let est = estimate_isi_type(&t.x, &t.y, &grid).map_err(|e| runtime(e.to_string()))?;
    let est_params = est.params().map_err(|e| runtime(e.to_string()))?;
    let typical = is_conditionally_typical(&t.x, &t.y, &est_params, &grid)
        .map_err(|e| runtime(e.to_string()))?;
    let corr = residual_correlations(&t.x, &t.y, &est.h_hat).map_err(|e| runtime(e.to_string()))?;

    Ok(EstimateReport {
        kind: "estimate",
        n: cfg.n,
        seed: cfg.seed,
        h_truth: truth.h().taps().to_vec(),
        sigma2_truth: cfg.sigma2,
        h_hat: est.h_hat.taps().to_vec(),
        sigma2_hat: est.sigma2_hat,
        residual_power: est.residual_power,
        interior: est.interior,
        typical,
        residual_correlations: corr,
        mi_hat: mutual_information(&est_params),
    })
}

// ---------------------------------------------------------------------------
// szego
// ---------------------------------------------------------------------------

/// Spectrum-limit distance at one block length.
#[derive(Debug, Clone, Serialize)]
pub struct SzegoReport {
    /// Always `"szego"`.
    pub kind: &'static str,
    /// Channel taps.
    pub h: Vec<f64>,
    /// Block length.
    pub n: usize,
    /// Wasserstein-1 distance between the squared singular values and
    /// the spectral density's distribution.
    pub distance: f64,
}

/// Measures how close the operator spectrum is to its limit at `n`.
pub fn run_szego(cfg: &ExperimentConfig) -> Result<SzegoReport, CliError> {
    check_kind(cfg, Kind::Szego)?;
    cfg.validate()?;
    if cfg.n < 32 {
        return Err(CliError::Usage(format!(
            "n: the distribution check needs n >= 32 (got {})",
            cfg.n
        )));
    }
    let taps = cfg.require_h()?.to_vec();
    let h = IsiVector::new(taps).map_err(|e| CliError::Usage(format!("h: {e}")))?;
    let distance = szego_check(&h, cfg.n).map_err(|e| runtime(e.to_string()))?;
    Ok(SzegoReport { kind: "szego", h: h.taps().to_vec(), n: cfg.n, distance })
}

// ---------------------------------------------------------------------------
// dispatch
// ---------------------------------------------------------------------------

/// What an experiment wants written where.
#[derive(Debug, Clone, Default)]
pub struct RunOutput {
    /// Text for standard output (used when no `out` path is configured).
    pub stdout: Option<String>,
    /// `(path, content)` pairs to write.
    pub files: Vec<(PathBuf, String)>,
}

fn json_line<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serialises");
    s.push('\n');
    s
}

fn suffixed(base: &Path, suffix: &str) -> PathBuf {
    PathBuf::from(format!("{}.{suffix}", base.display()))
}

/// Runs the experiment selected by `cfg.kind` and routes its outputs.
///
/// With an `out` path, `simulate` writes `<out>.trials.csv` and
/// `<out>.summary.json`; the other kinds write `out` as given.  Without
/// one, the summary (or the CSV, for `surface`) goes to standard output.
pub fn dispatch(cfg: &ExperimentConfig) -> Result<RunOutput, CliError> {
    let kind = cfg
        .kind
        .ok_or_else(|| CliError::Usage("kind: no experiment kind selected".into()))?;
    let mut out = RunOutput::default();
    match kind {
        Kind::Simulate => {
            let result = run_montecarlo(cfg)?;
            match &cfg.out {
                Some(base) => {
                    out.files.push((suffixed(base, "trials.csv"), result.trials_csv()));
                    out.files.push((suffixed(base, "summary.json"), result.summary_json()));
                }
                None => out.stdout = Some(result.summary_json()),
            }
        }
        Kind::Surface => {
            let csv = run_surface(cfg)?;
            match &cfg.out {
                Some(path) => out.files.push((path.clone(), csv)),
                None => out.stdout = Some(csv),
            }
        }
        Kind::Exponents => {
            let report = json_line(&run_exponents(cfg)?);
            match &cfg.out {
                Some(path) => out.files.push((path.clone(), report)),
                None => out.stdout = Some(report),
            }
        }
        Kind::Estimate => {
            let report = json_line(&run_estimate(cfg)?);
            match &cfg.out {
                Some(path) => out.files.push((path.clone(), report)),
                None => out.stdout = Some(report),
            }
        }
        Kind::Szego => {
            let report = json_line(&run_szego(cfg)?);
            match &cfg.out {
                Some(path) => out.files.push((path.clone(), report)),
                None => out.stdout = Some(report),
            }
        }
    }
    Ok(out)
}
