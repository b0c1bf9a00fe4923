//! Experiment configuration: the JSON schema and the flag value types.
//!
//! A configuration file is a single JSON object with exactly the fields
//! of [`ExperimentConfig`]; unknown fields are rejected so typos surface
//! as usage errors instead of silently running the defaults.  Every
//! inline flag overrides the corresponding field, which keeps the
//! flag-only and config-file invocations interchangeable.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::Deserialize;

use crate::CliError;

/// Hard cap on points per axis, so a typo cannot request a year of work.
pub const MAX_AXIS_COUNT: usize = 100_000;

// ---------------------------------------------------------------------------
// Flag value types
// ---------------------------------------------------------------------------

/// Which experiment a configuration drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    /// Monte Carlo decoding campaign.
    Simulate,
    /// Exponents for one channel and rate.
    Exponents,
    /// Exponent surface over an SNR x rate grid.
    Surface,
    /// One seeded transmission through the lattice estimator.
    Estimate,
    /// Spectrum-limit distance at one block length.
    Szego,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Kind::Simulate => "simulate",
            Kind::Exponents => "exponents",
            Kind::Surface => "surface",
            Kind::Estimate => "estimate",
            Kind::Szego => "szego",
        };
        f.write_str(name)
    }
}

/// Inclusive evenly strided axis, written `start:stop:count`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(try_from = "String")]
pub struct AxisSpec {
    /// First point of the axis.
    pub start: f64,
    /// Last point of the axis (equals `start` when `count` is 1).
    pub stop: f64,
    /// Number of points, at least 1.
    pub count: usize,
}

impl AxisSpec {
    /// Validated constructor.
    pub fn new(start: f64, stop: f64, count: usize) -> Result<Self, String> {
        if !start.is_finite() || !stop.is_finite() {
            return Err(format!("axis endpoints must be finite (got {start}:{stop})"));
        }
        if start > stop {
            return Err(format!("axis needs start <= stop (got {start} > {stop})"));
        }
        if count < 1 {
            return Err("axis needs at least one point".to_string());
        }
        if count > MAX_AXIS_COUNT {
            return Err(format!("axis count {count} exceeds the cap {MAX_AXIS_COUNT}"));
        }
        Ok(AxisSpec { start, stop, count })
    }

    /// The axis points, endpoints included.
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        (0..self.count).map(|i| self.start + step * i as f64).collect()
    }
}

impl FromStr for AxisSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("expected start:stop:count (got {s:?})"));
        }
        let start: f64 = parts[0].trim().parse().map_err(|_| format!("bad axis start {:?}", parts[0]))?;
        let stop: f64 = parts[1].trim().parse().map_err(|_| format!("bad axis stop {:?}", parts[1]))?;
        let count: usize = parts[2].trim().parse().map_err(|_| format!("bad axis count {:?}", parts[2]))?;
        AxisSpec::new(start, stop, count)
    }
}

impl TryFrom<String> for AxisSpec {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl fmt::Display for AxisSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.count)
    }
}

/// Comma-separated channel taps for `--h`, e.g. `1.0,0.5`.
#[derive(Debug, Clone, PartialEq)]
pub struct TapList(pub Vec<f64>);

impl FromStr for TapList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let taps: Result<Vec<f64>, _> = s
            .split(',')
            .map(|part| part.trim().parse::<f64>().map_err(|_| format!("bad tap {part:?}")))
            .collect();
        let taps = taps?;
        if taps.is_empty() {
            return Err("tap list is empty".to_string());
        }
        if taps.iter().any(|t| !t.is_finite()) {
            return Err("taps must be finite".to_string());
        }
        Ok(TapList(taps))
    }
}

// ---------------------------------------------------------------------------
// The configuration record
// ---------------------------------------------------------------------------

fn default_n() -> usize {
    256
}
fn default_messages() -> usize {
    16
}
fn default_trials() -> usize {
    1000
}
fn default_sigma2() -> f64 {
    0.5
}
fn default_rate() -> f64 {
    0.1
}
fn default_snr_axis() -> AxisSpec {
    AxisSpec::new(-10.0, 20.0, 7).expect("static axis")
}
fn default_rate_axis() -> AxisSpec {
    AxisSpec::new(0.0, 1.5, 7).expect("static axis")
}

/// One experiment, fully described.
///
/// Defaults target desk-scale runs: `n = 256`, 16 messages, 1000 trials.
/// The lattice the estimator searches is derived from `n`, with the
/// fitted memory taken from the channel length; the `gamma`, `tap_bound`,
/// `isi_len` and variance-range fields override individual knobs.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Experiment kind; fixed by the subcommand, optional in a file
    /// (which then must agree with the subcommand).
    #[serde(default)]
    pub kind: Option<Kind>,
    /// Block length.
    #[serde(default = "default_n")]
    pub n: usize,
    /// Codebook size.
    #[serde(default = "default_messages", alias = "M")]
    pub messages: usize,
    /// Monte Carlo trials.
    #[serde(default = "default_trials")]
    pub trials: usize,
    /// Channel taps; required by every experiment.
    #[serde(default)]
    pub h: Option<Vec<f64>>,
    /// Noise variance.
    #[serde(default = "default_sigma2")]
    pub sigma2: f64,
    /// Code rate in nats per input symbol.
    #[serde(default = "default_rate")]
    pub rate: f64,
    /// SNR axis (dB) for surfaces.
    #[serde(default = "default_snr_axis")]
    pub snr_db: AxisSpec,
    /// Rate axis (nats) for surfaces.
    #[serde(default = "default_rate_axis")]
    pub rate_axis: AxisSpec,
    /// Master seed; every random stream in a run derives from it.
    #[serde(default)]
    pub seed: u64,
    /// Lattice spacing override.
    #[serde(default)]
    pub gamma: Option<f64>,
    /// Lattice tap-bound override.
    #[serde(default)]
    pub tap_bound: Option<f64>,
    /// Fitted-memory override (default: channel length minus one).
    #[serde(default)]
    pub isi_len: Option<usize>,
    /// Lower variance-lattice bound override.
    #[serde(default)]
    pub sigma2_min: Option<f64>,
    /// Upper variance-lattice bound override.
    #[serde(default)]
    pub sigma2_max: Option<f64>,
    /// Output path; experiments print to standard output without it.
    #[serde(default)]
    pub out: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            kind: None,
            n: default_n(),
            messages: default_messages(),
            trials: default_trials(),
            h: None,
            sigma2: default_sigma2(),
            rate: default_rate(),
            snr_db: default_snr_axis(),
            rate_axis: default_rate_axis(),
            seed: 0,
            gamma: None,
            tap_bound: None,
            isi_len: None,
            sigma2_min: None,
            sigma2_max: None,
            out: None,
        }
    }
}

fn usage(msg: String) -> CliError {
    CliError::Usage(msg)
}

impl ExperimentConfig {
    /// Field-by-field sanity checks shared by all experiments.
    pub fn validate(&self) -> Result<(), CliError> {
        if self.n < 1 {
            return Err(usage("n: must be at least 1".into()));
        }
        if self.messages < 1 {
            return Err(usage("messages: must be at least 1".into()));
        }
        if self.trials < 1 {
            return Err(usage("trials: must be at least 1".into()));
        }
        if !self.sigma2.is_finite() || self.sigma2 <= 0.0 {
            return Err(usage(format!("sigma2: must be a positive number (got {})", self.sigma2)));
        }
        if !self.rate.is_finite() || self.rate < 0.0 {
            return Err(usage(format!("rate: must be a non-negative number (got {})", self.rate)));
        }
        if let Some(h) = &self.h {
            if h.is_empty() {
                return Err(usage("h: tap list is empty".into()));
            }
            if h.iter().any(|t| !t.is_finite()) {
                return Err(usage("h: taps must be finite".into()));
            }
        }
        for (name, value) in [
            ("gamma", self.gamma),
            ("tap_bound", self.tap_bound),
            ("sigma2_min", self.sigma2_min),
            ("sigma2_max", self.sigma2_max),
        ] {
            if let Some(v) = value {
                if !v.is_finite() || v <= 0.0 {
                    return Err(usage(format!("{name}: must be a positive number (got {v})")));
                }
            }
        }
        if let (Some(lo), Some(hi)) = (self.sigma2_min, self.sigma2_max) {
            if lo > hi {
                return Err(usage(format!("sigma2_min: {lo} exceeds sigma2_max {hi}")));
            }
        }
        Ok(())
    }

    /// The channel taps, or the usage error naming the flag.
    pub fn require_h(&self) -> Result<&[f64], CliError> {
        self.h
            .as_deref()
            .ok_or_else(|| usage("missing required --h (channel taps, e.g. --h 1.0,0.5; field \"h\" in a config file)".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_parsing_round_trips() {
        let axis: AxisSpec = "-10:20:7".parse().unwrap();
        assert_eq!(axis, AxisSpec::new(-10.0, 20.0, 7).unwrap());
        assert_eq!(axis.to_string(), "-10:20:7");
        let v = axis.values();
        assert_eq!(v.len(), 7);
        assert_eq!(v[0], -10.0);
        assert_eq!(v[6], 20.0);
        assert!((v[1] - -5.0).abs() < 1e-12);

        let single: AxisSpec = "3:3:1".parse().unwrap();
        assert_eq!(single.values(), vec![3.0]);
    }

    #[test]
    fn axis_rejects_malformed_input() {
        assert!("1:2".parse::<AxisSpec>().is_err());
        assert!("2:1:5".parse::<AxisSpec>().is_err());
        assert!("1:2:0".parse::<AxisSpec>().is_err());
        assert!("a:2:3".parse::<AxisSpec>().is_err());
        assert!("1:2:9999999".parse::<AxisSpec>().is_err());
    }

    #[test]
    fn tap_list_parsing() {
        let taps: TapList = "1.0, 0.5,-0.25".parse().unwrap();
        assert_eq!(taps.0, vec![1.0, 0.5, -0.25]);
        assert!("".parse::<TapList>().is_err());
        assert!("1.0,x".parse::<TapList>().is_err());
    }

    #[test]
    fn config_defaults_and_schema() {
        let cfg: ExperimentConfig = serde_json::from_str("{}").unwrap();
        assert_eq!((cfg.n, cfg.messages, cfg.trials), (256, 16, 1000));
        assert_eq!(cfg.sigma2, 0.5);
        assert_eq!(cfg.seed, 0);
        assert!(cfg.h.is_none());
        cfg.validate().unwrap();

        let cfg: ExperimentConfig = serde_json::from_str(
            r#"{"kind":"simulate","n":64,"M":4,"h":[1.0,0.5],"snr_db":"0:10:3"}"#,
        )
        .unwrap();
        assert_eq!(cfg.kind, Some(Kind::Simulate));
        assert_eq!(cfg.messages, 4);
        assert_eq!(cfg.snr_db.values(), vec![0.0, 5.0, 10.0]);

        // Unknown fields are rejected with the field name in the message.
        let err = serde_json::from_str::<ExperimentConfig>(r#"{"sigma":1.0}"#).unwrap_err();
        assert!(err.to_string().contains("sigma"));
    }

    #[test]
    fn validation_names_the_offending_field() {
        let mut cfg = ExperimentConfig { sigma2: -1.0, ..Default::default() };
        let msg = cfg.validate().unwrap_err().to_string();
        assert!(msg.contains("sigma2"), "{msg}");
        cfg.sigma2 = 0.5;
        cfg.trials = 0;
        assert!(cfg.validate().unwrap_err().to_string().contains("trials"));
        cfg.trials = 1;
        let msg = cfg.require_h().unwrap_err().to_string();
        assert!(msg.contains("--h"), "{msg}");
    }
}
