//! Tap vectors, channel parameters, and their spectral functionals.
//!
//! The contract in this module: a channel is a finite impulse response
//! `h = (h_0, ..., h_l)` plus a noise variance `sigma2`.  Its spectral
//! density is
//!
//! ```text
//! f(xi) = |sum_j h_j e^{i j xi}|^2
//!       = r(0) + 2 sum_{k>=1} r(k) cos(k xi)
//! ```
//!
//! where `r(k) = sum_j h_j h_{j+k}` is the tap autocorrelation.  The
//! Gaussian mutual information rate of the channel, in nats per input
//! symbol, is the spectral average
//!
//! ```text
//! I(h, sigma2) = (1 / 4 pi) * integral_0^{2 pi} ln(1 + f(xi) / sigma2) dxi.
//! ```
//!
//! [`finite_mutual_information`] evaluates the same quantity at a finite
//! block length `n` through the eigenvalues of the n x n Gram matrix of the
//! convolution; it decreases monotonically to the rate above as `n` grows.

use crate::eigen;
use crate::error::{Error, Result};
use crate::quad;

/// Largest matrix order accepted by [`finite_mutual_information`].
///
/// The dense eigensolve is cubic in `n`; this cap keeps a single call in
/// the tens-of-seconds range on ordinary hardware.
pub const DEFAULT_EIGEN_BUDGET: usize = 4096;

/// Absolute tolerance requested from the spectral quadratures.
const QUAD_TOL: f64 = 1e-12;

// ---------------------------------------------------------------------------
// Parameter types
// ---------------------------------------------------------------------------

/// A finite impulse response `(h_0, ..., h_l)`.
///
/// The vector is guaranteed non-empty with finite coefficients.  `l`, the
/// number of taps minus one, is called the memory of the response.
#[derive(Debug, Clone, PartialEq)]
pub struct IsiVector {
    taps: Vec<f64>,
}

impl IsiVector {
    /// Validates and wraps a tap vector.
    pub fn new(taps: Vec<f64>) -> Result<Self> {
        if taps.is_empty() {
            return Err(Error::EmptyTaps);
        }
        for (index, &value) in taps.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFiniteTap { index, value });
            }
        }
        Ok(IsiVector { taps })
    }

    /// The coefficients `(h_0, ..., h_l)`.
    pub fn taps(&self) -> &[f64] {
        &self.taps
    }

    /// The memory `l` (number of taps minus one).
    pub fn memory(&self) -> usize {
        self.taps.len() - 1
    }

    /// Number of coefficients `l + 1`.
    pub fn num_taps(&self) -> usize {
        self.taps.len()
    }

    /// Total tap energy `sum_j h_j^2`, which equals the zero-lag
    /// autocorrelation.
    pub fn energy(&self) -> f64 {
        self.taps.iter().map(|h| h * h).sum()
    }
}

/// A complete channel description: impulse response plus noise variance.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelParams {
    h: IsiVector,
    sigma2: f64,
}

impl ChannelParams {
    /// Validates and wraps a parameter pair; `sigma2` must be a finite,
    /// strictly positive variance.
    pub fn new(h: IsiVector, sigma2: f64) -> Result<Self> {
        if !sigma2.is_finite() || sigma2 <= 0.0 {
            return Err(Error::InvalidVariance(sigma2));
        }
        Ok(ChannelParams { h, sigma2 })
    }

    /// The impulse response.
    pub fn h(&self) -> &IsiVector {
        &self.h
    }

    /// The noise variance.
    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }
}

/// Tap autocorrelation `r(0), ..., r(l)` of an impulse response.
#[derive(Debug, Clone, PartialEq)]
pub struct Autocorrelation {
    lags: Vec<f64>,
}

impl Autocorrelation {
    /// `r(k)`, zero beyond the memory of the underlying response.
    pub fn lag(&self, k: usize) -> f64 {
        self.lags.get(k).copied().unwrap_or(0.0)
    }

    /// The zero-lag value `r(0)`, the total tap energy.
    pub fn zero_lag(&self) -> f64 {
        self.lags[0]
    }

    /// All stored lags `r(0), ..., r(l)`.
    pub fn lags(&self) -> &[f64] {
        &self.lags
    }
}

// ---------------------------------------------------------------------------
// Spectral functionals
// ---------------------------------------------------------------------------

/// Computes the autocorrelation `r(k) = sum_j h_j h_{j+k}` for
/// `k = 0, ..., l`.
pub fn autocorrelation(h: &IsiVector) -> Autocorrelation {
    let taps = h.taps();
    let lags = (0..taps.len())
        .map(|k| taps.iter().zip(&taps[k..]).map(|(a, b)| a * b).sum())
        .collect();
    Autocorrelation { lags }
}

/// Evaluates the spectral density `f(xi) = |sum_j h_j e^{i j xi}|^2`.
///
/// The transfer-function form keeps the result non-negative by
/// construction.  `xi` may be any finite angle; the density has period
/// `2 pi` and is symmetric about `pi`.
pub fn spectral_density(h: &IsiVector, xi: f64) -> f64 {
    spectral_density_taps(h.taps(), xi)
}

/// [`spectral_density`] on a raw tap slice (optimizer hot path).
pub(crate) fn spectral_density_taps(taps: &[f64], xi: f64) -> f64 {
    let mut re = 0.0;
    let mut im = 0.0;
    for (j, &tap) in taps.iter().enumerate() {
        let angle = j as f64 * xi;
        re += tap * angle.cos();
        im += tap * angle.sin();
    }
    re * re + im * im
}

/// Averages `g(f(xi))` over the spectrum:
/// `(1 / 2 pi) * integral_0^{2 pi} g(f(xi)) dxi`.
///
/// Exploits the symmetry of `f` about `pi` to integrate over a half period.
pub(crate) fn spectral_average(h: &IsiVector, g: impl Fn(f64) -> f64) -> f64 {
    spectral_average_taps(h.taps(), g)
}

/// [`spectral_average`] on a raw tap slice (optimizer hot path).
pub(crate) fn spectral_average_taps(taps: &[f64], g: impl Fn(f64) -> f64) -> f64 {
    let half = quad::integrate(
        |xi| g(spectral_density_taps(taps, xi)),
        0.0,
        std::f64::consts::PI,
        QUAD_TOL,
    );
    half / std::f64::consts::PI
}

/// Mutual information rate from a raw tap slice (optimizer hot path).
pub(crate) fn mutual_information_taps(taps: &[f64], sigma2: f64) -> f64 {
    0.5 * spectral_average_taps(taps, |f| (f / sigma2).ln_1p())
}

/// The Gaussian mutual information rate `I(h, sigma2)` in nats per symbol:
/// `(1 / 4 pi) * integral_0^{2 pi} ln(1 + f(xi) / sigma2) dxi`.
pub fn mutual_information(params: &ChannelParams) -> f64 {
    let sigma2 = params.sigma2();
    0.5 * spectral_average(params.h(), |f| (f / sigma2).ln_1p())
}

/// Differential entropy rate of the channel output under a unit-power white
/// Gaussian input, in nats per symbol:
/// `0.5 ln(2 pi e) + (1 / 4 pi) * integral_0^{2 pi} ln(sigma2 + f(xi)) dxi`.
pub fn output_entropy_rate(params: &ChannelParams) -> f64 {
    let sigma2 = params.sigma2();
    let half_log_2pie = 0.5 * (2.0 * std::f64::consts::PI * std::f64::consts::E).ln();
    half_log_2pie + 0.5 * spectral_average(params.h(), |f| (sigma2 + f).ln())
}

/// Finite-block mutual information at block length `n`, in nats per input
/// symbol, using the default eigensolver budget.
///
/// This is `(1 / 2n) * sum_i ln(1 + lambda_i / sigma2)` where the
/// `lambda_i` are the eigenvalues of the Gram matrix of the length-`n`
/// convolution with `h`.  The sequence is non-increasing in `n` and
/// converges to [`mutual_information`].
pub fn finite_mutual_information(params: &ChannelParams, n: usize) -> Result<f64> {
    finite_mutual_information_with_budget(params, n, DEFAULT_EIGEN_BUDGET)
}

/// [`finite_mutual_information`] with an explicit eigensolver budget.
pub fn finite_mutual_information_with_budget(
    params: &ChannelParams,
    n: usize,
    budget: usize,
) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("block length must be at least 1".into()));
    }
    if n > budget {
        return Err(Error::EigenBudgetExceeded { n, budget });
    }
    // The Gram matrix of the full convolution operator is banded symmetric
    // Toeplitz with entries r(|i - j|).
    let r = autocorrelation(params.h());
    let memory = params.h().memory();
    let mut gram = vec![0.0f64; n * n];
    for i in 0..n {
        let lo = i.saturating_sub(memory);
        let hi = (i + memory).min(n - 1);
        for j in lo..=hi {
            gram[i * n + j] = r.lag(i.abs_diff(j));
        }
    }
    let eigenvalues = eigen::symmetric_eigenvalues(gram, n)?;
    let sigma2 = params.sigma2();
    let sum: f64 = eigenvalues
        .iter()
        .map(|&lambda| (lambda.max(0.0) / sigma2).ln_1p())
        .sum();
    Ok(sum / (2.0 * n as f64))
}
