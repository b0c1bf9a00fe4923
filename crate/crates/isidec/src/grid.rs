//! Quantised parameter lattice and the blind ISI-type estimator.
//!
//! Blind detection never searches over all real channels.  Instead it works
//! on a finite lattice: taps are integer multiples of a spacing `gamma`
//! bounded by `tap_bound`, and the noise variance lives on the same-spacing
//! lattice inside `[sigma2_min, sigma2_max]`.  The default schedule ties
//! every knob to the block length so that the lattice refines as blocks
//! grow while its cardinality stays subexponential.
//!
//! [`estimate_isi_type`] assigns to an input/output pair `(x, y)` the
//! lattice channel that best explains `y` as a noisy convolution of `x`:
//! it solves the continuous least-squares problem, rounds to the lattice,
//! and then certifies local optimality by a +/- one-step coordinate
//! search on the true residual norm.  The residual power provides the
//! variance estimate, and the `interior` flag records whether that
//! estimate is consistent with its own quantisation — estimates pinned to
//! the boundary of the lattice are flagged for the caller to treat as
//! outages.

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::channel::convolve;
use crate::error::{Error, Result};
use crate::spectral::{ChannelParams, IsiVector};

/// Safety cap on coordinate-descent rounds in the certified local search.
const MAX_SEARCH_ROUNDS: usize = 10_000;

// ---------------------------------------------------------------------------
// The lattice
// ---------------------------------------------------------------------------

/// The quantised parameter region searched by the blind estimator.
///
/// Fields are public so callers can override any single knob after
/// building the default schedule; operations re-validate on entry.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamGrid {
    /// Lattice spacing for taps and variance; doubles as the typicality
    /// slack in [`is_conditionally_typical`].
    pub gamma: f64,
    /// Strict bound on tap magnitudes: every lattice tap satisfies
    /// `|tap| < tap_bound`.
    pub tap_bound: f64,
    /// Memory of the fitted response (number of taps minus one).
    pub isi_len: usize,
    /// Lower end of the variance range.
    pub sigma2_min: f64,
    /// Upper end of the variance range.
    pub sigma2_max: f64,
    /// Block length the schedule was derived from.
    pub block_len: usize,
}

impl ParamGrid {
    /// The default schedule for block length `n` (requires `n >= 16`):
    ///
    /// * `gamma = n^(-1/4)`
    /// * `isi_len = floor(log2 n)`
    /// * `tap_bound = n^(1/16)`
    /// * variance range `[1/4, n^(1/8)]`
    ///
    /// Every field may be overridden afterwards.
    pub fn for_block_len(n: usize) -> Result<Self> {
        if n < 16 {
            return Err(Error::InvalidArgument(format!(
                "default schedule needs a block length of at least 16 (got {n})"
            )));
        }
        let nf = n as f64;
        let grid = ParamGrid {
            gamma: nf.powf(-0.25),
            tap_bound: nf.powf(1.0 / 16.0),
            isi_len: n.ilog2() as usize,
            sigma2_min: 0.25,
            sigma2_max: nf.powf(0.125),
            block_len: n,
        };
        log::debug!(
            "parameter lattice for n={n}: {:.1} decimal digits of grid points",
            grid.cardinality_log10()
        );
        Ok(grid)
    }

    /// Checks the cross-field invariants after manual overrides.
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma.is_finite() && self.gamma > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "grid spacing must be positive and finite (got {})",
                self.gamma
            )));
        }
        if !(self.tap_bound.is_finite() && self.tap_bound > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "tap bound must be positive and finite (got {})",
                self.tap_bound
            )));
        }
        if !(self.sigma2_min.is_finite() && self.sigma2_min > 0.0) {
            return Err(Error::InvalidVariance(self.sigma2_min));
        }
        if !(self.sigma2_max.is_finite() && self.sigma2_max > self.sigma2_min) {
            return Err(Error::InvalidArgument(format!(
                "variance range [{}, {}] is empty or unbounded",
                self.sigma2_min, self.sigma2_max
            )));
        }
        if self.block_len == 0 {
            return Err(Error::InvalidArgument("block length must be at least 1".into()));
        }
        Ok(())
    }

    /// Largest lattice index `k` such that `k * gamma < tap_bound`
    /// (strictly); tap lattice points are `k * gamma` for
    /// `k = -max_tap_index() ..= max_tap_index()`.
    pub fn max_tap_index(&self) -> i64 {
        let m = (self.tap_bound / self.gamma).floor() as i64;
        if m as f64 * self.gamma >= self.tap_bound {
            m - 1
        } else {
            m
        }
    }

    /// Rounds a tap value to the lattice: nearest multiple of `gamma`,
    /// halves away from zero, clamped to the strict tap bound.
    pub fn quantize_tap(&self, value: f64) -> f64 {
        let k_max = self.max_tap_index();
        let k = (value / self.gamma).round().clamp(-(k_max as f64), k_max as f64);
        k * self.gamma
    }

    /// Rounds a variance to the nearest multiple of `gamma` and clamps the
    /// result into `[sigma2_min, sigma2_max]`.  A clamped value sits on
    /// the range boundary, which need not be a lattice multiple.
    pub fn quantize_sigma2(&self, value: f64) -> f64 {
        let rounded = (value / self.gamma).round() * self.gamma;
        rounded.clamp(self.sigma2_min, self.sigma2_max)
    }

    /// Base-10 logarithm of the lattice cardinality
    /// `(2 tap_bound / gamma)^(isi_len + 1) * (variance range / gamma)`.
    pub fn cardinality_log10(&self) -> f64 {
        (self.isi_len + 1) as f64 * (2.0 * self.tap_bound / self.gamma).log10()
            + ((self.sigma2_max - self.sigma2_min) / self.gamma).log10()
    }
}

/// The lattice channel assigned to an input/output pair.
#[derive(Debug, Clone, PartialEq)]
pub struct IsiType {
    /// Estimated response; every tap is a lattice multiple of `gamma`.
    pub h_hat: IsiVector,
    /// Estimated noise variance, inside `[sigma2_min, sigma2_max]`.
    pub sigma2_hat: f64,
    /// `(1/n) * ||y - h_hat * x||^2` with `n` the input length.
    pub residual_power: f64,
    /// True iff `|sigma2_hat - residual_power| < gamma` and no tap was
    /// clamped by the bound; a false flag marks a boundary (outage)
    /// estimate.
    pub interior: bool,
}

impl IsiType {
    /// Bundles the estimate into channel parameters.
    pub fn params(&self) -> Result<ChannelParams> {
        ChannelParams::new(self.h_hat.clone(), self.sigma2_hat)
    }
}

// ---------------------------------------------------------------------------
// Estimation
// ---------------------------------------------------------------------------

fn check_finite(name: &'static str, data: &[f64]) -> Result<()> {
    if data.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        match name {
            "x" => Err(Error::DegenerateInput("input block contains non-finite samples")),
            _ => Err(Error::DegenerateInput("output block contains non-finite samples")),
        }
    }
}

/// `||y - h * x||^2` evaluated directly from the convolution.
pub(crate) fn residual_norm_sq(x: &[f64], y: &[f64], taps: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (i, &yi) in y.iter().enumerate() {
        let mut fit = 0.0;
        for (j, &tap) in taps.iter().enumerate() {
            if j <= i {
                if let Some(&xv) = x.get(i - j) {
                    fit += tap * xv;
                }
            }
        }
        let r = yi - fit;
        acc += r * r;
    }
    acc
}

/// Solves the continuous (unquantised) least-squares fit of a response
/// with memory `isi_len` to the pair `(x, y)`, via the normal equations of
/// the shifted-input Gram matrix.
///
/// Fails with a degenerate-input error when the Gram matrix is singular,
/// e.g. when `x` is identically zero.
pub fn least_squares_taps(x: &[f64], y: &[f64], isi_len: usize) -> Result<Vec<f64>> {
    let n = x.len();
    if n == 0 {
        return Err(Error::DegenerateInput("input block is empty"));
    }
    if y.len() != n + isi_len {
        return Err(Error::DimensionMismatch {
            context: "output block for least-squares fit",
            expected: n + isi_len,
            actual: y.len(),
        });
    }
    check_finite("x", x)?;
    check_finite("y", y)?;

    let m = isi_len + 1;
    // Gram entries depend only on the lag: with zero padding on both ends,
    // column j of the shifted-input matrix is x delayed by j, so
    // G[j][k] = sum_i x_i x_{i + |j - k|}.
    let mut lag_corr = vec![0.0f64; m];
    for (d, slot) in lag_corr.iter_mut().enumerate() {
        *slot = x.iter().zip(&x[d.min(n)..]).map(|(a, b)| a * b).sum();
    }
    let mut rhs = DVector::zeros(m);
    for k in 0..m {
        rhs[k] = x.iter().zip(&y[k..]).map(|(a, b)| a * b).sum();
    }
    let gram = DMatrix::from_fn(m, m, |j, k| lag_corr[j.abs_diff(k)]);
    let chol = Cholesky::new(gram)
        .ok_or(Error::DegenerateInput("shifted-input Gram matrix is singular"))?;
    Ok(chol.solve(&rhs).iter().copied().collect())
}

/// Computes the ISI type of `(x, y)` on the lattice: the lattice response
/// minimising `||y - h * x||`, the quantised residual power as the
/// variance estimate, and the interior flag.
///
/// The minimisation solves the continuous least-squares problem, rounds
/// each coordinate to the lattice, and runs a best-improvement coordinate
/// search over +/- one lattice step (ties broken toward the
/// lexicographically smallest tap vector) until no neighbour improves the
/// residual norm.
pub fn estimate_isi_type(x: &[f64], y: &[f64], grid: &ParamGrid) -> Result<IsiType> {
    grid.validate()?;
    let n = x.len();
    let ls = least_squares_taps(x, y, grid.isi_len)?;
    let m = grid.isi_len + 1;
    let k_max = grid.max_tap_index();

    // Round to the lattice, remembering whether the bound clipped anything.
    let mut indices = Vec::with_capacity(m);
    let mut clamped = false;
    for &v in &ls {
        if !v.is_finite() {
            return Err(Error::DegenerateInput("least-squares solution is not finite"));
        }
        let raw = (v / grid.gamma).round();
        if raw.abs() > k_max as f64 {
            clamped = true;
        }
        indices.push((raw.clamp(-(k_max as f64), k_max as f64)) as i64);
    }

    // Certified local search on the true residual norm.
    let taps_of = |idx: &[i64]| -> Vec<f64> { idx.iter().map(|&k| k as f64 * grid.gamma).collect() };
    let mut cur_taps = taps_of(&indices);
    let mut cur_obj = residual_norm_sq(x, y, &cur_taps);
    for round in 0..MAX_SEARCH_ROUNDS {
        let mut best_obj = cur_obj;
        let mut best_taps = cur_taps.clone();
        let mut best_move: Option<(usize, i64)> = None;
        for coord in 0..m {
            for delta in [-1i64, 1] {
                let candidate_index = indices[coord] + delta;
                if candidate_index.abs() > k_max {
                    continue;
                }
                let mut taps = cur_taps.clone();
                taps[coord] = candidate_index as f64 * grid.gamma;
                let obj = residual_norm_sq(x, y, &taps);
                let better = obj < best_obj
                    || (obj == best_obj && taps.as_slice() < best_taps.as_slice());
                if better {
                    best_obj = obj;
                    best_taps = taps;
                    best_move = Some((coord, candidate_index));
                }
            }
        }
        match best_move {
            Some((coord, index)) => {
                indices[coord] = index;
                cur_taps = best_taps;
                cur_obj = best_obj;
                if round + 1 == MAX_SEARCH_ROUNDS {
                    log::warn!("lattice descent hit the round cap; returning current point");
                }
            }
            None => break,
        }
    }

    let residual_power = cur_obj / n as f64;
    let sigma2_hat = grid.quantize_sigma2(residual_power);
    let interior = (sigma2_hat - residual_power).abs() < grid.gamma && !clamped;
    Ok(IsiType {
        h_hat: IsiVector::new(cur_taps).expect("lattice taps are finite and non-empty"),
        sigma2_hat,
        residual_power,
        interior,
    })
}

/// Correlations of the fit residual with shifted inputs:
/// `c_k = (1/n) * sum_j (y - h_hat * x)_j x_{j-k}` for
/// `k = 0 ..= h_hat.memory()`.
///
/// For the exact least-squares response these vanish by the normal
/// equations; for the lattice estimate they stay below the lattice
/// spacing, which is the diagnostic this function exists to expose.
pub fn residual_correlations(x: &[f64], y: &[f64], h_hat: &IsiVector) -> Result<Vec<f64>> {
    let n = x.len();
    if n == 0 {
        return Err(Error::DegenerateInput("input block is empty"));
    }
    let memory = h_hat.memory();
    if y.len() != n + memory {
        return Err(Error::DimensionMismatch {
            context: "output block for residual correlations",
            expected: n + memory,
            actual: y.len(),
        });
    }
    check_finite("x", x)?;
    check_finite("y", y)?;
    let fit = convolve(h_hat, x);
    let residual: Vec<f64> = y.iter().zip(&fit).map(|(a, b)| a - b).collect();
    Ok((0..=memory)
        .map(|k| {
            x.iter().zip(&residual[k..]).map(|(a, b)| a * b).sum::<f64>() / n as f64
        })
        .collect())
}

/// Whether `y` is conditionally typical for input `x` under the channel
/// `params`, with slack `grid.gamma`.
///
/// The defining condition compares the negative log-density of `y` given
/// `x` with the conditional entropy; both share the `(n/2) ln(2 pi
/// sigma2)` term, so the test reduces exactly to
/// `| ||y - h * x||^2 / (2 sigma2) - n/2 | < n * gamma`.
pub fn is_conditionally_typical(
    x: &[f64],
    y: &[f64],
    params: &ChannelParams,
    grid: &ParamGrid,
) -> Result<bool> {
    grid.validate()?;
    let n = x.len();
    if n == 0 {
        return Err(Error::DegenerateInput("input block is empty"));
    }
    let memory = params.h().memory();
    if y.len() != n + memory {
        return Err(Error::DimensionMismatch {
            context: "output block for typicality check",
            expected: n + memory,
            actual: y.len(),
        });
    }
    check_finite("x", x)?;
    check_finite("y", y)?;
    let obj = residual_norm_sq(x, y, params.h().taps());
    let stat = obj / (2.0 * params.sigma2());
    Ok((stat - n as f64 / 2.0).abs() < n as f64 * grid.gamma)
}
