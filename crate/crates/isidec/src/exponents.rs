//! Random-coding error exponents for blind and informed decoding.
//!
//! Two exponents are computed for a true channel `(h°, sigma°²)` at rate
//! `R` (nats/symbol):
//!
//! * the blind-decoder exponent
//!   `min over (h, sigma²) of  d((h,sigma²) || (h°,sigma°²)) + max(0, I(h,sigma²) - R)`,
//!   where [`divergence`] is the Gaussian parameter divergence and `I` the
//!   mutual information rate — evaluated by multi-start derivative-free
//!   minimisation ([`universal_exponent`]);
//! * the classical informed random-coding bound
//!   `max over rho in [0,1] of  E0(rho) - rho R` with
//!   `E0(rho) = (rho / 4 pi) * integral ln(1 + f(xi) / (sigma² (1+rho))) dxi`,
//!   evaluated by golden-section search ([`gallager_exponent`]).
//!
//! [`exponent_surface`] tabulates both over an (SNR, rate) sweep, scaling
//! the noise so that `r(0) / sigma²` matches each SNR cell, and reports the
//! cell-wise difference.  Both exponents vanish exactly at and above the
//! channel's mutual information rate, and the blind exponent's minimiser
//! can only overestimate the true minimum, so a non-negative reported
//! difference is evidence, not an artifact.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::spectral::{
    mutual_information, mutual_information_taps, spectral_average_taps, ChannelParams, IsiVector,
};
use crate::streams::StreamKey;

// ---------------------------------------------------------------------------
// Divergence
// ---------------------------------------------------------------------------

/// Gaussian channel-parameter divergence
/// `d = -1/2 ln(sigma²/sigma°²) - 1/2 + (sigma² + ||h - h°||²) / (2 sigma°²)`.
///
/// Non-negative, zero exactly when the parameters coincide.  Tap vectors
/// of different lengths are compared by zero-padding the shorter one.
pub fn divergence(p: &ChannelParams, truth: &ChannelParams) -> f64 {
    let a = p.h().taps();
    let b = truth.h().taps();
    let mut gap_sq = 0.0;
    for i in 0..a.len().max(b.len()) {
        let d = a.get(i).copied().unwrap_or(0.0) - b.get(i).copied().unwrap_or(0.0);
        gap_sq += d * d;
    }
    divergence_parts(p.sigma2(), truth.sigma2(), gap_sq)
}

fn divergence_parts(sigma2: f64, sigma2_ref: f64, gap_sq: f64) -> f64 {
    -0.5 * (sigma2 / sigma2_ref).ln() - 0.5 + (sigma2 + gap_sq) / (2.0 * sigma2_ref)
}

// ---------------------------------------------------------------------------
// Blind-decoder exponent
// ---------------------------------------------------------------------------

/// Options for the multi-start minimiser behind [`universal_exponent`].
#[derive(Debug, Clone, Copy)]
pub struct MinimizerOptions {
    /// Number of start points (at least 1).
    pub starts: usize,
    /// Initial compass-search step, in tap units and log-variance units.
    pub initial_step: f64,
    /// The search stops once the step has shrunk below this tolerance.
    pub coord_tol: f64,
    /// Objective-evaluation budget per start; exhausting it flags the
    /// start as unconverged.
    pub max_evals_per_start: usize,
}

impl Default for MinimizerOptions {
    fn default() -> Self {
        MinimizerOptions {
            starts: 32,
            initial_step: 0.25,
            coord_tol: 1e-6,
            max_evals_per_start: 20_000,
        }
    }
}

/// Result of a minimisation: the best value found, where it was found,
/// and whether the winning search ran to tolerance.
#[derive(Debug, Clone)]
pub struct MinimizerReport {
    /// Best objective value found (non-negative).
    pub value: f64,
    /// Parameters achieving `value`.
    pub argmin: ChannelParams,
    /// Number of start points actually used.
    pub starts: usize,
    /// True when the winning start reached the coordinate tolerance
    /// within its evaluation budget.
    pub converged: bool,
}

/// Compass (coordinate) descent to tolerance.  Returns the refined point,
/// its value, and whether the step shrank below `coord_tol` in budget.
fn compass_refine(
    mut point: Vec<f64>,
    objective: &impl Fn(&[f64]) -> f64,
    opts: &MinimizerOptions,
) -> (Vec<f64>, f64, bool) {
    let dim = point.len();
    let mut value = objective(&point);
    let mut evals = 1usize;
    let mut step = opts.initial_step;
    while step >= opts.coord_tol {
        let mut best_value = value;
        let mut best_move: Option<(usize, f64)> = None;
        for coord in 0..dim {
            for direction in [step, -step] {
                let saved = point[coord];
                point[coord] = saved + direction;
                let v = objective(&point);
                point[coord] = saved;
                evals += 1;
                if v < best_value {
                    best_value = v;
                    best_move = Some((coord, direction));
                }
                if evals >= opts.max_evals_per_start {
                    if let Some((c, d)) = best_move {
                        point[c] += d;
                        value = best_value;
                    }
                    return (point, value, false);
                }
            }
        }
        match best_move {
            Some((coord, direction)) => {
                point[coord] += direction;
                value = best_value;
            }
            None => step *= 0.5,
        }
    }
    (point, value, true)
}

/// Deterministic start points: the truth itself, scaled copies, and
/// pseudo-random coarse samples from a fixed stream.
fn start_points(truth: &ChannelParams, count: usize) -> Vec<Vec<f64>> {
    let taps = truth.h().taps();
    let log_s2 = truth.sigma2().ln();
    let mut starts = Vec::with_capacity(count);
    let push = |mut v: Vec<f64>, s: f64, starts: &mut Vec<Vec<f64>>| {
        v.push(s);
        if starts.len() < count {
            starts.push(v);
        }
    };

    push(taps.to_vec(), log_s2, &mut starts);
    for scale in [0.0, 0.5, 1.0, 1.5] {
        for vt in [0.5f64, 1.0, 2.0] {
            if scale == 1.0 && vt == 1.0 {
                continue; // already covered by the truth start
            }
            let v: Vec<f64> = taps.iter().map(|t| scale * t).collect();
            push(v, log_s2 + vt.ln(), &mut starts);
        }
    }

    let bound = 1.5 * taps.iter().fold(1.0f64, |acc, t| acc.max(t.abs()));
    let base = StreamKey::new(0x4558_504f).with_label("exponent-starts");
    let mut index = 0u64;
    while starts.len() < count {
        let mut rng = base.with_index(index).rng();
        let v: Vec<f64> =
            (0..taps.len()).map(|_| rand::Rng::random_range(&mut rng, -bound..bound)).collect();
        let s = log_s2 + rand::Rng::random_range(&mut rng, -8f64.ln()..8f64.ln());
        push(v, s, &mut starts);
        index += 1;
    }
    starts
}

/// The blind-decoder random-coding exponent at rate `rate` for the true
/// channel `truth`:
/// `min over (h, sigma²>0) of divergence + max(0, I(h, sigma²) - rate)`,
/// with `h` ranging over responses of the same tap count as the truth.
///
/// The minimisation is multi-start compass search over taps and
/// log-variance; failure to converge is reported in the flag, never as an
/// error.  Because any missed global minimum can only make the returned
/// value larger, the result is an upper bound on the exponent up to the
/// search tolerance.
pub fn universal_exponent(
    rate: f64,
    truth: &ChannelParams,
    opts: &MinimizerOptions,
) -> MinimizerReport {
    let count = opts.starts.max(1);
    let objective = |v: &[f64]| -> f64 {
        let (taps, log_s2) = v.split_at(v.len() - 1);
        let sigma2 = log_s2[0].exp();
        if !sigma2.is_finite() || sigma2 <= 0.0 {
            return f64::INFINITY;
        }
        let mut gap_sq = 0.0;
        for (a, b) in taps.iter().zip(truth.h().taps()) {
            let d = a - b;
            gap_sq += d * d;
        }
        let d = divergence_parts(sigma2, truth.sigma2(), gap_sq);
        let excess = (mutual_information_taps(taps, sigma2) - rate).max(0.0);
        d + excess
    };

    let mut best: Option<(Vec<f64>, f64, bool)> = None;
    for start in start_points(truth, count) {
        let (point, value, converged) = compass_refine(start, &objective, opts);
        let take = match &best {
            None => true,
            Some((_, best_value, _)) => value < *best_value,
        };
        if take {
            best = Some((point, value, converged));
        }
    }
    let (point, value, converged) = best.expect("at least one start");
    let (taps, log_s2) = point.split_at(point.len() - 1);
    let argmin = ChannelParams::new(
        IsiVector::new(taps.to_vec()).expect("search taps are finite"),
        log_s2[0].exp(),
    )
    .expect("search variance is positive");
    MinimizerReport { value, argmin, starts: count, converged }
}

// ---------------------------------------------------------------------------
// Informed (random-coding) exponent
// ---------------------------------------------------------------------------

/// The Gallager function
/// `E0(rho) = (rho / 4 pi) * integral_0^{2 pi} ln(1 + f(xi) / (sigma² (1 + rho))) dxi`
/// for `rho` in `[0, 1]`.
pub fn gallager_e0(rho: f64, p: &ChannelParams) -> Result<f64> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::InvalidArgument(format!("rho must lie in [0, 1] (got {rho})")));
    }
    if rho == 0.0 {
        return Ok(0.0);
    }
    let scaled = p.sigma2() * (1.0 + rho);
    Ok(0.5 * rho * spectral_average_taps(p.h().taps(), |f| (f / scaled).ln_1p()))
}

/// Result of the informed-exponent maximisation over `rho`.
#[derive(Debug, Clone, Copy)]
pub struct GallagerReport {
    /// `max over rho in [0,1] of E0(rho) - rho * rate` (non-negative).
    pub value: f64,
    /// Maximising `rho`.
    pub rho: f64,
    /// Golden-section search always runs to tolerance; kept for symmetry
    /// with [`MinimizerReport`].
    pub converged: bool,
}

/// The informed random-coding exponent
/// `max over rho in [0,1] of E0(rho) - rho * rate`, via golden-section
/// search (the objective is concave in `rho`) plus explicit endpoint
/// evaluation, to a `rho` tolerance of 1e-9.
pub fn gallager_exponent(rate: f64, p: &ChannelParams) -> GallagerReport {
    let phi = |rho: f64| gallager_e0(rho, p).expect("rho stays in [0,1]") - rho * rate;

    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = 0.0f64;
    let mut b = 1.0f64;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = phi(c);
    let mut fd = phi(d);
    while b - a > 1e-9 {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = phi(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = phi(d);
        }
    }
    let interior = 0.5 * (a + b);
    // The maximum of a concave function on [0,1] is at the interior
    // optimum or pinned to an endpoint; phi(0) = 0 by construction.
    let mut best = (0.0, 0.0f64);
    for (rho, value) in [(interior, phi(interior)), (1.0, phi(1.0))] {
        if value > best.1 {
            best = (rho, value);
        }
    }
    GallagerReport { value: best.1, rho: best.0, converged: true }
}

// ---------------------------------------------------------------------------
// Surfaces and capacity
// ---------------------------------------------------------------------------

/// Options for [`exponent_surface`].
#[derive(Debug, Clone, Copy)]
pub struct SurfaceOptions {
    /// Minimiser options for the blind exponent in each cell.
    pub minimizer: MinimizerOptions,
    /// A cell whose minimiser fails to converge is re-run once with this
    /// many times the starts.
    pub retry_factor: usize,
    /// Replace the rate-maximised informed exponent by the plain `E0(1)`
    /// value (an alternative, rate-independent reading of the comparison
    /// curve).  Off by default.
    pub plain_e0: bool,
}

impl Default for SurfaceOptions {
    fn default() -> Self {
        SurfaceOptions {
            minimizer: MinimizerOptions::default(),
            retry_factor: 4,
            plain_e0: false,
        }
    }
}

/// Exponent comparison over an (SNR, rate) sweep for a fixed tap shape.
///
/// All matrices are indexed `[snr index][rate index]`.
#[derive(Debug, Clone)]
pub struct ExponentSurface {
    /// SNR axis in dB; SNR is defined as `r(0) / sigma²`.
    pub snr_db_axis: Vec<f64>,
    /// Rate axis in nats per symbol.
    pub rate_axis: Vec<f64>,
    /// The fixed tap shape (noise is scaled per SNR cell).
    pub h_shape: IsiVector,
    /// Blind-decoder exponent per cell.
    pub e_new: Vec<Vec<f64>>,
    /// Informed exponent per cell.
    pub e_gallager: Vec<Vec<f64>>,
    /// `e_new - e_gallager` per cell.
    pub difference: Vec<Vec<f64>>,
    /// Whether both optimisers converged in the cell (after retry).
    pub converged: Vec<Vec<bool>>,
}

impl ExponentSurface {
    /// Smallest entry of the difference matrix.
    pub fn min_difference(&self) -> f64 {
        self.difference.iter().flatten().copied().fold(f64::INFINITY, f64::min)
    }

    /// Whether every cell's optimiser converged.
    pub fn all_converged(&self) -> bool {
        self.converged.iter().flatten().all(|&c| c)
    }
}

fn check_axis(name: &'static str, axis: &[f64]) -> Result<()> {
    if axis.is_empty() {
        return Err(Error::InvalidArgument(format!("{name} axis is empty")));
    }
    if axis.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument(format!("{name} axis contains non-finite values")));
    }
    if axis.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidArgument(format!("{name} axis is not sorted ascending")));
    }
    Ok(())
}

/// Computes both exponents over the `snr_db_axis` x `rate_axis` sweep.
///
/// For each SNR cell the noise variance is set to `r(0) / 10^(snr_db/10)`
/// so that the received signal-to-noise power ratio matches the cell.
/// Cells evaluate in parallel; the result does not depend on thread
/// scheduling.
pub fn exponent_surface(
    h_shape: &IsiVector,
    snr_db_axis: &[f64],
    rate_axis: &[f64],
    opts: &SurfaceOptions,
) -> Result<ExponentSurface> {
    check_axis("snr", snr_db_axis)?;
    check_axis("rate", rate_axis)?;
    let r0 = h_shape.energy();
    if r0 <= 0.0 {
        return Err(Error::DegenerateInput("tap shape has zero energy"));
    }

    let cells: Vec<(usize, usize)> = (0..snr_db_axis.len())
        .flat_map(|i| (0..rate_axis.len()).map(move |j| (i, j)))
        .collect();
    let results: Vec<(f64, f64, bool)> = cells
        .par_iter()
        .map(|&(i, j)| -> Result<(f64, f64, bool)> {
            let sigma2 = r0 / 10f64.powf(snr_db_axis[i] / 10.0);
            let p = ChannelParams::new(h_shape.clone(), sigma2)?;
            let rate = rate_axis[j];

            let mut report = universal_exponent(rate, &p, &opts.minimizer);
            if !report.converged && opts.retry_factor > 1 {
                let mut retry_opts = opts.minimizer;
                retry_opts.starts *= opts.retry_factor;
                let retry = universal_exponent(rate, &p, &retry_opts);
                if retry.value <= report.value {
                    report = retry;
                }
            }

            let (e_gal, gal_converged) = if opts.plain_e0 {
                (gallager_e0(1.0, &p)?, true)
            } else {
                let g = gallager_exponent(rate, &p);
                (g.value, g.converged)
            };
            Ok((report.value, e_gal, report.converged && gal_converged))
        })
        .collect::<Result<_>>()?;

    let n_rate = rate_axis.len();
    let mut surface = ExponentSurface {
        snr_db_axis: snr_db_axis.to_vec(),
        rate_axis: rate_axis.to_vec(),
        h_shape: h_shape.clone(),
        e_new: vec![vec![0.0; n_rate]; snr_db_axis.len()],
        e_gallager: vec![vec![0.0; n_rate]; snr_db_axis.len()],
        difference: vec![vec![0.0; n_rate]; snr_db_axis.len()],
        converged: vec![vec![false; n_rate]; snr_db_axis.len()],
    };
    for (&(i, j), &(e_new, e_gal, conv)) in cells.iter().zip(&results) {
        surface.e_new[i][j] = e_new;
        surface.e_gallager[i][j] = e_gal;
        surface.difference[i][j] = e_new - e_gal;
        surface.converged[i][j] = conv;
    }
    Ok(surface)
}

/// Worst-case capacity of a finite uncertainty set: the minimum mutual
/// information rate over the set.
pub fn compound_capacity(params: &[ChannelParams]) -> Result<f64> {
    if params.is_empty() {
        return Err(Error::InvalidArgument("capacity of an empty parameter set".into()));
    }
    Ok(params.iter().map(mutual_information).fold(f64::INFINITY, f64::min))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn isi(taps: &[f64]) -> IsiVector {
        IsiVector::new(taps.to_vec()).unwrap()
    }

    fn params(taps: &[f64], sigma2: f64) -> ChannelParams {
        ChannelParams::new(isi(taps), sigma2).unwrap()
    }

    #[test]
    fn divergence_hand_values() {
        let truth = params(&[1.0, 0.5], 1.0);
        assert_eq!(divergence(&truth, &truth), 0.0);

        // Same taps, sigma2 = 2 against 1: 1/2 - 1/2 ln 2.
        let p = params(&[1.0, 0.5], 2.0);
        assert!((divergence(&p, &truth) - 0.153_426_409_720_027_3).abs() < 1e-12);

        // Unit tap gap at equal unit variances: 1/2.
        let p = params(&[2.0, 0.5], 1.0);
        assert!((divergence(&p, &truth) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn divergence_pads_shorter_vectors() {
        let a = params(&[1.0, 0.5, 0.0], 1.0);
        let b = params(&[1.0, 0.5], 1.0);
        assert_eq!(divergence(&a, &b), 0.0);
        let c = params(&[1.0], 1.0);
        // Gap (0, 0.5): ||gap||² = 0.25 → d = 0.125.
        assert!((divergence(&c, &b) - 0.125).abs() < 1e-12);
        assert_eq!(divergence(&c, &b), divergence(&b, &c));
    }

    #[test]
    fn divergence_identity_form_agrees() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xD1);
        for _ in 0..1000 {
            let h: Vec<f64> = (0..3).map(|_| rng.random_range(-2.0..2.0)).collect();
            let h0: Vec<f64> = (0..3).map(|_| rng.random_range(-2.0..2.0)).collect();
            let s2 = rng.random_range(0.05..4.0);
            let s02 = rng.random_range(0.05..4.0);
            let p = params(&h, s2);
            let truth = params(&h0, s02);
            let d = divergence(&p, &truth);
            let t = s2 / s02;
            let gap_sq: f64 = h.iter().zip(&h0).map(|(a, b)| (a - b) * (a - b)).sum();
            let identity = 0.5 * (t - 1.0 - t.ln()) + gap_sq / (2.0 * s02);
            assert!((d - identity).abs() < 1e-12, "{d} vs {identity}");
            assert!(d >= 0.0);
        }
    }

    #[test]
    fn blind_exponent_vanishes_at_and_above_capacity() {
        let truth = params(&[1.0, 0.5], 1.0);
        let cap = mutual_information(&truth);
        let opts = MinimizerOptions::default();
        for rate in [cap, cap + 0.1, cap + 1.0] {
            let report = universal_exponent(rate, &truth, &opts);
            assert_eq!(report.value, 0.0, "rate {rate}");
            assert_eq!(report.starts, 32);
        }
        // Slightly below capacity the exponent must be strictly positive.
        let report = universal_exponent(cap - 0.05, &truth, &opts);
        assert!(report.value > 0.0, "value {}", report.value);
    }

    #[test]
    fn blind_exponent_matches_flat_channel_brute_force() {
        // Memoryless truth: the objective is two-dimensional, so a dense
        // grid plus refinement is a trustworthy oracle.
        let truth = params(&[1.0], 1.0);
        let rate = 0.1;
        let oracle_obj = |h: f64, s2: f64| -> f64 {
            let d = -0.5 * s2.ln() - 0.5 + (s2 + (h - 1.0) * (h - 1.0)) / 2.0;
            let mi = 0.5 * (h * h / s2).ln_1p();
            d + (mi - rate).max(0.0)
        };
        let mut best = (0.0f64, 1.0f64, f64::INFINITY);
        for i in 0..400 {
            for j in 0..400 {
                let h = -2.0 + 4.0 * (i as f64 + 0.5) / 400.0;
                let s2 = 0.05 + 3.95 * (j as f64 + 0.5) / 400.0;
                let v = oracle_obj(h, s2);
                if v < best.2 {
                    best = (h, s2, v);
                }
            }
        }
        // Local refinement of the oracle's best cell.
        let (mut h, mut s2, mut v) = best;
        let mut step = 4.0 / 400.0;
        while step > 1e-9 {
            let mut moved = false;
            for (dh, ds) in [(step, 0.0), (-step, 0.0), (0.0, step), (0.0, -step)] {
                let (ch, cs) = (h + dh, (s2 + ds).max(1e-6));
                let cv = oracle_obj(ch, cs);
                if cv < v {
                    h = ch;
                    s2 = cs;
                    v = cv;
                    moved = true;
                }
            }
            if !moved {
                step *= 0.5;
            }
        }

        let report = universal_exponent(rate, &truth, &MinimizerOptions::default());
        assert!(
            (report.value - v).abs() <= 1e-4,
            "search {} vs oracle {v} at (h={h}, s2={s2})",
            report.value
        );
        assert!(report.converged);
        // Report invariant: value is the objective at the argmin.
        let d = divergence(&report.argmin, &truth);
        let mi = mutual_information(&report.argmin);
        assert!((report.value - (d + (mi - rate).max(0.0))).abs() < 1e-9);
    }

    #[test]
    fn blind_exponent_is_non_increasing_in_rate() {
        let truth = params(&[1.0, 0.5], 0.5);
        let opts = MinimizerOptions::default();
        let mut prev = f64::INFINITY;
        for k in 0..=10 {
            let rate = k as f64 * 0.1;
            let value = universal_exponent(rate, &truth, &opts).value;
            assert!(value <= prev + 1e-7, "rate {rate}: {value} > {prev}");
            prev = value;
        }
    }

    #[test]
    fn gallager_e0_closed_forms() {
        let flat = params(&[1.0], 1.0);
        assert_eq!(gallager_e0(0.0, &flat).unwrap(), 0.0);
        assert!((gallager_e0(1.0, &flat).unwrap() - 0.5 * 1.5f64.ln()).abs() < 1e-12);

        // Two equal taps at rho = 1: (1/2)(1/2pi) int ln(2 + cos) d xi
        // = (1/2) ln((2 + sqrt 3) / 2).
        let two = params(&[1.0, 1.0], 1.0);
        let expected = 0.5 * ((2.0 + 3f64.sqrt()) / 2.0).ln();
        assert!((gallager_e0(1.0, &two).unwrap() - expected).abs() < 1e-12);

        assert!(gallager_e0(-0.1, &flat).is_err());
        assert!(gallager_e0(1.1, &flat).is_err());
        assert!(gallager_e0(f64::NAN, &flat).is_err());
    }

    #[test]
    fn gallager_exponent_endpoints_and_threshold() {
        let p = params(&[1.0], 1.0);
        let cap = mutual_information(&p);

        // Zero rate: optimum at rho = 1.
        let at_zero = gallager_exponent(0.0, &p);
        assert!((at_zero.value - gallager_e0(1.0, &p).unwrap()).abs() < 1e-9);
        assert!((at_zero.rho - 1.0).abs() < 1e-6);

        // At or above capacity: zero, optimum at rho = 0.
        for rate in [cap, cap + 0.2] {
            let r = gallager_exponent(rate, &p);
            assert_eq!(r.value, 0.0, "rate {rate}");
            assert_eq!(r.rho, 0.0);
        }

        // Just below capacity: strictly positive.
        assert!(gallager_exponent(cap - 0.05, &p).value > 0.0);
    }

    #[test]
    fn gallager_exponent_matches_dense_rho_grid() {
        let p = params(&[1.0], 1.0);
        let rate = 0.1;
        // Closed-form E0 for the flat channel on a dense rho grid.
        let mut oracle = 0.0f64;
        for k in 0..=100_000 {
            let rho = k as f64 / 100_000.0;
            let phi = 0.5 * rho * (1.0 / (1.0 + rho)).ln_1p() - rho * rate;
            oracle = oracle.max(phi);
        }
        let got = gallager_exponent(rate, &p);
        assert!((got.value - oracle).abs() < 1e-7, "{} vs {oracle}", got.value);
    }

    #[test]
    fn gallager_exponent_is_non_increasing_in_rate() {
        let p = params(&[1.0, 0.5], 0.5);
        let mut prev = f64::INFINITY;
        for k in 0..=10 {
            let rate = k as f64 * 0.1;
            let value = gallager_exponent(rate, &p).value;
            assert!(value <= prev + 1e-9, "rate {rate}: {value} > {prev}");
            prev = value;
        }
    }

    #[test]
    fn surface_above_capacity_is_all_zero() {
        let h = isi(&[1.0]);
        // SNR 0 dB → sigma2 = 1 → capacity ~0.3466; rate 1.0 is far above.
        let s = exponent_surface(&h, &[0.0], &[1.0], &SurfaceOptions::default()).unwrap();
        assert_eq!(s.e_new[0][0], 0.0);
        assert_eq!(s.e_gallager[0][0], 0.0);
        assert_eq!(s.difference[0][0], 0.0);
        assert!(s.all_converged());
    }

    #[test]
    fn surface_single_cell_matches_direct_calls() {
        let h = isi(&[1.0, 0.5]);
        let snr_db = 6.0;
        let rate = 0.25;
        let s = exponent_surface(&h, &[snr_db], &[rate], &SurfaceOptions::default()).unwrap();

        let sigma2 = h.energy() / 10f64.powf(snr_db / 10.0);
        let p = ChannelParams::new(h.clone(), sigma2).unwrap();
        let direct_new = universal_exponent(rate, &p, &MinimizerOptions::default());
        let direct_gal = gallager_exponent(rate, &p);
        assert!((s.e_new[0][0] - direct_new.value).abs() < 1e-9);
        assert!((s.e_gallager[0][0] - direct_gal.value).abs() < 1e-12);
        assert!((s.difference[0][0] - (s.e_new[0][0] - s.e_gallager[0][0])).abs() < 1e-15);
        assert!(s.min_difference() >= -1e-6);
    }

    #[test]
    fn surface_plain_e0_option() {
        let h = isi(&[1.0]);
        let opts = SurfaceOptions { plain_e0: true, ..SurfaceOptions::default() };
        let s = exponent_surface(&h, &[0.0], &[0.1, 0.3], &opts).unwrap();
        let p = params(&[1.0], 1.0);
        let e0 = gallager_e0(1.0, &p).unwrap();
        // Rate-independent alternative: both rate cells hold E0(1).
        assert!((s.e_gallager[0][0] - e0).abs() < 1e-12);
        assert!((s.e_gallager[0][1] - e0).abs() < 1e-12);
    }

    #[test]
    fn surface_validates_axes_and_shape() {
        let h = isi(&[1.0]);
        let opts = SurfaceOptions::default();
        assert!(exponent_surface(&h, &[], &[0.1], &opts).is_err());
        assert!(exponent_surface(&h, &[0.0], &[], &opts).is_err());
        assert!(exponent_surface(&h, &[3.0, 1.0], &[0.1], &opts).is_err());
        assert!(exponent_surface(&h, &[0.0], &[0.5, 0.1], &opts).is_err());
        let zero = isi(&[0.0, 0.0]);
        assert!(exponent_surface(&zero, &[0.0], &[0.1], &opts).is_err());
    }

    #[test]
    fn compound_capacity_examples() {
        let p = params(&[1.0, 0.5], 1.0);
        assert_eq!(compound_capacity(std::slice::from_ref(&p)).unwrap(), mutual_information(&p));

        let zero = params(&[0.0], 1.0);
        let set = [params(&[1.0], 1.0), zero];
        assert_eq!(compound_capacity(&set).unwrap(), 0.0);

        let set =
            [params(&[1.0, 0.2], 0.7), params(&[0.4, -0.8], 1.3), params(&[0.9], 2.0)];
        let min = set.iter().map(mutual_information).fold(f64::INFINITY, f64::min);
        assert_eq!(compound_capacity(&set).unwrap(), min);

        assert!(compound_capacity(&[]).is_err());
    }
}
