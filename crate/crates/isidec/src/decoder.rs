//! Blind maximal-mutual-information decoding and an informed baseline.
//!
//! [`decode_mmi`] knows nothing about the channel.  For every candidate
//! codeword it estimates the lattice channel that would best explain the
//! received block ([`crate::grid::estimate_isi_type`]) and scores the
//! candidate by the mutual information of that estimated channel; the
//! highest score wins.  Near-ties and boundary (non-interior) winners are
//! surfaced as explicit non-decisions rather than silently resolved.
//!
//! [`decode_ml_csi`] is the baseline with perfect channel knowledge:
//! minimum-residual (maximum-likelihood) decoding under the true
//! parameters.

use rayon::prelude::*;

use crate::channel::Codebook;
use crate::error::{Error, Result};
use crate::grid::{estimate_isi_type, residual_norm_sq, ParamGrid};
use crate::spectral::{mutual_information, ChannelParams, IsiVector};

/// Knobs for [`decode_mmi_with`].
#[derive(Debug, Clone, Copy)]
pub struct DecodeOptions {
    /// Two top scores closer than this declare a tie.
    pub tie_epsilon: f64,
}

impl Default for DecodeOptions {
    fn default() -> Self {
        DecodeOptions { tie_epsilon: 1e-12 }
    }
}

/// Why a decode produced (or refused) a decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecodeReason {
    /// A unique interior winner was found.
    Ok,
    /// The two best scores were indistinguishable.
    Tie,
    /// The winning estimate sat on the lattice boundary.
    Outage,
}

/// Per-candidate scoring record.
#[derive(Debug, Clone)]
pub struct MessageScore {
    /// Candidate message index.
    pub message: usize,
    /// Estimated response for this candidate.
    pub h_hat: IsiVector,
    /// Estimated noise variance for this candidate.
    pub sigma2_hat: f64,
    /// Mutual information of the estimated channel (the decoding score).
    pub mi: f64,
    /// Interior flag of the estimate.
    pub interior: bool,
}

/// Result of a blind decode: the decision (if any), the reason, and the
/// full per-candidate score table.
#[derive(Debug, Clone)]
pub struct DecodeOutcome {
    /// Decided message, present exactly when `reason` is [`DecodeReason::Ok`].
    pub decoded: Option<usize>,
    /// Classification of the outcome.
    pub reason: DecodeReason,
    /// One entry per codebook message, in message order.
    pub scores: Vec<MessageScore>,
}

impl DecodeOutcome {
    /// Index of the top-scoring message regardless of tie/outage status.
    pub fn winner(&self) -> usize {
        best_index(&self.scores)
    }
}

fn best_index(scores: &[MessageScore]) -> usize {
    let mut best = 0;
    for (j, s) in scores.iter().enumerate().skip(1) {
        if s.mi > scores[best].mi {
            best = j;
        }
    }
    best
}

/// Blind decode with default options.
pub fn decode_mmi(y: &[f64], cb: &Codebook, grid: &ParamGrid) -> Result<DecodeOutcome> {
    decode_mmi_with(y, cb, grid, &DecodeOptions::default())
}

/// Blind decode of `y` against every word of `cb`.
///
/// Scoring parallelises across messages; the outcome is independent of
/// the execution order.
pub fn decode_mmi_with(
    y: &[f64],
    cb: &Codebook,
    grid: &ParamGrid,
    opts: &DecodeOptions,
) -> Result<DecodeOutcome> {
    grid.validate()?;
    let expected = cb.block_len() + grid.isi_len;
    if y.len() != expected {
        return Err(Error::DimensionMismatch {
            context: "received block for blind decoding",
            expected,
            actual: y.len(),
        });
    }

    let scores: Vec<MessageScore> = (0..cb.num_words())
        .into_par_iter()
        .map(|j| {
            let estimate = estimate_isi_type(cb.word(j), y, grid)?;
            let params = estimate.params()?;
            Ok(MessageScore {
                message: j,
                mi: mutual_information(&params),
                h_hat: estimate.h_hat,
                sigma2_hat: estimate.sigma2_hat,
                interior: estimate.interior,
            })
        })
        .collect::<Result<_>>()?;

    let best = best_index(&scores);
    let runner_up = scores
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != best)
        .map(|(_, s)| s.mi)
        .fold(f64::NEG_INFINITY, f64::max);

    let reason = if (scores[best].mi - runner_up).abs() < opts.tie_epsilon {
        DecodeReason::Tie
    } else if !scores[best].interior {
        DecodeReason::Outage
    } else {
        DecodeReason::Ok
    };
    let decoded = match reason {
        DecodeReason::Ok => Some(best),
        _ => None,
    };
    Ok(DecodeOutcome { decoded, reason, scores })
}

/// Maximum-likelihood decode with known channel parameters: the message
/// minimising `||y - h * x_j||`, ties resolved to the smallest index.
pub fn decode_ml_csi(y: &[f64], cb: &Codebook, truth: &ChannelParams) -> Result<usize> {
    let expected = cb.block_len() + truth.h().memory();
    if y.len() != expected {
        return Err(Error::DimensionMismatch {
            context: "received block for informed decoding",
            expected,
            actual: y.len(),
        });
    }
    let mut best = 0;
    let mut best_obj = f64::INFINITY;
    for j in 0..cb.num_words() {
        let obj = residual_norm_sq(cb.word(j), y, truth.h().taps());
        if obj < best_obj {
            best = j;
            best_obj = obj;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{convolve, transmit};

    fn isi(taps: &[f64]) -> IsiVector {
        IsiVector::new(taps.to_vec()).unwrap()
    }

    /// A grid for tests where the channel memory is known.
    fn grid_for(n: usize, isi_len: usize) -> ParamGrid {
        let mut g = ParamGrid::for_block_len(n).unwrap();
        g.isi_len = isi_len;
        g
    }

    #[test]
    fn duplicate_codewords_tie() {
        let n = 64;
        let word = Codebook::generate(1, n, 4).unwrap().word(0).to_vec();
        let cb = Codebook::from_words(vec![word.clone(), word], 4).unwrap();
        let grid = grid_for(n, 1);
        let truth = ChannelParams::new(isi(&[1.0, 0.0]), 0.5).unwrap();
        let t = transmit(&word_of(&cb, 0), &truth, 9);
        let out = decode_mmi(&t.y, &cb, &grid).unwrap();
        assert_eq!(out.reason, DecodeReason::Tie);
        assert_eq!(out.decoded, None);
        assert_eq!(out.scores.len(), 2);
        assert_eq!(out.scores[0].mi, out.scores[1].mi);
    }

    fn word_of(cb: &Codebook, j: usize) -> Vec<f64> {
        cb.word(j).to_vec()
    }

    #[test]
    fn sign_flipped_twin_ties_exactly() {
        // Two antipodal codewords are blind-indistinguishable: the flipped
        // word fits the mirrored response with the identical residual, and
        // the spectral density (hence the mutual information score) is
        // invariant under negating every tap.  The decoder must therefore
        // report an exact tie rather than guess.
        let n = 1024;
        let base = Codebook::generate(1, n, 31).unwrap().word(0).to_vec();
        let flipped: Vec<f64> = base.iter().map(|v| -v).collect();
        let cb = Codebook::from_words(vec![base.clone(), flipped], 31).unwrap();
        let grid = grid_for(n, 1);
        let truth = ChannelParams::new(isi(&[1.0, 0.5]), 1.0).unwrap();
        let t = transmit(&base, &truth, 77);
        let out = decode_mmi(&t.y, &cb, &grid).unwrap();
        assert_eq!(out.reason, DecodeReason::Tie);
        assert_eq!(out.decoded, None);
        assert_eq!(out.scores[0].mi, out.scores[1].mi);
        assert_eq!(out.scores[0].sigma2_hat, out.scores[1].sigma2_hat);
    }

    #[test]
    fn near_noiseless_decoding_is_perfect() {
        let n = 512;
        let mut grid = grid_for(n, 1);
        // Lower the variance floor so the lattice can express the tiny
        // noise level; with the default floor every estimate would be
        // clamped far from its residual power and flagged as an outage.
        grid.sigma2_min = 1e-4;
        let gamma = grid.gamma;
        let truth = ChannelParams::new(isi(&[5.0 * gamma, 2.0 * gamma]), 1e-6).unwrap();
        let cb = Codebook::generate(16, n, 100).unwrap();
        for trial in 0..20u64 {
            let tx = (trial % 16) as usize;
            let t = transmit(cb.word(tx), &truth, 1000 + trial);
            let out = decode_mmi(&t.y, &cb, &grid).unwrap();
            assert_eq!(out.decoded, Some(tx), "trial {trial}: {:?}", out.reason);
            let ml = decode_ml_csi(&t.y, &cb, &truth).unwrap();
            assert_eq!(ml, tx, "trial {trial}");
        }
    }

    #[test]
    fn permutation_equivariance() {
        let n = 512;
        let grid = grid_for(n, 1);
        let truth = ChannelParams::new(isi(&[1.0, 0.5]), 0.5).unwrap();
        let cb = Codebook::generate(8, n, 5).unwrap();
        let t = transmit(cb.word(3), &truth, 42);
        let out = decode_mmi(&t.y, &cb, &grid).unwrap();

        // Swap words 3 and 6 and decode the same received block.
        let mut words: Vec<Vec<f64>> = (0..8).map(|j| cb.word(j).to_vec()).collect();
        words.swap(3, 6);
        let swapped = Codebook::from_words(words, 5).unwrap();
        let out_swapped = decode_mmi(&t.y, &swapped, &grid).unwrap();

        let map = |j: usize| match j {
            3 => 6,
            6 => 3,
            other => other,
        };
        assert_eq!(out_swapped.decoded, out.decoded.map(map));
        assert_eq!(out_swapped.reason, out.reason);
    }

    #[test]
    fn ml_csi_baseline_basics() {
        let n = 64;
        let cb = Codebook::generate(4, n, 8).unwrap();
        let truth = ChannelParams::new(isi(&[0.9, -0.3]), 1.0).unwrap();
        // Noiseless: exact zero residual at the transmitted word.
        let clean = convolve(truth.h(), cb.word(2));
        assert_eq!(decode_ml_csi(&clean, &cb, &truth).unwrap(), 2);

        // Single message: always 0.
        let single = Codebook::generate(1, n, 8).unwrap();
        let y = vec![0.25; n + 1];
        assert_eq!(decode_ml_csi(&y, &single, &truth).unwrap(), 0);
    }

    #[test]
    fn informed_ordering_is_scale_invariant() {
        let n = 256;
        let cb = Codebook::generate(8, n, 12).unwrap();
        let truth = ChannelParams::new(isi(&[1.0, 0.5]), 0.5).unwrap();
        let t = transmit(cb.word(5), &truth, 3);
        let decision = decode_ml_csi(&t.y, &cb, &truth).unwrap();

        // Scale output and response jointly: residuals scale by c^2, the
        // ordering cannot change.
        let c = 3.0;
        let y_scaled: Vec<f64> = t.y.iter().map(|v| c * v).collect();
        let h_scaled: Vec<f64> = truth.h().taps().iter().map(|v| c * v).collect();
        let truth_scaled = ChannelParams::new(isi(&h_scaled), c * c * truth.sigma2()).unwrap();
        assert_eq!(decode_ml_csi(&y_scaled, &cb, &truth_scaled).unwrap(), decision);
    }

    #[test]
    fn dimension_mismatches_are_usage_errors() {
        let n = 64;
        let cb = Codebook::generate(2, n, 1).unwrap();
        let grid = grid_for(n, 1);
        let y = vec![0.0; n]; // missing the tail samples
        assert!(matches!(
            decode_mmi(&y, &cb, &grid),
            Err(Error::DimensionMismatch { .. })
        ));
        let truth = ChannelParams::new(isi(&[1.0, 0.5]), 1.0).unwrap();
        assert!(matches!(
            decode_ml_csi(&y, &cb, &truth),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn single_message_is_never_a_tie() {
        let n = 64;
        let cb = Codebook::generate(1, n, 2).unwrap();
        let grid = grid_for(n, 1);
        let truth = ChannelParams::new(isi(&[1.0, 0.0]), 1.0).unwrap();
        let t = transmit(cb.word(0), &truth, 6);
        let out = decode_mmi(&t.y, &cb, &grid).unwrap();
        assert_ne!(out.reason, DecodeReason::Tie);
        assert_eq!(out.scores.len(), 1);
    }
}
