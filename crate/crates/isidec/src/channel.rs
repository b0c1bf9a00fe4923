//! Gaussian codebooks and channel simulation.
//!
//! A transmission convolves a block of `n` input symbols with the channel
//! impulse response and adds white Gaussian noise, producing `n + l`
//! output samples where `l` is the channel memory.  Codewords are i.i.d.
//! standard normal blocks; each codeword and each noise realisation draws
//! from its own derived random stream, so results do not depend on the
//! order in which trials are executed.

use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::spectral::{ChannelParams, IsiVector};
use crate::streams::StreamKey;

/// Default cap on the total number of f64 samples a codebook may hold
/// (2^24 samples = 128 MiB).
pub const DEFAULT_CODEBOOK_BUDGET: usize = 1 << 24;

/// Full (zero-padded) convolution of an input block with an impulse
/// response; the output has length `x.len() + h.memory()`.
pub fn convolve(h: &IsiVector, x: &[f64]) -> Vec<f64> {
    let taps = h.taps();
    let mut out = vec![0.0f64; x.len() + taps.len() - 1];
    for (j, &tap) in taps.iter().enumerate() {
        if tap == 0.0 {
            continue;
        }
        for (i, &xi) in x.iter().enumerate() {
            out[i + j] += tap * xi;
        }
    }
    out
}

/// A codebook of i.i.d. standard normal codewords.
///
/// Codeword `j` is drawn from the stream `(seed, "codebook", j)`, so a
/// given `(seed, n)` pair always produces the same words regardless of how
/// many words are requested.
#[derive(Debug, Clone)]
pub struct Codebook {
    n: usize,
    seed: u64,
    words: Vec<Vec<f64>>,
}

impl Codebook {
    /// Generates `m` codewords of length `n` under the default memory
    /// budget.
    pub fn generate(m: usize, n: usize, seed: u64) -> Result<Self> {
        Self::generate_with_budget(m, n, seed, DEFAULT_CODEBOOK_BUDGET)
    }

    /// Generates `m` codewords of length `n`, refusing if `m * n` samples
    /// would exceed `budget`.
    pub fn generate_with_budget(m: usize, n: usize, seed: u64, budget: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidArgument("codebook needs at least one word".into()));
        }
        if n == 0 {
            return Err(Error::InvalidArgument("codeword length must be at least 1".into()));
        }
        let samples = m
            .checked_mul(n)
            .ok_or(Error::CodebookBudgetExceeded { samples: usize::MAX, budget })?;
        if samples > budget {
            return Err(Error::CodebookBudgetExceeded { samples, budget });
        }
        let base = StreamKey::new(seed).with_label("codebook");
        let words: Vec<Vec<f64>> = (0..m)
            .map(|j| {
                let mut rng = base.with_index(j as u64).rng();
                (0..n).map(|_| rand::Rng::sample(&mut rng, StandardNormal)).collect()
            })
            .collect();
        let power: f64 =
            words.iter().flatten().map(|v| v * v).sum::<f64>() / samples as f64;
        log::debug!("codebook m={m} n={n} seed={seed}: average symbol power {power:.4}");
        Ok(Codebook { n, seed, words })
    }

    /// Wraps explicitly supplied codewords (all of equal, nonzero length).
    ///
    /// Useful for adversarial or hand-crafted codebooks; `seed` is kept
    /// only as provenance metadata.
    pub fn from_words(words: Vec<Vec<f64>>, seed: u64) -> Result<Self> {
        let n = match words.first() {
            None => return Err(Error::InvalidArgument("codebook needs at least one word".into())),
            Some(first) => first.len(),
        };
        if n == 0 {
            return Err(Error::InvalidArgument("codeword length must be at least 1".into()));
        }
        for (j, word) in words.iter().enumerate() {
            if word.len() != n {
                return Err(Error::DimensionMismatch {
                    context: "codeword length",
                    expected: n,
                    actual: word.len(),
                });
            }
            if word.iter().any(|v| !v.is_finite()) {
                log::debug!("rejecting codebook: word {j} contains non-finite samples");
                return Err(Error::DegenerateInput("codeword contains non-finite samples"));
            }
        }
        Ok(Codebook { n, seed, words })
    }

    /// Codeword `j` (panics if `j >= num_words`).
    pub fn word(&self, j: usize) -> &[f64] {
        &self.words[j]
    }

    /// Number of codewords `M`.
    pub fn num_words(&self) -> usize {
        self.words.len()
    }

    /// Codeword length `n`.
    pub fn block_len(&self) -> usize {
        self.n
    }

    /// The seed the codebook was derived from.
    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// The code rate `ln(M) / n` in nats per symbol.
    pub fn rate_nats(&self) -> f64 {
        (self.num_words() as f64).ln() / self.n as f64
    }
}

/// One simulated channel use: input, noisy output, and the ground truth
/// that produced it.
#[derive(Debug, Clone)]
pub struct Transmission {
    /// Channel input block of length `n`.
    pub x: Vec<f64>,
    /// Channel output block of length `n + l`.
    pub y: Vec<f64>,
    /// The true channel parameters used for this transmission.
    pub truth: ChannelParams,
    /// Seed of the noise stream.
    pub seed: u64,
}

/// Passes `x` through the channel `truth`, drawing noise from the stream
/// `(seed, "noise")`.
pub fn transmit(x: &[f64], truth: &ChannelParams, seed: u64) -> Transmission {
    let mut y = convolve(truth.h(), x);
    let sigma = truth.sigma2().sqrt();
    let mut rng = StreamKey::new(seed).with_label("noise").rng();
    for sample in &mut y {
        let z: f64 = rand::Rng::sample(&mut rng, StandardNormal);
        *sample += sigma * z;
    }
    Transmission { x: x.to_vec(), y, truth: truth.clone(), seed }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn isi(taps: &[f64]) -> IsiVector {
        IsiVector::new(taps.to_vec()).unwrap()
    }

    #[test]
    fn convolution_hand_examples() {
        // Identity response passes the input through.
        assert_eq!(convolve(&isi(&[1.0]), &[3.0, -1.0, 2.0]), vec![3.0, -1.0, 2.0]);
        // One delayed echo.
        assert_eq!(convolve(&isi(&[1.0, 0.5]), &[1.0, 0.0, 2.0]), vec![1.0, 0.5, 2.0, 1.0]);
        // Pure delay.
        assert_eq!(convolve(&isi(&[0.0, 1.0]), &[4.0, 5.0]), vec![0.0, 4.0, 5.0]);
        // Output length is n + l.
        assert_eq!(convolve(&isi(&[1.0, 2.0, 3.0]), &[1.0]), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn convolution_is_linear() {
        let h = isi(&[0.4, -0.9, 0.3]);
        let a = [1.0, -2.0, 0.5, 3.0];
        let b = [0.2, 0.0, -1.5, 1.0];
        let sum: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + 2.0 * y).collect();
        let lhs = convolve(&h, &sum);
        let ca = convolve(&h, &a);
        let cb = convolve(&h, &b);
        for i in 0..lhs.len() {
            assert!((lhs[i] - (ca[i] + 2.0 * cb[i])).abs() < 1e-12);
        }
    }

    #[test]
    fn codebook_is_reproducible_and_prefix_stable() {
        let a = Codebook::generate(4, 32, 9).unwrap();
        let b = Codebook::generate(4, 32, 9).unwrap();
        let wide = Codebook::generate(8, 32, 9).unwrap();
        for j in 0..4 {
            assert_eq!(a.word(j), b.word(j));
            assert_eq!(a.word(j), wide.word(j), "word {j} depends on codebook size");
        }
        let other_seed = Codebook::generate(4, 32, 10).unwrap();
        assert_ne!(a.word(0), other_seed.word(0));
        assert_ne!(a.word(0), a.word(1));
    }

    #[test]
    fn codebook_words_have_unit_power() {
        let cb = Codebook::generate(8, 4096, 3).unwrap();
        let samples = (8 * 4096) as f64;
        let power: f64 =
            (0..8).flat_map(|j| cb.word(j).iter()).map(|v| v * v).sum::<f64>() / samples;
        assert!((power - 1.0).abs() < 0.05, "average power {power}");
    }

    #[test]
    fn codebook_rate_and_budget() {
        let cb = Codebook::generate(16, 256, 0).unwrap();
        assert!((cb.rate_nats() - (16f64).ln() / 256.0).abs() < 1e-15);
        assert_eq!(cb.num_words(), 16);
        assert_eq!(cb.block_len(), 256);

        assert!(matches!(
            Codebook::generate_with_budget(64, 100, 0, 6399),
            Err(Error::CodebookBudgetExceeded { samples: 6400, budget: 6399 })
        ));
        assert!(Codebook::generate_with_budget(64, 100, 0, 6400).is_ok());
        assert!(Codebook::generate(0, 8, 0).is_err());
        assert!(Codebook::generate(8, 0, 0).is_err());
    }

    #[test]
    fn explicit_codebooks_are_validated() {
        let cb = Codebook::from_words(vec![vec![1.0, 2.0], vec![3.0, 4.0]], 7).unwrap();
        assert_eq!(cb.num_words(), 2);
        assert_eq!(cb.block_len(), 2);
        assert_eq!(cb.seed(), 7);
        assert_eq!(cb.word(1), &[3.0, 4.0]);

        assert!(Codebook::from_words(vec![], 0).is_err());
        assert!(Codebook::from_words(vec![vec![]], 0).is_err());
        assert!(Codebook::from_words(vec![vec![1.0], vec![1.0, 2.0]], 0).is_err());
        assert!(Codebook::from_words(vec![vec![1.0], vec![f64::NAN]], 0).is_err());
    }

    #[test]
    fn transmission_shape_and_determinism() {
        let truth = ChannelParams::new(isi(&[1.0, 0.5]), 0.25).unwrap();
        let x = [1.0, -1.0, 2.0];
        let t1 = transmit(&x, &truth, 7);
        let t2 = transmit(&x, &truth, 7);
        let t3 = transmit(&x, &truth, 8);
        assert_eq!(t1.y.len(), x.len() + truth.h().memory());
        assert_eq!(t1.y, t2.y);
        assert_ne!(t1.y, t3.y);
        assert_eq!(t1.x, x);
    }

    #[test]
    fn transmission_noise_statistics() {
        // With a zero input the output is pure noise; check its sample
        // variance against sigma2.
        let truth = ChannelParams::new(isi(&[1.0]), 0.36).unwrap();
        let x = vec![0.0; 20_000];
        let t = transmit(&x, &truth, 5);
        let var: f64 = t.y.iter().map(|v| v * v).sum::<f64>() / t.y.len() as f64;
        assert!((var - 0.36).abs() < 0.02, "sample variance {var}");
    }

    #[test]
    fn transmission_tracks_the_convolution_at_tiny_noise() {
        let truth = ChannelParams::new(isi(&[0.8, -0.6]), 1e-18).unwrap();
        let x = [1.0, 2.0, 3.0];
        let t = transmit(&x, &truth, 1);
        let clean = convolve(truth.h(), &x);
        for (a, b) in t.y.iter().zip(&clean) {
            assert!((a - b).abs() < 1e-8);
        }
    }
}
