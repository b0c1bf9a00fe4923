//! The convolution operator as a banded Toeplitz matrix: singular value
//! spectrum, limiting-distribution checks, and parallel-channel
//! coordinates.
//!
//! Block convolution with taps `(h_0, ..., h_l)` is the `(n+l) x n` matrix
//! with entry `(i, j) = h_{i-j}` for `0 <= i - j <= l`.  Its singular
//! values squared are the eigenvalues of the banded Gram matrix, and as
//! `n` grows their empirical distribution converges to the distribution
//! of the spectral density evaluated at a uniform angle — the classical
//! Toeplitz limit theorem.  [`szego_check`] quantifies that convergence
//! with a Wasserstein-1 distance; [`parallel_decompose`] rotates an
//! input/output pair into the singular bases, where the channel becomes a
//! diagonal family of scalar gains plus the noise coordinates.

use nalgebra::DMatrix;

use crate::channel::convolve;
use crate::error::{Error, Result};
use crate::spectral::{spectral_density, IsiVector, DEFAULT_EIGEN_BUDGET};

/// Number of angle samples used for the reference distribution in
/// [`szego_check`].
const SZEGO_SAMPLES: usize = 1 << 16;

/// The `(n+l) x n` banded lower-triangular Toeplitz convolution operator.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvOperator {
    h: IsiVector,
    n: usize,
}

impl ConvOperator {
    /// Builds the operator for input blocks of length `n >= 1`.
    pub fn new(h: IsiVector, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("operator needs input length at least 1".into()));
        }
        Ok(ConvOperator { h, n })
    }

    /// The taps the operator convolves with.
    pub fn h(&self) -> &IsiVector {
        &self.h
    }

    /// Input (column) dimension `n`.
    pub fn input_len(&self) -> usize {
        self.n
    }

    /// Output (row) dimension `n + l`.
    pub fn output_len(&self) -> usize {
        self.n + self.h.memory()
    }

    /// Matrix entry `(i, j)`: `h_{i-j}` inside the band, zero outside.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        if i >= j {
            self.h.taps().get(i - j).copied().unwrap_or(0.0)
        } else {
            0.0
        }
    }

    /// Materialises the dense matrix.
    pub fn to_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.output_len(), self.input_len(), |i, j| self.entry(i, j))
    }

    /// Applies the operator; identical to [`convolve`] with the same taps.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                context: "operator input",
                expected: self.n,
                actual: x.len(),
            });
        }
        Ok(convolve(&self.h, x))
    }
}

/// Singular values of the operator, sorted descending.
pub fn singular_values(op: &ConvOperator) -> Result<Vec<f64>> {
    if op.input_len() > DEFAULT_EIGEN_BUDGET {
        return Err(Error::EigenBudgetExceeded {
            n: op.input_len(),
            budget: DEFAULT_EIGEN_BUDGET,
        });
    }
    let svd = op.to_matrix().svd(false, false);
    let mut values: Vec<f64> = svd.singular_values.iter().copied().collect();
    values.sort_by(|a, b| b.partial_cmp(a).expect("singular values are finite"));
    Ok(values)
}

/// Wasserstein-1 distance between the empirical distribution of the
/// squared singular values at block length `n` and the distribution of
/// the spectral density at a uniform angle (sampled at 2^16 midpoints).
///
/// Shrinks toward zero as `n` grows; `n >= 32` required so the empirical
/// side is meaningful.
pub fn szego_check(h: &IsiVector, n: usize) -> Result<f64> {
    if n < 32 {
        return Err(Error::InvalidArgument(format!(
            "distribution check needs n >= 32 (got {n})"
        )));
    }
    let op = ConvOperator::new(h.clone(), n)?;
    let mut empirical: Vec<f64> = singular_values(&op)?.iter().map(|s| s * s).collect();
    empirical.sort_by(|a, b| a.partial_cmp(b).expect("finite"));

    let m = SZEGO_SAMPLES;
    let mut reference: Vec<f64> = (0..m)
        .map(|k| {
            let xi = 2.0 * std::f64::consts::PI * (k as f64 + 0.5) / m as f64;
            spectral_density(h, xi)
        })
        .collect();
    reference.sort_by(|a, b| a.partial_cmp(b).expect("finite"));

    // Exact transport between two sorted atomic measures.  Masses are
    // counted in integer units of 1/(n*m): each empirical atom carries m
    // units, each reference atom n units, so the two-pointer sweep incurs
    // no mass-bookkeeping rounding.
    let mut distance = 0.0f64;
    let (mut ia, mut ib) = (0usize, 0usize);
    let (mut rem_a, mut rem_b) = (m as u64, n as u64);
    while ia < empirical.len() && ib < reference.len() {
        let take = rem_a.min(rem_b);
        distance += take as f64 * (empirical[ia] - reference[ib]).abs();
        rem_a -= take;
        rem_b -= take;
        if rem_a == 0 {
            ia += 1;
            rem_a = m as u64;
        }
        if rem_b == 0 {
            ib += 1;
            rem_b = n as u64;
        }
    }
    Ok(distance / (n as f64 * m as f64))
}

/// An input/output pair rotated into the singular bases of the operator.
#[derive(Debug, Clone)]
pub struct ParallelDecomposition {
    /// Coordinates of `x` in the right singular basis.
    pub input_coords: Vec<f64>,
    /// First `n` coordinates of `y` in the left singular basis.
    pub output_coords: Vec<f64>,
    /// Singular values (per-channel gains), descending.
    pub gains: Vec<f64>,
    /// `output_coords[i] - gains[i] * input_coords[i]`: the implied noise
    /// coordinates.
    pub residuals: Vec<f64>,
    /// Coordinates of `y` on the `l`-dimensional orthogonal complement of
    /// the left singular basis — output energy no input can reach.
    pub null_coords: Vec<f64>,
}

/// Rotates `(x, y)` into the singular bases of `op`, exposing the
/// channel as `n` scalar gains plus noise.
///
/// Basis convention: singular triples sorted by descending gain, and each
/// right vector's first component of magnitude above 1e-12 is made
/// positive (the left vector flips with it), so coordinates are
/// deterministic.
pub fn parallel_decompose(
    x: &[f64],
    y: &[f64],
    op: &ConvOperator,
) -> Result<ParallelDecomposition> {
    let n = op.input_len();
    let rows = op.output_len();
    if x.len() != n {
        return Err(Error::DimensionMismatch {
            context: "parallel decomposition input",
            expected: n,
            actual: x.len(),
        });
    }
    if y.len() != rows {
        return Err(Error::DimensionMismatch {
            context: "parallel decomposition output",
            expected: rows,
            actual: y.len(),
        });
    }
    if n > DEFAULT_EIGEN_BUDGET {
        return Err(Error::EigenBudgetExceeded { n, budget: DEFAULT_EIGEN_BUDGET });
    }

    let svd = op.to_matrix().svd(true, true);
    let u = svd.u.expect("left vectors requested");
    let v_t = svd.v_t.expect("right vectors requested");

    // Descending order with deterministic signs.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        svd.singular_values[b]
            .partial_cmp(&svd.singular_values[a])
            .expect("finite")
            .then(a.cmp(&b))
    });

    let mut gains = Vec::with_capacity(n);
    let mut input_coords = Vec::with_capacity(n);
    let mut output_coords = Vec::with_capacity(n);
    let mut residuals = Vec::with_capacity(n);
    // Collect the (sign-fixed) left vectors for the complement pass below.
    let mut left: Vec<Vec<f64>> = Vec::with_capacity(n);
    for &k in &order {
        let right: Vec<f64> = v_t.row(k).iter().copied().collect();
        let mut left_k: Vec<f64> = u.column(k).iter().copied().collect();
        let mut right_k = right;
        let flip = right_k
            .iter()
            .find(|c| c.abs() > 1e-12)
            .is_some_and(|&c| c < 0.0);
        if flip {
            right_k.iter_mut().for_each(|c| *c = -*c);
            left_k.iter_mut().for_each(|c| *c = -*c);
        }
        let s = svd.singular_values[k];
        let xi: f64 = right_k.iter().zip(x).map(|(a, b)| a * b).sum();
        let yi: f64 = left_k.iter().zip(y).map(|(a, b)| a * b).sum();
        gains.push(s);
        input_coords.push(xi);
        output_coords.push(yi);
        residuals.push(yi - s * xi);
        left.push(left_k);
    }

    // Orthonormal basis of the left complement by projecting canonical
    // vectors off the collected left vectors.  Candidates are pivoted:
    // each round takes the canonical vector with the most mass outside
    // the current basis (the complement can concentrate near one end of
    // the block, and a near-parallel candidate would amplify rounding
    // noise when normalised).  Two projection passes keep the result
    // orthogonal to machine precision.
    let l = rows - n;
    let mut complement: Vec<Vec<f64>> = Vec::with_capacity(l);
    let mut null_coords = Vec::with_capacity(l);
    for _ in 0..l {
        let mut best = (0usize, f64::NEG_INFINITY);
        for c in 0..rows {
            let inside: f64 = left.iter().chain(&complement).map(|b| b[c] * b[c]).sum();
            let score = 1.0 - inside;
            if score > best.1 {
                best = (c, score);
            }
        }
        let mut vec: Vec<f64> = vec![0.0; rows];
        vec[best.0] = 1.0;
        for _pass in 0..2 {
            for basis in left.iter().chain(complement.iter()) {
                let proj: f64 = basis.iter().zip(&vec).map(|(a, b)| a * b).sum();
                vec.iter_mut().zip(basis).for_each(|(vi, bi)| *vi -= proj * bi);
            }
        }
        let norm = vec.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm < 1e-8 {
            return Err(Error::DegenerateInput(
                "could not complete the left-basis complement",
            ));
        }
        vec.iter_mut().for_each(|vi| *vi /= norm);
        null_coords.push(vec.iter().zip(y).map(|(a, b)| a * b).sum());
        complement.push(vec);
    }

    Ok(ParallelDecomposition { input_coords, output_coords, gains, residuals, null_coords })
}
