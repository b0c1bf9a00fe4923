//! Blind detection and error-exponent tools for discrete-time linear
//! Gaussian channels with intersymbol interference (ISI).
//!
//! The crate is organised around a single physical model: a real input
//! sequence is convolved with an unknown finite impulse response and
//! corrupted by additive white Gaussian noise of unknown variance.  On top
//! of that model it provides
//!
//! * spectral quantities of a tap vector — autocorrelation, spectral
//!   density, mutual information rate and its finite-block counterpart
//!   ([`spectral`]);
//! * Gaussian codebooks and channel simulation with reproducible,
//!   stream-keyed randomness ([`channel`], [`streams`]);
//! * a blind joint estimator of the impulse response and noise variance
//!   over a quantised parameter lattice ([`grid`]);
//! * a blind decoder that ranks candidate messages by the mutual
//!   information of their estimated channels, plus an informed
//!   maximum-likelihood baseline ([`decoder`]);
//! * random-coding error exponents for the blind decoder and the
//!   classical informed bound, with sweep utilities ([`exponents`]);
//! * the banded Toeplitz convolution operator, its singular value
//!   spectrum, and diagonalised ("parallel channel") coordinates
//!   ([`toeplitz`]).
//!
//! All information quantities are in nats.  Noise is always parameterised
//! by its variance, never its standard deviation.
//!
//! # Example
//!
//! ```
//! use isidec::spectral::{ChannelParams, IsiVector, mutual_information};
//!
//! let h = IsiVector::new(vec![1.0, 0.5]).unwrap();
//! let params = ChannelParams::new(h, 1.0).unwrap();
//! let rate = mutual_information(&params);
//! assert!(rate > 0.0);
//! ```

pub mod channel;
pub mod decoder;
mod eigen;
pub mod error;
pub mod exponents;
pub mod grid;
mod quad;
pub mod spectral;
pub mod streams;
pub mod toeplitz;

pub use error::{Error, Result};
