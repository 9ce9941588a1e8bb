//! Exact union bounds and Monte Carlo validation for the bit error rate of
//! spatial-modulation (SM) and space-shift-keying (SSK) MIMO systems over
//! correlated and uncorrelated Rayleigh/Rician fading.
//!
//! The analytical path computes the average pairwise error probability of
//! every (antenna, symbol) hypothesis pair from the proper-complex-Gaussian
//! statistics of the error vector, evaluates it by Gauss-Legendre quadrature
//! of a single finite integral, and assembles the Hamming-weighted union
//! bound. The simulation path is a straightforward link-level loop (random
//! bits, correlated Rician channel draw, AWGN, joint ML detection) with
//! reproducible, parallelism-invariant RNG streams.
//!
//! Modules mirror the processing chain:
//!
//! * [`numerics`] - complex matrices, Hermitian eigen/sqrt/solve, quadrature.
//! * [`constellation`] - modulation alphabets and bit-label arithmetic.
//! * [`channel`] - correlation models and channel sampling.
//! * [`transceiver`] - SM transmit path and ML detection.
//! * [`analysis`] - pairwise error statistics and the union bound.
//! * [`montecarlo`] - BER estimation with stopping rules.
//! * [`cli`] - config files, presets, orchestration and CSV output.

pub mod analysis;
pub mod channel;
pub mod cli;
pub mod constellation;
pub mod error;
pub mod montecarlo;
pub mod numerics;
pub mod transceiver;

pub use error::{Error, Result};
