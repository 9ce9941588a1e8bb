//! Spatial-modulation transmit path and joint maximum-likelihood detection.
//!
//! One transmission activates a single antenna: the transmit vector has
//! exactly one nonzero entry, so the received mean is `sqrt(rho) * h_u * X_v`
//! plus unit-variance complex Gaussian noise per receive branch. Detection
//! minimizes `sqrt(rho) ||h_u X_v||^2 - 2 Re{y' h_u X_v}` over all
//! `n_t * M` hypotheses, which has the same argmin as the Euclidean metric.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use std::f64::consts::FRAC_1_SQRT_2;

use crate::channel::ChannelRealization;
use crate::constellation::{merge_bits, Constellation, SmDimensions};
use crate::error::Result;

/// One spatial-modulation transmission: antenna index, symbol index and the
/// source bit label they encode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SmFrame {
    antenna_index: usize,
    symbol_index: usize,
    label: u32,
}

impl SmFrame {
    pub fn new(antenna_index: usize, symbol_index: usize, dims: &SmDimensions) -> Result<Self> {
        // merge_bits performs the range checks.
        merge_bits(antenna_index, symbol_index, dims)?;
        Ok(Self {
            antenna_index,
            symbol_index,
            label: dims.label(antenna_index, symbol_index),
        })
    }

    /// Decode a frame from an R-bit natural-binary word (antenna bits on the
    /// MSB side).
    pub fn from_label(label: u32, dims: &SmDimensions) -> Result<Self> {
        let antenna = (label >> dims.symbol_bits()) as usize;
        let symbol = (label & ((1u32 << dims.symbol_bits()) - 1)) as usize;
        Self::new(antenna, symbol, dims)
    }

    pub fn antenna_index(&self) -> usize {
        self.antenna_index
    }

    pub fn symbol_index(&self) -> usize {
        self.symbol_index
    }

    pub fn label(&self) -> u32 {
        self.label
    }

    /// The R source bits, MSB first.
    pub fn bits(&self, dims: &SmDimensions) -> Vec<u8> {
        let r = dims.spectral_efficiency();
        (0..r).rev().map(|i| ((self.label >> i) & 1) as u8).collect()
    }
}

/// Received signal vector, one sample per receive branch.
#[derive(Debug, Clone)]
pub struct ReceivedVector {
    pub samples: Vec<Complex64>,
}

/// Noise-free received mean `sqrt(rho) * h_u * X_v`.
pub fn noiseless_received(
    frame: &SmFrame,
    channel: &ChannelRealization,
    constellation: &Constellation,
    rho: f64,
) -> ReceivedVector {
    assert!(rho > 0.0, "rho must be positive");
    let gain = rho.sqrt() * constellation.symbol(frame.symbol_index());
    let samples = (0..channel.matrix.rows())
        .map(|r| gain * channel.matrix[(r, frame.antenna_index())])
        .collect();
    ReceivedVector { samples }
}

/// Transmit a frame: received mean plus i.i.d. `CN(0, 1)` noise per branch.
pub fn transmit<R: Rng + ?Sized>(
    frame: &SmFrame,
    channel: &ChannelRealization,
    constellation: &Constellation,
    rho: f64,
    rng: &mut R,
) -> ReceivedVector {
    let mut y = noiseless_received(frame, channel, constellation, rho);
    for s in &mut y.samples {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        *s += Complex64::new(re * FRAC_1_SQRT_2, im * FRAC_1_SQRT_2);
    }
    y
}

/// Joint ML detection over all `(antenna, symbol)` hypotheses.
///
/// Ties (probability zero, but reachable in degenerate configurations such
/// as fully correlated antennas) break to the lowest antenna index, then the
/// lowest symbol index.
pub fn ml_detect(
    y: &ReceivedVector,
    channel: &ChannelRealization,
    constellation: &Constellation,
    rho: f64,
) -> (usize, usize) {
    assert!(rho > 0.0, "rho must be positive");
    let sqrt_rho = rho.sqrt();
    let n_r = channel.matrix.rows();
    let n_t = channel.matrix.cols();
    let mut best = (0usize, 0usize);
    let mut best_metric = f64::INFINITY;
    for u in 0..n_t {
        // Per-antenna reductions: column energy and y' h_u.
        let mut energy = 0.0f64;
        let mut proj = Complex64::ZERO;
        for r in 0..n_r {
            let h = channel.matrix[(r, u)];
            energy += h.norm_sqr();
            proj += y.samples[r].conj() * h;
        }
        for (v, &x) in constellation.symbols().iter().enumerate() {
            let metric = sqrt_rho * x.norm_sqr() * energy - 2.0 * (proj * x).re;
            if metric < best_metric {
                best_metric = metric;
                best = (u, v);
            }
        }
    }
    best
}
