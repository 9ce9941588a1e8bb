//! Link-level Monte Carlo BER estimation.
//!
//! Trials are grouped into fixed-size chunks; chunk `c` of an SNR point
//! draws everything it needs from its own counter-based RNG stream, so the
//! trial-to-randomness mapping depends only on the master seed and the chunk
//! index, never on scheduling. Workers process whole chunks and counters are
//! merged by exact integer addition, which makes results identical for any
//! worker count. The stopping rule is evaluated between batches of chunks,
//! so the set of simulated frames is deterministic too.
//!
//! Each frame redraws the channel (slow fading, one transmission per
//! realization), matching the ensemble average the analytical bound
//! computes.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::analysis::{abep_bound, AbepBound, BoundConfig};
use crate::channel::{sample_channel, ChannelSpec};
use crate::constellation::{Constellation, SmDimensions};
use crate::error::{Error, Result};
use crate::transceiver::{ml_detect, transmit, SmFrame};

/// Frames simulated per RNG stream.
const FRAMES_PER_CHUNK: u64 = 2048;
/// Chunks between stopping-rule checks.
const CHUNKS_PER_BATCH: u64 = 32;

/// When to stop hammering one SNR point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StoppingRule {
    /// Stop once this many bit errors have been observed.
    pub min_bit_errors: u64,
    /// Hard cap on simulated frames.
    pub max_frames: u64,
}

impl Default for StoppingRule {
    fn default() -> Self {
        Self { min_bit_errors: 200, max_frames: 100_000_000 }
    }
}

impl StoppingRule {
    pub fn validate(&self) -> Result<()> {
        if self.min_bit_errors == 0 {
            return Err(Error::invalid("min_bit_errors", "must be at least 1"));
        }
        if self.max_frames == 0 {
            return Err(Error::invalid("max_frames", "must be at least 1"));
        }
        Ok(())
    }
}

/// Simulation outcome for one SNR point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimPoint {
    pub snr_db: f64,
    pub frames: u64,
    pub bit_errors: u64,
    /// `bit_errors / (frames * R)`.
    pub ber: f64,
    /// Set when the frame cap was reached without observing a single error.
    pub below_resolution: bool,
    /// Sum of squared per-frame error counts, for the standard error.
    pub frame_error_sq_sum: u64,
}

impl SimPoint {
    /// Standard error of the BER estimate from the per-frame error-count
    /// variance.
    pub fn ber_standard_error(&self, r_bits: u32) -> f64 {
        if self.frames == 0 {
            return f64::INFINITY;
        }
        let n = self.frames as f64;
        let mean = self.bit_errors as f64 / n;
        let var = (self.frame_error_sq_sum as f64 / n - mean * mean).max(0.0);
        (var / n).sqrt() / r_bits as f64
    }
}

/// BER curve: per-SNR simulation results next to the analytical bound.
#[derive(Debug, Clone)]
pub struct BerCurve {
    pub points: Vec<CurvePoint>,
}

#[derive(Debug, Clone, Copy)]
pub struct CurvePoint {
    pub snr_db: f64,
    pub bound: Option<AbepBound>,
    pub sim: Option<SimPoint>,
}

#[derive(Debug, Clone, Copy, Default)]
struct Counters {
    frames: u64,
    bit_errors: u64,
    error_sq: u64,
}

impl Counters {
    fn merge(self, other: Self) -> Self {
        Self {
            frames: self.frames + other.frames,
            bit_errors: self.bit_errors + other.bit_errors,
            error_sq: self.error_sq + other.error_sq,
        }
    }
}

/// SplitMix64 finalizer; decorrelates nearby seeds.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn point_seed(master_seed: u64, snr_db: f64) -> u64 {
    mix64(master_seed ^ mix64(snr_db.to_bits()))
}

/// Simulate every frame of one chunk. The RNG stream is indexed by the
/// chunk number; draws per frame happen in a fixed order (source bits,
/// channel, noise).
fn simulate_chunk(
    spec: &ChannelSpec,
    constellation: &Constellation,
    dims: &SmDimensions,
    rho: f64,
    seed: u64,
    chunk: u64,
    frames: u64,
) -> Counters {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    let r_bits = dims.spectral_efficiency();
    let label_mask = (1u32 << r_bits) - 1;
    let mut counters = Counters::default();
    for _ in 0..frames {
        let label = rng.random::<u32>() & label_mask;
        let frame = SmFrame::from_label(label, dims).expect("label is in range");
        let channel = sample_channel(spec, &mut rng);
        let y = transmit(&frame, &channel, constellation, rho, &mut rng);
        let (u_hat, v_hat) = ml_detect(&y, &channel, constellation, rho);
        let errors = (label ^ dims.label(u_hat, v_hat)).count_ones() as u64;
        counters.frames += 1;
        counters.bit_errors += errors;
        counters.error_sq += errors * errors;
    }
    counters
}

/// Estimate the BER at one SNR point, stopping after
/// `rule.min_bit_errors` errors or `rule.max_frames` frames, whichever
/// comes first (checked at batch granularity, so the frame count can
/// overshoot the error target by at most one batch).
pub fn simulate_point(
    spec: &ChannelSpec,
    constellation: &Constellation,
    snr_db: f64,
    rule: &StoppingRule,
    master_seed: u64,
) -> Result<SimPoint> {
    rule.validate()?;
    let dims = SmDimensions::new(spec.n_t(), constellation)?;
    let rho = 10f64.powf(snr_db / 10.0);
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::invalid("snr_db", format!("{snr_db} dB gives a non-positive SNR")));
    }
    let seed = point_seed(master_seed, snr_db);

    let mut totals = Counters::default();
    let mut next_chunk = 0u64;
    while totals.bit_errors < rule.min_bit_errors && totals.frames < rule.max_frames {
        let batch: Vec<(u64, u64)> = (0..CHUNKS_PER_BATCH)
            .map_while(|i| {
                let chunk = next_chunk + i;
                let done = totals.frames + i * FRAMES_PER_CHUNK;
                if done >= rule.max_frames {
                    return None;
                }
                let frames = FRAMES_PER_CHUNK.min(rule.max_frames - done);
                Some((chunk, frames))
            })
            .collect();
        next_chunk += batch.len() as u64;
        let merged = batch
            .into_par_iter()
            .map(|(chunk, frames)| {
                simulate_chunk(spec, constellation, &dims, rho, seed, chunk, frames)
            })
            .reduce(Counters::default, Counters::merge);
        totals = totals.merge(merged);
    }

    let r_bits = dims.spectral_efficiency();
    Ok(SimPoint {
        snr_db,
        frames: totals.frames,
        bit_errors: totals.bit_errors,
        ber: totals.bit_errors as f64 / (totals.frames as f64 * r_bits as f64),
        below_resolution: totals.bit_errors == 0 && totals.frames >= rule.max_frames,
        frame_error_sq_sum: totals.error_sq,
    })
}

/// Simulate a whole SNR grid and attach the analytical bound to every
/// point. Points run concurrently; results are assembled in grid order.
pub fn sweep(
    spec: &ChannelSpec,
    constellation: &Constellation,
    snr_grid_db: &[f64],
    rule: &StoppingRule,
    master_seed: u64,
    cfg: &BoundConfig,
) -> Result<BerCurve> {
    validate_grid(snr_grid_db)?;
    let points: Result<Vec<CurvePoint>> = snr_grid_db
        .par_iter()
        .map(|&snr_db| {
            let rho = 10f64.powf(snr_db / 10.0);
            let bound = abep_bound(spec, constellation, rho, cfg)?;
            let sim = simulate_point(spec, constellation, snr_db, rule, master_seed)?;
            Ok(CurvePoint { snr_db, bound: Some(bound), sim: Some(sim) })
        })
        .collect();
    Ok(BerCurve { points: points? })
}

pub(crate) fn validate_grid(snr_grid_db: &[f64]) -> Result<()> {
    if snr_grid_db.is_empty() {
        return Err(Error::invalid("snr_grid", "must not be empty"));
    }
    if snr_grid_db.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("snr_grid", "must be strictly ascending"));
    }
    Ok(())
}
