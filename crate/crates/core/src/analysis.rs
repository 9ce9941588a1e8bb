//! Analytical error bounds for spatial modulation.
//!
//! The pairwise error vector between two (antenna, symbol) hypotheses is a
//! proper complex Gaussian, so its tail average has a one-dimensional
//! integral form. With scaled statistics `m` (mean) and `S` (covariance),
//! the average pairwise error probability is
//!
//! ```text
//! P(u, u_hat, v, v_hat) = (1/pi) * int_0^(pi/2)
//!     exp(-m' [S + sin^2(t) I]^(-1) m) / det(S / sin^2(t) + I) dt
//! ```
//!
//! and the average bit error probability is union-bounded by the
//! Hamming-weighted sum of these terms over all ordered hypothesis pairs.
//! Space-shift keying is the single-symbol special case.

use num_complex::Complex64;
use std::collections::HashMap;
use std::f64::consts::PI;

use crate::channel::ChannelSpec;
use crate::constellation::{Constellation, SmDimensions};
use crate::error::{Error, Result};
use crate::numerics::{
    det, inner_product, solve_hermitian, GaussLegendreRule, HermitianPsdMatrix,
};

/// Brackets this close to zero from below are treated as rounding noise and
/// clamped; anything lower means the transmit correlation matrix is broken.
const BRACKET_TOL: f64 = 1e-12;

/// Union-bound normalization variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrefactorMode {
    /// Average pairwise terms over `n_t * M - 1` competing hypotheses.
    Paper,
    /// Average over all `n_t * M` hypotheses (uniform prior).
    Conventional,
}

impl PrefactorMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            PrefactorMode::Paper => "paper",
            PrefactorMode::Conventional => "conventional",
        }
    }
}

impl std::str::FromStr for PrefactorMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(PrefactorMode::Paper),
            "conventional" => Ok(PrefactorMode::Conventional),
            other => Err(Error::invalid(
                "prefactor",
                format!("`{other}` is not one of: paper, conventional"),
            )),
        }
    }
}

/// Knobs for the analytical bound.
#[derive(Debug, Clone, Copy)]
pub struct BoundConfig {
    pub quad_nodes: usize,
    pub prefactor: PrefactorMode,
}

impl Default for BoundConfig {
    fn default() -> Self {
        Self { quad_nodes: 64, prefactor: PrefactorMode::Paper }
    }
}

impl BoundConfig {
    fn rule(&self) -> Result<GaussLegendreRule> {
        if self.quad_nodes < 8 {
            return Err(Error::invalid(
                "quad_nodes",
                format!("{} is below the minimum of 8", self.quad_nodes),
            ));
        }
        GaussLegendreRule::new(self.quad_nodes)
    }
}

/// Scaled statistics of the pairwise error vector: mean `m`, covariance `S`
/// (always a nonnegative real scalar times the receive correlation matrix),
/// and a flag for the fully degenerate case `m = 0, S = 0` where the two
/// hypotheses produce identical received signals.
#[derive(Debug, Clone)]
pub struct PepStatistics {
    mean: Vec<Complex64>,
    covariance: HermitianPsdMatrix,
    degenerate: bool,
    bracket_clamped: bool,
}

impl PepStatistics {
    /// Assemble statistics directly from a mean vector and covariance
    /// matrix. Used by validation code that checks the quadrature against
    /// closed forms; normal callers go through [`pep_statistics`].
    pub fn from_parts(mean: Vec<Complex64>, covariance: HermitianPsdMatrix) -> Result<Self> {
        if mean.len() != covariance.dim() {
            return Err(Error::Dimension {
                context: format!(
                    "mean has length {} but covariance is {1}x{1}",
                    mean.len(),
                    covariance.dim()
                ),
            });
        }
        let mean_zero = mean.iter().all(|z| *z == Complex64::ZERO);
        let cov_zero = covariance.as_matrix().max_abs_entry() == 0.0;
        Ok(Self {
            mean,
            covariance,
            degenerate: mean_zero && cov_zero,
            bracket_clamped: false,
        })
    }

    pub fn mean(&self) -> &[Complex64] {
        &self.mean
    }

    pub fn covariance(&self) -> &HermitianPsdMatrix {
        &self.covariance
    }

    pub fn degenerate(&self) -> bool {
        self.degenerate
    }

    /// True when the covariance bracket was within rounding error below zero
    /// and got clamped.
    pub fn bracket_clamped(&self) -> bool {
        self.bracket_clamped
    }
}

/// `|X_v|^2 + |X_vh|^2 - 2 Re{sigma X_v conj(X_vh)}`, the scalar that turns
/// the receive correlation matrix into the error-vector covariance. It is
/// nonnegative whenever `sigma` comes from a valid correlation matrix
/// (|sigma| <= 1 by Cauchy-Schwarz).
fn correlation_bracket(x_v: Complex64, x_vh: Complex64, sigma: Complex64) -> Result<(f64, bool)> {
    let raw = x_v.norm_sqr() + x_vh.norm_sqr() - 2.0 * (sigma * x_v * x_vh.conj()).re;
    if raw < -BRACKET_TOL {
        return Err(Error::NegativeBracket { value: raw });
    }
    if raw < 0.0 {
        Ok((0.0, true))
    } else {
        Ok((raw, false))
    }
}

/// Statistics of the scaled pairwise error vector for hypotheses
/// `(u, v)` vs `(u_hat, v_hat)` at linear SNR `rho`.
///
/// The fixed channel component is identical on every receive branch, so the
/// mean is a scalar times the all-one vector:
/// `m = sqrt(rho K / (4 (K+1))) (X_v - X_vh) * ones`, and the covariance is
/// `S = rho / (4 (K+1)) * bracket * sigma_r`.
pub fn pep_statistics(
    u: usize,
    u_hat: usize,
    v: usize,
    v_hat: usize,
    spec: &ChannelSpec,
    constellation: &Constellation,
    rho: f64,
) -> Result<PepStatistics> {
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::invalid("rho", format!("{rho} must be finite and positive")));
    }
    for (what, value, bound) in [
        ("antenna", u, spec.n_t()),
        ("antenna", u_hat, spec.n_t()),
        ("symbol", v, constellation.size()),
        ("symbol", v_hat, constellation.size()),
    ] {
        if value >= bound {
            return Err(Error::IndexOutOfRange { what, value, bound });
        }
    }
    let k = spec.k_factor();
    let x_v = constellation.symbol(v);
    let x_vh = constellation.symbol(v_hat);
    let sigma = spec.transmit_correlation(u, u_hat);

    let (bracket, bracket_clamped) = correlation_bracket(x_v, x_vh, sigma)?;
    let cov_scale = rho / (4.0 * (k + 1.0)) * bracket;
    let covariance = spec.sigma_r().scaled(cov_scale);

    let mean_scale = (rho * k / (4.0 * (k + 1.0))).sqrt();
    let mean_value = mean_scale * (x_v - x_vh);
    let mean = vec![mean_value; spec.n_r()];

    let degenerate = bracket == 0.0 && mean_value == Complex64::ZERO;
    Ok(PepStatistics { mean, covariance, degenerate, bracket_clamped })
}

/// Average pairwise error probability by Gauss-Legendre quadrature of the
/// integral form. Degenerate statistics (identical signal points) give
/// exactly 1/2.
pub fn apep(stats: &PepStatistics, cfg: &BoundConfig) -> Result<f64> {
    let rule = cfg.rule()?;
    apep_with_rule(stats, &rule)
}

fn apep_with_rule(stats: &PepStatistics, rule: &GaussLegendreRule) -> Result<f64> {
    if stats.degenerate {
        return Ok(0.5);
    }
    let n_r = stats.covariance.dim();
    let mean_zero = stats.mean.iter().all(|z| *z == Complex64::ZERO);
    let integral = rule.integrate(|theta| {
        let s2 = theta.sin().powi(2);
        let quad_form = if mean_zero {
            0.0
        } else {
            let shifted = stats.covariance.add_scaled_identity(s2);
            match solve_hermitian(&shifted, &stats.mean) {
                Ok(x) => inner_product(&stats.mean, &x).re,
                Err(_) => return f64::NAN,
            }
        };
        let mut ratio = stats
            .covariance
            .as_matrix()
            .scale(Complex64::new(1.0 / s2, 0.0));
        for i in 0..n_r {
            ratio[(i, i)] += Complex64::ONE;
        }
        match det(&ratio) {
            Ok(d) => (-quad_form).exp() / d.re,
            Err(_) => f64::NAN,
        }
    })?;
    Ok((integral / PI).clamp(0.0, 0.5))
}

/// Union bound on the average bit error probability: raw value and the
/// reporting value clipped to 1/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbepBound {
    pub raw: f64,
    pub clipped: f64,
}

fn assemble(sum: f64, hypotheses: usize, r_bits: u32, mode: PrefactorMode) -> AbepBound {
    let denom = match mode {
        PrefactorMode::Paper => (hypotheses - 1) as f64,
        PrefactorMode::Conventional => hypotheses as f64,
    };
    let raw = sum / (r_bits as f64 * denom);
    AbepBound { raw, clipped: raw.min(0.5) }
}

/// Union bound over all ordered (antenna, symbol) hypothesis pairs.
///
/// The pairwise term depends on the pair only through the transmit
/// correlation coefficient and the two symbols, so evaluations are memoized
/// on that key. Enumeration order is fixed, which keeps the floating-point
/// sum reproducible.
pub fn abep_bound(
    spec: &ChannelSpec,
    constellation: &Constellation,
    rho: f64,
    cfg: &BoundConfig,
) -> Result<AbepBound> {
    let dims = SmDimensions::new(spec.n_t(), constellation)?;
    let rule = cfg.rule()?;
    let m = constellation.size();
    let mut cache: HashMap<(u64, u64, usize, usize), f64> = HashMap::new();
    let mut sum = 0.0f64;
    for u in 0..spec.n_t() {
        for u_hat in 0..spec.n_t() {
            let sigma = spec.transmit_correlation(u, u_hat);
            let key_sigma = (sigma.re.to_bits(), sigma.im.to_bits());
            for v in 0..m {
                for v_hat in 0..m {
                    let bits = (dims.label(u, v) ^ dims.label(u_hat, v_hat)).count_ones();
                    if bits == 0 {
                        continue;
                    }
                    let p = match cache.entry((key_sigma.0, key_sigma.1, v, v_hat)) {
                        std::collections::hash_map::Entry::Occupied(e) => *e.get(),
                        std::collections::hash_map::Entry::Vacant(slot) => {
                            let stats =
                                pep_statistics(u, u_hat, v, v_hat, spec, constellation, rho)?;
                            let p = apep_with_rule(&stats, &rule)?;
                            *slot.insert(p)
                        }
                    };
                    sum += bits as f64 * p;
                }
            }
        }
    }
    Ok(assemble(sum, dims.hypothesis_count(), dims.spectral_efficiency(), cfg.prefactor))
}

/// Space-shift-keying bound: the single-symbol case where all information
/// rides on the antenna index. Matches [`abep_bound`] with the unit
/// constellation bit for bit (at `M = 1` the hypothesis counts coincide).
pub fn ssk_abep_bound(spec: &ChannelSpec, rho: f64, cfg: &BoundConfig) -> Result<AbepBound> {
    if spec.n_t() < 2 {
        return Err(Error::invalid("n_t", "space-shift keying needs at least 2 transmit antennas"));
    }
    let constellation = Constellation::ssk();
    let dims = SmDimensions::new(spec.n_t(), &constellation)?;
    let rule = cfg.rule()?;
    let mut sum = 0.0f64;
    for u in 0..spec.n_t() {
        for u_hat in 0..spec.n_t() {
            let bits = (dims.label(u, 0) ^ dims.label(u_hat, 0)).count_ones();
            if bits == 0 {
                continue;
            }
            let stats = pep_statistics(u, u_hat, 0, 0, spec, &constellation, rho)?;
            let p = apep_with_rule(&stats, &rule)?;
            sum += bits as f64 * p;
        }
    }
    Ok(assemble(sum, dims.hypothesis_count(), dims.spectral_efficiency(), cfg.prefactor))
}
