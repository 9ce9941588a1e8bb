//! Correlated Rician MIMO channel: correlation matrix construction and
//! per-frame sampling.
//!
//! The channel matrix is composed as
//!
//! ```text
//! H = sqrt(K / (K+1)) * ones + sqrt(1 / (K+1)) * R^(1/2) G T^(T/2)
//! ```
//!
//! where `G` has i.i.d. circular complex Gaussian entries of unit variance,
//! `R` and `T` are the receive/transmit correlation matrices and the fixed
//! component is the all-one matrix. `K = 0` reduces to correlated Rayleigh
//! fading; identity correlation reduces to the uncorrelated case.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};
use crate::numerics::{hermitian_sqrt, kronecker, ComplexMatrix, HermitianPsdMatrix};

/// Immutable channel description shared by analysis and simulation.
#[derive(Debug, Clone)]
pub struct ChannelSpec {
    n_t: usize,
    n_r: usize,
    k_factor: f64,
    sigma_t: HermitianPsdMatrix,
    sigma_r: HermitianPsdMatrix,
    /// `R^(1/2)`, precomputed.
    sqrt_sigma_r: ComplexMatrix,
    /// `(T^(1/2))^T`, precomputed. With real symmetric correlation matrices
    /// the transpose is immaterial, but the stored factor pins down the
    /// interpretation.
    sqrt_sigma_t_t: ComplexMatrix,
    /// Both correlation matrices are exactly the identity.
    uncorrelated: bool,
    fixed_gain: f64,
    variable_gain: f64,
}

impl ChannelSpec {
    pub fn new(
        n_t: usize,
        n_r: usize,
        k_factor: f64,
        sigma_t: HermitianPsdMatrix,
        sigma_r: HermitianPsdMatrix,
    ) -> Result<Self> {
        if n_t == 0 || n_r == 0 {
            return Err(Error::invalid("dimensions", "antenna counts must be positive"));
        }
        if !(k_factor >= 0.0 && k_factor.is_finite()) {
            return Err(Error::invalid("k_factor", format!("{k_factor} must be finite and >= 0")));
        }
        if sigma_t.dim() != n_t {
            return Err(Error::Dimension {
                context: format!("sigma_t is {0}x{0} but n_t = {n_t}", sigma_t.dim()),
            });
        }
        if sigma_r.dim() != n_r {
            return Err(Error::Dimension {
                context: format!("sigma_r is {0}x{0} but n_r = {n_r}", sigma_r.dim()),
            });
        }
        for (name, m) in [("sigma_t", &sigma_t), ("sigma_r", &sigma_r)] {
            for i in 0..m.dim() {
                let d = m.as_matrix()[(i, i)];
                if (d - Complex64::ONE).norm() > 1e-12 {
                    return Err(Error::invalid(
                        name,
                        format!("diagonal entry {i} is {d}, expected 1 (unit per-branch variance)"),
                    ));
                }
            }
        }
        let sqrt_sigma_r = hermitian_sqrt(&sigma_r)?;
        let sqrt_sigma_t_t = hermitian_sqrt(&sigma_t)?.transpose();
        let uncorrelated = sigma_t.is_identity() && sigma_r.is_identity();
        Ok(Self {
            n_t,
            n_r,
            k_factor,
            sigma_t,
            sigma_r,
            sqrt_sigma_r,
            sqrt_sigma_t_t,
            uncorrelated,
            fixed_gain: (k_factor / (k_factor + 1.0)).sqrt(),
            variable_gain: (1.0 / (k_factor + 1.0)).sqrt(),
        })
    }

    /// Uncorrelated Rician spec (identity correlation on both sides).
    pub fn uncorrelated(n_t: usize, n_r: usize, k_factor: f64) -> Result<Self> {
        Self::new(
            n_t,
            n_r,
            k_factor,
            HermitianPsdMatrix::identity(n_t),
            HermitianPsdMatrix::identity(n_r),
        )
    }

    pub fn n_t(&self) -> usize {
        self.n_t
    }

    pub fn n_r(&self) -> usize {
        self.n_r
    }

    /// Rician factor, linear scale.
    pub fn k_factor(&self) -> f64 {
        self.k_factor
    }

    pub fn sigma_t(&self) -> &HermitianPsdMatrix {
        &self.sigma_t
    }

    pub fn sigma_r(&self) -> &HermitianPsdMatrix {
        &self.sigma_r
    }

    /// Transmit correlation coefficient between antennas `u` and `u_hat`.
    pub fn transmit_correlation(&self, u: usize, u_hat: usize) -> Complex64 {
        self.sigma_t.as_matrix()[(u, u_hat)]
    }
}

/// One draw of the channel matrix (`n_r x n_t`).
#[derive(Debug, Clone)]
pub struct ChannelRealization {
    pub matrix: ComplexMatrix,
}

impl ChannelRealization {
    pub fn column(&self, u: usize) -> Vec<Complex64> {
        self.matrix.column(u)
    }
}

/// Exponential correlation profile: entry `(u, v) = gamma^|u - v|`.
///
/// Only real coefficients are accepted; the resulting matrix is symmetric
/// PSD with unit diagonal for any `|gamma| < 1`.
pub fn exponential_correlation(size: usize, gamma: f64) -> Result<HermitianPsdMatrix> {
    if !(gamma.is_finite() && gamma.abs() < 1.0) {
        return Err(Error::invalid(
            "gamma",
            format!("{gamma} must satisfy |gamma| < 1 (real coefficient)"),
        ));
    }
    let m = ComplexMatrix::from_fn(size, size, |u, v| {
        Complex64::new(gamma.powi((u as i32 - v as i32).abs()), 0.0)
    });
    HermitianPsdMatrix::new(m)
}

/// One sample of a circular complex Gaussian with unit variance
/// (`CN(0, 1)`: real and imaginary parts each `N(0, 1/2)`).
#[inline]
fn sample_cn01<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re * FRAC_1_SQRT_2, im * FRAC_1_SQRT_2)
}

/// Draw one channel realization. The i.i.d. core matrix is filled row-major
/// (real part then imaginary part per entry), which fixes the RNG draw order
/// for reproducibility.
pub fn sample_channel<R: Rng + ?Sized>(spec: &ChannelSpec, rng: &mut R) -> ChannelRealization {
    let (n_r, n_t) = (spec.n_r, spec.n_t);
    let mut iid = ComplexMatrix::zeros(n_r, n_t);
    for r in 0..n_r {
        for t in 0..n_t {
            iid[(r, t)] = sample_cn01(rng);
        }
    }
    let variable = if spec.uncorrelated {
        iid
    } else {
        spec.sqrt_sigma_r.mul(&iid).mul(&spec.sqrt_sigma_t_t)
    };
    let matrix = ComplexMatrix::from_fn(n_r, n_t, |r, t| {
        Complex64::new(spec.fixed_gain, 0.0) + spec.variable_gain * variable[(r, t)]
    });
    ChannelRealization { matrix }
}

/// Result of the properness diagnostic: the empirical pseudo-covariance of
/// `vec(H)` must vanish for the sampler to produce proper complex Gaussians.
#[derive(Debug, Clone)]
pub struct PropernessReport {
    pub draws: usize,
    pub max_abs_pseudo_covariance: f64,
    pub threshold: f64,
    pub pass: bool,
}

/// Estimate the pseudo-covariance `E[(h - m)(h - m)^T]` of `vec(H)` over
/// `draws` channel samples and gate its largest entry at `5 / sqrt(draws)`.
pub fn validate_properness<R: Rng + ?Sized>(
    spec: &ChannelSpec,
    draws: usize,
    rng: &mut R,
) -> Result<PropernessReport> {
    if draws < 10_000 {
        return Err(Error::invalid("draws", format!("{draws} < 10000 gives a meaningless gate")));
    }
    let report = pseudo_covariance_gate(spec.n_r * spec.n_t, draws, || {
        vec_of(&sample_channel(spec, rng).matrix)
    });
    Ok(report)
}

/// Column-stacked vectorization.
fn vec_of(m: &ComplexMatrix) -> Vec<Complex64> {
    let mut v = Vec::with_capacity(m.rows() * m.cols());
    for c in 0..m.cols() {
        for r in 0..m.rows() {
            v.push(m[(r, c)]);
        }
    }
    v
}

/// Shared statistic: accumulate E[h h^T] and E[h], then gate the centered
/// pseudo-covariance. Split out so tests can feed deliberately broken
/// samplers through the same gate.
fn pseudo_covariance_gate(
    dim: usize,
    draws: usize,
    mut sampler: impl FnMut() -> Vec<Complex64>,
) -> PropernessReport {
    let mut mean = vec![Complex64::ZERO; dim];
    let mut outer = vec![Complex64::ZERO; dim * dim];
    for _ in 0..draws {
        let h = sampler();
        debug_assert_eq!(h.len(), dim);
        for i in 0..dim {
            mean[i] += h[i];
            for j in 0..dim {
                // Plain transpose, no conjugation: pseudo-covariance.
                outer[i * dim + j] += h[i] * h[j];
            }
        }
    }
    let n = draws as f64;
    let mut max_abs = 0.0f64;
    for i in 0..dim {
        for j in 0..dim {
            let pc = outer[i * dim + j] / n - (mean[i] / n) * (mean[j] / n);
            max_abs = max_abs.max(pc.norm());
        }
    }
    let threshold = 5.0 / n.sqrt();
    PropernessReport {
        draws,
        max_abs_pseudo_covariance: max_abs,
        threshold,
        pass: max_abs <= threshold,
    }
}

/// Empirical covariance `E[(h - m)(h - m)']` of `vec(H)` (conjugate
/// transpose). For the model above it converges to
/// `kron(sigma_t, sigma_r) / (K + 1)`.
pub fn empirical_vec_covariance<R: Rng + ?Sized>(
    spec: &ChannelSpec,
    draws: usize,
    rng: &mut R,
) -> ComplexMatrix {
    let dim = spec.n_r * spec.n_t;
    let mut mean = vec![Complex64::ZERO; dim];
    let mut outer = ComplexMatrix::zeros(dim, dim);
    for _ in 0..draws {
        let h = vec_of(&sample_channel(spec, rng).matrix);
        for i in 0..dim {
            mean[i] += h[i];
            for j in 0..dim {
                outer[(i, j)] += h[i] * h[j].conj();
            }
        }
    }
    let n = Complex64::new(draws as f64, 0.0);
    ComplexMatrix::from_fn(dim, dim, |i, j| outer[(i, j)] / n - (mean[i] / n) * (mean[j] / n).conj())
}

/// The covariance `empirical_vec_covariance` should converge to.
pub fn expected_vec_covariance(spec: &ChannelSpec) -> ComplexMatrix {
    kronecker(spec.sigma_t().as_matrix(), spec.sigma_r().as_matrix())
        .scale(Complex64::new(1.0 / (spec.k_factor() + 1.0), 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn exponential_correlation_known_entries() {
        let id = exponential_correlation(4, 0.0).unwrap();
        assert!(id.is_identity());

        let c = exponential_correlation(4, 0.8).unwrap();
        assert!((c.as_matrix()[(0, 3)].re - 0.512).abs() < 1e-15);
        assert!((c.as_matrix()[(3, 0)].re - 0.512).abs() < 1e-15);

        let two = exponential_correlation(2, 0.5).unwrap();
        let eig = crate::numerics::hermitian_eigen(two.as_matrix()).unwrap();
        assert!((eig.values[0] - 0.5).abs() < 1e-13);
        assert!((eig.values[1] - 1.5).abs() < 1e-13);

        assert!(exponential_correlation(4, 1.0).is_err());
        assert!(exponential_correlation(4, -1.2).is_err());
    }

    #[test]
    fn spec_rejects_bad_diagonal() {
        let bad = HermitianPsdMatrix::new(ComplexMatrix::from_real_rows(&[
            &[2.0, 0.0],
            &[0.0, 2.0],
        ]))
        .unwrap();
        let err = ChannelSpec::new(2, 2, 0.0, bad, HermitianPsdMatrix::identity(2));
        assert!(matches!(err, Err(Error::InvalidParameter { .. })));
    }

    #[test]
    fn large_k_pins_channel_to_fixed_component() {
        let spec = ChannelSpec::uncorrelated(4, 4, 1e12).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let h = sample_channel(&spec, &mut rng);
            let dev = h.matrix.max_abs_diff(&ComplexMatrix::ones(4, 4));
            assert!(dev < 1e-5, "deviation {dev}");
        }
    }

    #[test]
    fn rayleigh_mean_and_rician_mean() {
        let k = 5.0;
        let spec = ChannelSpec::uncorrelated(2, 2, k).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let draws = 100_000;
        let mut acc = ComplexMatrix::zeros(2, 2);
        for _ in 0..draws {
            let h = sample_channel(&spec, &mut rng);
            acc = acc.add(&h.matrix);
        }
        let mean = acc.scale(Complex64::new(1.0 / draws as f64, 0.0));
        let want = (k / (k + 1.0)).sqrt();
        let gate = 5.0 / (draws as f64).sqrt();
        for r in 0..2 {
            for t in 0..2 {
                assert!((mean[(r, t)] - Complex64::new(want, 0.0)).norm() < gate);
            }
        }
    }

    #[test]
    fn uncorrelated_vec_covariance_is_identity() {
        let spec = ChannelSpec::uncorrelated(4, 4, 0.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let cov = empirical_vec_covariance(&spec, 100_000, &mut rng);
        let dev = cov.max_abs_diff(&ComplexMatrix::identity(16));
        assert!(dev < 0.02, "max entry error {dev}");
    }

    #[test]
    fn correlated_vec_covariance_matches_kronecker() {
        let sigma_t = exponential_correlation(4, 0.8).unwrap();
        let sigma_r = exponential_correlation(4, 0.5).unwrap();
        let spec = ChannelSpec::new(4, 4, 0.0, sigma_t, sigma_r).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let cov = empirical_vec_covariance(&spec, 100_000, &mut rng);
        let dev = cov.max_abs_diff(&expected_vec_covariance(&spec));
        assert!(dev < 0.02, "max entry error {dev}");
    }

    #[test]
    fn properness_gate_passes_for_valid_samplers() {
        let spec = ChannelSpec::uncorrelated(4, 4, 0.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let report = validate_properness(&spec, 100_000, &mut rng).unwrap();
        assert!(report.pass, "max pseudo-covariance {}", report.max_abs_pseudo_covariance);
        assert!(report.max_abs_pseudo_covariance < 0.016);

        // Correlated Rician: properness is mean-independent.
        let sigma_t = exponential_correlation(4, 0.8).unwrap();
        let sigma_r = exponential_correlation(4, 0.8).unwrap();
        let spec = ChannelSpec::new(4, 4, 5.0, sigma_t, sigma_r).unwrap();
        let report = validate_properness(&spec, 100_000, &mut rng).unwrap();
        assert!(report.pass, "max pseudo-covariance {}", report.max_abs_pseudo_covariance);
    }

    #[test]
    fn properness_gate_fails_for_broken_sampler() {
        // Imaginary part drawn with variance 1 instead of 1/2: the
        // pseudo-covariance diagonal sits near -0.5.
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let report = pseudo_covariance_gate(4, 50_000, || {
            (0..4)
                .map(|_| {
                    let re: f64 = StandardNormal.sample(&mut rng);
                    let im: f64 = StandardNormal.sample(&mut rng);
                    Complex64::new(re * FRAC_1_SQRT_2, im)
                })
                .collect()
        });
        assert!(!report.pass);
        assert!(report.max_abs_pseudo_covariance > 0.3);
    }

    #[test]
    fn rejects_tiny_draw_counts() {
        let spec = ChannelSpec::uncorrelated(2, 2, 0.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(validate_properness(&spec, 100, &mut rng).is_err());
    }
}
