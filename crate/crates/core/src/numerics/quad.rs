//! Gauss-Legendre quadrature on `[0, pi/2]` and the Gaussian tail function.
//!
//! The integrands this crate cares about are smooth on the open interval and
//! may decay hard toward `theta = 0`; Gauss-Legendre nodes are interior, so
//! no endpoint handling is needed.

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use crate::error::{Error, Result};

/// Precomputed Gauss-Legendre rule mapped to `[0, pi/2]`.
#[derive(Debug, Clone)]
pub struct GaussLegendreRule {
    /// Quadrature nodes, strictly inside `(0, pi/2)`.
    nodes: Vec<f64>,
    /// Matching weights; they sum to `pi/2`.
    weights: Vec<f64>,
}

impl GaussLegendreRule {
    /// Build an `n`-node rule. Nodes are found by Newton iteration on the
    /// Legendre polynomial recurrence, accurate to machine precision for the
    /// orders used here.
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::QuadratureOrder { nodes: n });
        }
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Chebyshev-based initial guess for the i-th root of P_n.
            let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                // Evaluate P_n(z) and its derivative via the three-term
                // recurrence.
                let mut p0 = 1.0;
                let mut p1 = 0.0;
                for j in 0..n {
                    let p2 = p1;
                    p1 = p0;
                    p0 = ((2.0 * j as f64 + 1.0) * z * p1 - j as f64 * p2) / (j as f64 + 1.0);
                }
                dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
                let dz = p0 / dp;
                z -= dz;
                if dz.abs() < 1e-15 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - z * z) * dp * dp);
            // Map [-1, 1] -> [0, pi/2]; symmetric counterpart fills in from
            // the other end.
            nodes[i] = FRAC_PI_2 * 0.5 * (1.0 - z);
            nodes[n - 1 - i] = FRAC_PI_2 * 0.5 * (1.0 + z);
            weights[i] = FRAC_PI_2 * 0.5 * w;
            weights[n - 1 - i] = FRAC_PI_2 * 0.5 * w;
        }
        Ok(Self { nodes, weights })
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Integrate `f` over `[0, pi/2]`. A non-finite integrand value fails
    /// with the offending node location.
    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> Result<f64> {
        let mut acc = 0.0;
        for (&theta, &w) in self.nodes.iter().zip(&self.weights) {
            let y = f(theta);
            if !y.is_finite() {
                return Err(Error::IntegrandNotFinite { theta });
            }
            acc += w * y;
        }
        Ok(acc)
    }
}

/// One-shot Gauss-Legendre integration of `f` over `[0, pi/2]`.
pub fn gauss_legendre_integrate(f: impl FnMut(f64) -> f64, nodes: usize) -> Result<f64> {
    GaussLegendreRule::new(nodes)?.integrate(f)
}

/// Gaussian tail probability `Q(x) = 0.5 erfc(x / sqrt(2))`.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / SQRT_2)
}
