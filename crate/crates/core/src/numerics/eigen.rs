//! Hermitian eigendecomposition by cyclic complex Jacobi rotations.
//!
//! Jacobi is slow for large matrices but extremely accurate and simple, and
//! every matrix this crate decomposes is tiny (antenna-count sized), so it is
//! the right tool. Only the Hermitian case is supported.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::matrix::ComplexMatrix;

/// Eigenvalues in ascending order with matching eigenvector columns.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Unitary matrix whose column `k` is the eigenvector for `values[k]`.
    pub vectors: ComplexMatrix,
}

const MAX_SWEEPS: usize = 64;

/// Decompose a Hermitian matrix as `M = V diag(values) V'`.
///
/// The input is symmetrized as `(M + M')/2` before iterating, so callers may
/// pass matrices that are Hermitian only up to rounding error; grossly
/// non-Hermitian input is a caller bug and is surfaced by the PSD wrapper
/// before it gets here.
pub fn hermitian_eigen(m: &ComplexMatrix) -> Result<HermitianEigen> {
    if !m.is_square() {
        return Err(Error::Dimension {
            context: format!("eigendecomposition needs a square matrix, got {}x{}", m.rows(), m.cols()),
        });
    }
    let n = m.rows();
    if n == 0 {
        return Ok(HermitianEigen { values: vec![], vectors: ComplexMatrix::zeros(0, 0) });
    }

    // Hermitian part, stored exactly symmetric with real diagonal.
    let mut a = ComplexMatrix::from_fn(n, n, |i, j| {
        let avg = 0.5 * (m[(i, j)] + m[(j, i)].conj());
        if i == j { Complex64::new(avg.re, 0.0) } else { avg }
    });
    let mut v = ComplexMatrix::identity(n);

    let scale = a.max_abs_entry().max(f64::MIN_POSITIVE);
    let tol = 1e-15 * scale;

    for _sweep in 0..MAX_SWEEPS {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(a[(p, q)].norm());
            }
        }
        if off <= tol {
            break;
        }

        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag <= tol * 1e-2 {
                    continue;
                }
                let phase = apq / mag;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;

                // Rotation angle zeroing the (p, q) entry: with
                // tau = (aqq - app) / (2 |apq|), pick the root of
                // t^2 - 2 tau t - 1 = 0 with |t| <= 1, written in the
                // cancellation-free form (the subtractive form loses the
                // angle entirely for near-converged entries, which then
                // desynchronizes the forced zero from the accumulated
                // eigenvectors).
                let tau = (aqq - app) / (2.0 * mag);
                let denom = tau.abs() + (1.0 + tau * tau).sqrt();
                let t = if tau >= 0.0 { -1.0 / denom } else { 1.0 / denom };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let s_phase = phase * s; // complex off-diagonal of the rotation

                // A <- U' A U with U = [[c, -s_phase], [conj(s_phase), c]]
                // acting on the (p, q) plane (row/col updates below are the
                // expanded form).
                let new_pp = app * c * c + 2.0 * s * c * mag + aqq * s * s;
                let new_qq = app * s * s - 2.0 * s * c * mag + aqq * c * c;
                a[(p, p)] = Complex64::new(new_pp, 0.0);
                a[(q, q)] = Complex64::new(new_qq, 0.0);
                a[(p, q)] = Complex64::ZERO;
                a[(q, p)] = Complex64::ZERO;

                for r in 0..n {
                    if r == p || r == q {
                        continue;
                    }
                    let arp = a[(r, p)];
                    let arq = a[(r, q)];
                    let new_rp = arp * c + arq * s_phase.conj();
                    let new_rq = -arp * s_phase + arq * c;
                    a[(r, p)] = new_rp;
                    a[(p, r)] = new_rp.conj();
                    a[(r, q)] = new_rq;
                    a[(q, r)] = new_rq.conj();
                }
                for r in 0..n {
                    let vrp = v[(r, p)];
                    let vrq = v[(r, q)];
                    v[(r, p)] = vrp * c + vrq * s_phase.conj();
                    v[(r, q)] = -vrp * s_phase + vrq * c;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.partial_cmp(&a[(j, j)].re).unwrap());

    let values: Vec<f64> = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, k| v[(r, order[k])]);

    if values.iter().any(|x| !x.is_finite()) || !vectors.is_finite() {
        return Err(Error::NonFinite { op: "hermitian_eigen" });
    }
    Ok(HermitianEigen { values, vectors })
}
