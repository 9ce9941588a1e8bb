//! Dense complex matrices sized for antenna arrays, not for HPC.
//!
//! Everything here is row-major `Vec<Complex64>` storage with O(n^3)
//! textbook algorithms; the matrices in this crate are at most a few
//! dozen entries per side.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::eigen::hermitian_eigen;

/// Hermiticity tolerance for [`HermitianPsdMatrix`] construction (max
/// absolute entry difference between `M` and its conjugate transpose).
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Eigenvalues in `[-PSD_CLAMP_TOL, 0)` are treated as numerical noise and
/// clamped to zero; anything below fails the PSD check.
pub const PSD_CLAMP_TOL: f64 = 1e-10;

/// Minimum eigenvalue for a matrix to count as invertible in
/// [`solve_hermitian`].
pub const SINGULARITY_TOL: f64 = 1e-14;

/// Dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::ONE;
        }
        m
    }

    /// Matrix with every entry equal to one.
    pub fn ones(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::ONE; rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    /// Build from nested rows of real values (test and fixture helper).
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self::from_fn(r, c, |i, j| Complex64::new(rows[i][j], 0.0))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == Complex64::ZERO {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len(), "vector length mismatch");
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    pub fn column(&self, c: usize) -> Vec<Complex64> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Max absolute entry of `M - M'` (deviation from Hermitian symmetry).
    pub fn hermitian_defect(&self) -> f64 {
        assert!(self.is_square(), "hermitian_defect needs a square matrix");
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

/// A square complex matrix validated to be Hermitian positive semidefinite.
///
/// Construction via [`HermitianPsdMatrix::new`] checks Hermitian symmetry to
/// [`HERMITIAN_TOL`] and runs a full eigendecomposition to reject matrices
/// with an eigenvalue below `-PSD_CLAMP_TOL`. Operations that preserve the
/// invariant structurally (nonnegative scaling, adding a nonnegative multiple
/// of the identity) skip revalidation.
#[derive(Debug, Clone)]
pub struct HermitianPsdMatrix {
    inner: ComplexMatrix,
}

impl HermitianPsdMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Dimension {
                context: format!("Hermitian matrix must be square, got {}x{}", m.rows(), m.cols()),
            });
        }
        if !m.is_finite() {
            return Err(Error::NonFinite { op: "HermitianPsdMatrix::new" });
        }
        let defect = m.hermitian_defect();
        if defect > HERMITIAN_TOL {
            return Err(Error::NotHermitian { max_asymmetry: defect });
        }
        let eig = hermitian_eigen(&m)?;
        let min = eig.values.first().copied().unwrap_or(0.0);
        if min < -PSD_CLAMP_TOL {
            return Err(Error::NotPositiveSemidefinite { min_eigenvalue: min });
        }
        Ok(Self { inner: m })
    }

    pub fn identity(n: usize) -> Self {
        Self { inner: ComplexMatrix::identity(n) }
    }

    pub fn zero(n: usize) -> Self {
        Self { inner: ComplexMatrix::zeros(n, n) }
    }

    pub fn dim(&self) -> usize {
        self.inner.rows()
    }

    pub fn as_matrix(&self) -> &ComplexMatrix {
        &self.inner
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.inner
    }

    /// `s * M` for `s >= 0`; preserves the invariant exactly.
    pub fn scaled(&self, s: f64) -> Self {
        assert!(s >= 0.0 && s.is_finite(), "scale factor must be finite and nonnegative");
        Self { inner: self.inner.scale(Complex64::new(s, 0.0)) }
    }

    /// `M + s * I` for `s >= 0`; preserves the invariant exactly.
    pub fn add_scaled_identity(&self, s: f64) -> Self {
        assert!(s >= 0.0 && s.is_finite(), "shift must be finite and nonnegative");
        let mut inner = self.inner.clone();
        for i in 0..inner.rows() {
            inner[(i, i)] += Complex64::new(s, 0.0);
        }
        Self { inner }
    }

    /// True when the stored matrix is exactly the identity.
    pub fn is_identity(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| {
            (0..n).all(|j| {
                let want = if i == j { Complex64::ONE } else { Complex64::ZERO };
                self.inner[(i, j)] == want
            })
        })
    }
}

/// Kronecker product with standard block structure: entry
/// `((i_a * b.rows + i_b), (j_a * b.cols + j_b)) = a[i_a, j_a] * b[i_b, j_b]`.
pub fn kronecker(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(a.rows() * b.rows(), a.cols() * b.cols());
    for ia in 0..a.rows() {
        for ja in 0..a.cols() {
            let s = a[(ia, ja)];
            if s == Complex64::ZERO {
                continue;
            }
            for ib in 0..b.rows() {
                for jb in 0..b.cols() {
                    out[(ia * b.rows() + ib, ja * b.cols() + jb)] = s * b[(ib, jb)];
                }
            }
        }
    }
    out
}

/// Determinant via LU factorization with partial pivoting.
pub fn det(m: &ComplexMatrix) -> Result<Complex64> {
    if !m.is_square() {
        return Err(Error::Dimension {
            context: format!("determinant needs a square matrix, got {}x{}", m.rows(), m.cols()),
        });
    }
    let n = m.rows();
    if n == 0 {
        return Ok(Complex64::ONE);
    }
    let mut a = m.clone();
    let mut sign = Complex64::ONE;
    for k in 0..n {
        // Partial pivot on column k.
        let mut pivot_row = k;
        let mut pivot_mag = a[(k, k)].norm();
        for r in (k + 1)..n {
            let mag = a[(r, k)].norm();
            if mag > pivot_mag {
                pivot_mag = mag;
                pivot_row = r;
            }
        }
        if pivot_mag == 0.0 {
            return Ok(Complex64::ZERO);
        }
        if pivot_row != k {
            for c in 0..n {
                let tmp = a[(k, c)];
                a[(k, c)] = a[(pivot_row, c)];
                a[(pivot_row, c)] = tmp;
            }
            sign = -sign;
        }
        let pivot = a[(k, k)];
        for r in (k + 1)..n {
            let factor = a[(r, k)] / pivot;
            if factor == Complex64::ZERO {
                continue;
            }
            for c in k..n {
                let sub = factor * a[(k, c)];
                a[(r, c)] -= sub;
            }
        }
    }
    let mut d = sign;
    for k in 0..n {
        d *= a[(k, k)];
    }
    if !(d.re.is_finite() && d.im.is_finite()) {
        return Err(Error::NonFinite { op: "det" });
    }
    Ok(d)
}

/// Hermitian PSD square root via eigendecomposition: `S = V sqrt(D) V'`
/// with eigenvalues in `[-PSD_CLAMP_TOL, 0)` clamped to zero.
pub fn hermitian_sqrt(m: &HermitianPsdMatrix) -> Result<ComplexMatrix> {
    let eig = hermitian_eigen(m.as_matrix())?;
    let n = m.dim();
    if let Some(&min) = eig.values.first() {
        if min < -PSD_CLAMP_TOL {
            return Err(Error::NotPositiveSemidefinite { min_eigenvalue: min });
        }
    }
    let roots: Vec<f64> = eig.values.iter().map(|&l| l.max(0.0).sqrt()).collect();
    // S = V diag(roots) V'
    let mut s = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = Complex64::ZERO;
            for (k, &root) in roots.iter().enumerate() {
                acc += eig.vectors[(i, k)] * root * eig.vectors[(j, k)].conj();
            }
            s[(i, j)] = acc;
        }
    }
    if !s.is_finite() {
        return Err(Error::NonFinite { op: "hermitian_sqrt" });
    }
    Ok(s)
}

/// Solve `M x = v` for Hermitian positive definite `M` by Cholesky
/// factorization. A failed pivot falls back to the eigensolver so the error
/// can name the offending eigenvalue.
pub fn solve_hermitian(m: &HermitianPsdMatrix, v: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = m.dim();
    if v.len() != n {
        return Err(Error::Dimension {
            context: format!("solve: matrix is {n}x{n} but vector has length {}", v.len()),
        });
    }
    let a = m.as_matrix();
    let scale = a.max_abs_entry().max(1.0);

    // Cholesky: A = L L', L lower triangular with real positive diagonal.
    let mut l = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        let mut diag = a[(j, j)].re;
        for k in 0..j {
            diag -= l[(j, k)].norm_sqr();
        }
        if diag <= SINGULARITY_TOL * scale {
            let eig = hermitian_eigen(a)?;
            let min = eig.values.first().copied().unwrap_or(0.0);
            return Err(Error::Singular { eigenvalue: min });
        }
        let djj = diag.sqrt();
        l[(j, j)] = Complex64::new(djj, 0.0);
        for i in (j + 1)..n {
            let mut acc = a[(i, j)];
            for k in 0..j {
                let sub = l[(i, k)] * l[(j, k)].conj();
                acc -= sub;
            }
            l[(i, j)] = acc / djj;
        }
    }

    // Forward substitution: L y = v.
    let mut y = vec![Complex64::ZERO; n];
    for i in 0..n {
        let mut acc = v[i];
        for k in 0..i {
            acc -= l[(i, k)] * y[k];
        }
        y[i] = acc / l[(i, i)];
    }
    // Back substitution: L' x = y.
    let mut x = vec![Complex64::ZERO; n];
    for i in (0..n).rev() {
        let mut acc = y[i];
        for k in (i + 1)..n {
            acc -= l[(k, i)].conj() * x[k];
        }
        x[i] = acc / l[(i, i)];
    }
    if x.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::NonFinite { op: "solve_hermitian" });
    }
    Ok(x)
}

/// `a' * b` for complex vectors.
pub fn inner_product(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    assert_eq!(a.len(), b.len(), "vector length mismatch");
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{RngExt, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(rows, cols, |_, _| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        })
    }

    /// Random Hermitian PSD matrix built as `A A'`.
    fn random_psd(rng: &mut ChaCha8Rng, n: usize) -> HermitianPsdMatrix {
        let a = random_matrix(rng, n, n);
        let m = a.mul(&a.dagger());
        // Force exact Hermitian storage; the product is Hermitian only to
        // rounding error.
        let sym = ComplexMatrix::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(m[(i, j)].re, 0.0)
            } else if i < j {
                m[(i, j)]
            } else {
                m[(j, i)].conj()
            }
        });
        HermitianPsdMatrix::new(sym).expect("A A' is PSD")
    }

    #[test]
    fn hermitian_sqrt_identity() {
        let m = HermitianPsdMatrix::identity(4);
        let s = hermitian_sqrt(&m).unwrap();
        assert!(s.max_abs_diff(&ComplexMatrix::identity(4)) < 1e-12);
    }

    #[test]
    fn hermitian_sqrt_zero() {
        let m = HermitianPsdMatrix::zero(2);
        let s = hermitian_sqrt(&m).unwrap();
        assert!(s.max_abs_entry() < 1e-14);
    }

    #[test]
    fn hermitian_sqrt_correlated_pair() {
        // 2x2 correlation matrix with coefficient 0.8.
        let m = HermitianPsdMatrix::new(ComplexMatrix::from_real_rows(&[
            &[1.0, 0.8],
            &[0.8, 1.0],
        ]))
        .unwrap();
        let s = hermitian_sqrt(&m).unwrap();
        let back = s.mul(&s);
        assert!(back.max_abs_diff(m.as_matrix()) < 1e-10);
        // The root itself is Hermitian PSD.
        assert!(s.hermitian_defect() < 1e-12);
        HermitianPsdMatrix::new(s).unwrap();
    }

    #[test]
    fn hermitian_sqrt_rejects_non_hermitian() {
        let m = ComplexMatrix::from_real_rows(&[&[1.0, 0.5], &[0.2, 1.0]]);
        match HermitianPsdMatrix::new(m) {
            Err(Error::NotHermitian { .. }) => {}
            other => panic!("expected NotHermitian, got {other:?}"),
        }
    }

    #[test]
    fn hermitian_sqrt_rejects_indefinite() {
        let m = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[2.0, 1.0]]);
        match HermitianPsdMatrix::new(m) {
            Err(Error::NotPositiveSemidefinite { min_eigenvalue }) => {
                assert!((min_eigenvalue - (-1.0)).abs() < 1e-9);
            }
            other => panic!("expected NotPositiveSemidefinite, got {other:?}"),
        }
    }

    #[test]
    fn sqrt_reconstructs_random_psd() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for trial in 0..120 {
            let n = 2 + trial % 7; // 2..=8
            let m = random_psd(&mut rng, n);
            let s = hermitian_sqrt(&m).unwrap();
            let back = s.mul(&s);
            let scale = m.as_matrix().max_abs_entry().max(1.0);
            assert!(
                back.max_abs_diff(m.as_matrix()) <= 1e-9 * scale,
                "reconstruction failed for n={n} trial={trial}"
            );
        }
    }

    #[test]
    fn kronecker_identities() {
        let i2 = ComplexMatrix::identity(2);
        let i3 = ComplexMatrix::identity(3);
        assert!(kronecker(&i2, &i3).max_abs_diff(&ComplexMatrix::identity(6)) < 1e-15);

        let scalar = ComplexMatrix::from_real_rows(&[&[2.0]]);
        let b = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[3.0, 4.0]]);
        assert!(kronecker(&scalar, &b).max_abs_diff(&b.scale(Complex64::new(2.0, 0.0))) < 1e-15);
    }

    #[test]
    fn kronecker_block_entry() {
        let a = ComplexMatrix::from_real_rows(&[&[1.0, 0.5], &[0.5, 1.0]]);
        let b = ComplexMatrix::from_real_rows(&[&[1.0, 0.2], &[0.2, 1.0]]);
        let k = kronecker(&a, &b);
        assert_eq!(k.rows(), 4);
        assert_eq!(k.cols(), 4);
        // Entry (0,3) sits in block (0,1): a[0,1] * b[0,1] = 0.5 * 0.2.
        assert!((k[(0, 3)].re - 0.1).abs() < 1e-15);
        assert!(k[(0, 3)].im.abs() < 1e-15);
    }

    #[test]
    fn det_known_values() {
        assert!((det(&ComplexMatrix::identity(5)).unwrap() - Complex64::ONE).norm() < 1e-14);

        let diag = ComplexMatrix::from_real_rows(&[&[2.0, 0.0], &[0.0, 3.0]]);
        assert!((det(&diag).unwrap() - Complex64::new(6.0, 0.0)).norm() < 1e-14);

        let corr = ComplexMatrix::from_real_rows(&[&[1.0, 0.8], &[0.8, 1.0]]);
        assert!((det(&corr).unwrap() - Complex64::new(0.36, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn det_rejects_non_square() {
        let m = ComplexMatrix::zeros(2, 3);
        assert!(matches!(det(&m), Err(Error::Dimension { .. })));
    }

    #[test]
    fn det_of_kronecker_product() {
        // det(kron(A, B)) = det(A)^n * det(B)^m for A m x m, B n x n.
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..40 {
            let m = rng.random_range(1..4usize);
            let n = rng.random_range(1..4usize);
            let a = random_matrix(&mut rng, m, m);
            let b = random_matrix(&mut rng, n, n);
            let lhs = det(&kronecker(&a, &b)).unwrap();
            let rhs = det(&a).unwrap().powu(n as u32) * det(&b).unwrap().powu(m as u32);
            let denom = rhs.norm().max(1e-12);
            assert!(
                (lhs - rhs).norm() / denom <= 1e-8,
                "det mismatch: {lhs} vs {rhs} (m={m}, n={n})"
            );
        }
    }

    #[test]
    fn solve_known_values() {
        let id = HermitianPsdMatrix::identity(3);
        let v = vec![
            Complex64::new(1.0, 2.0),
            Complex64::new(-3.0, 0.5),
            Complex64::new(0.0, -1.0),
        ];
        let x = solve_hermitian(&id, &v).unwrap();
        for (a, b) in x.iter().zip(&v) {
            assert!((a - b).norm() < 1e-14);
        }

        let diag = HermitianPsdMatrix::new(ComplexMatrix::from_real_rows(&[
            &[2.0, 0.0],
            &[0.0, 4.0],
        ]))
        .unwrap();
        let x = solve_hermitian(&diag, &[Complex64::new(2.0, 0.0), Complex64::new(4.0, 0.0)]).unwrap();
        assert!((x[0] - Complex64::ONE).norm() < 1e-14);
        assert!((x[1] - Complex64::ONE).norm() < 1e-14);

        let corr = HermitianPsdMatrix::new(ComplexMatrix::from_real_rows(&[
            &[1.0, 0.8],
            &[0.8, 1.0],
        ]))
        .unwrap();
        let x = solve_hermitian(&corr, &[Complex64::ONE, Complex64::ONE]).unwrap();
        for xi in &x {
            assert!((xi - Complex64::new(1.0 / 1.8, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn solve_singular_names_eigenvalue() {
        // Rank-one PSD matrix: eigenvalues {0, 2}.
        let m = HermitianPsdMatrix::new(ComplexMatrix::from_real_rows(&[
            &[1.0, 1.0],
            &[1.0, 1.0],
        ]))
        .unwrap();
        match solve_hermitian(&m, &[Complex64::ONE, Complex64::ONE]) {
            Err(Error::Singular { eigenvalue }) => assert!(eigenvalue.abs() < 1e-10),
            other => panic!("expected Singular, got {other:?}"),
        }
    }

    #[test]
    fn solve_residual_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for trial in 0..60 {
            let n = 2 + trial % 6;
            // Well conditioned: A A' + I.
            let base = random_psd(&mut rng, n);
            let m = base.add_scaled_identity(1.0);
            let v: Vec<Complex64> = (0..n)
                .map(|_| Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)))
                .collect();
            let x = solve_hermitian(&m, &v).unwrap();
            let mx = m.as_matrix().matvec(&x);
            let num: f64 = mx
                .iter()
                .zip(&v)
                .map(|(a, b)| (a - b).norm_sqr())
                .sum::<f64>()
                .sqrt();
            let den: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            assert!(num / den <= 1e-10, "residual too large: {}", num / den);
        }
    }
}
