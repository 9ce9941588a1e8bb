//! Complex linear algebra and quadrature primitives shared by every other
//! module. All operations are pure functions on immutable inputs.

mod eigen;
mod matrix;
mod quad;

pub use eigen::{hermitian_eigen, HermitianEigen};
pub use matrix::{
    det, hermitian_sqrt, inner_product, kronecker, solve_hermitian, ComplexMatrix,
    HermitianPsdMatrix, HERMITIAN_TOL, PSD_CLAMP_TOL, SINGULARITY_TOL,
};
pub use quad::{gauss_legendre_integrate, q_function, GaussLegendreRule};
