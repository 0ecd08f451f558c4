//! Complex linear algebra kernels: Hessenberg QR eigenvalues, inverse
//! iteration, banded LU and one-sided Jacobi singular values and null spaces.
//!
//! Everything operates on [`ComplexMatrix`], a row-major dense container
//! with an optional bandwidth hint that the solvers exploit.

mod eigen;
mod error;
mod matrix;
mod solve;
mod svd;

pub use num_complex::Complex64;

pub use eigen::{hessenberg_eigenvalues, hessenberg_reduce, inverse_iteration, EigenPair};
pub use error::NumError;
pub use matrix::ComplexMatrix;
pub use solve::{banded_solve, BandLu};
pub use svd::{null_space, right_singular_pairs, singular_values};

/// Euclidean norm of a complex vector.
pub fn norm2(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Hermitian inner product `Σ conj(a_i) b_i`.
pub fn dot_c(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}
