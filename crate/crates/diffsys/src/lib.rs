//! The system of difference equations on `Z²`
//!
//! ```text
//! cos(παq+θ)(X_{p-1,q} + X_{p+1,q}) + β cos(παp+θ)(X_{p,q-1} + X_{p,q+1}) = z X_pq
//! sin(παq+θ)(X_{p-1,q} - X_{p+1,q}) - β sin(παp+θ)(X_{p,q-1} - X_{p,q+1}) = 0
//! ```
//!
//! its diagonal transfer recursion and Wronskian, the Fourier coefficients
//! `c_pq(z)` of the resolvent of `h`, the polynomial solutions `d_pq(z)`,
//! and the identity linking decaying eigenvectors to `c_pq - d_pq`.

mod identity;
mod resolvent;
mod system;
mod transfer;

pub use identity::{eigen_resolvent_identity, IdentityFit};
pub use resolvent::{d_polynomials, resolvent_coefficients, CoefficientTable};
pub use system::{patch_solutions, system_residual, Grid, SystemParams};
pub use transfer::{
    advance, cross_wronskians, det3, transfer_matrices, wronskian_residual, Convention, Guard, Mat3, Orbit, TransferMatrices,
    TransferState, WronskianReport,
};

pub use num_complex::Complex64;

#[derive(Debug, thiserror::Error)]
pub enum DiffError {
    #[error("{which} = {value:.3e} at p = {p} is below the guard threshold")]
    Guard { which: &'static str, value: f64, p: i64 },
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("z = {z} is too close to the spectrum (pivot {pivot:.3e})")]
    NearSpectrum { z: Complex64, pivot: f64 },
    #[error("degenerate fit: {0}")]
    Degenerate(String),
    #[error(transparent)]
    Linear(#[from] numlin::NumError),
    #[error(transparent)]
    Mode(#[from] eigenmode::ModeError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
