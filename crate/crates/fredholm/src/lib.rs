//! Operators on `ℓ²(Z)` of the form
//!
//! ```text
//! (Hη)_n = Σ_j a_j η_{n+j} + d_n η_n
//! ```
//!
//! where `a_j` are the Fourier coefficients of `tan(g/2)` for the
//! conjugating generator `g`. In the bounded family the diagonal is
//! `d_n = i(1 - Γ_n)/(1 + Γ_n)` built from the `Γ` value of an eigenmode; it
//! tends to `∓i` at `±∞`, so `H` is Fredholm and its essential spectrum is
//! the symbol shifted by `±i`. Eigenmodes are carried into the kernel by
//! `η_n = (t_n + 1/t_n) ξ_n` with `t_n² = Γ_n`.
//!
//! The unbounded family uses the real diagonal `tan φ_n` with a quadratic
//! phase and corresponds to eigenvectors of the self-adjoint operator.

mod assembly;
mod kernel;
mod symbol;
mod unbounded;

use thiserror::Error;

pub use assembly::{assemble_h, diagonal_value, shifted_data, FredholmAssembly, SATURATION};
pub use kernel::{branch_factors, kernel_dimension, kernel_transform_check, Branch, KernelReport, TransformReport};
pub use num_complex::Complex64;
pub use symbol::{essential_spectrum_curve, symbol_distance, tan_coefficients, TanSeries};
pub use unbounded::{
    compressed_conjugator, k_unitarity_check, localized_mode, quadratic_phase, unbounded_h, unbounded_transform_check,
    UnboundedReport, UnitarityReport,
};

#[derive(Debug, Error)]
pub enum FredholmError {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("tan(g/2) comes within {margin:.3e} of a pole (required {required:.3e})")]
    PoleProximity { margin: f64, required: f64 },
    #[error("1 + Γ_n = {value:.3e} at n = {n}: data too close to the exceptional set")]
    Exceptional { n: i64, value: f64 },
    #[error("phase within {distance:.3e} of a half-integer at n = {n}")]
    SingularPhase { n: i64, distance: f64 },
    #[error("t_n + 1/t_n vanishes at n = {n}")]
    BranchZero { n: i64 },
    #[error("no clean singular value gap: smallest values {smallest:?}")]
    NoGap { smallest: Vec<f64> },
    #[error(transparent)]
    Lattice(#[from] lattice_rep::LatticeError),
    #[error(transparent)]
    Linear(#[from] numlin::NumError),
    #[error(transparent)]
    Mode(#[from] eigenmode::ModeError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
