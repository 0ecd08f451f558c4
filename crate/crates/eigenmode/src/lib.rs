//! Exponentially decaying eigenvectors of `h(P) = u + u* + β(Pv + P^{-1}v*)`
//! with `|P| = δ > 1`, written `P = δx` with `x` on the unit circle.
//!
//! Modes are found by sweeping `x` over truncations and refining the phase
//! until an eigenvalue meets the requested target. Around a mode sit the
//! scalar `Γ` with `k D_G ξ = Γ D_{1/G} ξ`, its behaviour under the lattice
//! shift, the conjugation and sign symmetries, and the bilinear sum `Σ ξ_n²`.

mod decay;
mod gamma;
mod mode;
mod scan;
mod symmetry;

pub use decay::{decay_exponent, DecayFit, FitWindow};
pub use gamma::{gamma_value, omega_shift_check, GammaFit, ShiftReport};
pub use mode::{align_phase, find_phase_eigenpair, refine_minimum, refine_tails, CoarseMinimum, EigenMode, ModeSearch, ModeSummary, PhaseSolution};
pub use scan::{sum_squares, sum_squares_scan, theta_products, ScanPoint, ScanReport};
pub use symmetry::{iota, sigma, symmetry_check, Symmetry, SymmetryReport};

pub use num_complex::Complex64;

#[derive(Debug, thiserror::Error)]
pub enum ModeError {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("no phase brings the eigenvalue within {tol:.3e} of the target; best {distance:.3e} at phase {phase:.6}")]
    NoPhase { phase: f64, distance: f64, tol: f64 },
    #[error(transparent)]
    Lattice(#[from] lattice_rep::LatticeError),
    #[error(transparent)]
    Spectral(#[from] spectral::SpectralError),
    #[error(transparent)]
    Linear(#[from] numlin::NumError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
