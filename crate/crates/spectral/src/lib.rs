//! Spectra of truncations of `h_γ(δ)`, the density of states `μ`, its
//! logarithmic potential `Φ(z) = ∫ log|z - t| dμ(t)` and the level curves
//! `Φ = log(βδ)`, critical points of `Φ` in spectral gaps, and the analytic
//! function `G = β^{-1} exp ∫ log(z - t) dμ(t)` continued along paths.

mod analytic;
mod contour;
mod measure;
pub mod svg;
mod truncation;

pub use analytic::{g_value, gap_label, monodromy, LogContinuation, PathAnchor};
pub use contour::{level_curve, BBox, LevelCurve, Polyline};
pub use measure::{
    critical_points, detect_gaps, dos_measure, golden_convergents, histogram_gaps, log_potential,
    potential_derivative, CriticalPoint, SpectralMeasure,
};
pub use num_complex::Complex64;
pub use truncation::{
    directed_distance, hausdorff, interior_cloud, interior_eigenvalues, spectrum_cloud, spectrum_constancy_check,
    truncation_matrix, uniform_phases, write_cloud_csv, Boundary, ConstancyReport, Truncation,
};

#[derive(Debug, thiserror::Error)]
pub enum SpectralError {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("measure has no mass")]
    EmptyMeasure,
    #[error("no contour inside the box")]
    EmptyContour,
    #[error("path passes within {distance:.3e} of a node at {at}")]
    PathTooClose { at: Complex64, distance: f64 },
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error(transparent)]
    Linear(#[from] numlin::NumError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
