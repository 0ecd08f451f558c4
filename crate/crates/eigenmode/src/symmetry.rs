use lattice_rep::PhaseReducer;
use num_complex::Complex64;
use serde::Serialize;

use crate::{EigenMode, ModeError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Symmetry {
    /// `P ↦ conj P`, `ξ ↦ J conj ξ`, `χ ↦ conj χ`.
    Sigma,
    /// `P ↦ -P`, `ξ ↦ D_{-1} ξ`, `χ ↦ -χ`.
    Iota,
}

/// Image of a mode under the conjugation symmetry.
pub fn sigma(mode: &EigenMode) -> EigenMode {
    EigenMode {
        x: mode.x.conj(),
        chi: mode.chi.conj(),
        xi: mode.xi.conj().reflect(),
        gamma_value: mode.gamma_value.map(|g| g.conj().inv()),
        ..mode.clone()
    }
}

/// Image of a mode under the sign symmetry.
pub fn iota(mode: &EigenMode) -> EigenMode {
    EigenMode {
        x: -mode.x,
        chi: -mode.chi,
        xi: mode.xi.map_indexed(|n, z| if n.rem_euclid(2) == 0 { z } else { -z }),
        gamma_value: None,
        ..mode.clone()
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SymmetryReport {
    pub kind: Symmetry,
    pub residual: f64,
    pub original_residual: f64,
    pub image_eigenvalue: Complex64,
}

/// Eigen-residual of the transformed mode for the transformed operator.
pub fn symmetry_check(mode: &EigenMode, kind: Symmetry, alpha: &PhaseReducer) -> Result<SymmetryReport, ModeError> {
    let image = match kind {
        Symmetry::Sigma => sigma(mode),
        Symmetry::Iota => iota(mode),
    };
    Ok(SymmetryReport {
        kind,
        residual: image.eigen_residual(alpha)?,
        original_residual: mode.eigen_residual(alpha)?,
        image_eigenvalue: image.chi,
    })
}
