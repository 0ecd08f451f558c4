use lattice_rep::{LatticeWindow, PhaseReducer};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use spectral::{log_potential, SpectralMeasure};

use crate::{find_phase_eigenpair, EigenMode, ModeError, ModeSearch};

/// `Σ ξ_n²` without conjugation.
pub fn sum_squares(xi: &LatticeWindow) -> Complex64 {
    xi.bilinear(xi)
}

/// Products `ξ_n ξ_{n+p}` over the sites where both factors exist.
pub fn theta_products(xi: &LatticeWindow, p: i64) -> Result<LatticeWindow, ModeError> {
    let lo = xi.n_min().max(xi.n_min() - p);
    let hi = xi.n_max().min(xi.n_max() - p);
    if lo > hi {
        return Err(ModeError::Parameter(format!("offset {p} exceeds the window")));
    }
    Ok(LatticeWindow::from_fn(lo, hi, |n| xi.at(n) * xi.at(n + p)))
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanPoint {
    pub z: f64,
    /// `δ(z) = e^{Φ(z)}/β`, the level through `z`.
    pub delta: f64,
    pub phase_turns: f64,
    pub chi: Complex64,
    pub sum_squares: Complex64,
    pub residual: f64,
    /// Sup-norm distance to the previous aligned mode.
    pub jump: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanReport {
    pub points: Vec<ScanPoint>,
    /// Scan point where `|Σξ²|` is smallest.
    pub argmin: f64,
    pub min_abs: f64,
    /// Points whose mode differs from its predecessor by more than the
    /// continuity threshold in sup norm.
    pub discontinuities: Vec<f64>,
}

/// `Σ ξ_n²` of the unit, phase-aligned mode with eigenvalue `z` for each real
/// `z` in a gap, each on its own level `δ(z)`.
pub fn sum_squares_scan(
    mu: &SpectralMeasure,
    template: &ModeSearch,
    points: &[f64],
    alpha: &PhaseReducer,
    continuity: f64,
) -> Result<ScanReport, ModeError> {
    if points.is_empty() {
        return Err(ModeError::Parameter("empty scan".into()));
    }
    let modes: Vec<(f64, EigenMode)> = points
        .par_iter()
        .map(|&z| {
            let delta = log_potential(mu, Complex64::new(z, 0.0)).exp() / template.beta;
            if !(delta > 1.0) {
                return Err(ModeError::Parameter(format!("z = {z} lies on or inside the spectrum (delta {delta})")));
            }
            let s = ModeSearch { delta, ..*template };
            Ok((delta, find_phase_eigenpair(&s, Complex64::new(z, 0.0), alpha)?.mode))
        })
        .collect::<Result<_, _>>()?;
    let mut out = Vec::with_capacity(points.len());
    let mut discontinuities = Vec::new();
    for (i, (&z, (delta, m))) in points.iter().zip(&modes).enumerate() {
        let jump = (i > 0).then(|| {
            let prev = &modes[i - 1].1;
            // σ-images share |Σξ²|; compare against the nearer of the pair
            let d = |a: &LatticeWindow| a.sub(&m.xi).map(|d| d.norm_inf()).unwrap_or(f64::INFINITY);
            d(&prev.xi).min(d(&prev.xi.conj().reflect()))
        });
        if jump.is_some_and(|j| j > continuity) {
            discontinuities.push(z);
        }
        out.push(ScanPoint {
            z,
            delta: *delta,
            phase_turns: m.summary().phase_turns,
            chi: m.chi,
            sum_squares: sum_squares(&m.xi),
            residual: m.residual,
            jump,
        });
    }
    let best = out.iter().min_by(|a, b| a.sum_squares.norm().total_cmp(&b.sum_squares.norm())).unwrap();
    Ok(ScanReport { argmin: best.z, min_abs: best.sum_squares.norm(), points: out, discontinuities })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn products_reindex_under_translation() {
        let xi = LatticeWindow::from_fn(-6, 6, |n| Complex64::new(n as f64, 1.0 / (1.0 + n.abs() as f64)));
        let t = theta_products(&xi, 2).unwrap();
        assert_eq!((t.n_min(), t.n_max()), (-6, 4));
        let shifted = theta_products(&lattice_rep::translate(&xi, 1), 2).unwrap();
        for n in t.n_min()..=t.n_max() {
            assert_eq!(shifted.at(n + 1), t.at(n));
        }
        assert!(theta_products(&xi, 13).is_err());
        assert_eq!(sum_squares(&xi), xi.bilinear(&xi));
    }
}
