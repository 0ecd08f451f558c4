use std::f64::consts::{FRAC_PI_2, PI};

use lattice_rep::series::sample_on_circle;
use lattice_rep::{conjugating_generator, map_on_circle, LaurentSeries, PhaseReducer};
use num_complex::Complex64;
use serde::Serialize;

use crate::FredholmError;

/// Coefficients of `tan(g(γu)/2)` with the pole margin seen on the circle.
#[derive(Clone, Debug, Serialize)]
pub struct TanSeries {
    pub coeffs: LaurentSeries,
    /// Smallest distance of `g/2` on the circle to a pole `π/2 + kπ`.
    pub margin: f64,
    /// Largest `|tan(g/2)|` on the circle.
    pub max_abs: f64,
}

fn pole_distance(w: Complex64) -> f64 {
    let k = ((w.re - FRAC_PI_2) / PI).round();
    Complex64::new(w.re - FRAC_PI_2 - k * PI, w.im).norm()
}

/// `a_j` with `tan(g(γu)/2) = Σ a_j u^j`, from `samples` points of the circle.
/// Coefficients below `floor` are trimmed from the tails.
pub fn tan_coefficients(
    beta: f64,
    gamma: f64,
    alpha: &PhaseReducer,
    terms: usize,
    samples: usize,
    min_margin: f64,
    floor: f64,
) -> Result<TanSeries, FredholmError> {
    let g = conjugating_generator(beta, gamma, alpha, terms)?;
    let values = sample_on_circle(&g, samples);
    let margin = values.iter().map(|&v| pole_distance(0.5 * v)).fold(f64::INFINITY, f64::min);
    if margin < min_margin {
        return Err(FredholmError::PoleProximity { margin, required: min_margin });
    }
    let max_abs = values.iter().map(|&v| (0.5 * v).tan().norm()).fold(0.0, f64::max);
    let coeffs = map_on_circle(&g, samples, |v| (0.5 * v).tan())?.trim(floor);
    Ok(TanSeries { coeffs, margin, max_abs })
}

/// The two closed curves `Σ a_j e^{ijt} + i` and `Σ a_j e^{ijt} - i`.
pub fn essential_spectrum_curve(a: &LaurentSeries, samples: usize) -> [Vec<Complex64>; 2] {
    let i = Complex64::new(0.0, 1.0);
    let symbol: Vec<Complex64> =
        (0..=samples).map(|k| a.evaluate(Complex64::from_polar(1.0, 2.0 * PI * k as f64 / samples as f64))).collect();
    [symbol.iter().map(|s| s + i).collect(), symbol.iter().map(|s| s - i).collect()]
}

/// Distance from `z` to the nearest vertex of either curve.
pub fn symbol_distance(curves: &[Vec<Complex64>; 2], z: Complex64) -> f64 {
    curves.iter().flatten().map(|p| (p - z).norm()).fold(f64::INFINITY, f64::min)
}
