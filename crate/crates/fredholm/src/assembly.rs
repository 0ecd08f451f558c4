use lattice_rep::{LatticeWindow, LaurentSeries, PhaseReducer};
use num_complex::Complex64;
use numlin::ComplexMatrix;
use serde::Serialize;

use crate::FredholmError;

/// `|Γ_n|` beyond which (or below whose inverse) the diagonal is replaced
/// by its limit.
pub const SATURATION: f64 = 1e6;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `i(1 - Γ_n)/(1 + Γ_n)` with `Γ_n = λ^{-2n²} G^{2n} / Γ`, saturated to `∓i`.
pub fn diagonal_value(n: i64, gamma_value: Complex64, g: Complex64, alpha: &PhaseReducer, guard: f64) -> Result<Complex64, FredholmError> {
    let log_mod = 2.0 * n as f64 * g.norm().ln() - gamma_value.norm().ln();
    let cap = SATURATION.ln();
    if log_mod > cap {
        return Ok(-I);
    }
    if log_mod < -cap {
        return Ok(I);
    }
    let gn = alpha.lambda_pow(-2 * n * n) * Complex64::from_polar(log_mod.exp(), 2.0 * n as f64 * g.arg() - gamma_value.arg());
    let den = 1.0 + gn;
    if den.norm() < guard {
        return Err(FredholmError::Exceptional { n, value: den.norm() });
    }
    Ok(I * (1.0 - gn) / den)
}

/// Data `(Γ', G')` whose diagonal is the original one advanced by one site:
/// `Γ'_n = Γ_{n+1}`.
pub fn shifted_data(gamma_value: Complex64, g: Complex64, alpha: &PhaseReducer) -> (Complex64, Complex64) {
    let l2 = alpha.lambda_pow(2);
    (gamma_value * l2 / (g * g), g / l2)
}

/// `H` on the window `n_min..=n_max`: `(Hη)_n = Σ_j a_j η_{n+j} + d_n η_n`.
#[derive(Clone, Debug, Serialize)]
pub struct FredholmAssembly {
    pub n_min: i64,
    pub n_max: i64,
    pub gamma_value: Complex64,
    pub g: Complex64,
    pub a: LaurentSeries,
    pub diagonal: Vec<Complex64>,
    /// Sites whose diagonal was not saturated.
    pub core: Option<(i64, i64)>,
}

/// Assemble `H` from the `Γ` value of a mode and its parameter `G`, `|G| > 1`.
pub fn assemble_h(
    gamma_value: Complex64,
    g: Complex64,
    a: &LaurentSeries,
    n_min: i64,
    n_max: i64,
    alpha: &PhaseReducer,
    guard: f64,
) -> Result<FredholmAssembly, FredholmError> {
    if !(g.norm() > 1.0) {
        return Err(FredholmError::Parameter(format!("|G| = {} must exceed 1", g.norm())));
    }
    if gamma_value.norm() == 0.0 || !gamma_value.is_finite() {
        return Err(FredholmError::Parameter(format!("Γ = {gamma_value} must be finite and nonzero")));
    }
    if n_min > n_max {
        return Err(FredholmError::Parameter("empty window".into()));
    }
    let diagonal = (n_min..=n_max).map(|n| diagonal_value(n, gamma_value, g, alpha, guard)).collect::<Result<Vec<_>, _>>()?;
    let unsat: Vec<i64> = (n_min..=n_max).zip(&diagonal).filter(|(_, d)| **d != I && **d != -I).map(|(n, _)| n).collect();
    let core = unsat.first().map(|&lo| (lo, *unsat.last().unwrap()));
    Ok(FredholmAssembly { n_min, n_max, gamma_value, g, a: a.clone(), diagonal, core })
}

impl FredholmAssembly {
    pub fn len(&self) -> usize {
        self.diagonal.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diagonal.is_empty()
    }

    pub fn diagonal_at(&self, n: i64) -> Complex64 {
        self.diagonal[(n - self.n_min) as usize]
    }

    /// Dense matrix with row/column `k` for site `n_min + k`.
    pub fn matrix(&self) -> ComplexMatrix {
        let len = self.len();
        let mut m = ComplexMatrix::zeros(len, len);
        for r in 0..len {
            m[(r, r)] = self.diagonal[r];
            for (j, c) in self.a.iter() {
                let col = r as i64 + j;
                if (0..len as i64).contains(&col) {
                    m[(r, col as usize)] += c;
                }
            }
        }
        m
    }

    /// `Hη` on the sites where the whole band lies inside `η`'s window.
    pub fn apply(&self, eta: &LatticeWindow) -> Result<LatticeWindow, FredholmError> {
        let w = self.a.half_width() as i64;
        let lo = eta.n_min().max(self.n_min) + w;
        let hi = eta.n_max().min(self.n_max) - w;
        if lo > hi {
            return Err(FredholmError::Parameter("window narrower than the band".into()));
        }
        Ok(LatticeWindow::from_fn(lo, hi, |n| {
            let band: Complex64 = self.a.iter().map(|(j, c)| c * eta.at(n + j)).sum();
            band + self.diagonal_at(n) * eta.at(n)
        }))
    }
}
