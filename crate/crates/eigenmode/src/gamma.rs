use lattice_rep::{apply_d, translate, Conjugator, LatticeWindow, PhaseReducer};
use num_complex::Complex64;
use serde::Serialize;

use crate::{EigenMode, ModeError};

/// Scalar `c` minimising `‖k D_G ξ - c D_{1/G} ξ‖₂` on the interior.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct GammaFit {
    pub value: Complex64,
    /// `‖k D_G ξ - c D_{1/G} ξ‖ / ‖k D_G ξ‖`.
    pub residual: f64,
    /// Sites left after removing the conjugator halo and the edge collar.
    pub sites: usize,
}

const COLLAR: i64 = 5;

fn fit(xi: &LatticeWindow, g: Complex64, k: &Conjugator) -> Result<GammaFit, ModeError> {
    if !(g.norm() > 1.0) {
        return Err(ModeError::Parameter(format!("|G| = {} must exceed 1", g.norm())));
    }
    let a = k.apply(&apply_d(g, xi)?)?;
    let lo = a.n_min() + COLLAR;
    let hi = a.n_max() - COLLAR;
    if hi - lo < 4 {
        return Err(lattice_rep::LatticeError::WindowTooSmall { needed: 2 * k.halo() + 2 * COLLAR as usize + 5, have: xi.len() }.into());
    }
    let a = a.restrict(lo, hi)?;
    let b = apply_d(g.inv(), &xi.restrict(lo, hi)?)?;
    let bb: f64 = b.values().iter().map(|z| z.norm_sqr()).sum();
    let ba: Complex64 = b.values().iter().zip(a.values()).map(|(p, q)| p.conj() * q).sum();
    let c = ba / bb;
    let res: f64 = a.values().iter().zip(b.values()).map(|(p, q)| (p - c * q).norm_sqr()).sum::<f64>().sqrt();
    Ok(GammaFit { value: c, residual: res / a.norm2(), sites: a.len() })
}

/// `Γ` for the mode, `k D_G ξ = Γ D_{1/G} ξ`, with `k` the `γ = 1` conjugator.
pub fn gamma_value(mode: &EigenMode, g: Complex64, k: &Conjugator) -> Result<GammaFit, ModeError> {
    fit(&mode.xi, g, k)
}

/// Behaviour of `Γ` under the lattice shift `ξ ↦ uξ`, which carries a mode
/// of `h(P)` to one of `h(λ²P)` and `G` to `λ²G`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ShiftReport {
    pub gamma: Complex64,
    pub gamma_shifted: Complex64,
    pub gamma_twice: Complex64,
    pub ratio: Complex64,
    /// `|Γ' - G²Γ| / |G²Γ|`.
    pub literal_residual: f64,
    /// `|Γ' - λ²G²Γ| / |λ²G²Γ|`.
    pub corrected_residual: f64,
    /// `| |Γ'|/|Γ| - |G|² | / |G|²`.
    pub modulus_residual: f64,
    /// Two shifts against `λ⁸G⁴Γ`.
    pub double_residual: f64,
    /// Largest least-squares misfit among the three fits.
    pub fit_residual: f64,
}

pub fn omega_shift_check(mode: &EigenMode, g: Complex64, k: &Conjugator, alpha: &PhaseReducer) -> Result<ShiftReport, ModeError> {
    let l2 = alpha.lambda_pow(2);
    let f0 = fit(&mode.xi, g, k)?;
    let f1 = fit(&translate(&mode.xi, 1), l2 * g, k)?;
    let f2 = fit(&translate(&mode.xi, 2), l2 * l2 * g, k)?;
    let (c0, c1, c2) = (f0.value, f1.value, f2.value);
    let g2 = g * g;
    let lit = g2 * c0;
    let cor = l2 * g2 * c0;
    let twice = alpha.lambda_pow(8) * g2 * g2 * c0;
    Ok(ShiftReport {
        gamma: c0,
        gamma_shifted: c1,
        gamma_twice: c2,
        ratio: c1 / c0,
        literal_residual: (c1 - lit).norm() / lit.norm(),
        corrected_residual: (c1 - cor).norm() / cor.norm(),
        modulus_residual: ((c1.norm() / c0.norm()) - g.norm_sqr()).abs() / g.norm_sqr(),
        double_residual: (c2 - twice).norm() / twice.norm(),
        fit_residual: f0.residual.max(f1.residual).max(f2.residual),
    })
}
