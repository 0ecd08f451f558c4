use eigenmode::EigenMode;
use lattice_rep::PhaseReducer;
use num_complex::Complex64;
use serde::Serialize;

use crate::{CoefficientTable, DiffError};

/// One-scalar fit of `s · L_pq ≈ (c_pq - d_pq) G^q` with
/// `L_pq = λ^{pq} conj(x)^q Σ_n λ^{2qn} ξ_n ξ_{n+p}` and `x = P/G` for the
/// mode parameter `P`.
#[derive(Clone, Debug, Serialize)]
pub struct IdentityFit {
    pub scale: Complex64,
    /// `‖s L - R‖ / ‖R‖` over the fitted entries.
    pub residual: f64,
    /// Same restricted to the `q = 0` row with the fitted scale.
    pub row_zero_residual: f64,
    /// Fit with `conj(λ)^{2qn}` inside the sum instead.
    pub conjugate_twist_residual: f64,
    pub entries: usize,
}

fn lhs(mode: &EigenMode, x: Complex64, p: i64, q: i64, twist: i64, alpha: &PhaseReducer) -> Complex64 {
    let xi = &mode.xi;
    let lo = xi.n_min().max(xi.n_min() - p);
    let hi = xi.n_max().min(xi.n_max() - p);
    let sum: Complex64 = (lo..=hi).map(|n| alpha.lambda_pow(twist * 2 * q * n) * xi.at(n) * xi.at(n + p)).sum();
    alpha.lambda_pow(p * q) * x.conj().powi(q as i32) * sum
}

struct Fit {
    scale: Complex64,
    residual: f64,
    row_zero: f64,
}

fn fit(rows: &[(i64, Complex64, Complex64)]) -> Result<Fit, DiffError> {
    let ll: f64 = rows.iter().map(|(_, l, _)| l.norm_sqr()).sum();
    if !(ll > 1e-300) {
        return Err(DiffError::Degenerate("all left-hand sides vanish".into()));
    }
    let s = rows.iter().map(|(_, l, r)| l.conj() * r).sum::<Complex64>() / ll;
    let misfit = |keep: &dyn Fn(i64) -> bool| {
        let (mut num, mut den) = (0.0, 0.0);
        for (_, l, r) in rows.iter().filter(|e| keep(e.0)) {
            num += (s * l - r).norm_sqr();
            den += r.norm_sqr();
        }
        (num / den).sqrt()
    };
    Ok(Fit { scale: s, residual: misfit(&|_| true), row_zero: misfit(&|q| q == 0) })
}

/// Relative residual of the identity after fitting the normalisation.
pub fn eigen_resolvent_identity(
    mode: &EigenMode,
    g: Complex64,
    c: &CoefficientTable,
    d: &CoefficientTable,
    p_max: i64,
    q_max: i64,
    alpha: &PhaseReducer,
) -> Result<IdentityFit, DiffError> {
    if (c.z - d.z).norm() > 1e-12 * c.z.norm().max(1.0) {
        return Err(DiffError::Parameter("tables belong to different z".into()));
    }
    if p_max > c.p_max.min(d.p_max) || q_max > c.q_max.min(d.q_max) {
        return Err(DiffError::Parameter("range exceeds the tables".into()));
    }
    if g.norm() == 0.0 {
        return Err(DiffError::Parameter("G must be nonzero".into()));
    }
    let x = mode.parameter() / g;
    let rows = |twist: i64| -> Vec<(i64, Complex64, Complex64)> {
        let mut out = Vec::new();
        for p in -p_max..=p_max {
            for q in -q_max..=q_max {
                let r = (c.get(p, q) - d.get(p, q)) * g.powi(q as i32);
                out.push((q, lhs(mode, x, p, q, twist, alpha), r));
            }
        }
        out
    };
    let main = rows(1);
    let f = fit(&main)?;
    let other = fit(&rows(-1))?;
    Ok(IdentityFit {
        scale: f.scale,
        residual: f.residual,
        row_zero_residual: f.row_zero,
        conjugate_twist_residual: other.residual,
        entries: main.len(),
    })
}
