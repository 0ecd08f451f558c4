use eigenmode::EigenMode;
use lattice_rep::{LatticeWindow, LaurentSeries, PhaseReducer};
use num_complex::Complex64;
use numlin::{singular_values, ComplexMatrix};
use serde::Serialize;

use crate::{assemble_h, FredholmError};

/// Choice of square roots `t_n` of `Γ_n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Branch {
    /// `t_0` the principal root of `Γ_0`, then `t_n = t_{n-1} λ^{1-2n} G`.
    Continued,
    /// As `Continued` with the sign of one `t_n` reversed.
    FlipAt(i64),
    /// `-t_n` everywhere.
    Negated,
}

/// `t_n` on `n_min..=n_max`.
pub fn branch_factors(
    n_min: i64,
    n_max: i64,
    gamma_value: Complex64,
    g: Complex64,
    alpha: &PhaseReducer,
    branch: Branch,
) -> Vec<Complex64> {
    let t0 = gamma_value.inv().sqrt();
    let (lg, ag) = (g.norm().ln(), g.arg());
    (n_min..=n_max)
        .map(|n| {
            let t = t0 * alpha.lambda_pow(-n * n) * Complex64::from_polar((n as f64 * lg).exp(), n as f64 * ag);
            match branch {
                Branch::FlipAt(m) if m == n => -t,
                Branch::Negated => -t,
                _ => t,
            }
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct TransformReport {
    /// `‖Hη‖₂/‖η‖₂` on the interior.
    pub residual: f64,
    pub interior: (i64, i64),
    #[serde(skip)]
    pub eta: LatticeWindow,
}

/// Carry a mode of `h(G)` into the kernel of `H` and measure `‖Hη‖/‖η‖`.
pub fn kernel_transform_check(
    mode: &EigenMode,
    gamma_value: Complex64,
    g: Complex64,
    a: &LaurentSeries,
    alpha: &PhaseReducer,
    branch: Branch,
) -> Result<TransformReport, FredholmError> {
    let xi = &mode.xi;
    let h = assemble_h(gamma_value, g, a, xi.n_min(), xi.n_max(), alpha, 1e-12)?;
    let t = branch_factors(xi.n_min(), xi.n_max(), gamma_value, g, alpha, branch);
    let mut eta = xi.clone();
    for ((n, v), tn) in xi.iter().zip(&t) {
        let f = tn + tn.inv();
        if f.norm() < 1e-12 * tn.norm().max(1.0) {
            return Err(FredholmError::BranchZero { n });
        }
        eta.set(n, f * v);
    }
    let r = h.apply(&eta)?;
    let interior = (r.n_min(), r.n_max());
    let den = eta.restrict(interior.0, interior.1)?.norm2();
    Ok(TransformReport { residual: r.norm2() / den, interior, eta })
}

#[derive(Clone, Debug, Serialize)]
pub struct KernelReport {
    pub dim: usize,
    pub sigma_max: f64,
    /// Up to eight smallest singular values, ascending.
    pub smallest: Vec<f64>,
    /// First singular value outside the kernel over the last one inside;
    /// for `dim = 0`, the smallest value over the kernel threshold.
    pub gap: f64,
}

/// Count singular values below `σ_max·1e-8`; with a nonzero count the next
/// value must sit at least `gap_ratio` above the last counted one.
pub fn kernel_dimension(h: &ComplexMatrix, gap_ratio: f64) -> Result<KernelReport, FredholmError> {
    let mut sv = singular_values(h);
    sv.reverse();
    let sigma_max = *sv.last().ok_or_else(|| FredholmError::Parameter("empty matrix".into()))?;
    let threshold = sigma_max * 1e-8;
    let dim = sv.iter().take_while(|&&s| s < threshold).count();
    let smallest: Vec<f64> = sv.iter().take(8).copied().collect();
    let gap = match dim {
        0 => sv[0] / threshold,
        d if d == sv.len() => 0.0,
        d => sv[d] / sv[d - 1].max(f64::MIN_POSITIVE),
    };
    if dim > 0 && gap < gap_ratio {
        return Err(FredholmError::NoGap { smallest });
    }
    Ok(KernelReport { dim, sigma_max, smallest, gap })
}
