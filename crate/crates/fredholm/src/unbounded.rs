use std::f64::consts::PI;

use lattice_rep::{apply_d, Conjugator, HParams, KCutoffs, LatticeWindow, LaurentSeries, PhaseReducer};
use num_complex::Complex64;
use numlin::{hessenberg_eigenvalues, inverse_iteration, ComplexMatrix};
use serde::Serialize;

use crate::FredholmError;

/// `φ_n/π = 2θn - αn² - ν`, reduced modulo 2.
pub fn quadratic_phase(n: i64, theta: f64, nu: f64, alpha: &PhaseReducer) -> f64 {
    let s = (2.0 * theta * n as f64).rem_euclid(2.0) - alpha.half_turns(n * n) - nu;
    s.rem_euclid(2.0)
}

fn half_integer_distance(s: f64) -> f64 {
    (s - (2.0 * s).round() / 2.0).abs()
}

fn diagonal(theta: f64, nu: f64, n_min: i64, n_max: i64, alpha: &PhaseReducer, margin: f64) -> Result<Vec<f64>, FredholmError> {
    (n_min..=n_max)
        .map(|n| {
            let s = quadratic_phase(n, theta, nu, alpha);
            let d = half_integer_distance(s);
            if d < margin {
                return Err(FredholmError::SingularPhase { n, distance: d });
            }
            Ok(s)
        })
        .collect()
}

/// Band `a_j` plus the real diagonal `tan φ_n` on `n_min..=n_max`.
pub fn unbounded_h(
    theta: f64,
    nu: f64,
    a: &LaurentSeries,
    alpha: &PhaseReducer,
    n_min: i64,
    n_max: i64,
    margin: f64,
) -> Result<ComplexMatrix, FredholmError> {
    let phases = diagonal(theta, nu, n_min, n_max, alpha, margin)?;
    let len = phases.len();
    let mut m = ComplexMatrix::zeros(len, len);
    for (r, s) in phases.iter().enumerate() {
        m[(r, r)] = Complex64::new((PI * s).tan(), 0.0);
        for (j, c) in a.iter() {
            let col = r as i64 + j;
            if (0..len as i64).contains(&col) {
                m[(r, col as usize)] += c;
            }
        }
    }
    Ok(m)
}

/// Eigenvector of the truncated `h(x)`, `|x| = 1`, whose peak lies nearest
/// the origin; the peak is made real and positive and the vector has unit norm.
pub fn localized_mode(x: Complex64, beta: f64, alpha: &PhaseReducer, half_width: i64) -> Result<(f64, LatticeWindow), FredholmError> {
    if (x.norm() - 1.0).abs() > 1e-12 {
        return Err(FredholmError::Parameter(format!("|x| = {} must be 1", x.norm())));
    }
    let params = HParams::at_parameter(x, beta);
    let len = (2 * half_width + 1) as usize;
    let mut m = ComplexMatrix::zeros(len, len);
    for r in 0..len {
        m[(r, r)] = params.potential(r as i64 - half_width, alpha);
        if r > 0 {
            m[(r, r - 1)] = Complex64::new(1.0, 0.0);
            m[(r - 1, r)] = Complex64::new(1.0, 0.0);
        }
    }
    m.set_band(1, 1)?;
    let values = hessenberg_eigenvalues(&m, 1e-13)?;
    let mut best: Option<(i64, f64, Vec<Complex64>)> = None;
    for v in values {
        let pair = inverse_iteration(&m, Complex64::new(v.re, 0.0), 1e-13, 30)?;
        let peak = pair.vector.iter().enumerate().max_by(|a, b| a.1.norm().total_cmp(&b.1.norm())).unwrap().0 as i64 - half_width;
        if best.as_ref().map_or(true, |b| peak.abs() < b.0.abs()) {
            best = Some((peak, pair.value.re, pair.vector));
        }
    }
    let (peak, value, vector) = best.ok_or_else(|| FredholmError::Parameter("no eigenvalues".into()))?;
    let p = vector[(peak + half_width) as usize];
    let scale = p.conj() / (p.norm() * numlin::norm2(&vector));
    Ok((value, LatticeWindow::new(-half_width, vector.iter().map(|v| v * scale).collect())?))
}

#[derive(Clone, Debug, Serialize)]
pub struct UnboundedReport {
    pub theta: f64,
    /// Eigenvalue of `D_x k D_x` on the mode.
    pub c: Complex64,
    pub nu: f64,
    /// `‖D_x k D_x ξ - cξ‖/‖ξ‖`.
    pub eigen_residual: f64,
    /// `‖Hη‖/‖η‖` on the interior with `η_n = cos φ_n ξ_n`.
    pub residual: f64,
}

/// Given an eigenvector `ξ` of `h(x)`, find `c` with `D_x k D_x ξ = cξ`, set
/// `e^{2πiθ} = x`, `e^{2πiν} = c` and check that `η_n = cos φ_n ξ_n` is
/// annihilated by the unbounded operator.
pub fn unbounded_transform_check(
    xi: &LatticeWindow,
    x: Complex64,
    k: &Conjugator,
    a: &LaurentSeries,
    alpha: &PhaseReducer,
    margin: f64,
) -> Result<UnboundedReport, FredholmError> {
    let y = apply_d(x, &k.apply(&apply_d(x, xi)?)?)?;
    let xs = xi.restrict(y.n_min(), y.n_max())?;
    let c = xs.conj().bilinear(&y) / xs.norm2().powi(2);
    let eigen_residual = y.zip_with(&xs, |u, v| u - c * v)?.norm2() / xs.norm2();
    let theta = x.arg() / (2.0 * PI);
    let nu = c.arg() / (2.0 * PI);
    let phases = diagonal(theta, nu, xi.n_min(), xi.n_max(), alpha, margin)?;
    let eta = LatticeWindow::from_fn(xi.n_min(), xi.n_max(), |n| xi.at(n) * (PI * phases[(n - xi.n_min()) as usize]).cos());
    let w = a.half_width() as i64;
    let (lo, hi) = (eta.n_min() + w, eta.n_max() - w);
    if lo > hi {
        return Err(FredholmError::Parameter("window narrower than the band".into()));
    }
    let r = LatticeWindow::from_fn(lo, hi, |n| {
        let band: Complex64 = a.iter().map(|(j, cj)| cj * eta.at(n + j)).sum();
        band + (PI * phases[(n - xi.n_min()) as usize]).tan() * eta.at(n)
    });
    let residual = r.norm2() / eta.restrict(lo, hi)?.norm2();
    Ok(UnboundedReport { theta, c, nu, eigen_residual, residual })
}

/// `D_x k D_x` on `n_min..=n_max`: entries `x^n λ^{-n²} E_{n-m} λ^{-m²} x^m`.
pub fn compressed_conjugator(k: &Conjugator, x: Complex64, n_min: i64, n_max: i64, alpha: &PhaseReducer) -> ComplexMatrix {
    let len = (n_max - n_min + 1) as usize;
    let e = k.exp_coeffs();
    let side = |n: i64| x.powi(n as i32) * alpha.lambda_sq(n).conj();
    ComplexMatrix::from_fn(len, len, |r, c| {
        let (n, m) = (n_min + r as i64, n_min + c as i64);
        side(n) * e.coeff(n - m) * side(m)
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct UnitarityReport {
    pub size: usize,
    /// `max ||e| - 1|` over the eigenvalues of the compression.
    pub max_deviation: f64,
    /// Fraction of equal angular bins holding at least one eigenvalue.
    pub coverage: f64,
    pub eigenvalues: Vec<Complex64>,
}

/// Eigenvalues of the central `size × size` compression of `D_x k_γ D_x`.
pub fn k_unitarity_check(
    gamma: f64,
    beta: f64,
    x: Complex64,
    size: usize,
    bins: usize,
    alpha: &PhaseReducer,
) -> Result<UnitarityReport, FredholmError> {
    if !(gamma >= 1.0 / beta && gamma <= beta) {
        return Err(FredholmError::Parameter(format!("gamma {gamma} outside [1/beta, beta]")));
    }
    if size == 0 || bins == 0 {
        return Err(FredholmError::Parameter("size and bins must be positive".into()));
    }
    let k = Conjugator::new(gamma, beta, alpha, KCutoffs { floor: 1e-16, ..KCutoffs::default() })?;
    let lo = -(size as i64) / 2;
    let m = compressed_conjugator(&k, x, lo, lo + size as i64 - 1, alpha);
    let eigenvalues = hessenberg_eigenvalues(&m, 1e-13)?;
    let max_deviation = eigenvalues.iter().map(|e| (e.norm() - 1.0).abs()).fold(0.0, f64::max);
    let mut hit = vec![false; bins];
    for e in &eigenvalues {
        let b = ((e.arg() + PI) / (2.0 * PI) * bins as f64) as usize;
        hit[b.min(bins - 1)] = true;
    }
    let coverage = hit.iter().filter(|&&h| h).count() as f64 / bins as f64;
    Ok(UnitarityReport { size, max_deviation, coverage, eigenvalues })
}
