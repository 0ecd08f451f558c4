use lattice_rep::{HParams, PhaseReducer};
use num_complex::Complex64;
use numlin::{hessenberg_eigenvalues, inverse_iteration, ComplexMatrix};
use rayon::prelude::*;
use serde::Serialize;

use crate::SpectralError;

/// Boundary closure of a truncation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Boundary {
    Open,
    Periodic,
}

/// Parameters `(γ, δ, β)` of `h_γ(δ)` on a window `n = -N..N`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Truncation {
    pub gamma: Complex64,
    pub delta: Complex64,
    pub beta: f64,
    pub half_width: usize,
    pub boundary: Boundary,
}

impl Truncation {
    pub fn open(gamma: f64, delta: f64, beta: f64, half_width: usize) -> Self {
        Self {
            gamma: Complex64::new(gamma, 0.0),
            delta: Complex64::new(delta, 0.0),
            beta,
            half_width,
            boundary: Boundary::Open,
        }
    }

    pub fn dim(&self) -> usize {
        2 * self.half_width + 1
    }

    /// The `(2N+1)²` matrix at phase `x`; row/column `i` is site `n = i - N`.
    pub fn matrix(&self, x: Complex64, alpha: &PhaseReducer) -> Result<ComplexMatrix, SpectralError> {
        truncation_matrix(self, x, alpha)
    }
}

/// Tridiagonal truncation of `h_γ(δ)` at phase `x` (periodic closes the corners).
pub fn truncation_matrix(t: &Truncation, x: Complex64, alpha: &PhaseReducer) -> Result<ComplexMatrix, SpectralError> {
    if t.half_width < 3 {
        return Err(SpectralError::Parameter(format!("half width {} below 3", t.half_width)));
    }
    if t.gamma.norm() == 0.0 || t.delta.norm() == 0.0 {
        return Err(SpectralError::Parameter("gamma and delta must be nonzero".into()));
    }
    let n = t.dim();
    let off = t.half_width as i64;
    let p = HParams::new(t.gamma, t.delta, x, t.beta);
    let gi = t.gamma.inv();
    let mut m = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = p.potential(i as i64 - off, alpha);
        if i > 0 {
            m[(i, i - 1)] = t.gamma;
        }
        if i + 1 < n {
            m[(i, i + 1)] = gi;
        }
    }
    match t.boundary {
        Boundary::Open => m.set_band(1, 1)?,
        Boundary::Periodic => {
            m[(0, n - 1)] = t.gamma;
            m[(n - 1, 0)] = gi;
        }
    }
    Ok(m)
}

/// Union of truncation eigenvalues over the phases, in phase order.
pub fn spectrum_cloud(t: &Truncation, phases: &[Complex64], alpha: &PhaseReducer) -> Result<Vec<Complex64>, SpectralError> {
    if phases.is_empty() {
        return Err(SpectralError::Parameter("no phases".into()));
    }
    let parts: Result<Vec<Vec<Complex64>>, SpectralError> = phases
        .par_iter()
        .map(|&x| Ok(hessenberg_eigenvalues(&t.matrix(x, alpha)?, 1.0)?))
        .collect();
    Ok(parts?.concat())
}

/// `count` phases `e^{2πi(k + offset)/count}` evenly spread on the circle.
pub fn uniform_phases(count: usize, offset: f64) -> Vec<Complex64> {
    (0..count)
        .map(|k| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * (k as f64 + offset) / count as f64))
        .collect()
}

/// Eigenvalues at one phase whose eigenvectors keep less than half their
/// weight within `collar` sites of either edge.
pub fn interior_eigenvalues(
    m: &ComplexMatrix,
    eigenvalues: &[Complex64],
    collar: usize,
) -> Result<Vec<Complex64>, SpectralError> {
    let n = m.rows();
    let mut keep = Vec::with_capacity(eigenvalues.len());
    for &ev in eigenvalues {
        let pair = match inverse_iteration(m, ev, 1e-10, 8) {
            Ok(p) => p,
            Err(numlin::NumError::NoConvergence { .. }) => {
                // clustered eigenvalue: keep it, its vector is not resolvable
                keep.push(ev);
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        let edge: f64 = pair.vector[..collar.min(n)]
            .iter()
            .chain(&pair.vector[n.saturating_sub(collar)..])
            .map(|z| z.norm_sqr())
            .sum();
        if edge < 0.5 {
            keep.push(ev);
        }
    }
    Ok(keep)
}

/// Cloud over phases with the boundary collar removed.
pub fn interior_cloud(
    t: &Truncation,
    phases: &[Complex64],
    alpha: &PhaseReducer,
    collar: usize,
) -> Result<Vec<Complex64>, SpectralError> {
    let parts: Result<Vec<Vec<Complex64>>, SpectralError> = phases
        .par_iter()
        .map(|&x| {
            let m = t.matrix(x, alpha)?;
            let ev = hessenberg_eigenvalues(&m, 1.0)?;
            interior_eigenvalues(&m, &ev, collar)
        })
        .collect();
    Ok(parts?.concat())
}

/// `max_a min_b |a - b|`.
pub fn directed_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.par_iter()
        .map(|x| b.iter().map(|y| (x - y).norm()).fold(f64::INFINITY, f64::min))
        .reduce(|| 0.0, f64::max)
}

/// Symmetric Hausdorff distance of two point sets.
pub fn hausdorff(a: &[Complex64], b: &[Complex64]) -> f64 {
    directed_distance(a, b).max(directed_distance(b, a))
}

#[derive(Clone, Debug, Serialize)]
pub struct ConstancyReport {
    pub gammas: Vec<f64>,
    /// `distances[i][j]` between the clouds for `gammas[i]` and `gammas[j]`.
    pub distances: Vec<Vec<f64>>,
    pub max_distance: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Pairwise Hausdorff distances between interior clouds of `h_γ(δ)` over `γ`.
pub fn spectrum_constancy_check(
    beta: f64,
    delta: f64,
    gammas: &[f64],
    half_width: usize,
    phases: &[Complex64],
    alpha: &PhaseReducer,
    tolerance: f64,
) -> Result<ConstancyReport, SpectralError> {
    for &g in gammas {
        if !(g >= 1.0 / beta && g <= beta) {
            return Err(SpectralError::Parameter(format!("gamma {g} outside [1/beta, beta]")));
        }
    }
    let clouds: Vec<Vec<Complex64>> = gammas
        .iter()
        .map(|&g| interior_cloud(&Truncation::open(g, delta, beta, half_width), phases, alpha, 5))
        .collect::<Result<_, _>>()?;
    let k = gammas.len();
    let mut distances = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in i + 1..k {
            let d = hausdorff(&clouds[i], &clouds[j]);
            distances[i][j] = d;
            distances[j][i] = d;
        }
    }
    let max_distance = distances.iter().flatten().copied().fold(0.0, f64::max);
    Ok(ConstancyReport { gammas: gammas.to_vec(), distances, max_distance, tolerance, passed: max_distance < tolerance })
}

/// Write `(re, im)` rows with a header.
pub fn write_cloud_csv<W: std::io::Write>(cloud: &[Complex64], w: W) -> Result<(), SpectralError> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["re", "im"])?;
    for z in cloud {
        wr.write_record([format!("{:.17e}", z.re), format!("{:.17e}", z.im)])?;
    }
    wr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn free_laplacian_spectrum() {
        let a = PhaseReducer::golden();
        let t = Truncation::open(1.7, 1.0, 0.0, 6);
        let m = t.matrix(c(1.0), &a).unwrap();
        assert_eq!(m.band(), Some((1, 1)));
        let mut ev: Vec<f64> = hessenberg_eigenvalues(&m, 1.0).unwrap().iter().map(|z| z.re).collect();
        ev.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let n = t.dim();
        let mut exact: Vec<f64> =
            (1..=n).map(|k| 2.0 * (k as f64 * std::f64::consts::PI / (n as f64 + 1.0)).cos()).collect();
        exact.sort_by(|x, y| x.partial_cmp(y).unwrap());
        for (a, b) in ev.iter().zip(&exact) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn self_adjoint_case_is_real() {
        let a = PhaseReducer::golden();
        let t = Truncation::open(1.0, 1.0, 2.0, 20);
        let m = t.matrix(Complex64::from_polar(1.0, 0.4), &a).unwrap();
        assert!((m.sub(&m.adjoint()).unwrap()).norm_fro() < 1e-14);
        for z in hessenberg_eigenvalues(&m, 1.0).unwrap() {
            assert!(z.im.abs() < 1e-10);
        }
    }

    #[test]
    fn periodic_corners() {
        let a = PhaseReducer::golden();
        let mut t = Truncation::open(2.0, 1.0, 1.0, 4);
        t.boundary = Boundary::Periodic;
        let m = t.matrix(c(1.0), &a).unwrap();
        assert_eq!(m[(0, 8)], c(2.0));
        assert_eq!(m[(8, 0)], c(0.5));
        assert!(t.matrix(c(1.0), &a).is_ok());
        assert!(truncation_matrix(&Truncation::open(1.0, 1.0, 1.0, 2), c(1.0), &a).is_err());
    }

    #[test]
    fn conjugate_phases_conjugate_the_cloud() {
        let a = PhaseReducer::golden();
        let t = Truncation::open(1.0, 1.5, 2.0, 12);
        let ph = uniform_phases(3, 0.2);
        let phc: Vec<Complex64> = ph.iter().map(|z| z.conj()).collect();
        let c1 = spectrum_cloud(&t, &ph, &a).unwrap();
        let c2: Vec<Complex64> = spectrum_cloud(&t, &phc, &a).unwrap().iter().map(|z| z.conj()).collect();
        // conj(h(δx)) equals h(δ conj x) reflected in n, so the sets agree
        assert!(hausdorff(&c1, &c2) < 1e-10);
    }

    #[test]
    fn hausdorff_basics() {
        let a = [c(0.0), c(1.0)];
        let b = [c(0.0), c(3.0)];
        assert_eq!(hausdorff(&a, &a), 0.0);
        assert!((hausdorff(&a, &b) - 2.0).abs() < 1e-15);
    }
}
