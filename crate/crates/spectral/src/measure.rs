use std::f64::consts::PI;

use lattice_rep::PhaseReducer;
use num_complex::Complex64;
use numlin::{hessenberg_eigenvalues, ComplexMatrix};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::SpectralError;

/// Discrete probability measure on the real line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralMeasure {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl SpectralMeasure {
    /// Sorts the nodes, drops zero weights and normalizes to unit mass.
    pub fn new(mut pairs: Vec<(f64, f64)>) -> Result<Self, SpectralError> {
        pairs.retain(|p| p.1 > 0.0);
        if pairs.is_empty() {
            return Err(SpectralError::EmptyMeasure);
        }
        if pairs.iter().any(|p| !p.0.is_finite() || !p.1.is_finite()) {
            return Err(SpectralError::Parameter("non-finite node or weight".into()));
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let total: f64 = pairs.iter().map(|p| p.1).sum();
        Ok(Self {
            nodes: pairs.iter().map(|p| p.0).collect(),
            weights: pairs.iter().map(|p| p.1 / total).collect(),
        })
    }

    /// Equal weights on the given points.
    pub fn uniform(points: &[f64]) -> Result<Self, SpectralError> {
        Self::new(points.iter().map(|&t| (t, 1.0)).collect())
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// `∫ t^k dμ`.
    pub fn moment(&self, k: i32) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(t, w)| w * t.powi(k)).sum()
    }

    /// `μ((-∞, t])`.
    pub fn cumulative(&self, t: f64) -> f64 {
        let k = self.nodes.partition_point(|&s| s <= t);
        self.weights[..k].iter().sum()
    }

    pub fn support_bounds(&self) -> (f64, f64) {
        (self.nodes[0], self.nodes[self.nodes.len() - 1])
    }

    /// Bin the measure into `bins` equal cells; each cell becomes one node at
    /// its weighted centroid.
    pub fn binned(&self, bins: usize) -> Result<Self, SpectralError> {
        if bins == 0 {
            return Err(SpectralError::Parameter("zero bins".into()));
        }
        let (lo, hi) = self.support_bounds();
        let width = ((hi - lo) / bins as f64).max(f64::MIN_POSITIVE);
        let mut mass = vec![0.0; bins];
        let mut first = vec![0.0; bins];
        for (&t, &w) in self.nodes.iter().zip(&self.weights) {
            let k = (((t - lo) / width) as usize).min(bins - 1);
            mass[k] += w;
            first[k] += w * t;
        }
        Self::new(mass.iter().zip(&first).filter(|(m, _)| **m > 0.0).map(|(m, f)| (f / m, *m)).collect())
    }

    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<(), SpectralError> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["node", "weight"])?;
        for (t, m) in self.nodes.iter().zip(&self.weights) {
            wr.write_record([format!("{t:.17e}"), format!("{m:.17e}")])?;
        }
        wr.flush()?;
        Ok(())
    }
}

/// Bloch block of the `q`-periodic operator `h(1)` at rotation `p/q`,
/// phase `θ` and quasi-momentum `k`.
fn bloch_block(beta: f64, alpha: &PhaseReducer, q: usize, theta: f64, k: f64) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(q, q);
    for n in 0..q {
        let ang = PI * alpha.half_turns(-2 * n as i64) + theta;
        m[(n, n)] += Complex64::new(2.0 * beta * ang.cos(), 0.0);
        let next = (n + 1) % q;
        let hop = if next == 0 { Complex64::from_polar(1.0, k) } else { Complex64::new(1.0, 0.0) };
        m[(n, next)] += hop;
        m[(next, n)] += hop.conj();
    }
    m
}

/// Density of states of `h(1)` from the periodic approximant `p/q`.
///
/// Each of `phase_samples` phases contributes the spectra of `sites/q`
/// Bloch blocks; the eigenvalues are binned into `bins` cells (no binning
/// when `bins == 0`).
pub fn dos_measure(
    beta: f64,
    p: i64,
    q: i64,
    phase_samples: usize,
    sites: usize,
    bins: usize,
) -> Result<SpectralMeasure, SpectralError> {
    if q < 2 || phase_samples == 0 {
        return Err(SpectralError::EmptyMeasure);
    }
    let qs = q as usize;
    let blocks = (sites / qs).max(1);
    let alpha = PhaseReducer::from_ratio(p, q);
    let jobs: Vec<(f64, f64)> = (0..phase_samples)
        .flat_map(|s| {
            let theta = 2.0 * PI * (s as f64 + 0.5) / (phase_samples as f64 * qs as f64);
            (0..blocks).map(move |b| (theta, 2.0 * PI * (b as f64 + 0.5) / blocks as f64))
        })
        .collect();
    let eig: Result<Vec<Vec<f64>>, SpectralError> = jobs
        .par_iter()
        .map(|&(theta, k)| {
            let ev = hessenberg_eigenvalues(&bloch_block(beta, &alpha, qs, theta, k), 1.0)?;
            Ok(ev.iter().map(|z| z.re).collect())
        })
        .collect();
    let raw = SpectralMeasure::uniform(&eig?.concat())?;
    if bins == 0 {
        Ok(raw)
    } else {
        raw.binned(bins)
    }
}

/// Continued-fraction convergents `p/q` of the golden mean with `q ≤ q_max`.
pub fn golden_convergents(q_max: i64) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    let (mut a, mut b) = (1i64, 1i64);
    while b <= q_max {
        out.push((a, b));
        let next = a + b;
        a = b;
        b = next;
    }
    out
}

/// `Φ(z) = Σ w_k log|z - t_k|`; `-∞` exactly at a node.
pub fn log_potential(mu: &SpectralMeasure, z: Complex64) -> f64 {
    mu.nodes
        .iter()
        .zip(&mu.weights)
        .map(|(&t, &w)| w * 0.5 * ((z.re - t).powi(2) + z.im * z.im).ln())
        .sum()
}

/// `Σ w_k/(z - t_k)`, the complex derivative of the analytic completion of `Φ`.
pub fn potential_derivative(mu: &SpectralMeasure, z: Complex64) -> Complex64 {
    mu.nodes.iter().zip(&mu.weights).map(|(&t, &w)| w / (z - t)).sum()
}

/// Intervals between consecutive nodes wider than `min_width`.
pub fn detect_gaps(mu: &SpectralMeasure, min_width: f64) -> Vec<(f64, f64)> {
    mu.nodes.windows(2).filter(|p| p[1] - p[0] > min_width).map(|p| (p[0], p[1])).collect()
}

/// Gaps of a histogram with `bins` cells: runs of more than `min_run` empty
/// cells, reported as open intervals between occupied cells.
pub fn histogram_gaps(mu: &SpectralMeasure, bins: usize, min_run: usize) -> Vec<(f64, f64)> {
    let (lo, hi) = mu.support_bounds();
    let width = (hi - lo) / bins as f64;
    let mut occupied = vec![false; bins];
    for &t in &mu.nodes {
        occupied[(((t - lo) / width) as usize).min(bins - 1)] = true;
    }
    let mut gaps = Vec::new();
    let mut k = 0;
    while k < bins {
        if occupied[k] {
            k += 1;
            continue;
        }
        let start = k;
        while k < bins && !occupied[k] {
            k += 1;
        }
        if k - start > min_run {
            let left = mu.nodes[mu.nodes.partition_point(|&t| t < lo + start as f64 * width) - 1];
            let right = mu.nodes[mu.nodes.partition_point(|&t| t < lo + k as f64 * width)];
            gaps.push((left, right));
        }
    }
    gaps
}

#[derive(Clone, Debug, Serialize)]
pub struct CriticalPoint {
    pub gap: (f64, f64),
    pub location: f64,
    /// `Φ'` just inside each end of the gap (opposite signs).
    pub bracket: (f64, f64),
    pub iterations: usize,
}

/// Zeros of `Φ'` on the real line, one per gap, by bracketed Newton.
pub fn critical_points(mu: &SpectralMeasure, gaps: &[(f64, f64)], tol: f64) -> Result<Vec<CriticalPoint>, SpectralError> {
    let d = |x: f64| potential_derivative(mu, Complex64::new(x, 0.0)).re;
    let d2 = |x: f64| -> f64 { mu.nodes.iter().zip(&mu.weights).map(|(&t, &w)| -w / (x - t).powi(2)).sum() };
    let mut out = Vec::with_capacity(gaps.len());
    for &(a, b) in gaps {
        let eps = (b - a) * 1e-9;
        let (mut lo, mut hi) = (a + eps, b - eps);
        let (flo, fhi) = (d(lo), d(hi));
        if !(flo > 0.0 && fhi < 0.0) {
            return Err(SpectralError::NoConvergence(format!("no sign change of the derivative in ({a}, {b})")));
        }
        let mut x = 0.5 * (lo + hi);
        let mut its = 0;
        loop {
            its += 1;
            let f = d(x);
            if f > 0.0 {
                lo = x;
            } else {
                hi = x;
            }
            let mut next = x - f / d2(x);
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - x).abs() < tol || hi - lo < tol {
                x = next;
                break;
            }
            if its > 200 {
                return Err(SpectralError::NoConvergence(format!("gap ({a}, {b})")));
            }
            x = next;
        }
        out.push(CriticalPoint { gap: (a, b), location: x, bracket: (flo, fhi), iterations: its });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalization_and_sorting() {
        let m = SpectralMeasure::new(vec![(2.0, 1.0), (-1.0, 3.0), (0.5, 0.0)]).unwrap();
        assert_eq!(m.nodes(), &[-1.0, 2.0]);
        assert!((m.total_mass() - 1.0).abs() < 1e-15);
        assert!(SpectralMeasure::new(vec![]).is_err());
    }

    #[test]
    fn far_field_and_symmetry() {
        let m = SpectralMeasure::uniform(&[-1.0, 0.3, 2.0]).unwrap();
        let z = Complex64::new(3e6, 4e6);
        assert!((log_potential(&m, z) - z.norm().ln()).abs() < 1e-6);
        let w = Complex64::new(0.4, 0.9);
        assert_eq!(log_potential(&m, w), log_potential(&m, w.conj()));
        assert_eq!(log_potential(&m, Complex64::new(2.0, 0.0)), f64::NEG_INFINITY);
    }

    #[test]
    fn symmetric_pair_has_central_critical_point() {
        let m = SpectralMeasure::uniform(&[-1.5, 1.5]).unwrap();
        let cp = critical_points(&m, &[(-1.5, 1.5)], 1e-14).unwrap();
        assert!(cp[0].location.abs() < 1e-13);
        assert!(cp[0].bracket.0 > 0.0 && cp[0].bracket.1 < 0.0);
    }

    #[test]
    fn binning_preserves_mass_and_mean() {
        let pts: Vec<f64> = (0..1000).map(|k| (k as f64 * 0.37).sin()).collect();
        let m = SpectralMeasure::uniform(&pts).unwrap();
        let b = m.binned(50).unwrap();
        assert!((b.total_mass() - 1.0).abs() < 1e-12);
        assert!((b.moment(1) - m.moment(1)).abs() < 1e-12);
        assert!(b.len() <= 50);
    }

    #[test]
    fn convergents() {
        let c = golden_convergents(233);
        assert_eq!(c.last(), Some(&(144, 233)));
        assert!(c.contains(&(89, 144)));
    }

    #[test]
    fn small_dos_moments() {
        let beta: f64 = 2.0;
        let mu = dos_measure(beta, 21, 34, 8, 136, 0).unwrap();
        assert!((mu.total_mass() - 1.0).abs() < 1e-12);
        assert!((mu.moment(2) - (2.0 * beta * beta + 2.0)).abs() < 1e-9);
        assert!(mu.moment(1).abs() < 1e-9);
    }

    #[test]
    fn cumulative_is_monotone() {
        let m = SpectralMeasure::uniform(&[0.0, 1.0, 2.0, 3.0]).unwrap();
        assert_eq!(m.cumulative(-1.0), 0.0);
        assert!((m.cumulative(1.5) - 0.5).abs() < 1e-15);
        assert!((m.cumulative(3.0) - 1.0).abs() < 1e-15);
    }
}
