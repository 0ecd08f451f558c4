use num_complex::Complex64;
use serde::Serialize;

use crate::{log_potential, SpectralError, SpectralMeasure};

/// A polyline starting on the real axis to the right of the support.
#[derive(Clone, Debug, Serialize)]
pub struct PathAnchor {
    pub path: Vec<Complex64>,
    /// Minimum allowed distance from any node.
    pub guard: f64,
}

impl PathAnchor {
    pub fn new(path: Vec<Complex64>, guard: f64) -> Self {
        Self { path, guard }
    }

    /// Straight path from `anchor` to `end`.
    pub fn straight(anchor: f64, end: Complex64, guard: f64) -> Self {
        Self { path: vec![Complex64::new(anchor, 0.0), end], guard }
    }

    /// Circle of radius `r` around `centre`, starting and ending at `centre + r`.
    pub fn circle(centre: Complex64, r: f64, points: usize, guard: f64) -> Self {
        let path = (0..=points)
            .map(|k| centre + Complex64::from_polar(r, 2.0 * std::f64::consts::PI * k as f64 / points as f64))
            .collect();
        Self { path, guard }
    }
}

/// `Σ w_k log(z - t_k)` continued along a path; the state carries the
/// accumulated argument of each factor.
#[derive(Clone, Debug)]
pub struct LogContinuation<'a> {
    mu: &'a SpectralMeasure,
    z: Complex64,
    args: Vec<f64>,
}

impl<'a> LogContinuation<'a> {
    /// Start at `z0` with principal arguments.
    pub fn start(mu: &'a SpectralMeasure, z0: Complex64) -> Self {
        let args = mu.nodes().iter().map(|&t| (z0 - t).arg()).collect();
        Self { mu, z: z0, args }
    }

    pub fn position(&self) -> Complex64 {
        self.z
    }

    fn min_distance(&self, z: Complex64) -> f64 {
        self.mu.nodes().iter().map(|&t| (z - t).norm()).fold(f64::INFINITY, f64::min)
    }

    /// Move along the straight segment to `target` in steps short enough
    /// that no factor's argument jumps by more than a quarter turn.
    pub fn advance_to(&mut self, target: Complex64, guard: f64) -> Result<(), SpectralError> {
        loop {
            let d = self.min_distance(self.z);
            if d < guard {
                return Err(SpectralError::PathTooClose { at: self.z, distance: d });
            }
            let remaining = target - self.z;
            let len = remaining.norm();
            if len == 0.0 {
                return Ok(());
            }
            let step = len.min(0.5 * d);
            let next = self.z + remaining * (step / len);
            for (a, &t) in self.args.iter_mut().zip(self.mu.nodes()) {
                *a += ((next - t) / (self.z - t)).arg();
            }
            self.z = next;
            if step == len {
                let d = self.min_distance(self.z);
                if d < guard {
                    return Err(SpectralError::PathTooClose { at: self.z, distance: d });
                }
                return Ok(());
            }
        }
    }

    /// `Σ w_k arg(z - t_k)` along the continuation.
    pub fn total_arg(&self) -> f64 {
        self.args.iter().zip(self.mu.weights()).map(|(a, w)| a * w).sum()
    }

    /// `β^{-1} exp(Σ w_k log(z - t_k))`.
    pub fn g(&self, beta: f64) -> Complex64 {
        Complex64::from_polar(log_potential(self.mu, self.z).exp() / beta, self.total_arg())
    }
}

/// `G(z_end)` continued from the real anchor at the start of the path.
pub fn g_value(mu: &SpectralMeasure, beta: f64, anchor: &PathAnchor, z_end: Option<Complex64>) -> Result<Complex64, SpectralError> {
    let z0 = *anchor.path.first().ok_or_else(|| SpectralError::Parameter("empty path".into()))?;
    let (_, hi) = mu.support_bounds();
    if z0.im != 0.0 || z0.re <= hi {
        return Err(SpectralError::Parameter(format!("anchor {z0} must be real and right of the support")));
    }
    let mut cont = LogContinuation::start(mu, z0);
    for &p in &anchor.path[1..] {
        cont.advance_to(p, anchor.guard)?;
    }
    if let Some(z) = z_end {
        cont.advance_to(z, anchor.guard)?;
    }
    Ok(cont.g(beta))
}

/// Factor acquired by `G` around a closed path: `exp(i Σ w_k Δarg_k)`,
/// equal to `e^{2πi m}` with `m` the enclosed mass.
pub fn monodromy(mu: &SpectralMeasure, closed: &PathAnchor) -> Result<Complex64, SpectralError> {
    let z0 = closed.path[0];
    let mut cont = LogContinuation::start(mu, z0);
    let a0 = cont.total_arg();
    for &p in &closed.path[1..] {
        cont.advance_to(p, closed.guard)?;
    }
    cont.advance_to(z0, closed.guard)?;
    Ok(Complex64::from_polar(1.0, cont.total_arg() - a0))
}

/// Smallest `|n| ≤ n_max` with `e^{2πiαn}` closest to `factor`, and the distance.
pub fn gap_label(factor: Complex64, alpha: f64, n_max: i64) -> (i64, f64) {
    (-n_max..=n_max)
        .map(|n| (n, (factor - Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * alpha * n as f64)).norm()))
        .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.abs().cmp(&b.0.abs())))
        .unwrap()
}
