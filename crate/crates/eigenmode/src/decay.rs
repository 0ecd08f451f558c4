use lattice_rep::LatticeWindow;
use serde::Serialize;

use crate::ModeError;

/// Sites `inner ≤ |n| ≤ N - collar` enter the fit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FitWindow {
    pub inner: usize,
    pub collar: usize,
}

impl Default for FitWindow {
    fn default() -> Self {
        Self { inner: 10, collar: 5 }
    }
}

/// Exponential decay fit of `|ξ_n|` against `|n|`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct DecayFit {
    /// `e^{slope}` with one slope shared by both sides.
    pub rate: f64,
    pub left_rate: f64,
    pub right_rate: f64,
    /// Root-mean-square misfit of `log|ξ_n|` around the joint line.
    pub rms: f64,
    /// Sites used on each side after shrinking away underflowed components.
    pub left_sites: usize,
    pub right_sites: usize,
    pub shrunk: bool,
}

fn side(xi: &LatticeWindow, sign: i64, inner: i64, outer: i64) -> (Vec<(f64, f64)>, bool) {
    let mut pts = Vec::new();
    for k in inner..=outer {
        let z = xi.get(sign * k).unwrap_or_default().norm();
        if !(z > 1e-300) || !z.is_finite() {
            return (pts, true);
        }
        pts.push((k as f64, z.ln()));
    }
    (pts, false)
}

fn moments(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxy, sxx)
}

/// Least-squares slope of `log|ξ_n|` against `|n|` on both sides.
pub fn decay_exponent(xi: &LatticeWindow, fit: FitWindow) -> Result<DecayFit, ModeError> {
    let reach = (-xi.n_min()).min(xi.n_max());
    let inner = fit.inner as i64;
    let outer = reach - fit.collar as i64;
    if outer < inner + 2 {
        return Err(ModeError::Parameter(format!("window of half width {reach} leaves no fit range")));
    }
    let (left, ls) = side(xi, -1, inner, outer);
    let (right, rs) = side(xi, 1, inner, outer);
    if left.len() < 3 || right.len() < 3 {
        return Err(ModeError::Parameter("fewer than three usable sites on a side".into()));
    }
    let (lxy, lxx) = moments(&left);
    let (rxy, rxx) = moments(&right);
    let joint = (lxy + rxy) / (lxx + rxx);
    // refit intercepts for the shared slope
    let icpt = |pts: &[(f64, f64)]| pts.iter().map(|p| p.1 - joint * p.0).sum::<f64>() / pts.len() as f64;
    let (li, ri) = (icpt(&left), icpt(&right));
    let sq: f64 = left.iter().map(|p| (p.1 - li - joint * p.0).powi(2)).sum::<f64>()
        + right.iter().map(|p| (p.1 - ri - joint * p.0).powi(2)).sum::<f64>();
    Ok(DecayFit {
        rate: joint.exp(),
        left_rate: (lxy / lxx).exp(),
        right_rate: (rxy / rxx).exp(),
        rms: (sq / (left.len() + right.len()) as f64).sqrt(),
        left_sites: left.len(),
        right_sites: right.len(),
        shrunk: ls || rs,
    })
}
