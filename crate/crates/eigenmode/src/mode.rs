use std::f64::consts::PI;

use lattice_rep::{HParams, LatticeWindow, PhaseReducer};
use num_complex::Complex64;
use numlin::{hessenberg_eigenvalues, inverse_iteration, norm2};
use rayon::prelude::*;
use serde::Serialize;
use spectral::Truncation;

use crate::{decay_exponent, FitWindow, ModeError};

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Controls for [`find_phase_eigenpair`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ModeSearch {
    pub beta: f64,
    pub delta: f64,
    /// Half width of the window holding the final mode.
    pub half_width: usize,
    /// Half width of the truncations used for the phase sweep.
    pub coarse_half_width: usize,
    /// Number of phases in the sweep.
    pub coarse_grid: usize,
    /// Largest acceptable distance between the eigenvalue and the target.
    pub refine_tol: f64,
    pub max_refine: usize,
}

impl ModeSearch {
    pub fn new(beta: f64, delta: f64) -> Self {
        Self { beta, delta, half_width: 150, coarse_half_width: 40, coarse_grid: 96, refine_tol: 1e-2, max_refine: 80 }
    }

    fn validate(&self) -> Result<(), ModeError> {
        if !(self.delta > 1.0) || !(self.beta > 0.0) {
            return Err(ModeError::Parameter(format!("need delta > 1 and beta > 0, got {} and {}", self.delta, self.beta)));
        }
        if self.coarse_half_width < 8 || self.half_width < self.coarse_half_width || self.coarse_grid < 3 {
            return Err(ModeError::Parameter("windows or grid too small".into()));
        }
        Ok(())
    }
}

/// An eigenvector of `h(δx)` on `n = -N..N`, unit norm, largest component real positive.
#[derive(Clone, Debug)]
pub struct EigenMode {
    pub x: Complex64,
    pub delta: f64,
    pub beta: f64,
    pub chi: Complex64,
    pub xi: LatticeWindow,
    pub decay_rate: f64,
    pub gamma_value: Option<Complex64>,
    /// `‖Mξ - χξ‖₂` for the open truncation `M`.
    pub residual: f64,
}

/// JSON view of a mode without the vector.
#[derive(Clone, Debug, Serialize)]
pub struct ModeSummary {
    pub phase_turns: f64,
    pub x: Complex64,
    pub delta: f64,
    pub beta: f64,
    pub chi: Complex64,
    pub decay_rate: f64,
    pub gamma_value: Option<Complex64>,
    pub residual: f64,
    pub half_width: usize,
}

impl EigenMode {
    /// Assemble a mode from a vector, normalising and aligning it and
    /// recomputing residual and decay rate.
    pub fn from_parts(
        x: Complex64,
        delta: f64,
        beta: f64,
        chi: Complex64,
        xi: LatticeWindow,
        alpha: &PhaseReducer,
    ) -> Result<Self, ModeError> {
        let xi = align_phase(&xi)?;
        let mut mode = Self { x, delta, beta, chi, xi, decay_rate: f64::NAN, gamma_value: None, residual: f64::NAN };
        mode.residual = mode.eigen_residual(alpha)?;
        mode.decay_rate = decay_exponent(&mode.xi, FitWindow::default())?.rate;
        Ok(mode)
    }

    /// `P = δx`.
    pub fn parameter(&self) -> Complex64 {
        self.x * self.delta
    }

    pub fn half_width(&self) -> usize {
        self.xi.n_max() as usize
    }

    pub fn truncation(&self) -> Truncation {
        truncation_at(self.parameter(), self.beta, self.half_width())
    }

    pub fn eigen_residual(&self, alpha: &PhaseReducer) -> Result<f64, ModeError> {
        let m = self.truncation().matrix(ONE, alpha)?;
        let r = m.mul_vec(self.xi.values());
        Ok(r.iter().zip(self.xi.values()).map(|(a, b)| (a - self.chi * b).norm_sqr()).sum::<f64>().sqrt())
    }

    pub fn summary(&self) -> ModeSummary {
        ModeSummary {
            phase_turns: self.x.arg().rem_euclid(2.0 * PI) / (2.0 * PI),
            x: self.x,
            delta: self.delta,
            beta: self.beta,
            chi: self.chi,
            decay_rate: self.decay_rate,
            gamma_value: self.gamma_value,
            residual: self.residual,
            half_width: self.half_width(),
        }
    }

    pub fn to_json(&self) -> Result<String, ModeError> {
        Ok(serde_json::to_string_pretty(&self.summary())?)
    }
}

/// Divide by the unit phase of the largest component and normalise.
pub fn align_phase(xi: &LatticeWindow) -> Result<LatticeWindow, ModeError> {
    let nrm = xi.norm2();
    if !(nrm > 0.0) || !nrm.is_finite() {
        return Err(ModeError::Parameter("cannot align a zero or non-finite vector".into()));
    }
    let (at, top) = xi.iter().max_by(|a, b| a.1.norm().total_cmp(&b.1.norm())).unwrap();
    let mut out = xi.scale(top.conj() / (top.norm() * nrm));
    out.set(at, Complex64::new(top.norm() / nrm, 0.0));
    Ok(out)
}

/// Local minimum of the coarse phase sweep.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct CoarseMinimum {
    pub phase_turns: f64,
    pub distance: f64,
    pub eigenvalue: Complex64,
    /// Site of the largest component of the matching coarse eigenvector.
    pub centre: i64,
}

#[derive(Clone, Debug)]
pub struct PhaseSolution {
    pub mode: EigenMode,
    pub coarse_minima: Vec<CoarseMinimum>,
    /// Best distance after each refinement step; never increases.
    pub refine_history: Vec<f64>,
    /// Index shift applied to centre the mode at the origin.
    pub recentred_by: i64,
    pub target_distance: f64,
}

fn truncation_at(p: Complex64, beta: f64, half_width: usize) -> Truncation {
    Truncation { delta: p, ..Truncation::open(1.0, 1.0, beta, half_width) }
}

fn turns_to_phase(t: f64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * t)
}

/// Nearest eigenvalue to `target` among those of the coarse truncation
/// whose eigenvectors peak in the middle half of the window.
fn nearest_central(
    s: &ModeSearch,
    alpha: &PhaseReducer,
    turns: f64,
    target: Complex64,
) -> Result<Option<CoarseMinimum>, ModeError> {
    let nc = s.coarse_half_width;
    let m = truncation_at(turns_to_phase(turns) * s.delta, s.beta, nc).matrix(ONE, alpha)?;
    let mut ev = hessenberg_eigenvalues(&m, 1.0)?;
    ev.sort_by(|a, b| (a - target).norm().total_cmp(&(b - target).norm()));
    for &e in ev.iter().take(8) {
        let pair = match inverse_iteration(&m, e, 1e-10, 12) {
            Ok(p) => p,
            Err(numlin::NumError::NoConvergence { .. }) => continue,
            Err(err) => return Err(err.into()),
        };
        let k = argmax(&pair.vector);
        let centre = k as i64 - nc as i64;
        if centre.unsigned_abs() as usize <= nc / 2 {
            return Ok(Some(CoarseMinimum { phase_turns: turns, distance: (e - target).norm(), eigenvalue: e, centre }));
        }
    }
    Ok(None)
}

fn argmax(v: &[Complex64]) -> usize {
    v.iter().enumerate().max_by(|a, b| a.1.norm().total_cmp(&b.1.norm())).map(|(k, _)| k).unwrap_or(0)
}

/// Ratios of the decaying solution continued outward from the sites where
/// the mode drops below `1e-6` of its peak, replacing the roundoff floor of
/// the tails. Assumes unit hopping.
pub fn refine_tails(xi: &LatticeWindow, p: Complex64, beta: f64, chi: Complex64, alpha: &PhaseReducer) -> LatticeWindow {
    let params = HParams::at_parameter(p, beta);
    let v = |n: i64| params.potential(n, alpha) - chi;
    let (lo, hi) = (xi.n_min(), xi.n_max());
    let peak_at = xi.iter().max_by(|a, b| a.1.norm().total_cmp(&b.1.norm())).map(|(n, _)| n).unwrap();
    let floor = 1e-6 * xi.at(peak_at).norm();
    let mut out = xi.clone();

    if let Some(start) = (peak_at..hi).find(|&n| xi.at(n).norm() < floor) {
        // s_n = ξ_{n+1}/ξ_n from the open edge inward
        let mut s = vec![Complex64::new(0.0, 0.0); (hi - start + 1) as usize];
        let idx = |n: i64| (n - start) as usize;
        for n in (start..hi).rev() {
            let next = if n + 1 == hi { Complex64::new(0.0, 0.0) } else { s[idx(n + 1)] };
            s[idx(n)] = -(v(n + 1) + next).inv();
        }
        for n in start..hi {
            out.set(n + 1, out.at(n) * s[idx(n)]);
        }
    }
    if let Some(start) = (lo + 1..=peak_at).rev().find(|&n| xi.at(n).norm() < floor) {
        // t_n = ξ_{n-1}/ξ_n from the open edge inward
        let mut t = vec![Complex64::new(0.0, 0.0); (start - lo + 1) as usize];
        let idx = |n: i64| (n - lo) as usize;
        for n in lo + 1..=start {
            let prev = if n - 1 == lo { Complex64::new(0.0, 0.0) } else { t[idx(n - 1)] };
            t[idx(n)] = -(v(n - 1) + prev).inv();
        }
        for n in (lo + 1..=start).rev() {
            out.set(n - 1, out.at(n) * t[idx(n)]);
        }
    }
    out
}

fn golden_section(
    f: impl Fn(f64) -> Result<Option<CoarseMinimum>, ModeError>,
    mut a: f64,
    mut b: f64,
    start: CoarseMinimum,
    max_iter: usize,
) -> Result<(CoarseMinimum, Vec<f64>), ModeError> {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let eval = |t: f64| -> Result<(f64, Option<CoarseMinimum>), ModeError> {
        let m = f(t)?;
        Ok((m.map_or(f64::INFINITY, |m| m.distance), m))
    };
    let mut best = start;
    let mut history = vec![best.distance];
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut mc) = eval(c)?;
    let (mut fd, mut md) = eval(d)?;
    for _ in 0..max_iter {
        for m in [mc, md].into_iter().flatten() {
            if m.distance < best.distance {
                best = m;
            }
        }
        if best.distance < history[history.len() - 1] {
            history.push(best.distance);
        }
        if (b - a).abs() < 1e-14 || best.distance < 1e-14 {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            md = mc;
            c = b - r * (b - a);
            (fc, mc) = eval(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            mc = md;
            d = a + r * (b - a);
            (fd, md) = eval(d)?;
        }
    }
    Ok((best, history))
}

/// Locate a phase `x` where `h(δx)` has an eigenvalue at `target`.
///
/// A coarse sweep over `x` keeps the eigenvalue nearest the target among
/// centrally localised coarse modes; the best local minimum is refined by
/// golden-section search. The final mode is recomputed on the full window,
/// moved so that it peaks at the origin (`x → λ^{-2m}x`), and its tails
/// are replaced by the continued-fraction solution.
pub fn find_phase_eigenpair(s: &ModeSearch, target: Complex64, alpha: &PhaseReducer) -> Result<PhaseSolution, ModeError> {
    s.validate()?;
    let k = s.coarse_grid;
    let sweep: Vec<Option<CoarseMinimum>> = (0..k)
        .into_par_iter()
        .map(|i| nearest_central(s, alpha, i as f64 / k as f64, target))
        .collect::<Result<_, _>>()?;
    let dist = |i: usize| sweep[i % k].map_or(f64::INFINITY, |m| m.distance);
    let mut minima: Vec<(usize, CoarseMinimum)> = (0..k)
        .filter(|&i| {
            let d = dist(i);
            d.is_finite() && d <= dist(i + k - 1) && d <= dist(i + 1)
        })
        .map(|i| (i, sweep[i].unwrap()))
        .collect();
    minima.sort_by(|a, b| a.1.distance.total_cmp(&b.1.distance));
    let Some(&(_, start)) = minima.first() else {
        return Err(ModeError::NoPhase { phase: 0.0, distance: f64::INFINITY, tol: s.refine_tol });
    };
    let coarse_minima: Vec<CoarseMinimum> = minima.into_iter().map(|(_, m)| m).collect();
    let (mode, refine_history, recentred_by) = refine_minimum(s, target, &start, alpha)?;
    Ok(PhaseSolution { target_distance: (mode.chi - target).norm(), mode, coarse_minima, refine_history, recentred_by })
}

/// Refine one coarse minimum into a centred mode; returns the mode, the
/// refinement history and the applied index shift.
pub fn refine_minimum(
    s: &ModeSearch,
    target: Complex64,
    start: &CoarseMinimum,
    alpha: &PhaseReducer,
) -> Result<(EigenMode, Vec<f64>, i64), ModeError> {
    s.validate()?;
    let h = 1.0 / s.coarse_grid as f64;
    let centre = start.phase_turns;
    let (best, history) =
        golden_section(|t| nearest_central(s, alpha, t, target), centre - h, centre + h, *start, s.max_refine)?;
    if best.distance > s.refine_tol {
        return Err(ModeError::NoPhase { phase: best.phase_turns, distance: best.distance, tol: s.refine_tol });
    }
    let x0 = turns_to_phase(best.phase_turns);
    let mut sol = full_mode(s, x0, best.eigenvalue, alpha)?;
    let shift = argmax_site(&sol.1);
    let mut x = x0;
    if shift != 0 {
        x = x0 * alpha.lambda_pow(-2 * shift);
        sol = full_mode(s, x, sol.0, alpha)?;
    }
    let (chi, xi) = sol;
    let xi = refine_tails(&xi, x * s.delta, s.beta, chi, alpha);
    Ok((EigenMode::from_parts(x, s.delta, s.beta, chi, xi, alpha)?, history, shift))
}

fn argmax_site(xi: &LatticeWindow) -> i64 {
    xi.iter().max_by(|a, b| a.1.norm().total_cmp(&b.1.norm())).map(|(n, _)| n).unwrap()
}

fn full_mode(s: &ModeSearch, x: Complex64, shift: Complex64, alpha: &PhaseReducer) -> Result<(Complex64, LatticeWindow), ModeError> {
    let m = truncation_at(x * s.delta, s.beta, s.half_width).matrix(ONE, alpha)?;
    let pair = inverse_iteration(&m, shift, 1e-14, 40).or_else(|_| inverse_iteration(&m, shift, 1e-11, 80))?;
    let nrm = norm2(&pair.vector);
    let v: Vec<Complex64> = pair.vector.iter().map(|z| z / nrm).collect();
    Ok((pair.value, LatticeWindow::new(-(s.half_width as i64), v)?))
}
