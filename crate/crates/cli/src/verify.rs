//! Measurements behind the verification suite.
//!
//! Each `measure_*` function returns raw numbers at fixed reference
//! parameters; [`run`] turns them into a pass/fail table.

use eigenmode::{decay_exponent, find_phase_eigenpair, gamma_value, omega_shift_check, sum_squares_scan, FitWindow, ModeSearch};
use fredholm::{
    assemble_h, essential_spectrum_curve, k_unitarity_check, kernel_dimension, kernel_transform_check, localized_mode,
    symbol_distance, tan_coefficients, unbounded_transform_check, Branch, TanSeries,
};
use lattice_rep::{intertwine_residual, Conjugator, KCutoffs, PhaseReducer};
use num_complex::Complex64;
use numlin::hessenberg_eigenvalues;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rotation_algebra::{moment, rho_beta, AlgebraElement, AlphaId};
use serde::Serialize;
use spectral::{
    critical_points, detect_gaps, dos_measure, level_curve, log_potential, potential_derivative, spectrum_cloud,
    spectrum_constancy_check, uniform_phases, BBox, SpectralMeasure, Truncation,
};

use crate::CliError;

pub const BETA: f64 = 2.0;
pub const DELTA: f64 = 1.5;

fn num<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Numerical(e.to_string())
}

fn golden() -> PhaseReducer {
    PhaseReducer::golden()
}

/// Square window holding the level curve `Φ = log(βδ)`.
pub fn level_bbox(beta: f64, delta: f64) -> BBox {
    BBox::square(beta * delta + 3.0)
}

/// Density of states from the convergent `p/q`.
pub fn reference_dos(beta: f64, p: i64, q: i64, phases: usize, sites: usize) -> Result<SpectralMeasure, CliError> {
    dos_measure(beta, p, q, phases, sites, 0).map_err(num)
}

/// `count` points spread along the longest branch of the level curve.
pub fn curve_targets(mu: &SpectralMeasure, beta: f64, delta: f64, count: usize, offset: usize) -> Result<Vec<Complex64>, CliError> {
    let c = level_curve(mu, (beta * delta).ln(), level_bbox(beta, delta), 121, 1e-12).map_err(num)?;
    let p = c.polylines.iter().max_by_key(|p| p.points.len()).ok_or_else(|| num("empty level curve"))?;
    Ok((0..count).map(|i| p.points[(i * p.points.len() / count + offset) % p.points.len()]).collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct MomentRow {
    pub beta: f64,
    pub second: f64,
    pub fourth: f64,
    /// Largest `|τ(h^n)|` over `n = 1, 3, 5`.
    pub odd: f64,
}

pub fn measure_moments(betas: &[f64]) -> Result<Vec<MomentRow>, CliError> {
    betas
        .iter()
        .map(|&beta| {
            let odd = [1, 3, 5].iter().map(|&n| moment(beta, n).map(f64::abs)).collect::<Result<Vec<_>, _>>().map_err(num)?;
            Ok(MomentRow {
                beta,
                second: moment(beta, 2).map_err(num)?,
                fourth: moment(beta, 4).map_err(num)?,
                odd: odd.into_iter().fold(0.0, f64::max),
            })
        })
        .collect()
}

/// Coefficient sup-norm of `ρ_β(u + βv) − (u* + βv)` at each Neumann order.
pub fn measure_rho(beta: f64, orders: &[usize]) -> Result<Vec<f64>, CliError> {
    let g = AlphaId::Golden;
    let bv = AlgebraElement::v(g).scale(Complex64::new(beta, 0.0));
    let source = AlgebraElement::u(g).add(&bv).map_err(num)?;
    let target = AlgebraElement::u(g).adjoint().add(&bv).map_err(num)?;
    orders
        .iter()
        .map(|&k| Ok(rho_beta(&source, beta, k).map_err(num)?.sub(&target).map_err(num)?.sup_norm()))
        .collect()
}

/// Worst interior residual of `k h_{γδ}(δ) = h_{γ/δ}(δ) k` over random vectors.
pub fn measure_intertwining(gamma: f64, delta: f64, beta: f64, trials: usize, seed: u64) -> Result<f64, CliError> {
    intertwine_residual(gamma, delta, beta, &golden(), trials, 20, seed, KCutoffs::default()).map_err(num)
}

#[derive(Clone, Debug, Serialize)]
pub struct WronskianSweep {
    pub draws: usize,
    pub worst: f64,
    /// Smallest residual against the printed prefactor.
    pub literal_best: f64,
}

/// Random initial data at `β = 2`, `θ = 0.3`, `z = 1 + 0.2i`.
pub fn measure_wronskian(draws: usize, p_max: usize, seed: u64) -> Result<WronskianSweep, CliError> {
    let params = diffsys::SystemParams { alpha: golden(), theta: 0.3, beta: 2.0, z: Complex64::new(1.0, 0.2) };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = || Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let mut out = WronskianSweep { draws, worst: 0.0, literal_best: f64::INFINITY };
    for _ in 0..draws {
        let (x, y) = ((draw(), draw()), (draw(), draw()));
        let r = diffsys::wronskian_residual(x, y, &params, p_max, diffsys::Guard::default()).map_err(num)?;
        out.worst = out.worst.max(r.residual);
        out.literal_best = out.literal_best.min(r.literal_residual);
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct LevelLaw {
    pub eigenvalues: usize,
    pub mean: f64,
    pub max: f64,
}

/// `|Φ(z) − log(βδ)|` over the phase-union cloud of open truncations.
pub fn measure_level_law(mu: &SpectralMeasure, beta: f64, delta: f64, half_width: usize, phases: usize) -> Result<LevelLaw, CliError> {
    let t = Truncation::open(1.0, delta, beta, half_width);
    let cloud = spectrum_cloud(&t, &uniform_phases(phases, 0.25), &golden()).map_err(num)?;
    let level = (beta * delta).ln();
    let dev: Vec<f64> = cloud.iter().map(|&z| (log_potential(mu, z) - level).abs()).collect();
    Ok(LevelLaw {
        eigenvalues: dev.len(),
        mean: dev.iter().sum::<f64>() / dev.len() as f64,
        max: dev.iter().copied().fold(0.0, f64::max),
    })
}

/// Largest pairwise Hausdorff distance between interior clouds over `γ`.
pub fn measure_constancy(beta: f64, delta: f64, gammas: &[f64], half_width: usize, phases: usize) -> Result<f64, CliError> {
    let r = spectrum_constancy_check(beta, delta, gammas, half_width, &uniform_phases(phases, 0.1), &golden(), f64::INFINITY)
        .map_err(num)?;
    Ok(r.max_distance)
}

#[derive(Clone, Debug, Serialize)]
pub struct ModeRow {
    pub target: Complex64,
    pub chi: Complex64,
    pub target_distance: f64,
    pub rate: f64,
    pub left_rate: f64,
    pub right_rate: f64,
    pub residual: f64,
    pub gamma_fit_residual: f64,
    pub shift_literal: f64,
    pub shift_corrected: f64,
    pub shift_modulus: f64,
}

fn gamma_conjugator(beta: f64) -> Result<Conjugator, CliError> {
    Conjugator::new(1.0, beta, &golden(), KCutoffs { floor: 1e-15, ..KCutoffs::default() }).map_err(num)
}

/// Modes at `count` targets along the level curve: decay, residual and the
/// shift law of `Γ`.
pub fn measure_modes(mu: &SpectralMeasure, beta: f64, delta: f64, count: usize) -> Result<Vec<ModeRow>, CliError> {
    let a = golden();
    let k = gamma_conjugator(beta)?;
    curve_targets(mu, beta, delta, count, 2)?
        .into_iter()
        .map(|t| {
            let s = find_phase_eigenpair(&ModeSearch::new(beta, delta), t, &a).map_err(num)?;
            let m = &s.mode;
            let fit = decay_exponent(&m.xi, FitWindow::default()).map_err(num)?;
            let g = gamma_value(m, m.parameter(), &k).map_err(num)?;
            let shift = omega_shift_check(m, m.parameter(), &k, &a).map_err(num)?;
            Ok(ModeRow {
                target: t,
                chi: m.chi,
                target_distance: s.target_distance,
                rate: fit.rate,
                left_rate: fit.left_rate,
                right_rate: fit.right_rate,
                residual: m.residual,
                gamma_fit_residual: g.residual,
                shift_literal: shift.literal_residual,
                shift_corrected: shift.corrected_residual,
                shift_modulus: shift.modulus_residual,
            })
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct FredholmRow {
    pub chi: Complex64,
    pub transform: f64,
    pub dim: usize,
    pub gap: f64,
    pub perturbed_dim: usize,
    pub perturbed_smallest: f64,
    pub eigenvalues: usize,
    pub outliers: usize,
}

pub fn reference_symbol(beta: f64) -> Result<TanSeries, CliError> {
    tan_coefficients(beta, 1.0, &golden(), 60, 2048, 0.05, 1e-16).map_err(num)
}

/// Assemblies on `|n| ≤ 90` for modes along the level curve; the negative
/// control scales the diagonal data by 1.5.
pub fn measure_fredholm(mu: &SpectralMeasure, beta: f64, delta: f64, count: usize) -> Result<Vec<FredholmRow>, CliError> {
    let a = golden();
    let k = gamma_conjugator(beta)?;
    let symbol = reference_symbol(beta)?;
    let curves = essential_spectrum_curve(&symbol.coeffs, 2000);
    curve_targets(mu, beta, delta, count, 3)?
        .into_iter()
        .map(|t| {
            let m = find_phase_eigenpair(&ModeSearch::new(beta, delta), t, &a).map_err(num)?.mode;
            let g = m.parameter();
            let gam = gamma_value(&m, g, &k).map_err(num)?.value;
            let transform = kernel_transform_check(&m, gam, g, &symbol.coeffs, &a, Branch::Continued).map_err(num)?.residual;
            let h = assemble_h(gam, g, &symbol.coeffs, -90, 90, &a, 1e-12).map_err(num)?.matrix();
            let rep = kernel_dimension(&h, 1e3).map_err(num)?;
            let hp = assemble_h(gam * 1.5, g, &symbol.coeffs, -90, 90, &a, 1e-12).map_err(num)?.matrix();
            let pert = kernel_dimension(&hp, 1e3).map_err(num)?;
            let ev = hessenberg_eigenvalues(&h, 1e-13).map_err(num)?;
            let outliers = ev.iter().filter(|e| symbol_distance(&curves, **e) > 0.1).count();
            Ok(FredholmRow {
                chi: m.chi,
                transform,
                dim: rep.dim,
                gap: rep.gap,
                perturbed_dim: pert.dim,
                perturbed_smallest: pert.smallest.first().copied().unwrap_or(f64::NAN),
                eigenvalues: ev.len(),
                outliers,
            })
        })
        .collect()
}

/// `max |c_pq − c_{−p,q}|` for `|p|, |q| ≤ 5` at each `z`.
pub fn measure_resolvent_symmetry(beta: f64, zs: &[Complex64], samples: usize) -> Result<Vec<f64>, CliError> {
    zs.iter()
        .map(|&z| Ok(diffsys::resolvent_coefficients(z, beta, &golden(), 5, 5, 60, samples).map_err(num)?.symmetry_defect()))
        .collect()
}

/// Relative residual of the eigenvector/resolvent identity after the scalar fit.
pub fn measure_identity(mu: &SpectralMeasure, beta: f64, delta: f64) -> Result<diffsys::IdentityFit, CliError> {
    let a = golden();
    let t = curve_targets(mu, beta, delta, 7, 0)?[1];
    let m = find_phase_eigenpair(&ModeSearch::new(beta, delta), t, &a).map_err(num)?.mode;
    let ct = diffsys::resolvent_coefficients(m.chi, beta, &a, 3, 3, 80, 128).map_err(num)?;
    let dt = diffsys::d_polynomials(beta, &a, 3, 3, m.chi).map_err(num)?;
    diffsys::eigen_resolvent_identity(&m, m.parameter(), &ct, &dt, 3, 3, &a).map_err(num)
}

#[derive(Clone, Debug, Serialize)]
pub struct CriticalReport {
    pub gaps: Vec<(f64, f64)>,
    /// Sign changes of `Φ'` sampled inside each gap.
    pub sign_changes: Vec<usize>,
    pub critical_points: Vec<f64>,
    /// Scanned gap, the scan step and where `|Σξ²|` was smallest.
    pub scan_gap: (f64, f64),
    pub scan_step: f64,
    pub scan_argmin: f64,
    pub scan_min: f64,
}

/// Gaps wider than 0.3, sign changes of `Φ'` on 2000 points per gap, and a
/// 13-point `Σξ²` scan across the uppermost gap.
pub fn measure_critical_points(mu: &SpectralMeasure, beta: f64, delta: f64) -> Result<CriticalReport, CliError> {
    let gaps = detect_gaps(mu, 0.3);
    if gaps.is_empty() {
        return Ok(CriticalReport {
            gaps,
            sign_changes: vec![],
            critical_points: vec![],
            scan_gap: (f64::NAN, f64::NAN),
            scan_step: f64::NAN,
            scan_argmin: f64::NAN,
            scan_min: f64::NAN,
        });
    }
    let d = |x: f64| potential_derivative(mu, Complex64::new(x, 0.0)).re;
    let sign_changes = gaps
        .iter()
        .map(|&(a, b)| {
            let eps = 1e-6 * (b - a);
            let vals: Vec<f64> = (0..=2000).map(|i| d(a + eps + (b - a - 2.0 * eps) * i as f64 / 2000.0)).collect();
            vals.windows(2).filter(|w| w[0].signum() != w[1].signum()).count()
        })
        .collect();
    let cps = critical_points(mu, &gaps, 1e-12).map_err(num)?;
    let gap = gaps[gaps.len() - 1];
    let n = 13;
    let step = (gap.1 - gap.0 - 0.1) / (n - 1) as f64;
    let pts: Vec<f64> = (0..n).map(|i| gap.0 + 0.05 + i as f64 * step).collect();
    let scan = sum_squares_scan(mu, &ModeSearch::new(beta, delta), &pts, &golden(), 0.5).map_err(num)?;
    Ok(CriticalReport {
        gaps,
        sign_changes,
        critical_points: cps.iter().map(|c| c.location).collect(),
        scan_gap: gap,
        scan_step: step,
        scan_argmin: scan.argmin,
        scan_min: scan.min_abs,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct UnboundedRow {
    pub eigen_residual: f64,
    pub transform: f64,
    pub unitarity: f64,
    pub coverage: f64,
}

/// The cosine transform at `γ = 1`, `β = 4` and the unit-circle deviation
/// of the compressed conjugator on 101 sites.
pub fn measure_unbounded(beta: f64) -> Result<UnboundedRow, CliError> {
    let a = golden();
    let x = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * 0.1234);
    let (_, xi) = localized_mode(x, beta, &a, 150).map_err(num)?;
    let k = Conjugator::new(1.0, beta, &a, KCutoffs { floor: 1e-16, ..KCutoffs::default() }).map_err(num)?;
    let tan = reference_symbol(beta)?;
    let rep = unbounded_transform_check(&xi, x, &k, &tan.coeffs, &a, 1e-9).map_err(num)?;
    let u = k_unitarity_check(1.0, beta, Complex64::from_polar(1.0, 0.7), 101, 64, &a).map_err(num)?;
    Ok(UnboundedRow { eigen_residual: rep.eigen_residual, transform: rep.residual, unitarity: u.max_deviation, coverage: u.coverage })
}

/// One row of the verification table.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub criterion: u8,
    pub check: String,
    pub passed: bool,
    /// Rows measuring a formula as printed rather than in corrected form;
    /// they are reported but do not decide the outcome.
    pub informational: bool,
    pub measured: String,
}

impl Check {
    fn new(criterion: u8, check: &str, passed: bool, measured: String) -> Self {
        Self { criterion, check: check.into(), passed, informational: false, measured }
    }

    fn info(criterion: u8, check: &str, passed: bool, measured: String) -> Self {
        Self { informational: true, ..Self::new(criterion, check, passed, measured) }
    }

    pub fn status(&self) -> &'static str {
        if self.passed {
            "PASS"
        } else {
            "FAIL"
        }
    }
}

pub fn fourth_moment_corrected(beta: f64, alpha: f64) -> f64 {
    6.0 * beta.powi(4) + (16.0 + 8.0 * (2.0 * std::f64::consts::PI * alpha).cos()) * beta * beta + 6.0
}

pub fn fourth_moment_printed(beta: f64, alpha: f64) -> f64 {
    6.0 * beta.powi(4) + (24.0 + 16.0 * (2.0 * std::f64::consts::PI * alpha).cos()) * beta * beta + 6.0
}

fn moment_checks(out: &mut Vec<Check>) -> Result<(), CliError> {
    let alpha = golden().value();
    let rows = measure_moments(&[1.5, 2.0, 3.0])?;
    let worst = |f: &dyn Fn(&MomentRow) -> f64| rows.iter().map(f).fold(0.0, f64::max);
    let second = worst(&|r| (r.second - (2.0 * r.beta * r.beta + 2.0)).abs());
    let printed = worst(&|r| (r.fourth - fourth_moment_printed(r.beta, alpha)).abs());
    let corrected = worst(&|r| (r.fourth - fourth_moment_corrected(r.beta, alpha)).abs());
    let odd = worst(&|r| r.odd);
    out.push(Check::info(1, "fourth moment, printed coefficient", printed < 1e-10, format!("max |Δ| = {printed:.3e}")));
    out.push(Check::new(
        1,
        "moments, corrected fourth",
        second < 1e-10 && corrected < 1e-10 && odd <= 1e-12,
        format!("second {second:.2e}, fourth {corrected:.2e}, odd {odd:.2e}"),
    ));
    Ok(())
}

fn rho_check(out: &mut Vec<Check>) -> Result<(), CliError> {
    let r = measure_rho(2.0, &[20, 40, 60])?;
    let ok = r[2] < 1e-6 && r[1] < r[0] && r[2] < r[1];
    out.push(Check::new(2, "rho defect at orders 20/40/60", ok, format!("{:.2e} {:.2e} {:.2e}", r[0], r[1], r[2])));
    Ok(())
}

fn wronskian_check(out: &mut Vec<Check>, seed: u64) -> Result<(), CliError> {
    let w = measure_wronskian(100, 40, seed)?;
    out.push(Check::new(4, "Wronskian, 100 draws, P = 40", w.worst < 1e-10, format!("worst {:.2e}", w.worst)));
    Ok(())
}

fn symmetry_check(out: &mut Vec<Check>) -> Result<(), CliError> {
    let d = measure_resolvent_symmetry(2.0, &[Complex64::new(0.5, 1.0), Complex64::new(-1.5, 0.7)], 128)?;
    let worst = d.iter().copied().fold(0.0, f64::max);
    out.push(Check::new(9, "c_pq = c_{|p|,q}", worst < 1e-8, format!("max defect {worst:.2e}")));
    Ok(())
}

/// Runs the suite. `quick` keeps the algebraic and recursion checks only.
pub fn run(quick: bool, seed: u64) -> Result<Vec<Check>, CliError> {
    let mut out = Vec::new();
    moment_checks(&mut out)?;
    rho_check(&mut out)?;
    let r = measure_intertwining(1.0, 1.3, 2.0, 20, seed)?;
    out.push(Check::new(3, "intertwining, 20 vectors", r < 1e-8, format!("{r:.2e}")));
    wronskian_check(&mut out, seed)?;
    symmetry_check(&mut out)?;
    if quick {
        out.sort_by_key(|c| c.criterion);
        return Ok(out);
    }

    let mu = reference_dos(BETA, 55, 89, 16, 356)?;
    let law_mu = reference_dos(BETA, 144, 233, 16, 932)?;
    let law = measure_level_law(&law_mu, BETA, DELTA, 600, 16)?;
    out.push(Check::new(5, "level law, N = 600, 16 phases", law.mean < 0.02, format!("mean {:.2e}", law.mean)));
    let c1 = measure_constancy(BETA, 1.5, &[0.8, 1.0, 1.25], 150, 4)?;
    let c2 = measure_constancy(BETA, 1.0, &[0.6, 1.0, 1.6], 150, 4)?;
    out.push(Check::new(5, "spectrum constancy in gamma", c1.max(c2) < 0.05, format!("{c1:.2e} (δ=1.5), {c2:.2e} (δ=1)")));

    let modes = measure_modes(&mu, BETA, DELTA, 10)?;
    let bound = 1.10 / (BETA * DELTA);
    let rate = modes.iter().map(|m| m.left_rate.max(m.right_rate)).fold(0.0, f64::max);
    let res = modes.iter().map(|m| m.residual).fold(0.0, f64::max);
    out.push(Check::new(6, "decay bound on 10 modes", rate <= bound && res < 1e-8, format!("rate {rate:.4} (bound {bound:.4}), residual {res:.2e}")));
    let lit = modes.iter().map(|m| m.shift_literal).fold(f64::INFINITY, f64::min);
    let cor = modes.iter().map(|m| m.shift_corrected).fold(0.0, f64::max);
    let modulus = modes.iter().map(|m| m.shift_modulus).fold(0.0, f64::max);
    out.push(Check::info(7, "shift law G²Γ as printed", lit < 1e-4, format!("min residual {lit:.3e}")));
    out.push(Check::new(7, "shift law λ²G²Γ and modulus", cor < 1e-4 && modulus < 1e-6, format!("{cor:.2e}, modulus {modulus:.2e}")));

    let fr = measure_fredholm(&mu, BETA, DELTA, 5)?;
    let ok = fr.iter().all(|r| r.transform < 1e-4 && r.dim == 1 && r.gap > 1e3 && r.perturbed_dim == 0 && r.outliers <= 20);
    let t = fr.iter().map(|r| r.transform).fold(0.0, f64::max);
    let g = fr.iter().map(|r| r.gap).fold(f64::INFINITY, f64::min);
    let o = fr.iter().map(|r| r.outliers).max().unwrap_or(0);
    out.push(Check::new(8, "Fredholm kernel at 5 z", ok, format!("transform {t:.2e}, min gap {g:.1e}, outliers ≤ {o}")));

    let id = measure_identity(&mu, BETA, DELTA)?;
    out.push(Check::new(9, "identity after scalar fit", id.residual < 1e-3, format!("{:.2e}", id.residual)));

    let cr = measure_critical_points(&mu, BETA, DELTA)?;
    let ok = !cr.gaps.is_empty() && cr.sign_changes.iter().all(|&s| s == 1) && (cr.scan_argmin - cr.critical_points[cr.critical_points.len() - 1]).abs() <= cr.scan_step;
    out.push(Check::new(
        10,
        "gaps, critical points, Σξ² minimum",
        ok,
        format!("{} gaps, sign changes {:?}, scan offset {:.3}", cr.gaps.len(), cr.sign_changes, (cr.scan_argmin - cr.critical_points.last().copied().unwrap_or(f64::NAN)).abs()),
    ));

    let u = measure_unbounded(4.0)?;
    out.push(Check::new(11, "unbounded transform and k-unitarity", u.transform < 1e-3 && u.unitarity < 0.05, format!("{:.2e}, {:.3}", u.transform, u.unitarity)));
    out.sort_by_key(|c| c.criterion);
    Ok(out)
}
