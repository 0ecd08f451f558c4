use std::io::Write;

use eigenmode::{decay_exponent, find_phase_eigenpair, gamma_value, omega_shift_check, EigenMode, FitWindow, ModeSearch};
use fredholm::{assemble_h, essential_spectrum_curve, kernel_dimension, kernel_transform_check, symbol_distance, tan_coefficients, Branch};
use lattice_rep::{Conjugator, KCutoffs};
use num_complex::Complex64;
use numlin::hessenberg_eigenvalues;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use spectral::svg::Figure;
use spectral::{
    critical_points, detect_gaps, dos_measure, level_curve, log_potential, spectrum_cloud, uniform_phases, write_cloud_csv, BBox,
    LevelCurve, SpectralMeasure, Truncation,
};

use crate::app::Command;
use crate::verify::{self, level_bbox};
use crate::{ArtifactWriter, CliError, Meta, RunConfig};

fn num<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Numerical(e.to_string())
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Numerical(e.to_string())
}

/// Runs `cmd` and returns the artifact names written under `cfg.out`.
pub fn execute(cmd: &Command, cfg: &RunConfig) -> Result<Vec<String>, CliError> {
    let mut w = ArtifactWriter::new(&cfg.out, Meta::new(cmd.name(), cfg))?;
    match cmd {
        Command::Spectrum => spectrum(cfg, &mut w)?,
        Command::Dos => dos(cfg, &mut w)?,
        Command::Potential => potential(cfg, &mut w)?,
        Command::Levelcurve => levelcurve(cfg, &mut w)?,
        Command::Eigvec => eigvec(cfg, &mut w)?,
        Command::Transfer => transfer(cfg, &mut w)?,
        Command::Resolvent => resolvent(cfg, &mut w)?,
        Command::Fredholm => fredholm_cmd(cfg, &mut w)?,
        Command::Verify { quick } => return verify_cmd(*quick, cfg, w),
    }
    w.finish()
}

fn measure(cfg: &RunConfig) -> Result<SpectralMeasure, CliError> {
    dos_measure(cfg.beta, cfg.dos_p, cfg.dos_q, cfg.dos_phases, cfg.dos_sites, 0).map_err(num)
}

fn curve(cfg: &RunConfig, mu: &SpectralMeasure) -> Result<LevelCurve, CliError> {
    level_curve(mu, (cfg.beta * cfg.delta).ln(), level_bbox(cfg.beta, cfg.delta), cfg.grid, cfg.tol).map_err(num)
}

fn require_off_axis(cfg: &RunConfig, what: &str) -> Result<(), CliError> {
    if cfg.delta > 1.0 {
        Ok(())
    } else {
        Err(CliError::Config(format!("{what} needs delta > 1, got {}", cfg.delta)))
    }
}

/// Bounding box of `pts` padded by a tenth of its size.
fn padded_bbox(pts: impl Iterator<Item = Complex64>) -> BBox {
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for z in pts {
        x0 = x0.min(z.re);
        x1 = x1.max(z.re);
        y0 = y0.min(z.im);
        y1 = y1.max(z.im);
    }
    let pad = 0.1 * (x1 - x0).max(y1 - y0).max(1.0);
    BBox { x0: x0 - pad, x1: x1 + pad, y0: y0 - pad, y1: y1 + pad }
}

fn write_points(buf: &mut Vec<u8>, header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<(), CliError> {
    let mut wr = csv::Writer::from_writer(buf);
    wr.write_record(header).map_err(csv_err)?;
    for r in rows {
        wr.write_record(&r).map_err(csv_err)?;
    }
    wr.flush()?;
    Ok(())
}

fn f(x: f64) -> String {
    format!("{x:.17e}")
}

fn spectrum(cfg: &RunConfig, w: &mut ArtifactWriter) -> Result<(), CliError> {
    let a = cfg.reducer();
    let t = Truncation::open(cfg.gamma, cfg.delta, cfg.beta, cfg.half_width);
    let cloud = spectrum_cloud(&t, &uniform_phases(cfg.phases, 0.25), &a).map_err(num)?;
    w.csv("spectrum.csv", |b| write_cloud_csv(&cloud, b))?;
    let mut bbox_pts: Vec<Complex64> = cloud.clone();
    let mut summary = json!({ "eigenvalues": cloud.len(), "dimension": t.dim(), "phases": cfg.phases });
    let overlay = if cfg.delta > 1.0 {
        let mu = measure(cfg)?;
        let level = (cfg.beta * cfg.delta).ln();
        let dev: Vec<f64> = cloud.iter().map(|&z| (log_potential(&mu, z) - level).abs()).collect();
        summary["level"] = json!(level);
        summary["mean_level_deviation"] = json!(dev.iter().sum::<f64>() / dev.len() as f64);
        summary["max_level_deviation"] = json!(dev.iter().copied().fold(0.0, f64::max));
        let c = curve(cfg, &mu)?;
        bbox_pts.extend(c.vertices());
        Some(c)
    } else {
        None
    };
    w.json("spectrum.json", &summary)?;
    let mut fig = Figure::new(padded_bbox(bbox_pts.into_iter()), 800.0);
    if let Some(c) = &overlay {
        fig.curve(c, "#c0392b");
    }
    fig.points(&cloud, 1.2, "#1f4e79");
    w.svg("spectrum.svg", &fig.render())?;
    Ok(())
}

fn dos(cfg: &RunConfig, w: &mut ArtifactWriter) -> Result<(), CliError> {
    let mu = measure(cfg)?;
    w.csv("dos.csv", |b| mu.write_csv(b))?;
    let gaps = detect_gaps(&mu, 0.3);
    let cps = critical_points(&mu, &gaps, cfg.tol).map_err(num)?;
    let (lo, hi) = mu.support_bounds();
    w.json(
        "gaps.json",
        &json!({
            "approximant": [cfg.dos_p, cfg.dos_q],
            "nodes": mu.len(),
            "support": [lo, hi],
            "second_moment": mu.moment(2),
            "gaps": gaps,
            "critical_points": cps,
        }),
    )?;
    Ok(())
}

fn potential(cfg: &RunConfig, w: &mut ArtifactWriter) -> Result<(), CliError> {
    let mu = measure(cfg)?;
    let n = cfg.grid;
    let e = cfg.extent;
    let coord = |i: usize| -e + 2.0 * e * i as f64 / (n - 1) as f64;
    let rows = (0..n).flat_map(|j| (0..n).map(move |i| (coord(i), coord(j))));
    let rows: Vec<Vec<String>> = rows.map(|(x, y)| vec![f(x), f(y), f(log_potential(&mu, Complex64::new(x, y)))]).collect();
    w.csv("potential.csv", |b| write_points(b, &["re", "im", "phi"], rows.into_iter()))?;
    Ok(())
}

fn levelcurve(cfg: &RunConfig, w: &mut ArtifactWriter) -> Result<(), CliError> {
    let mu = measure(cfg)?;
    let c = curve(cfg, &mu)?;
    if c.polylines.is_empty() {
        return Err(num(format!("no level curve at log(βδ) = {}", (cfg.beta * cfg.delta).ln())));
    }
    let rows: Vec<Vec<String>> = c
        .polylines
        .iter()
        .enumerate()
        .flat_map(|(k, p)| p.points.iter().map(move |z| vec![k.to_string(), p.closed.to_string(), f(z.re), f(z.im)]))
        .collect();
    w.csv("levelcurve.csv", |b| write_points(b, &["branch", "closed", "re", "im"], rows.into_iter()))?;
    let radii: Vec<f64> = c.vertices().map(|z| z.norm()).collect();
    let polylines: serde_json::Value = serde_json::from_str(&c.to_json().map_err(num)?)?;
    w.json(
        "levelcurve.json",
        &json!({
            "level": c.level,
            "branches": c.polylines.len(),
            "closed": c.polylines.iter().all(|p| p.closed),
            "vertices": c.vertex_count(),
            "max_deviation": c.max_deviation(&mu),
            "radius_min": radii.iter().copied().fold(f64::INFINITY, f64::min),
            "radius_max": radii.iter().copied().fold(0.0, f64::max),
            "curve": polylines,
        }),
    )?;
    let mut fig = Figure::new(padded_bbox(c.vertices()), 800.0);
    fig.curve(&c, "#c0392b");
    w.svg("levelcurve.svg", &fig.render())?;
    Ok(())
}

/// The mode whose eigenvalue is the level-curve vertex nearest `z`.
fn mode_near_z(cfg: &RunConfig) -> Result<(Complex64, f64, EigenMode), CliError> {
    require_off_axis(cfg, "an eigenvector")?;
    let mu = measure(cfg)?;
    let c = curve(cfg, &mu)?;
    let z = Complex64::new(cfg.z_re, cfg.z_im);
    let target = c.vertices().min_by(|a, b| (a - z).norm().total_cmp(&(b - z).norm())).ok_or_else(|| num("empty level curve"))?;
    let search = ModeSearch { half_width: cfg.half_width, ..ModeSearch::new(cfg.beta, cfg.delta) };
    let s = find_phase_eigenpair(&search, target, &cfg.reducer()).map_err(num)?;
    Ok((target, s.target_distance, s.mode))
}

fn gamma_conjugator(cfg: &RunConfig) -> Result<Conjugator, CliError> {
    Conjugator::new(1.0, cfg.beta, &cfg.reducer(), KCutoffs { floor: 1e-15, ..KCutoffs::default() }).map_err(num)
}

fn eigvec(cfg: &RunConfig, w: &mut ArtifactWriter) -> Result<(), CliError> {
    let a = cfg.reducer();
    let (target, dist, mut m) = mode_near_z(cfg)?;
    let fit = decay_exponent(&m.xi, FitWindow::default()).map_err(num)?;
    let k = gamma_conjugator(cfg)?;
    let g = gamma_value(&m, m.parameter(), &k).map_err(num)?;
    m.gamma_value = Some(g.value);
    let shift = omega_shift_check(&m, m.parameter(), &k, &a).map_err(num)?;
    w.csv("eigvec.csv", |b| m.xi.write_csv(b))?;
    w.json(
        "eigvec.json",
        &json!({
            "target": target,
            "target_distance": dist,
            "mode": m.summary(),
            "decay": fit,
            "decay_bound": 1.0 / (cfg.beta * cfg.delta),
            "gamma": g,
            "shift": shift,
        }),
    )?;
    Ok(())
}

fn transfer(cfg: &RunConfig, w: &mut ArtifactWriter) -> Result<(), CliError> {
    let params = diffsys::SystemParams { alpha: cfg.reducer(), theta: cfg.theta, beta: cfg.beta, z: Complex64::new(cfg.z_re, cfg.z_im) };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut draw = || Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let (x, y) = ((draw(), draw()), (draw(), draw()));
    let start = diffsys::TransferState::new(0, [x.1, Complex64::new(0.0, 0.0), x.0]).map_err(num)?;
    let orbit = diffsys::advance(start, &params, cfg.steps, diffsys::Convention::Corrected, diffsys::Guard::default());
    w.csv("transfer.csv", |b| orbit.write_csv(b))?;
    let p_max = orbit.states.len().saturating_sub(2);
    let wr = diffsys::wronskian_residual(x, y, &params, p_max, diffsys::Guard::default()).map_err(num)?;
    w.json(
        "wronskian.json",
        &json!({
            "initial": { "x": [x.0, x.1], "y": [y.0, y.1] },
            "steps": orbit.states.len() - 1,
            "stopped": orbit.stopped,
            "residual": wr.residual,
            "literal_residual": wr.literal_residual,
            "lhs": wr.lhs,
            "rhs": wr.rhs,
        }),
    )?;
    Ok(())
}

fn resolvent(cfg: &RunConfig, w: &mut ArtifactWriter) -> Result<(), CliError> {
    let a = cfg.reducer();
    let z = Complex64::new(cfg.z_re, cfg.z_im);
    let half = cfg.half_width.max(2 * cfg.p_max as usize + 1);
    let c = diffsys::resolvent_coefficients(z, cfg.beta, &a, cfg.p_max, cfg.q_max, half, cfg.samples).map_err(num)?;
    let fine = diffsys::resolvent_coefficients(z, cfg.beta, &a, cfg.p_max, cfg.q_max, half, 2 * cfg.samples).map_err(num)?;
    let d = diffsys::d_polynomials(cfg.beta, &a, cfg.p_max, cfg.q_max, z).map_err(num)?;
    let sym = c.symmetrized();
    w.csv("resolvent_c.csv", |b| sym.write_csv(b))?;
    w.csv("resolvent_d.csv", |b| d.write_csv(b))?;
    w.json(
        "resolvent.json",
        &json!({
            "z": z,
            "symmetry_defect": c.symmetry_defect(),
            "alias_difference": c.max_difference(&fine),
            "samples": cfg.samples,
            "half_width": half,
        }),
    )?;
    Ok(())
}

fn fredholm_cmd(cfg: &RunConfig, w: &mut ArtifactWriter) -> Result<(), CliError> {
    let a = cfg.reducer();
    let (_, _, m) = mode_near_z(cfg)?;
    let g = m.parameter();
    let k = gamma_conjugator(cfg)?;
    let gam = gamma_value(&m, g, &k).map_err(num)?.value;
    let symbol = tan_coefficients(cfg.beta, 1.0, &a, 60, 2048, 0.05, 1e-16).map_err(num)?;
    let transform = kernel_transform_check(&m, gam, g, &symbol.coeffs, &a, Branch::Continued).map_err(num)?;
    let half = cfg.half_width.min(120) as i64;
    let h = assemble_h(gam, g, &symbol.coeffs, -half, half, &a, 1e-12).map_err(num)?.matrix();
    let kernel = kernel_dimension(&h, 1e3).map_err(num)?;
    let ev = hessenberg_eigenvalues(&h, 1e-13).map_err(num)?;
    let curves = essential_spectrum_curve(&symbol.coeffs, 2000);
    let dist: Vec<f64> = ev.iter().map(|&e| symbol_distance(&curves, e)).collect();
    let rows: Vec<Vec<String>> = ev.iter().zip(&dist).map(|(e, d)| vec![f(e.re), f(e.im), f(*d)]).collect();
    w.csv("fredholm_eigs.csv", |b| write_points(b, &["re", "im", "curve_distance"], rows.into_iter()))?;
    w.json(
        "fredholm.json",
        &json!({
            "chi": m.chi,
            "gamma": gam,
            "symbol_margin": symbol.margin,
            "transform_residual": transform.residual,
            "kernel": kernel,
            "half_width": half,
            "outliers": dist.iter().filter(|&&d| d > 0.1).count(),
        }),
    )?;
    let mut fig = Figure::new(padded_bbox(ev.iter().copied().chain(curves.iter().flatten().copied())), 800.0);
    fig.polyline(&curves[0], false, "#c0392b").polyline(&curves[1], false, "#c0392b").points(&ev, 1.5, "#1f4e79");
    w.svg("fredholm.svg", &fig.render())?;
    Ok(())
}

fn verify_cmd(quick: bool, cfg: &RunConfig, mut w: ArtifactWriter) -> Result<Vec<String>, CliError> {
    let rows = verify::run(quick, cfg.seed)?;
    let mut out = std::io::stdout().lock();
    for r in &rows {
        let note = if r.informational { " (printed form, reported only)" } else { "" };
        writeln!(out, "criterion {:>2}  {:<4}  {}{}: {}", r.criterion, r.status(), r.check, note, r.measured)?;
    }
    let failed: Vec<&verify::Check> = rows.iter().filter(|r| !r.informational && !r.passed).collect();
    w.json("verify.json", &json!({ "quick": quick, "passed": failed.is_empty(), "checks": rows }))?;
    let names = w.finish()?;
    if failed.is_empty() {
        Ok(names)
    } else {
        Err(num(format!("{} verification checks failed", failed.len())))
    }
}
