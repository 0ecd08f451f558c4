use std::sync::OnceLock;

use diffsys::*;
use eigenmode::{find_phase_eigenpair, EigenMode, ModeSearch};
use lattice_rep::PhaseReducer;
use spectral::{dos_measure, g_value, level_curve, BBox, PathAnchor, SpectralMeasure};

const BETA: f64 = 2.0;

fn a() -> PhaseReducer {
    PhaseReducer::golden()
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn table(z: Complex64, samples: usize) -> CoefficientTable {
    resolvent_coefficients(z, BETA, &a(), 5, 5, 60, samples).unwrap()
}

fn theta_zero(z: Complex64) -> SystemParams {
    SystemParams { alpha: a(), theta: 0.0, beta: BETA, z }
}

#[test]
fn coefficients_are_even_in_p_and_alias_free() {
    for z in [c(0.5, 1.0), c(-1.5, 0.7)] {
        let t = table(z, 128);
        assert!(t.symmetry_defect() < 1e-8, "{z}: {}", t.symmetry_defect());
        let fine = table(z, 256);
        assert!(t.max_difference(&fine) < 1e-9, "{z}: {}", t.max_difference(&fine));
    }
}

#[test]
fn far_from_the_spectrum_the_leading_term_dominates() {
    let z = c(40.0, 30.0);
    let t = resolvent_coefficients(z, BETA, &a(), 2, 2, 20, 32).unwrap();
    // (h - z)^{-1} = -z^{-1} - z^{-3} h² - ...
    let second = (2.0 * BETA * BETA + 2.0) / z.powi(3);
    assert!((t.get(0, 0) + z.inv() + second).norm() < 300.0 / z.norm().powi(5), "{}", t.get(0, 0));
    for (p, q, v) in t.entries() {
        if (p, q) != (0, 0) {
            assert!(v.norm() < 10.0 / z.norm_sqr(), "{p} {q}");
        }
    }
}

#[test]
fn coefficients_decay_faster_farther_out() {
    let shell = |t: &CoefficientTable, k: i64| t.entries().filter(|e| e.0.abs() + e.1.abs() == k).map(|e| e.2.norm()).fold(0.0, f64::max);
    let slope = |z: Complex64| {
        let t = table(z, 128);
        (shell(&t, 1) / shell(&t, 5)).ln() / 4.0
    };
    let (near, far) = (slope(c(0.5, 0.6)), slope(c(0.5, 3.0)));
    assert!(near > 0.0 && far > near, "{near} {far}");
}

#[test]
fn coefficients_solve_the_system_away_from_the_origin() {
    let z = c(0.5, 1.0);
    let t = table(z, 128);
    let sites: Vec<(i64, i64)> = (-3..=3).flat_map(|p| (-3..=3).map(move |q| (p, q))).filter(|&s| s != (0, 0)).collect();
    let r = system_residual(|p, q| t.get(p, q), &theta_zero(z), sites);
    assert!(r < 1e-7, "{r}");
    // the unit source sits at the origin
    let (first, _) = theta_zero(z).equations_at(|p, q| t.get(p, q), 0, 0);
    assert!((first - 1.0).norm() < 1e-7, "{first}");
}

#[test]
fn polynomials_solve_the_system() {
    for z in [c(0.3, 0.0), c(-1.0, 2.0)] {
        let d = d_polynomials(BETA, &a(), 6, 8, z).unwrap();
        let sites: Vec<(i64, i64)> = (-4..=4).flat_map(|p| (-6..=6).map(move |q| (p, q))).filter(|&s| s != (0, 0)).collect();
        assert!(system_residual(|p, q| d.get(p, q), &theta_zero(z), sites) < 1e-12);
    }
}

fn degree_of(p: i64, q: i64) -> usize {
    ((p.abs() - q.abs()).abs() - 1) as usize
}

#[test]
fn polynomial_degrees_match_the_index_formula() {
    let nodes: Vec<f64> = (0..8).map(|k| -1.5 + 0.5 * k as f64).collect();
    for (p, q) in [(0, -2), (0, -3), (1, -4), (-1, -5), (2, -6), (0, -6)] {
        let vals: Vec<Complex64> = nodes.iter().map(|&x| d_polynomials(BETA, &a(), 3, 7, c(x, 0.0)).unwrap().get(p, q)).collect();
        // k-th forward difference on equal spacing
        let mut diff = vals.clone();
        let mut norms = Vec::new();
        for _ in 0..7 {
            diff = diff.windows(2).map(|w| w[1] - w[0]).collect();
            norms.push(diff.iter().map(|v| v.norm()).fold(0.0, f64::max));
        }
        let deg = degree_of(p, q);
        assert!(norms[deg - 1] > 1e-6, "({p},{q}) degree below {deg}: {norms:?}");
        assert!(norms[deg] < 1e-9, "({p},{q}) degree above {deg}: {norms:?}");
    }
}

fn lagrange(xs: &[Complex64], ys: &[Complex64], z: Complex64) -> Complex64 {
    let mut acc = c(0.0, 0.0);
    for (i, (&xi, &yi)) in xs.iter().zip(ys).enumerate() {
        let mut w = c(1.0, 0.0);
        for (j, &xj) in xs.iter().enumerate() {
            if i != j {
                w *= (z - xj) / (xi - xj);
            }
        }
        acc += w * yi;
    }
    acc
}

#[test]
fn polynomials_interpolate_from_five_samples() {
    let xs: Vec<Complex64> = [-1.0, -0.5, 0.0, 0.5, 1.0].iter().map(|&x| c(x, 0.0)).collect();
    let tabs: Vec<CoefficientTable> = xs.iter().map(|&x| d_polynomials(BETA, &a(), 3, 6, x).unwrap()).collect();
    for z in [c(0.3, 0.4), c(-1.2, -0.7)] {
        let direct = d_polynomials(BETA, &a(), 3, 6, z).unwrap();
        for (p, q, v) in direct.entries() {
            if degree_of(p, q) <= 4 || q >= -p.abs() {
                let ys: Vec<Complex64> = tabs.iter().map(|t| t.get(p, q)).collect();
                assert!((lagrange(&xs, &ys, z) - v).norm() < 1e-12, "({p},{q})");
            }
        }
    }
}

fn mode() -> &'static EigenMode {
    static M: OnceLock<EigenMode> = OnceLock::new();
    M.get_or_init(|| {
        let curve = level_curve(dos(), (BETA * 1.5).ln(), BBox { x0: -6.0, x1: 6.0, y0: -2.5, y1: 2.5 }, 121, 1e-12).unwrap();
        let pl = curve.polylines.iter().max_by_key(|p| p.points.len()).unwrap();
        let target = pl.points[pl.points.len() / 7];
        find_phase_eigenpair(&ModeSearch::new(BETA, 1.5), target, &a()).unwrap().mode
    })
}

fn dos() -> &'static SpectralMeasure {
    static MU: OnceLock<SpectralMeasure> = OnceLock::new();
    MU.get_or_init(|| dos_measure(BETA, 55, 89, 16, 356, 0).unwrap())
}

#[test]
fn identity_holds_after_one_scalar_fit() {
    let m = mode();
    let z = m.chi;
    let ct = resolvent_coefficients(z, BETA, &a(), 3, 3, 80, 128).unwrap();
    let dt = d_polynomials(BETA, &a(), 3, 3, z).unwrap();
    let fit = eigen_resolvent_identity(m, m.parameter(), &ct, &dt, 3, 3, &a()).unwrap();
    assert_eq!(fit.entries, 49);
    assert!(fit.residual < 1e-3, "{fit:?}");
    assert!(fit.row_zero_residual < 1e-3, "{fit:?}");
    assert!(fit.conjugate_twist_residual > 0.1, "{fit:?}");

    // G continued from the right of the support differs from P by a
    // monodromy factor and a DOS error
    let g = g_value(dos(), BETA, &PathAnchor::straight(6.0, z, 1e-9), None).unwrap();
    assert!(((m.parameter() / g).norm() - 1.0).abs() < 1e-3);
    let alt = eigen_resolvent_identity(m, g, &ct, &dt, 3, 3, &a()).unwrap();
    assert!(alt.residual < 1e-3, "{alt:?}");

    let other = d_polynomials(BETA, &a(), 3, 3, z + 0.1).unwrap();
    assert!(eigen_resolvent_identity(m, g, &ct, &other, 3, 3, &a()).is_err());
}
