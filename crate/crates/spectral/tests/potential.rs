use std::sync::OnceLock;

use lattice_rep::PhaseReducer;
use proptest::prelude::*;
use spectral::*;

const BETA: f64 = 2.0;

fn dos() -> &'static SpectralMeasure {
    static MU: OnceLock<SpectralMeasure> = OnceLock::new();
    MU.get_or_init(|| dos_measure(BETA, 55, 89, 16, 356, 0).unwrap())
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn moments_of_the_density_of_states() {
    let mu = dos();
    assert!((mu.total_mass() - 1.0).abs() < 1e-12);
    assert!((mu.moment(2) - (2.0 * BETA * BETA + 2.0)).abs() < 1e-9);
    for k in [1, 3, 5] {
        assert!(mu.moment(k).abs() < 1e-3);
    }
}

#[test]
fn cloud_lies_on_the_level_curve() {
    let a = PhaseReducer::golden();
    let t = Truncation::open(1.0, 1.5, BETA, 120);
    let cloud = spectrum_cloud(&t, &uniform_phases(3, 0.25), &a).unwrap();
    let level = (BETA * 1.5).ln();
    let mean = cloud.iter().map(|&z| (log_potential(dos(), z) - level).abs()).sum::<f64>() / cloud.len() as f64;
    assert!(mean < 0.02, "mean deviation {mean}");
}

#[test]
fn self_adjoint_cloud_is_real_and_symmetric() {
    let a = PhaseReducer::golden();
    let t = Truncation::open(1.0, 1.0, BETA, 60);
    let cloud = spectrum_cloud(&t, &uniform_phases(8, 0.0), &a).unwrap();
    assert!(cloud.iter().all(|z| z.im.abs() < 1e-9));
    let neg: Vec<Complex64> = cloud.iter().map(|z| -z).collect();
    assert!(hausdorff(&cloud, &neg) < 0.05);
}

#[test]
fn inverse_gamma_gives_the_same_cloud() {
    let a = PhaseReducer::golden();
    let ph = uniform_phases(3, 0.1);
    let c1 = interior_cloud(&Truncation::open(1.2, 1.5, BETA, 80), &ph, &a, 5).unwrap();
    let c2 = interior_cloud(&Truncation::open(1.0 / 1.2, 1.5, BETA, 80), &ph, &a, 5).unwrap();
    assert!(hausdorff(&c1, &c2) < 0.05);
}

#[test]
fn constancy_on_identical_lists_is_zero() {
    let a = PhaseReducer::golden();
    let r = spectrum_constancy_check(BETA, 1.5, &[1.0, 1.0], 30, &uniform_phases(2, 0.0), &a, 0.05).unwrap();
    assert_eq!(r.max_distance, 0.0);
    assert!(r.passed);
}

#[test]
fn high_level_curve_is_nearly_a_circle() {
    let mu = dos();
    let level = (BETA * 10.0).ln();
    let curve = level_curve(mu, level, BBox::square(25.0), 101, 1e-10).unwrap();
    for z in curve.vertices() {
        assert!((z.norm() / 20.0 - 1.0).abs() < 0.02, "{z}");
    }
    assert!(curve.max_deviation(mu) < 1e-10);
}

#[test]
fn level_curve_symmetries() {
    let mu = dos();
    let curve = level_curve(mu, (BETA * 1.5).ln(), BBox { x0: -6.01, x1: 6.01, y0: -2.51, y1: 2.51 }, 121, 1e-9).unwrap();
    let v: Vec<Complex64> = curve.vertices().collect();
    let conj: Vec<Complex64> = v.iter().map(|z| z.conj()).collect();
    let neg: Vec<Complex64> = v.iter().map(|z| -z).collect();
    assert!(hausdorff(&v, &conj) < 0.15);
    assert!(hausdorff(&v, &neg) < 0.15);
}

#[test]
fn bisection_tolerance_controls_deviation() {
    let mu = dos();
    let level = (BETA * 1.5).ln();
    let bbox = BBox { x0: -6.01, x1: 6.01, y0: -2.51, y1: 2.51 };
    let d1 = level_curve(mu, level, bbox, 61, 1e-4).unwrap().max_deviation(mu);
    let d2 = level_curve(mu, level, bbox, 61, 1e-5).unwrap().max_deviation(mu);
    assert!(d1 < 1e-4 && d2 < 1e-5);
}

#[test]
fn curves_are_nested() {
    let mu = dos();
    let bbox = BBox::square(8.0);
    let inner = level_curve(mu, (BETA * 1.2).ln(), bbox, 121, 1e-8).unwrap();
    let outer = level_curve(mu, (BETA * 2.0).ln(), bbox, 121, 1e-8).unwrap();
    // every inner vertex lies strictly inside the outer curve
    for z in inner.vertices() {
        assert_eq!(outer.winding_number(z).abs(), 1);
    }
}

#[test]
fn potential_is_harmonic_off_the_support() {
    let mu = dos();
    let h = 1e-3;
    for &z in &[c(0.3, 1.2), c(-4.0, 0.7), c(5.5, -2.0)] {
        let lap = log_potential(mu, z + h) + log_potential(mu, z - h) + log_potential(mu, z + c(0.0, h))
            + log_potential(mu, z - c(0.0, h))
            - 4.0 * log_potential(mu, z);
        assert!(lap.abs() / (h * h) < 1e-4, "{z}: {}", lap / (h * h));
    }
}

#[test]
fn one_critical_point_per_gap() {
    let mu = dos();
    let gaps = detect_gaps(mu, 0.1);
    assert!(!gaps.is_empty());
    let cps = critical_points(mu, &gaps, 1e-13).unwrap();
    assert_eq!(cps.len(), gaps.len());
    for cp in &cps {
        assert!(cp.location > cp.gap.0 && cp.location < cp.gap.1);
        let d = |x: f64| potential_derivative(mu, c(x, 0.0)).re;
        assert!(d(cp.location - 1e-6) > 0.0 && d(cp.location + 1e-6) < 0.0);
    }
}

#[test]
fn g_on_the_real_axis_and_around_loops() {
    let mu = dos();
    let (_, hi) = mu.support_bounds();
    let anchor = hi + 1.0;
    let g = g_value(mu, BETA, &PathAnchor::straight(anchor, c(anchor + 2.0, 0.0), 1e-6), None).unwrap();
    assert!(g.im.abs() < 1e-12 && g.re > 0.0);
    assert!((g.re - log_potential(mu, c(anchor + 2.0, 0.0)).exp() / BETA).abs() < 1e-12);

    let path = PathAnchor::new(vec![c(anchor, 0.0), c(anchor, 2.0), c(0.0, 2.5), c(-1.0, -0.5)], 1e-6);
    let z = path.path.last().copied().unwrap();
    let g1 = g_value(mu, BETA, &path, None).unwrap();
    assert!((g1.norm() - log_potential(mu, z).exp() / BETA).abs() < 1e-12 * g1.norm().max(1.0));

    // going out and back returns to the anchor value
    let mut cont = LogContinuation::start(mu, c(anchor, 0.0));
    let start = cont.g(BETA);
    for &p in &[c(anchor, 2.0), c(0.0, 2.5), c(-1.0, -0.5), c(0.0, 2.5), c(anchor, 2.0), c(anchor, 0.0)] {
        cont.advance_to(p, 1e-6).unwrap();
    }
    assert!((cont.g(BETA) - start).norm() < 1e-10 * start.norm());
}

#[test]
fn monodromy_around_lower_bands_is_a_gap_label() {
    let mu = dos();
    let (lo, _) = mu.support_bounds();
    let gaps = detect_gaps(mu, 0.3);
    assert!(!gaps.is_empty());
    let alpha = PhaseReducer::golden().value();
    for &(a, b) in &gaps {
        let mid = 0.5 * (a + b);
        let centre = 0.5 * (lo - 0.5 + mid);
        let r = mid - centre;
        let f = monodromy(mu, &PathAnchor::circle(c(centre, 0.0), r, 400, 1e-9)).unwrap();
        let mass = mu.cumulative(mid);
        assert!((f - Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * mass)).norm() < 1e-9);
        let (n, dist) = gap_label(f, alpha, 12);
        assert!(dist < 0.02, "gap ({a}, {b}) mass {mass} best n {n} dist {dist}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn conjugation_symmetry_of_the_potential(x in -8.0f64..8.0, y in 0.01f64..5.0) {
        let z = c(x, y);
        prop_assert!((log_potential(dos(), z) - log_potential(dos(), z.conj())).abs() < 1e-13);
    }

    #[test]
    fn far_field(r in 1e4f64..1e6, t in 0.0f64..6.28) {
        let z = Complex64::from_polar(r, t);
        prop_assert!((log_potential(dos(), z) - r.ln()).abs() < 50.0 / (r * r));
    }
}
