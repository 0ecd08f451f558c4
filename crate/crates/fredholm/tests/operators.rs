use std::sync::OnceLock;

use eigenmode::{find_phase_eigenpair, gamma_value, sigma, EigenMode, ModeSearch};
use fredholm::*;
use lattice_rep::{Conjugator, KCutoffs, LaurentSeries, PhaseReducer};
use numlin::{hessenberg_eigenvalues, ComplexMatrix};
use spectral::{dos_measure, level_curve, BBox};

const BETA: f64 = 2.0;
const DELTA: f64 = 1.5;

fn alpha() -> PhaseReducer {
    PhaseReducer::golden()
}

fn symbol() -> &'static TanSeries {
    static A: OnceLock<TanSeries> = OnceLock::new();
    A.get_or_init(|| tan_coefficients(BETA, 1.0, &alpha(), 60, 2048, 0.05, 1e-16).unwrap())
}

/// Modes along the level curve with their `Γ` values.
fn modes() -> &'static Vec<(EigenMode, Complex64)> {
    static M: OnceLock<Vec<(EigenMode, Complex64)>> = OnceLock::new();
    M.get_or_init(|| {
        let mu = dos_measure(BETA, 55, 89, 16, 356, 0).unwrap();
        let curve = level_curve(&mu, (BETA * DELTA).ln(), BBox { x0: -6.0, x1: 6.0, y0: -2.5, y1: 2.5 }, 121, 1e-12).unwrap();
        let pl = curve.polylines.iter().max_by_key(|p| p.points.len()).unwrap();
        let k = Conjugator::new(1.0, BETA, &alpha(), KCutoffs { floor: 1e-15, ..KCutoffs::default() }).unwrap();
        (0..5)
            .map(|i| {
                let t = pl.points[i * pl.points.len() / 5 + 3];
                let m = find_phase_eigenpair(&ModeSearch::new(BETA, DELTA), t, &alpha()).unwrap().mode;
                let g = gamma_value(&m, m.parameter(), &k).unwrap().value;
                (m, g)
            })
            .collect()
    })
}

fn core_matrix(gam: Complex64, g: Complex64, half: i64) -> (FredholmAssembly, ComplexMatrix) {
    let h = assemble_h(gam, g, &symbol().coeffs, -half, half, &alpha(), 1e-12).unwrap();
    let m = h.matrix();
    (h, m)
}

#[test]
fn symbol_is_real_decaying_and_close_to_half_the_generator() {
    let a = symbol();
    assert!(a.margin > 0.5 && a.max_abs < 1.0, "{} {}", a.margin, a.max_abs);
    assert!(a.coeffs.iter().all(|(_, c)| c.im.abs() < 1e-15));
    // decay at least at the annulus rate ln β, fitted at two cutoffs
    let slope = |j: i64| (a.coeffs.coeff(j).norm() / a.coeffs.coeff(j + 20).norm()).ln() / 20.0;
    assert!(slope(5) > 0.9 * BETA.ln() && slope(20) > 0.9 * BETA.ln(), "{} {}", slope(5), slope(20));

    let beta = 20.0;
    let g = lattice_rep::conjugating_generator(beta, 1.0, &alpha(), 60).unwrap();
    let big = tan_coefficients(beta, 1.0, &alpha(), 60, 2048, 0.05, 1e-18).unwrap();
    let gnorm: f64 = g.iter().map(|(_, c)| c.norm()).sum::<f64>() / 2.0;
    for j in -4..=4 {
        assert!((big.coeffs.coeff(j) - 0.5 * g.coeff(j)).norm() < gnorm.powi(3), "{j}");
    }
    assert!(matches!(
        tan_coefficients(BETA, 1.0, &alpha(), 60, 2048, 10.0, 1e-16),
        Err(FredholmError::PoleProximity { .. })
    ));
}

#[test]
fn modes_are_carried_into_the_kernel() {
    for (m, gam) in modes() {
        let g = m.parameter();
        let r = kernel_transform_check(m, *gam, g, &symbol().coeffs, &alpha(), Branch::Continued).unwrap();
        assert!(r.residual < 1e-4, "{}", r.residual);
        let flipped = kernel_transform_check(m, *gam, g, &symbol().coeffs, &alpha(), Branch::FlipAt(2)).unwrap();
        assert!(flipped.residual > 1e3 * r.residual.max(1e-12), "{} {}", flipped.residual, r.residual);
        let negated = kernel_transform_check(m, *gam, g, &symbol().coeffs, &alpha(), Branch::Negated).unwrap();
        assert!((negated.residual - r.residual).abs() <= 1e-12);
    }
}

#[test]
fn kernel_is_one_dimensional_and_disappears_when_perturbed() {
    for (m, gam) in modes() {
        let (_, h) = core_matrix(*gam, m.parameter(), 90);
        let rep = kernel_dimension(&h, 1e3).unwrap();
        assert_eq!(rep.dim, 1, "{rep:?}");
        assert!(rep.gap > 1e3);
        let (_, hp) = core_matrix(*gam * 1.5, m.parameter(), 90);
        assert_eq!(kernel_dimension(&hp, 1e3).unwrap().dim, 0);
    }
    let (m, gam) = &modes()[0];
    let (_, wide) = core_matrix(*gam, m.parameter(), 180);
    assert_eq!(kernel_dimension(&wide, 1e3).unwrap().dim, 1);
}

#[test]
fn eigenvalues_cluster_on_the_shifted_symbol() {
    let curves = essential_spectrum_curve(&symbol().coeffs, 2000);
    assert!(symbol_distance(&curves, Complex64::new(0.0, 0.0)) > 0.1);
    let (m, gam) = &modes()[1];
    let (_, h) = core_matrix(*gam, m.parameter(), 90);
    let ev = hessenberg_eigenvalues(&h, 1e-13).unwrap();
    let outliers = ev.iter().filter(|e| symbol_distance(&curves, **e) > 0.1).count();
    assert!(outliers <= 20, "{outliers}");
}

#[test]
fn shifted_data_shifts_the_matrix() {
    let (m, gam) = &modes()[2];
    let a = alpha();
    let (h, _) = core_matrix(*gam, m.parameter(), 40);
    let (gs, ps) = shifted_data(*gam, m.parameter(), &a);
    let hs = assemble_h(gs, ps, &symbol().coeffs, -41, 39, &a, 1e-12).unwrap();
    for n in -40..=39 {
        let (x, y) = (hs.diagonal_at(n), h.diagonal_at(n + 1));
        assert!((x - y).norm() < 1e-12 * (1.0 + y.norm()), "{n}: {x} {y}");
    }
}

#[test]
fn conjugate_data_gives_the_reflected_adjoint() {
    let (m, gam) = &modes()[3];
    let mut s = sigma(m);
    s.gamma_value = Some(*gam);
    let sg = sigma(&s).gamma_value.unwrap();
    let (_, h) = core_matrix(*gam, m.parameter(), 60);
    let (_, hs) = core_matrix(sg, s.parameter(), 60);
    let len = h.rows();
    for r in 0..len {
        for c in 0..len {
            let want = h[(len - 1 - c, len - 1 - r)].conj();
            assert!((hs[(r, c)] - want).norm() < 1e-12, "{r} {c}");
        }
    }
    assert_eq!(kernel_dimension(&hs, 1e3).unwrap().dim, kernel_dimension(&h, 1e3).unwrap().dim);
}

#[test]
fn tails_agree_across_modes() {
    let (m1, g1) = &modes()[0];
    let (m2, g2) = &modes()[4];
    let (h1, _) = core_matrix(*g1, m1.parameter(), 120);
    let (h2, _) = core_matrix(*g2, m2.parameter(), 120);
    let tail = (-120..=-100).chain(100..=120).map(|n| (h1.diagonal_at(n) - h2.diagonal_at(n)).norm()).fold(0.0, f64::max);
    assert!(tail < 1e-8, "{tail}");
    assert!(h1.core.is_some());
}

#[test]
fn unbounded_operator_annihilates_the_cosine_transform() {
    let beta = 4.0;
    let a = alpha();
    let x = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * 0.1234);
    let (_, xi) = localized_mode(x, beta, &a, 150).unwrap();
    let k = Conjugator::new(1.0, beta, &a, KCutoffs { floor: 1e-16, ..KCutoffs::default() }).unwrap();
    let tan = tan_coefficients(beta, 1.0, &a, 60, 2048, 0.05, 1e-16).unwrap();
    let rep = unbounded_transform_check(&xi, x, &k, &tan.coeffs, &a, 1e-9).unwrap();
    assert!(rep.eigen_residual < 1e-10, "{rep:?}");
    assert!((rep.c.norm() - 1.0).abs() < 1e-10);
    assert!(rep.residual < 1e-3, "{rep:?}");
    let h = unbounded_h(rep.theta, rep.nu, &tan.coeffs, &a, -20, 20, 1e-9).unwrap();
    for r in 0..41 {
        assert!((h[(r, r)] - tan.coeffs.coeff(0)).im.abs() < 1e-15);
    }
}

#[test]
fn rational_free_diagonal_is_linear_in_the_site() {
    let zero = PhaseReducer::from_f64(0.0);
    let theta = 2f64.sqrt() / 10.0;
    let a = LaurentSeries::zero(1);
    let h = unbounded_h(theta, 0.3, &a, &zero, -30, 30, 1e-9).unwrap();
    for (r, n) in (-30..=30).enumerate() {
        let want = (std::f64::consts::PI * (2.0 * theta * n as f64 - 0.3)).tan();
        assert!((h[(r, r)].re - want).abs() < 1e-9 * (1.0 + want.abs()), "{n}");
    }
    assert!(matches!(unbounded_h(0.25, 0.0, &a, &zero, -3, 3, 1e-9), Err(FredholmError::SingularPhase { .. })));
}

#[test]
fn compressed_conjugator_is_nearly_unitary() {
    let a = alpha();
    let x = Complex64::from_polar(1.0, 0.7);
    let rep = k_unitarity_check(1.0, BETA, x, 101, 64, &a).unwrap();
    assert!(rep.max_deviation < 0.05, "{}", rep.max_deviation);
    let cov: Vec<f64> = [16, 48, 144, 300].iter().map(|&n| k_unitarity_check(1.0, BETA, x, n, 64, &a).unwrap().coverage).collect();
    assert!(cov.windows(2).all(|w| w[0] <= w[1]) && cov[0] < cov[3], "{cov:?}");
    assert!(cov[3] > 0.95, "{cov:?}");

    // λ²x is the index shift of x up to the factor λ²x²
    let k = Conjugator::new(1.0, BETA, &a, KCutoffs { floor: 1e-16, ..KCutoffs::default() }).unwrap();
    let y = x * a.lambda_pow(2);
    let m1 = compressed_conjugator(&k, x, -21, 19, &a);
    let m2 = compressed_conjugator(&k, y, -20, 20, &a);
    let f = a.lambda_pow(2) * x * x;
    for r in 0..41 {
        for c in 0..41 {
            assert!((m2[(r, c)] - f * m1[(r, c)]).norm() < 1e-13);
        }
    }
    assert!(k_unitarity_check(3.0, BETA, x, 10, 8, &a).is_err());
}
