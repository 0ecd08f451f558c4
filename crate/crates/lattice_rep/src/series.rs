use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::{LatticeError, PhaseReducer};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Finite Laurent series `Σ_{j=-J}^{J} c_j z^j`, read as a polynomial in `u`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LaurentSeries {
    half_width: usize,
    coeffs: Vec<Complex64>,
}

impl LaurentSeries {
    pub fn zero(half_width: usize) -> Self {
        Self { half_width, coeffs: vec![ZERO; 2 * half_width + 1] }
    }

    /// The constant series `1`.
    pub fn one() -> Self {
        Self { half_width: 0, coeffs: vec![Complex64::new(1.0, 0.0)] }
    }

    pub fn from_fn(half_width: usize, mut f: impl FnMut(i64) -> Complex64) -> Self {
        let j = half_width as i64;
        Self { half_width, coeffs: (-j..=j).map(&mut f).collect() }
    }

    pub fn half_width(&self) -> usize {
        self.half_width
    }

    /// Coefficient of `z^j` (zero outside the support).
    pub fn coeff(&self, j: i64) -> Complex64 {
        if j.unsigned_abs() as usize > self.half_width {
            return ZERO;
        }
        self.coeffs[(j + self.half_width as i64) as usize]
    }

    pub fn set(&mut self, j: i64, c: Complex64) {
        assert!(j.unsigned_abs() as usize <= self.half_width, "index {j} outside series");
        let i = (j + self.half_width as i64) as usize;
        self.coeffs[i] = c;
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let off = self.half_width as i64;
        self.coeffs.iter().enumerate().map(move |(i, &c)| (i as i64 - off, c))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self { half_width: self.half_width, coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        let j = self.half_width.max(other.half_width);
        Self::from_fn(j, |k| self.coeff(k) + other.coeff(k))
    }

    /// Value at a point `z ≠ 0`.
    pub fn evaluate(&self, z: Complex64) -> Complex64 {
        let inv = z.inv();
        let j = self.half_width as i64;
        // Horner on the positive part and on the negative part separately
        let mut pos = ZERO;
        for k in (0..=j).rev() {
            pos = pos * z + self.coeff(k);
        }
        let mut neg = ZERO;
        for k in (1..=j).rev() {
            neg = neg * inv + self.coeff(-k);
        }
        pos + neg * inv
    }

    /// Product of series (convolution of coefficients).
    pub fn mul(&self, other: &Self) -> Self {
        let j = self.half_width + other.half_width;
        let mut out = Self::zero(j);
        for (a, ca) in self.iter() {
            if ca == ZERO {
                continue;
            }
            for (b, cb) in other.iter() {
                let i = (a + b + j as i64) as usize;
                out.coeffs[i] += ca * cb;
            }
        }
        out
    }

    /// `c_j -> conj(c_{-j})`, the adjoint when `z` is unimodular.
    pub fn conj_reverse(&self) -> Self {
        let mut coeffs: Vec<Complex64> = self.coeffs.iter().map(|c| c.conj()).collect();
        coeffs.reverse();
        Self { half_width: self.half_width, coeffs }
    }

    /// Substitute `z -> s z`: `c_j -> c_j s^j`.
    pub fn dilate(&self, s: Complex64) -> Self {
        Self::from_fn(self.half_width, |j| self.coeff(j) * s.powi(j as i32))
    }

    pub fn sup_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Shrink the support while both outermost coefficients are below `floor`.
    pub fn trim(mut self, floor: f64) -> Self {
        while self.half_width > 0
            && self.coeffs[0].norm() < floor
            && self.coeffs[self.coeffs.len() - 1].norm() < floor
        {
            self.coeffs.pop();
            self.coeffs.remove(0);
            self.half_width -= 1;
        }
        self
    }

    pub fn to_json(&self) -> Result<String, LatticeError> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self, LatticeError> {
        let out: Self = serde_json::from_str(s)?;
        if out.coeffs.len() != 2 * out.half_width + 1 {
            return Err(LatticeError::Format("coefficient count does not match half_width".into()));
        }
        Ok(out)
    }
}

/// Values of the series at the `m` points `e^{2πik/m}`.
pub fn sample_on_circle(series: &LaurentSeries, m: usize) -> Vec<Complex64> {
    let mut buf = vec![ZERO; m];
    for (j, c) in series.iter() {
        buf[j.rem_euclid(m as i64) as usize] += c;
    }
    FftPlanner::new().plan_fft_inverse(m).process(&mut buf);
    buf
}

/// Fourier coefficients `c_j`, `|j| ≤ half_width`, of samples on the circle.
pub fn coefficients_from_samples(samples: &[Complex64], half_width: usize) -> LaurentSeries {
    let m = samples.len();
    assert!(2 * half_width < m, "half width must be below m/2");
    let mut buf = samples.to_vec();
    FftPlanner::new().plan_fft_forward(m).process(&mut buf);
    let scale = 1.0 / m as f64;
    LaurentSeries::from_fn(half_width, |j| buf[j.rem_euclid(m as i64) as usize] * scale)
}

/// Coefficients of `f(series)` by sampling `m` points of the unit circle.
///
/// The output keeps `|j| < m/4`; coefficients beyond that are aliasing
/// estimates and are discarded.
pub fn map_on_circle(
    series: &LaurentSeries,
    m: usize,
    f: impl Fn(Complex64) -> Complex64,
) -> Result<LaurentSeries, LatticeError> {
    if m <= 4 * series.half_width() || m < 8 {
        return Err(LatticeError::TooFewSamples { samples: m, support: series.half_width() });
    }
    let values: Vec<Complex64> = sample_on_circle(series, m).into_iter().map(f).collect();
    Ok(coefficients_from_samples(&values, m / 4))
}

/// The series `Σ_{n≠0} (-1)^n n^{-1} (sin παn)^{-1} β^{-|n|} γ^n z^n`, `1 ≤ |n| ≤ cutoff`,
/// exactly as it enters the inner form of the automorphism.
pub fn g_series(beta: f64, gamma: f64, alpha: &PhaseReducer, cutoff: usize) -> Result<LaurentSeries, LatticeError> {
    if !(beta > 1.0) {
        return Err(LatticeError::Parameter(format!("beta must exceed 1, got {beta}")));
    }
    if !(gamma > 1.0 / beta && gamma < beta) {
        return Err(LatticeError::Parameter(format!("gamma {gamma} outside (1/beta, beta)")));
    }
    if cutoff == 0 {
        return Err(LatticeError::Parameter("cutoff must be at least 1".into()));
    }
    let mut out = LaurentSeries::zero(cutoff);
    for n in 1..=cutoff as i64 {
        let s = alpha.sin_pi_alpha(n);
        if s.abs() < 1e-300 || alpha.ratio().is_some_and(|(_, q)| n % q == 0) {
            return Err(LatticeError::Resonance { n });
        }
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let base = sign / (n as f64 * s) * beta.powi(-(n as i32));
        out.set(n, Complex64::new(base * gamma.powi(n as i32), 0.0));
        out.set(-n, Complex64::new(base * gamma.powi(-(n as i32)), 0.0));
    }
    Ok(out)
}

/// Generator whose exponential conjugates `h_{γδ}(δ)` into `h_{γ/δ}(δ)`:
/// `-1/2` times [`g_series`].
pub fn conjugating_generator(
    beta: f64,
    gamma: f64,
    alpha: &PhaseReducer,
    cutoff: usize,
) -> Result<LaurentSeries, LatticeError> {
    Ok(g_series(beta, gamma, alpha, cutoff)?.scale(Complex64::new(-0.5, 0.0)))
}

/// Coefficients of `e^{ig}` by circle sampling with `m` points.
pub fn exp_ig(g: &LaurentSeries, m: usize) -> Result<LaurentSeries, LatticeError> {
    let i = Complex64::new(0.0, 1.0);
    map_on_circle(g, m, |v| (i * v).exp())
}

/// Sample count used when none is given: a power of two above `8·support`.
pub fn default_samples(support: usize) -> usize {
    (8 * support.max(4)).next_power_of_two()
}

/// Points `e^{2πik/m}`.
pub fn circle_points(m: usize) -> Vec<Complex64> {
    (0..m).map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / m as f64)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn first_coefficient_matches_closed_form() {
        let a = PhaseReducer::golden();
        let beta = 2.0;
        let g = g_series(beta, 1.0, &a, 20).unwrap();
        let expect = -1.0 / (beta * (PI * a.value()).sin());
        assert!((g.coeff(1) - c(expect)).norm() < 1e-15);
        assert_eq!(g.coeff(0), c(0.0));
        for n in 1..=20 {
            assert_eq!(g.coeff(n), g.coeff(-n));
        }
    }

    #[test]
    fn gamma_weights_the_two_sides() {
        let a = PhaseReducer::golden();
        let g1 = g_series(3.0, 1.0, &a, 10).unwrap();
        let g = g_series(3.0, 1.5, &a, 10).unwrap();
        for n in 1..=10i64 {
            assert!((g.coeff(n) - g1.coeff(n) * 1.5f64.powi(n as i32)).norm() < 1e-15);
            assert!((g.coeff(-n) - g1.coeff(-n) * 1.5f64.powi(-(n as i32))).norm() < 1e-15);
        }
    }

    #[test]
    fn rational_alpha_is_rejected() {
        let a = PhaseReducer::from_ratio(2, 5);
        assert!(matches!(g_series(2.0, 1.0, &a, 10), Err(LatticeError::Resonance { n: 5 })));
    }

    #[test]
    fn large_beta_gives_small_series() {
        let g = g_series(1e6, 1.0, &PhaseReducer::golden(), 30).unwrap();
        assert!(g.sup_norm() < 1e-5);
    }

    #[test]
    fn exp_of_zero_is_one() {
        let e = exp_ig(&LaurentSeries::zero(3), 64).unwrap().trim(1e-300);
        assert_eq!(e.half_width(), 0);
        assert!((e.coeff(0) - c(1.0)).norm() < 1e-15);
    }

    #[test]
    fn too_few_samples() {
        let g = LaurentSeries::zero(20);
        assert!(matches!(exp_ig(&g, 64), Err(LatticeError::TooFewSamples { .. })));
    }

    #[test]
    fn sampling_round_trip_and_evaluation() {
        let s = LaurentSeries::from_fn(5, |j| Complex64::new(j as f64, 1.0 / (1.0 + j.abs() as f64)));
        let pts = circle_points(32);
        let vals = sample_on_circle(&s, 32);
        for (z, v) in pts.iter().zip(&vals) {
            assert!((s.evaluate(*z) - v).norm() < 1e-12);
        }
        let back = coefficients_from_samples(&vals, 10);
        for j in -10..=10 {
            assert!((back.coeff(j) - s.coeff(j)).norm() < 1e-13);
        }
    }

    #[test]
    fn json_round_trip() {
        let s = LaurentSeries::from_fn(2, |j| Complex64::new(j as f64, -0.5));
        let back = LaurentSeries::from_json(&s.to_json().unwrap()).unwrap();
        assert_eq!(back, s);
        assert!(LaurentSeries::from_json(r#"{"half_width":2,"coeffs":[[0.0,0.0]]}"#).is_err());
    }

    #[test]
    fn mul_matches_pointwise_product() {
        let a = LaurentSeries::from_fn(3, |j| Complex64::new(1.0 + j as f64, 0.3));
        let b = LaurentSeries::from_fn(2, |j| Complex64::new(0.5, j as f64));
        let z = Complex64::from_polar(1.3, 0.7);
        assert!((a.mul(&b).evaluate(z) - a.evaluate(z) * b.evaluate(z)).norm() < 1e-12);
    }
}
