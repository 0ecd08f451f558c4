use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// The rotation number α stored as an unevaluated sum `hi + lo`, so that
/// `α·k mod 2` stays accurate for integer `k` up to about 10^12.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseReducer {
    hi: f64,
    lo: f64,
    /// `Some((p, q))` when α = p/q exactly.
    ratio: Option<(i64, i64)>,
}

impl PhaseReducer {
    /// The golden mean (√5 − 1)/2.
    pub fn golden() -> Self {
        Self { hi: 0.6180339887498949, lo: -5.432115203682506e-17, ratio: None }
    }

    /// A double-precision α with no low part.
    pub fn from_f64(alpha: f64) -> Self {
        Self { hi: alpha, lo: 0.0, ratio: None }
    }

    pub fn from_parts(hi: f64, lo: f64) -> Self {
        let s = hi + lo;
        let lo = lo - (s - hi);
        Self { hi: s, lo, ratio: None }
    }

    /// Rational α = p/q, reduced exactly by integer arithmetic.
    pub fn from_ratio(p: i64, q: i64) -> Self {
        assert!(q > 0, "denominator must be positive");
        let hi = p as f64 / q as f64;
        let lo = -(hi.mul_add(q as f64, -(p as f64))) / q as f64;
        Self { hi, lo, ratio: Some((p, q)) }
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn value(&self) -> f64 {
        self.hi + self.lo
    }

    pub fn ratio(&self) -> Option<(i64, i64)> {
        self.ratio
    }

    pub fn is_rational(&self) -> bool {
        self.ratio.is_some()
    }

    /// `α·k` reduced to `[-1, 1)` (units of π).
    pub fn half_turns(&self, k: i64) -> f64 {
        if let Some((p, q)) = self.ratio {
            let m = (p as i128 * k as i128).rem_euclid(2 * q as i128);
            return wrap2(m as f64 / q as f64);
        }
        let kf = k as f64;
        let p = self.hi * kf;
        let e = self.hi.mul_add(kf, -p);
        let p_red = p - 2.0 * (p / 2.0).round();
        wrap2(p_red + (e + self.lo * kf))
    }

    /// `λ^k = e^{iπαk}`.
    pub fn lambda_pow(&self, k: i64) -> Complex64 {
        let t = PI * self.half_turns(k);
        Complex64::new(t.cos(), t.sin())
    }

    /// `λ^{n²} = e^{iπαn²}`.
    pub fn lambda_sq(&self, n: i64) -> Complex64 {
        self.lambda_pow(n * n)
    }

    /// `λ = e^{iπα}`.
    pub fn lambda(&self) -> Complex64 {
        self.lambda_pow(1)
    }

    /// `sin(παn)`, accurate for large `n`.
    pub fn sin_pi_alpha(&self, n: i64) -> f64 {
        (PI * self.half_turns(n)).sin()
    }

    /// `cos(παn)`, accurate for large `n`.
    pub fn cos_pi_alpha(&self, n: i64) -> f64 {
        (PI * self.half_turns(n)).cos()
    }
}

fn wrap2(x: f64) -> f64 {
    let r = x - 2.0 * ((x + 1.0) / 2.0).floor();
    if r >= 1.0 {
        r - 2.0
    } else {
        r
    }
}

/// Profile of the quantity `|sin παn|^{-1/n}` for `n = 1..=n_max`.
///
/// The condition needed for the conjugating series to converge is that this
/// tends to 1. A second column reports `|sin παn|^{-1}`, which is unbounded
/// for every irrational α and so cannot tend to 1; the checker uses the
/// n-th root form.
pub fn diophantine_profile(alpha: &PhaseReducer, n_max: i64) -> Vec<(i64, f64, f64)> {
    (1..=n_max)
        .map(|n| {
            let s = alpha.sin_pi_alpha(n).abs();
            (n, s.powf(-1.0 / n as f64), 1.0 / s)
        })
        .collect()
}

/// True when `|sin παn|^{-1/n} - 1 < tol` for all `n` in `[n_max/2, n_max]`.
pub fn satisfies_diophantine(alpha: &PhaseReducer, n_max: i64, tol: f64) -> bool {
    diophantine_profile(alpha, n_max)
        .iter()
        .filter(|(n, _, _)| *n >= n_max / 2)
        .all(|(_, root, _)| root.is_finite() && root - 1.0 < tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// αn² mod 2 from a 128-bit fixed-point α (integer oracle).
    fn oracle_half_turns(n: i64) -> f64 {
        const A1: u128 = 11400714819323198485;
        const A2: u128 = 17554116967691831348;
        let n2 = (n as i128 * n as i128) as u128;
        let top = (A1 * n2) % (1u128 << 65);
        let bottom = (A2 * n2) as f64 / 2f64.powi(128);
        wrap2(top as f64 / 2f64.powi(64) + bottom)
    }

    #[test]
    fn golden_matches_integer_oracle() {
        let a = PhaseReducer::golden();
        for n in [0i64, 1, 7, 123, 9_999, 123_457, 654_321, 999_999, 1_000_000, -777_777] {
            let d = (a.half_turns(n * n) - oracle_half_turns(n)).abs();
            let d = d.min(2.0 - d);
            assert!(d < 1e-12, "n={n} diff={d}");
            assert!((a.lambda_sq(n).norm() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn rational_reduction_is_periodic() {
        let a = PhaseReducer::from_ratio(144, 233);
        assert_eq!(a.half_turns(0), 0.0);
        assert!((a.half_turns(233 * 2 + 5) - a.half_turns(5)).abs() < 1e-15);
    }

    #[test]
    fn golden_satisfies_root_condition() {
        let a = PhaseReducer::golden();
        assert!(satisfies_diophantine(&a, 400, 0.05));
        let prof = diophantine_profile(&a, 400);
        assert!(prof.iter().map(|p| p.2).fold(0.0, f64::max) > 10.0);
    }

    #[test]
    fn rational_fails_root_condition() {
        assert!(!satisfies_diophantine(&PhaseReducer::from_ratio(3, 5), 40, 0.05));
    }
}
