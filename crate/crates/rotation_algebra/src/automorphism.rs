use num_complex::Complex64;

use crate::{AlgebraElement, AlgebraError};

/// Integer 2×2 matrix `(a b; c d)` with determinant ±1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IntegerMatrix2 {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl IntegerMatrix2 {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self, AlgebraError> {
        let m = Self { a, b, c, d };
        match m.det() {
            1 | -1 => Ok(m),
            det => Err(AlgebraError::Determinant(det)),
        }
    }

    pub fn identity() -> Self {
        Self { a: 1, b: 0, c: 0, d: 1 }
    }

    pub fn det(&self) -> i64 {
        self.a * self.d - self.b * self.c
    }

    pub fn apply(&self, m: i64, n: i64) -> (i64, i64) {
        (self.a * m + self.b * n, self.c * m + self.d * n)
    }

    /// `self · other`.
    pub fn compose(&self, o: &Self) -> Self {
        Self {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }
}

/// Moves the coefficient of `w_mn` to `w_{A(m,n)}`. Multiplicative for
/// `det A = 1`, product-reversing for `det A = -1`.
pub fn gl2z_isometry(m: &IntegerMatrix2, a: &AlgebraElement) -> Result<AlgebraElement, AlgebraError> {
    if m.det().abs() != 1 {
        return Err(AlgebraError::Determinant(m.det()));
    }
    let out = AlgebraElement::from_terms(a.alpha(), a.terms().map(|((p, q), c)| (m.apply(p, q), c)));
    Ok(out.with_floor(a.floor()))
}

/// `β^{-1} Σ_{n=0}^{order} (-β^{-1})^n s^n`, the truncated inverse of `s + β`.
pub fn neumann_inverse(s: &AlgebraElement, beta: f64, order: usize) -> Result<AlgebraElement, AlgebraError> {
    if !(beta > 1.0) {
        return Err(AlgebraError::Beta(beta));
    }
    if !s.is_monomial() {
        return Err(AlgebraError::NotMonomial(s.support_len()));
    }
    let step = s.scale(Complex64::new(-1.0 / beta, 0.0));
    let mut term = AlgebraElement::one(s.alpha()).with_floor(s.floor()).scale(Complex64::new(1.0 / beta, 0.0));
    let mut out = term.clone();
    for _ in 0..order {
        term = term.multiply(&step)?;
        out = out.add(&term)?;
    }
    Ok(out)
}

/// Images of the generators under `ρ_β` at the given Neumann order.
pub fn rho_generators(alpha: crate::AlphaId, beta: f64, order: usize) -> Result<(AlgebraElement, AlgebraElement), AlgebraError> {
    if !(beta > 1.0) {
        return Err(AlgebraError::Beta(beta));
    }
    let u = AlgebraElement::u(alpha);
    let v = AlgebraElement::v(alpha);
    let uv = u.multiply(&v)?;
    let b = AlgebraElement::one(alpha).scale(Complex64::new(beta, 0.0));
    let cayley = neumann_inverse(&uv, beta, order)?.multiply(&uv.adjoint().add(&b)?)?;
    let rho_v = v.multiply(&cayley)?;
    let rho_u = v.multiply(&u)?.multiply(&rho_v)?;
    Ok((rho_u, rho_v))
}

/// `ρ_β(a)` with `ρ(w_pq) = λ^{-pq} ρ(u)^p ρ(v)^q`.
pub fn rho_beta(a: &AlgebraElement, beta: f64, order: usize) -> Result<AlgebraElement, AlgebraError> {
    let (ru, rv) = rho_generators(a.alpha(), beta, order)?;
    let ru = ru.with_floor(a.floor());
    let rv = rv.with_floor(a.floor());
    let mut out = AlgebraElement::zero(a.alpha()).with_floor(a.floor());
    for ((p, q), c) in a.terms() {
        let twist = a.phase().lambda_pow(-p * q);
        let img = ru.pow(p)?.multiply(&rv.pow(q)?)?;
        out = out.add(&img.scale(twist * c))?;
    }
    Ok(out)
}

/// `τ(h^n)` for `h = u + u* + β(v + v*)` at the given rotation number.
pub fn moment_at(alpha: crate::AlphaId, beta: f64, n: u32) -> Result<f64, AlgebraError> {
    if n == 0 {
        return Err(AlgebraError::Format("moment order must be at least 1".into()));
    }
    let h = AlgebraElement::harper(alpha, beta).with_floor(0.0);
    Ok(h.pow(n as i64)?.trace().re)
}

/// `τ(h^n)` at the golden mean.
pub fn moment(beta: f64, n: u32) -> Result<f64, AlgebraError> {
    moment_at(crate::AlphaId::Golden, beta, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::AlphaId;

    const G: AlphaId = AlphaId::Golden;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn flip_swaps_generators() {
        let f = IntegerMatrix2::new(0, 1, 1, 0).unwrap();
        assert_eq!(gl2z_isometry(&f, &AlgebraElement::u(G)).unwrap(), AlgebraElement::v(G));
        assert_eq!(gl2z_isometry(&f, &AlgebraElement::v(G)).unwrap(), AlgebraElement::u(G));
        let h = AlgebraElement::harper(G, 2.0);
        assert_eq!(gl2z_isometry(&IntegerMatrix2::identity(), &h).unwrap(), h);
        assert!(matches!(IntegerMatrix2::new(2, 0, 0, 1), Err(AlgebraError::Determinant(2))));
    }

    #[test]
    fn neumann_basics() {
        let uv = AlgebraElement::u(G).multiply(&AlgebraElement::v(G)).unwrap();
        let n0 = neumann_inverse(&uv, 2.0, 0).unwrap();
        assert_eq!(n0.support_len(), 1);
        assert!((n0.trace() - c(0.5)).norm() < 1e-16);
        let inv = neumann_inverse(&uv, 2.0, 60).unwrap();
        let prod = inv.multiply(&uv.add(&AlgebraElement::one(G).scale(c(2.0))).unwrap()).unwrap();
        assert!(prod.sub(&AlgebraElement::one(G)).unwrap().sup_norm() < 1e-15);
        for k in 1..20 {
            let r = inv.coeff(k, k).norm() / inv.coeff(k - 1, k - 1).norm();
            assert!((r - 0.5).abs() < 1e-12);
        }
        assert!(matches!(neumann_inverse(&AlgebraElement::harper(G, 2.0), 2.0, 3), Err(AlgebraError::NotMonomial(4))));
        assert!(matches!(neumann_inverse(&uv, 1.0, 3), Err(AlgebraError::Beta(_))));
    }

    #[test]
    fn low_moments() {
        let beta: f64 = 2.0;
        assert!((moment(beta, 2).unwrap() - (2.0 * beta * beta + 2.0)).abs() < 1e-12);
        let cos = (2.0 * std::f64::consts::PI * G.reducer().value()).cos();
        // 24 words of two u-letters and two v-letters; the 8 interlaced ones carry λ^{±2}
        let m4 = 6.0 * beta.powi(4) + (16.0 + 8.0 * cos) * beta * beta + 6.0;
        assert!((moment(beta, 4).unwrap() - m4).abs() < 1e-10);
        assert!(moment(beta, 3).unwrap().abs() < 1e-12);
    }

    #[test]
    fn commutative_limit() {
        // α = 0: h = 2cos s + 2β cos t with independent uniform phases
        let beta: f64 = 1.7;
        let m4 = moment_at(AlphaId::Ratio(0, 1), beta, 4).unwrap();
        assert!((m4 - (6.0 + 24.0 * beta * beta + 6.0 * beta.powi(4))).abs() < 1e-10);
    }
}
