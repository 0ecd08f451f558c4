use std::collections::BTreeMap;

use lattice_rep::PhaseReducer;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::AlgebraError;

pub const DEFAULT_FLOOR: f64 = 1e-16;

/// Which rotation number an element lives over.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AlphaId {
    Golden,
    Ratio(i64, i64),
    Float(f64),
}

impl AlphaId {
    pub fn reducer(&self) -> PhaseReducer {
        match *self {
            AlphaId::Golden => PhaseReducer::golden(),
            AlphaId::Ratio(p, q) => PhaseReducer::from_ratio(p, q),
            AlphaId::Float(a) => PhaseReducer::from_f64(a),
        }
    }

    pub fn label(&self) -> String {
        match *self {
            AlphaId::Golden => "golden".into(),
            AlphaId::Ratio(p, q) => format!("{p}/{q}"),
            AlphaId::Float(a) => format!("{a:e}"),
        }
    }

    pub fn parse(s: &str) -> Result<Self, AlgebraError> {
        if s == "golden" {
            return Ok(AlphaId::Golden);
        }
        if let Some((p, q)) = s.split_once('/') {
            let p = p.trim().parse().map_err(|_| AlgebraError::Format(format!("bad alpha '{s}'")))?;
            let q: i64 = q.trim().parse().map_err(|_| AlgebraError::Format(format!("bad alpha '{s}'")))?;
            if q <= 0 {
                return Err(AlgebraError::Format(format!("bad alpha '{s}'")));
            }
            return Ok(AlphaId::Ratio(p, q));
        }
        s.parse().map(AlphaId::Float).map_err(|_| AlgebraError::Format(format!("bad alpha '{s}'")))
    }
}

/// Finitely supported `Σ c_pq w_pq` with `w_pq = λ^{-pq} u^p v^q`.
#[derive(Clone, Debug)]
pub struct AlgebraElement {
    alpha: AlphaId,
    phase: PhaseReducer,
    coeffs: BTreeMap<(i64, i64), Complex64>,
    floor: f64,
}

impl PartialEq for AlgebraElement {
    fn eq(&self, other: &Self) -> bool {
        self.alpha == other.alpha && self.coeffs == other.coeffs
    }
}

impl AlgebraElement {
    pub fn zero(alpha: AlphaId) -> Self {
        Self { alpha, phase: alpha.reducer(), coeffs: BTreeMap::new(), floor: DEFAULT_FLOOR }
    }

    pub fn one(alpha: AlphaId) -> Self {
        Self::monomial(alpha, 0, 0, Complex64::new(1.0, 0.0))
    }

    /// `c·w_pq`.
    pub fn monomial(alpha: AlphaId, p: i64, q: i64, c: Complex64) -> Self {
        let mut e = Self::zero(alpha);
        e.add_term(p, q, c);
        e
    }

    /// The generator `u = w_{1,0}`.
    pub fn u(alpha: AlphaId) -> Self {
        Self::monomial(alpha, 1, 0, Complex64::new(1.0, 0.0))
    }

    /// The generator `v = w_{0,1}`.
    pub fn v(alpha: AlphaId) -> Self {
        Self::monomial(alpha, 0, 1, Complex64::new(1.0, 0.0))
    }

    /// `h(1) = u + u* + β(v + v*)`.
    pub fn harper(alpha: AlphaId, beta: f64) -> Self {
        let one = Complex64::new(1.0, 0.0);
        let b = Complex64::new(beta, 0.0);
        let mut e = Self::zero(alpha);
        e.add_term(1, 0, one);
        e.add_term(-1, 0, one);
        e.add_term(0, 1, b);
        e.add_term(0, -1, b);
        e
    }

    pub fn from_terms(alpha: AlphaId, terms: impl IntoIterator<Item = ((i64, i64), Complex64)>) -> Self {
        let mut e = Self::zero(alpha);
        for ((p, q), c) in terms {
            e.add_term(p, q, c);
        }
        e.prune();
        e
    }

    pub fn with_floor(mut self, floor: f64) -> Self {
        self.floor = floor;
        self.prune();
        self
    }

    pub fn alpha(&self) -> AlphaId {
        self.alpha
    }

    pub fn phase(&self) -> &PhaseReducer {
        &self.phase
    }

    pub fn floor(&self) -> f64 {
        self.floor
    }

    pub fn coeff(&self, p: i64, q: i64) -> Complex64 {
        self.coeffs.get(&(p, q)).copied().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = ((i64, i64), Complex64)> + '_ {
        self.coeffs.iter().map(|(&k, &c)| (k, c))
    }

    pub fn support_len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_monomial(&self) -> bool {
        self.coeffs.len() == 1
    }

    pub fn add_term(&mut self, p: i64, q: i64, c: Complex64) {
        *self.coeffs.entry((p, q)).or_default() += c;
    }

    /// Drop coefficients with modulus below the floor.
    pub fn prune(&mut self) {
        let floor = self.floor;
        self.coeffs.retain(|_, c| c.norm() >= floor && *c != Complex64::new(0.0, 0.0));
    }

    fn check_alpha(&self, other: &Self) -> Result<(), AlgebraError> {
        if self.alpha != other.alpha {
            return Err(AlgebraError::AlphaMismatch(self.alpha.label(), other.alpha.label()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check_alpha(other)?;
        let mut out = self.clone();
        out.floor = self.floor.min(other.floor);
        for (&(p, q), &c) in &other.coeffs {
            out.add_term(p, q, c);
        }
        out.prune();
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = self.clone();
        out.coeffs.values_mut().for_each(|c| *c *= s);
        out.prune();
        out
    }

    /// Twisted convolution: `w_pq w_rs = λ^{ps-qr} w_{p+r,q+s}`.
    pub fn multiply(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check_alpha(other)?;
        let mut out = Self::zero(self.alpha);
        out.floor = self.floor.min(other.floor);
        for (&(p, q), &a) in &self.coeffs {
            for (&(r, s), &b) in &other.coeffs {
                let twist = self.phase.lambda_pow(p * s - q * r);
                out.add_term(p + r, q + s, twist * a * b);
            }
        }
        out.prune();
        Ok(out)
    }

    /// `(Σ c_pq w_pq)* = Σ conj(c_pq) w_{-p,-q}`.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero(self.alpha);
        out.floor = self.floor;
        for (&(p, q), &c) in &self.coeffs {
            out.coeffs.insert((-p, -q), c.conj());
        }
        out
    }

    /// The canonical trace: the `w_{0,0}` coefficient.
    pub fn trace(&self) -> Complex64 {
        self.coeff(0, 0)
    }

    /// Non-negative power by repeated squaring; negative powers use the adjoint.
    pub fn pow(&self, n: i64) -> Result<Self, AlgebraError> {
        let mut base = if n < 0 { self.adjoint() } else { self.clone() };
        let mut k = n.unsigned_abs();
        let mut acc = Self::one(self.alpha).with_floor(self.floor);
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.multiply(&base)?;
            }
            k >>= 1;
            if k > 0 {
                base = base.multiply(&base)?;
            }
        }
        Ok(acc)
    }

    /// Largest coefficient modulus.
    pub fn sup_norm(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> Result<String, AlgebraError> {
        let doc = ElementJson {
            alpha_id: self.alpha.label(),
            entries: self.coeffs.iter().map(|(&(p, q), c)| (p, q, c.re, c.im)).collect(),
        };
        Ok(serde_json::to_string(&doc)?)
    }

    pub fn from_json(s: &str) -> Result<Self, AlgebraError> {
        let doc: ElementJson = serde_json::from_str(s)?;
        let alpha = AlphaId::parse(&doc.alpha_id)?;
        Ok(Self::from_terms(alpha, doc.entries.into_iter().map(|(p, q, re, im)| ((p, q), Complex64::new(re, im)))))
    }
}

#[derive(Serialize, Deserialize)]
struct ElementJson {
    alpha_id: String,
    entries: Vec<(i64, i64, f64, f64)>,
}
