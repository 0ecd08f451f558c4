use std::io::{Read, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{LatticeError, PhaseReducer};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Components `ξ_n` for `n` in `[n_min, n_max]` of a two-sided sequence.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeWindow {
    n_min: i64,
    values: Vec<Complex64>,
}

impl LatticeWindow {
    pub fn new(n_min: i64, values: Vec<Complex64>) -> Result<Self, LatticeError> {
        if values.is_empty() {
            return Err(LatticeError::EmptyWindow);
        }
        if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(LatticeError::NonFinite);
        }
        Ok(Self { n_min, values })
    }

    pub fn zeros(n_min: i64, n_max: i64) -> Self {
        assert!(n_min <= n_max, "empty window");
        Self { n_min, values: vec![ZERO; (n_max - n_min + 1) as usize] }
    }

    /// Unit vector at `n` on `[n_min, n_max]`.
    pub fn delta(n: i64, n_min: i64, n_max: i64) -> Self {
        let mut w = Self::zeros(n_min, n_max);
        w.set(n, Complex64::new(1.0, 0.0));
        w
    }

    pub fn from_fn(n_min: i64, n_max: i64, mut f: impl FnMut(i64) -> Complex64) -> Self {
        Self { n_min, values: (n_min..=n_max).map(&mut f).collect() }
    }

    pub fn n_min(&self) -> i64 {
        self.n_min
    }

    pub fn n_max(&self) -> i64 {
        self.n_min + self.values.len() as i64 - 1
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn contains(&self, n: i64) -> bool {
        n >= self.n_min && n <= self.n_max()
    }

    /// Component at `n`, or `None` outside the window.
    pub fn get(&self, n: i64) -> Option<Complex64> {
        self.contains(n).then(|| self.values[(n - self.n_min) as usize])
    }

    /// Component at `n`, zero outside the window.
    pub fn at(&self, n: i64) -> Complex64 {
        self.get(n).unwrap_or(ZERO)
    }

    pub fn set(&mut self, n: i64, z: Complex64) {
        assert!(self.contains(n), "index {n} outside window");
        let i = (n - self.n_min) as usize;
        self.values[i] = z;
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.values.iter().enumerate().map(move |(i, &z)| (self.n_min + i as i64, z))
    }

    pub fn norm2(&self) -> f64 {
        self.values.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn norm_inf(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self { n_min: self.n_min, values: self.values.iter().map(|z| z * s).collect() }
    }

    /// Restriction to `[lo, hi]` intersected with the window.
    pub fn restrict(&self, lo: i64, hi: i64) -> Result<Self, LatticeError> {
        let a = lo.max(self.n_min);
        let b = hi.min(self.n_max());
        if a > b {
            return Err(LatticeError::EmptyWindow);
        }
        Ok(Self {
            n_min: a,
            values: self.values[(a - self.n_min) as usize..=(b - self.n_min) as usize].to_vec(),
        })
    }

    /// Pointwise combination on the common index range.
    pub fn zip_with(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self, LatticeError> {
        let a = self.n_min.max(other.n_min);
        let b = self.n_max().min(other.n_max());
        if a > b {
            return Err(LatticeError::EmptyWindow);
        }
        Ok(Self::from_fn(a, b, |n| f(self.at(n), other.at(n))))
    }

    pub fn sub(&self, other: &Self) -> Result<Self, LatticeError> {
        self.zip_with(other, |a, b| a - b)
    }

    /// Multiply componentwise by `f(n)`.
    pub fn map_indexed(&self, f: impl Fn(i64, Complex64) -> Complex64) -> Self {
        Self { n_min: self.n_min, values: self.iter().map(|(n, z)| f(n, z)).collect() }
    }

    /// Index reversal `(Jξ)_n = ξ_{-n}`.
    pub fn reflect(&self) -> Self {
        let mut values = self.values.clone();
        values.reverse();
        Self { n_min: -self.n_max(), values }
    }

    pub fn conj(&self) -> Self {
        Self { n_min: self.n_min, values: self.values.iter().map(|z| z.conj()).collect() }
    }

    /// Bilinear sum `Σ ξ_n η_n` over the common range (no conjugation).
    pub fn bilinear(&self, other: &Self) -> Complex64 {
        let a = self.n_min.max(other.n_min);
        let b = self.n_max().min(other.n_max());
        (a..=b).map(|n| self.at(n) * other.at(n)).sum()
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), LatticeError> {
        let mut wr = csv::Writer::from_writer(w);
        for (n, z) in self.iter() {
            wr.serialize(CsvRow { n, re: z.re, im: z.im })?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self, LatticeError> {
        let mut rd = csv::Reader::from_reader(r);
        let mut rows: Vec<CsvRow> = Vec::new();
        for rec in rd.deserialize() {
            rows.push(rec?);
        }
        let first = rows.first().ok_or(LatticeError::EmptyWindow)?.n;
        for (i, row) in rows.iter().enumerate() {
            if row.n != first + i as i64 {
                return Err(LatticeError::Format(format!("non-consecutive index {}", row.n)));
            }
        }
        Self::new(first, rows.iter().map(|r| Complex64::new(r.re, r.im)).collect())
    }
}

#[derive(Serialize, Deserialize)]
struct CsvRow {
    n: i64,
    re: f64,
    im: f64,
}

/// `(uξ)_n = ξ_{n-1}`; the lowest index becomes invalid and is dropped.
pub fn apply_shift_u(xi: &LatticeWindow) -> Result<LatticeWindow, LatticeError> {
    if xi.len() < 2 {
        return Err(LatticeError::EmptyWindow);
    }
    Ok(LatticeWindow::from_fn(xi.n_min() + 1, xi.n_max(), |n| xi.at(n - 1)))
}

/// `(u*ξ)_n = ξ_{n+1}`; the highest index becomes invalid and is dropped.
pub fn apply_shift_u_adj(xi: &LatticeWindow) -> Result<LatticeWindow, LatticeError> {
    if xi.len() < 2 {
        return Err(LatticeError::EmptyWindow);
    }
    Ok(LatticeWindow::from_fn(xi.n_min(), xi.n_max() - 1, |n| xi.at(n + 1)))
}

/// Exact re-indexing `(u^k ξ)_n = ξ_{n-k}` carrying the whole window along.
pub fn translate(xi: &LatticeWindow, k: i64) -> LatticeWindow {
    LatticeWindow { n_min: xi.n_min() + k, values: xi.values.clone() }
}

/// Multiply `ξ_n` by `conj(λ)^{2n·power} = e^{-2πiαn·power}`.
pub fn apply_diag_v(xi: &LatticeWindow, power: i64, alpha: &PhaseReducer) -> LatticeWindow {
    xi.map_indexed(|n, z| z * alpha.lambda_pow(-2 * n * power))
}

/// Multiply `ξ_n` by `λ^{n²}`.
pub fn apply_w(xi: &LatticeWindow, alpha: &PhaseReducer) -> LatticeWindow {
    xi.map_indexed(|n, z| z * alpha.lambda_sq(n))
}

/// Multiply `ξ_n` by `λ^{-n²}`.
pub fn apply_w_adj(xi: &LatticeWindow, alpha: &PhaseReducer) -> LatticeWindow {
    xi.map_indexed(|n, z| z * alpha.lambda_sq(n).conj())
}

/// `(D_x ξ)_n = x^n`.
pub fn apply_d(x: Complex64, xi: &LatticeWindow) -> Result<LatticeWindow, LatticeError> {
    if x == ZERO {
        return Err(LatticeError::ZeroParameter);
    }
    let logr = x.norm().ln();
    let worst = [xi.n_min(), xi.n_max()].iter().map(|&n| n as f64 * logr).fold(f64::MIN, f64::max);
    let top = xi.norm_inf().max(f64::MIN_POSITIVE).ln();
    if worst + top > 700.0 {
        return Err(LatticeError::Overflow { bound: (700.0 - top) / logr.abs().max(1e-300) });
    }
    let arg = x.arg();
    Ok(xi.map_indexed(|n, z| {
        let nf = n as f64;
        z * Complex64::from_polar((nf * logr).exp(), nf * arg)
    }))
}

/// Coefficients of `h_γ(δ)` at phase `x`: off-diagonals and the potential.
#[derive(Clone, Copy, Debug)]
pub struct HParams {
    pub gamma: Complex64,
    pub delta: Complex64,
    pub x: Complex64,
    pub beta: f64,
}

impl HParams {
    pub fn new(gamma: Complex64, delta: Complex64, x: Complex64, beta: f64) -> Self {
        Self { gamma, delta, x, beta }
    }

    /// `h(P) = u + u* + β(Pv + P^{-1}v*)` with `P` given as a single parameter.
    pub fn at_parameter(p: Complex64, beta: f64) -> Self {
        Self { gamma: Complex64::new(1.0, 0.0), delta: p, x: Complex64::new(1.0, 0.0), beta }
    }

    /// The diagonal `β(δx e^{-2πiαn} + δ^{-1}conj(x) e^{2πiαn})`.
    ///
    /// `x` is taken on the unit circle, so `conj(x) = 1/x`; the potential
    /// depends on the product `δx` only.
    pub fn potential(&self, n: i64, alpha: &PhaseReducer) -> Complex64 {
        let e = alpha.lambda_pow(-2 * n);
        let p = self.delta * self.x;
        (p * e + e.conj() / p) * self.beta
    }
}

/// `(hξ)_n = γξ_{n-1} + γ^{-1}ξ_{n+1} + V_n ξ_n`; one site is lost on each side.
pub fn apply_h(params: &HParams, xi: &LatticeWindow, alpha: &PhaseReducer) -> Result<LatticeWindow, LatticeError> {
    if params.gamma == ZERO || params.delta == ZERO {
        return Err(LatticeError::ZeroParameter);
    }
    if xi.len() < 3 {
        return Err(LatticeError::EmptyWindow);
    }
    let g = params.gamma;
    let gi = g.inv();
    Ok(LatticeWindow::from_fn(xi.n_min() + 1, xi.n_max() - 1, |n| {
        g * xi.at(n - 1) + gi * xi.at(n + 1) + params.potential(n, alpha) * xi.at(n)
    }))
}
