use lattice_rep::{HParams, PhaseReducer};
use num_complex::Complex64;
use numlin::{BandLu, ComplexMatrix};
use rayon::prelude::*;
use serde::Serialize;

use crate::DiffError;

/// Values `X_pq` for `|p| ≤ p_max`, `|q| ≤ q_max` at one `z`.
#[derive(Clone, Debug, Serialize)]
pub struct CoefficientTable {
    pub z: Complex64,
    pub p_max: i64,
    pub q_max: i64,
    values: Vec<Complex64>,
}

impl CoefficientTable {
    pub fn zeros(z: Complex64, p_max: i64, q_max: i64) -> Self {
        let n = ((2 * p_max + 1) * (2 * q_max + 1)) as usize;
        Self { z, p_max, q_max, values: vec![Complex64::new(0.0, 0.0); n] }
    }

    fn index(&self, p: i64, q: i64) -> Option<usize> {
        (p.abs() <= self.p_max && q.abs() <= self.q_max).then(|| ((p + self.p_max) * (2 * self.q_max + 1) + q + self.q_max) as usize)
    }

    /// Zero outside the table.
    pub fn get(&self, p: i64, q: i64) -> Complex64 {
        self.index(p, q).map_or(Complex64::new(0.0, 0.0), |i| self.values[i])
    }

    pub fn set(&mut self, p: i64, q: i64, v: Complex64) {
        let i = self.index(p, q).expect("entry outside the table");
        self.values[i] = v;
    }

    pub fn entries(&self) -> impl Iterator<Item = (i64, i64, Complex64)> + '_ {
        (-self.p_max..=self.p_max).flat_map(move |p| (-self.q_max..=self.q_max).map(move |q| (p, q, self.get(p, q))))
    }

    /// `max |X_pq - X_{-p,q}|`.
    pub fn symmetry_defect(&self) -> f64 {
        self.entries().map(|(p, q, v)| (v - self.get(-p, q)).norm()).fold(0.0, f64::max)
    }

    /// Average of `X_pq` and `X_{-p,q}`.
    pub fn symmetrized(&self) -> Self {
        let mut out = self.clone();
        for (p, q, v) in self.entries() {
            out.set(p, q, 0.5 * (v + self.get(-p, q)));
        }
        out
    }

    pub fn max_difference(&self, other: &Self) -> f64 {
        self.entries().map(|(p, q, v)| (v - other.get(p, q)).norm()).fold(0.0, f64::max)
    }

    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<(), DiffError> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["p", "q", "re", "im"])?;
        for (p, q, v) in self.entries() {
            wr.write_record([p.to_string(), q.to_string(), format!("{:.17e}", v.re), format!("{:.17e}", v.im)])?;
        }
        wr.flush()?;
        Ok(())
    }
}

fn almost_mathieu(x: Complex64, beta: f64, half_width: usize, alpha: &PhaseReducer) -> Result<ComplexMatrix, DiffError> {
    let n = 2 * half_width + 1;
    let params = HParams::at_parameter(x, beta);
    let off = half_width as i64;
    let mut m = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = params.potential(i as i64 - off, alpha);
        if i > 0 {
            m[(i, i - 1)] = Complex64::new(1.0, 0.0);
            m[(i - 1, i)] = Complex64::new(1.0, 0.0);
        }
    }
    m.set_band(1, 1)?;
    Ok(m)
}

/// Fourier coefficients of `(h - z)^{-1} = Σ c_pq w_pq`.
///
/// For `M` phases `x_k = e^{2πik/M}` the column `R(x_k)_{·,0}` of the
/// resolvent of the truncated `h(x_k)` is solved on `n = -N..N`; then
/// `c_pq = λ^{pq} M^{-1} Σ_k R(x_k)_{p,0} x_k^{-q}`.
pub fn resolvent_coefficients(
    z: Complex64,
    beta: f64,
    alpha: &PhaseReducer,
    p_max: i64,
    q_max: i64,
    half_width: usize,
    samples: usize,
) -> Result<CoefficientTable, DiffError> {
    if p_max < 0 || q_max < 0 || half_width as i64 <= 2 * p_max {
        return Err(DiffError::Parameter(format!("window {half_width} too small for |p| ≤ {p_max}")));
    }
    if samples <= 4 * q_max as usize {
        return Err(DiffError::Parameter(format!("{samples} phase samples alias |q| ≤ {q_max}")));
    }
    let columns: Vec<Vec<Complex64>> = (0..samples)
        .into_par_iter()
        .map(|k| {
            let x = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / samples as f64);
            let m = almost_mathieu(x, beta, half_width, alpha)?;
            let lu = BandLu::factor(&m, z, 0.0)?;
            if lu.min_pivot() < 1e-8 {
                return Err(DiffError::NearSpectrum { z, pivot: lu.min_pivot() });
            }
            let mut e0 = vec![Complex64::new(0.0, 0.0); m.rows()];
            e0[half_width] = Complex64::new(1.0, 0.0);
            let y = lu.solve(&e0);
            Ok((-p_max..=p_max).map(|p| y[(half_width as i64 + p) as usize]).collect())
        })
        .collect::<Result<_, DiffError>>()?;
    let mut table = CoefficientTable::zeros(z, p_max, q_max);
    for p in -p_max..=p_max {
        for q in -q_max..=q_max {
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, col) in columns.iter().enumerate() {
                let x = Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * (q * k as i64) as f64 / samples as f64);
                acc += col[(p + p_max) as usize] * x;
            }
            table.set(p, q, alpha.lambda_pow(p * q) * acc / samples as f64);
        }
    }
    Ok(table)
}

/// Polynomial solutions `d_pq(z)`: zero for `q ≥ -|p|`, `d_{0,-1} = β^{-1}`,
/// and continued to lower `q` through the first equation at `θ = 0`,
/// `λ^q X_{p-1,q} + λ^{-q} X_{p+1,q} + βλ^{-p} X_{p,q-1} + βλ^p X_{p,q+1} = z X_pq`.
/// This reproduces `d_{p,-|p|-1} = (-1)^p β^{-|p|-1}`.
pub fn d_polynomials(beta: f64, alpha: &PhaseReducer, p_max: i64, q_max: i64, z: Complex64) -> Result<CoefficientTable, DiffError> {
    if !(beta > 0.0) || p_max < 0 || q_max < 1 {
        return Err(DiffError::Parameter("need beta > 0 and q_max ≥ 1".into()));
    }
    let wide = p_max + q_max + 2;
    let mut t = CoefficientTable::zeros(z, wide, q_max + 1);
    t.set(0, -1, Complex64::new(1.0 / beta, 0.0));
    for q in (-q_max + 1..=-1).rev() {
        for p in -wide + 1..wide {
            let v = (z * t.get(p, q)
                - alpha.lambda_pow(q) * t.get(p - 1, q)
                - alpha.lambda_pow(-q) * t.get(p + 1, q)
                - alpha.lambda_pow(p) * beta * t.get(p, q + 1))
                * alpha.lambda_pow(p)
                / beta;
            t.set(p, q - 1, v);
        }
    }
    let mut out = CoefficientTable::zeros(z, p_max, q_max);
    for p in -p_max..=p_max {
        for q in -q_max..=q_max {
            out.set(p, q, t.get(p, q));
        }
    }
    Ok(out)
}
