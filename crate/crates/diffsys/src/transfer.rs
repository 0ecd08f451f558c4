use num_complex::Complex64;
use serde::Serialize;

use crate::{DiffError, SystemParams};

pub type Mat3 = [[Complex64; 3]; 3];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = [[ZERO; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

pub fn det3(m: &Mat3) -> Complex64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

fn apply(m: &Mat3, v: &[Complex64; 3]) -> [Complex64; 3] {
    [0, 1, 2].map(|i| (0..3).map(|k| m[i][k] * v[k]).sum())
}

/// Sign of the leading entry of the last factor. `Printed` puts a minus in
/// front of `χ sin[πα(p+1)+θ]`; with it the product does not advance
/// solutions. `Corrected` flips that sign, which makes `F_p[0][1] = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Convention {
    Printed,
    Corrected,
}

/// Smallest admissible modulus of a denominator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Guard {
    pub threshold: f64,
}

impl Default for Guard {
    fn default() -> Self {
        Self { threshold: 1e-8 }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct TransferMatrices {
    pub c: Mat3,
    pub d: Mat3,
    pub e: Mat3,
    /// `E D C`.
    pub f: Mat3,
}

fn check(which: &'static str, value: f64, p: i64, guard: Guard) -> Result<f64, DiffError> {
    if value.abs() < guard.threshold {
        Err(DiffError::Guard { which, value, p })
    } else {
        Ok(value)
    }
}

/// The three factors of the diagonal step at index `p` and their product.
pub fn transfer_matrices(params: &SystemParams, p: i64, convention: Convention, guard: Guard) -> Result<TransferMatrices, DiffError> {
    let pi = std::f64::consts::PI;
    let th = params.theta;
    let a = &params.alpha;
    let chi = params.z;
    let beta = params.beta;
    let sa = check("sin πα", a.sin_pi_alpha(1), p, guard)?;
    let c1 = check("cos[πα(p+1)+θ]", (pi * a.half_turns(p + 1) + th).cos(), p, guard)?;
    let s3 = check("sin[πα(2p+3)+2θ]", (pi * a.half_turns(2 * p + 3) + 2.0 * th).sin(), p, guard)?;
    let s1 = (pi * a.half_turns(p + 1) + th).sin();
    let s2 = (pi * a.half_turns(2 * p + 2) + 2.0 * th).sin();
    let s21 = (pi * a.half_turns(2 * p + 1) + 2.0 * th).sin();
    let r = |x: f64| Complex64::new(x, 0.0);
    let c = [[r(-beta * s2 / sa), chi * (s1 / sa), r(-s21 / sa)], [ONE, ZERO, ZERO], [ZERO, ONE, ZERO]];
    let d = [[ZERO, chi / (2.0 * c1), r(-beta)], [ZERO, ONE, ZERO], [ONE, ZERO, ZERO]];
    let sign = match convention {
        Convention::Printed => -1.0,
        Convention::Corrected => 1.0,
    };
    let e = [[chi * (sign * s1 / (beta * s3)), r(-s2 / (beta * s3)), r(sa / s3)], [ONE, ZERO, ZERO], [ZERO, ONE, ZERO]];
    let f = mul(&e, &mul(&d, &c));
    Ok(TransferMatrices { c, d, e, f })
}

/// `(X_{p+1,p+1}, X_{p+1,p}, X_pp)` at index `p`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TransferState {
    pub p: i64,
    pub values: [Complex64; 3],
}

impl TransferState {
    pub fn new(p: i64, values: [Complex64; 3]) -> Result<Self, DiffError> {
        if values.iter().any(|z| !z.is_finite()) {
            return Err(DiffError::Parameter("non-finite state".into()));
        }
        Ok(Self { p, values })
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Orbit {
    pub states: Vec<TransferState>,
    /// Why the orbit ended early, if it did.
    pub stopped: Option<String>,
}

impl Orbit {
    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<(), DiffError> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["p", "diag_next_re", "diag_next_im", "off_re", "off_im", "diag_re", "diag_im"])?;
        for s in &self.states {
            let mut rec = vec![s.p.to_string()];
            for v in s.values {
                rec.push(format!("{:.17e}", v.re));
                rec.push(format!("{:.17e}", v.im));
            }
            wr.write_record(&rec)?;
        }
        wr.flush()?;
        Ok(())
    }
}

/// Iterate `state ← F_p state`; the returned orbit starts with `state`.
pub fn advance(state: TransferState, params: &SystemParams, steps: usize, convention: Convention, guard: Guard) -> Orbit {
    let mut states = vec![state];
    let mut cur = state;
    for _ in 0..steps {
        match transfer_matrices(params, cur.p, convention, guard) {
            Ok(m) => {
                cur = TransferState { p: cur.p + 1, values: apply(&m.f, &cur.values) };
                if cur.values.iter().any(|z| !z.is_finite()) {
                    return Orbit { states, stopped: Some(format!("overflow at p = {}", cur.p)) };
                }
                states.push(cur);
            }
            Err(e) => return Orbit { states, stopped: Some(e.to_string()) },
        }
    }
    Orbit { states, stopped: None }
}

#[derive(Clone, Debug, Serialize)]
pub struct WronskianReport {
    /// `X_{p+1,p+1}Y_{p+2,p+2} - X_{p+2,p+2}Y_{p+1,p+1}` for `p = 0..=P`.
    pub lhs: Vec<Complex64>,
    /// `sin(πα+2θ)/sin[πα(2p+3)+2θ] · (X_00 Y_11 - X_11 Y_00)`.
    pub rhs: Vec<Complex64>,
    /// Largest `|lhs - rhs|` relative to the size of the two products.
    pub residual: f64,
    /// Same against `-β sin(πα+θ)/sin[πα(2p+3)+2θ] · (X_00 Y_11 - X_11 Y_00)`.
    pub literal_residual: f64,
}

fn diagonal(x0: (Complex64, Complex64), params: &SystemParams, steps: usize, guard: Guard) -> Result<Vec<Complex64>, DiffError> {
    // the off-diagonal slot does not feed the diagonal once F_p[0][1] = 0
    let start = TransferState::new(0, [x0.1, ZERO, x0.0])?;
    let orbit = advance(start, params, steps, Convention::Corrected, guard);
    if let Some(why) = orbit.stopped {
        return Err(DiffError::Parameter(why));
    }
    let mut d = vec![x0.0];
    d.extend(orbit.states.iter().map(|s| s.values[0]));
    Ok(d)
}

/// Check of the Wronskian identity along the diagonal recursion up to `P`.
pub fn wronskian_residual(
    x0: (Complex64, Complex64),
    y0: (Complex64, Complex64),
    params: &SystemParams,
    p_max: usize,
    guard: Guard,
) -> Result<WronskianReport, DiffError> {
    let pi = std::f64::consts::PI;
    let a = &params.alpha;
    let th = params.theta;
    let x = diagonal(x0, params, p_max + 1, guard)?;
    let y = diagonal(y0, params, p_max + 1, guard)?;
    let w0 = x0.0 * y0.1 - x0.1 * y0.0;
    let num = (pi * a.half_turns(1) + 2.0 * th).sin();
    let lit = -params.beta * (pi * a.half_turns(1) + th).sin();
    let (mut lhs, mut rhs) = (Vec::new(), Vec::new());
    let (mut residual, mut literal_residual) = (0.0f64, 0.0f64);
    for p in 0..=p_max {
        let s3 = check("sin[πα(2p+3)+2θ]", (pi * a.half_turns(2 * p as i64 + 3) + 2.0 * th).sin(), p as i64, guard)?;
        let (a1, a2) = (x[p + 1] * y[p + 2], x[p + 2] * y[p + 1]);
        let l = a1 - a2;
        let r = w0 * (num / s3);
        let rl = w0 * (lit / s3);
        let scale = a1.norm() + a2.norm() + r.norm();
        if scale > 0.0 {
            residual = residual.max((l - r).norm() / scale);
            literal_residual = literal_residual.max((l - rl).norm() / (scale + rl.norm()));
        }
        lhs.push(l);
        rhs.push(r);
    }
    Ok(WronskianReport { lhs, rhs, residual, literal_residual })
}

/// `|W_p| / (‖(X_{p+1}, X_{p+2})‖ ‖(Y_{p+1}, Y_{p+2})‖)` along the diagonal:
/// the sine of the angle between the two trailing states.
pub fn cross_wronskians(
    x0: (Complex64, Complex64),
    y0: (Complex64, Complex64),
    params: &SystemParams,
    p_max: usize,
    guard: Guard,
) -> Result<Vec<f64>, DiffError> {
    let x = diagonal(x0, params, p_max + 1, guard)?;
    let y = diagonal(y0, params, p_max + 1, guard)?;
    Ok((0..=p_max)
        .map(|p| {
            let w = x[p + 1] * y[p + 2] - x[p + 2] * y[p + 1];
            let nx = (x[p + 1].norm_sqr() + x[p + 2].norm_sqr()).sqrt();
            let ny = (y[p + 1].norm_sqr() + y[p + 2].norm_sqr()).sqrt();
            w.norm() / (nx * ny)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use lattice_rep::PhaseReducer;

    fn params() -> SystemParams {
        SystemParams { alpha: PhaseReducer::golden(), theta: 0.3, beta: 2.0, z: Complex64::new(1.0, 0.2) }
    }

    #[test]
    fn printed_shape() {
        for p in 0..5 {
            let m = transfer_matrices(&params(), p, Convention::Printed, Guard::default()).unwrap();
            assert_eq!(m.d[2][0], ONE);
            assert_eq!(m.d[0][2], Complex64::new(-2.0, 0.0));
            let lhs = det3(&m.f);
            let rhs = det3(&m.e) * det3(&m.d) * det3(&m.c);
            assert!((lhs - rhs).norm() < 1e-13 * rhs.norm().max(1.0));
        }
    }

    #[test]
    fn corrected_product_decouples_the_diagonal() {
        for p in 0..20 {
            let m = transfer_matrices(&params(), p, Convention::Corrected, Guard::default()).unwrap();
            assert!(m.f[0][1].norm() < 1e-14);
            let printed = transfer_matrices(&params(), p, Convention::Printed, Guard::default()).unwrap();
            assert!(printed.f[0][1].norm() > 1e-3);
        }
    }

    #[test]
    fn guard_reports_the_denominator() {
        // cos[πα + θ] = 0
        let mut pr = params();
        pr.theta = std::f64::consts::FRAC_PI_2 - std::f64::consts::PI * pr.alpha.value();
        match transfer_matrices(&pr, 0, Convention::Corrected, Guard::default()) {
            Err(DiffError::Guard { which, p, .. }) => {
                assert!(which.starts_with("cos"));
                assert_eq!(p, 0);
            }
            other => panic!("{other:?}"),
        }
        let o = advance(TransferState::new(0, [ONE, ONE, ONE]).unwrap(), &pr, 5, Convention::Corrected, Guard::default());
        assert_eq!(o.states.len(), 1);
        assert!(o.stopped.is_some());
    }

    #[test]
    fn equal_data_gives_zero_on_both_sides() {
        let x = (Complex64::new(0.3, 1.0), Complex64::new(-2.0, 0.5));
        let r = wronskian_residual(x, x, &params(), 40, Guard::default()).unwrap();
        assert!(r.lhs.iter().chain(&r.rhs).all(|z| *z == ZERO));
    }
}
