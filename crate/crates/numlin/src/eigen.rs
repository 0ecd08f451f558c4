use num_complex::Complex64;

use crate::{dot_c, norm2, BandLu, ComplexMatrix, NumError};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const MAX_ITER_PER_EIGENVALUE: usize = 120;

/// Reduce a square matrix to upper Hessenberg form by Householder
/// reflections. Matrices whose lower bandwidth is at most one are returned
/// unchanged (they already are Hessenberg).
pub fn hessenberg_reduce(m: &ComplexMatrix) -> Result<ComplexMatrix, NumError> {
    if !m.is_square() {
        return Err(NumError::NotSquare { rows: m.rows(), cols: m.cols() });
    }
    let n = m.rows();
    let mut h = m.clone();
    h.clear_band();
    if m.bandwidth().0 <= 1 {
        return Ok(h);
    }
    let mut v = vec![ZERO; n];
    for k in 0..n.saturating_sub(2) {
        let alpha: f64 = (k + 1..n).map(|i| h[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if alpha == 0.0 {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { Complex64::new(1.0, 0.0) };
        for i in k + 1..n {
            v[i] = h[(i, k)];
        }
        v[k + 1] += phase * alpha;
        let vnorm2: f64 = (k + 1..n).map(|i| v[i].norm_sqr()).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        let tau = 2.0 / vnorm2;
        // H <- (I - tau v v^H) H
        for j in k..n {
            let s: Complex64 = (k + 1..n).map(|i| v[i].conj() * h[(i, j)]).sum();
            let s = s * tau;
            for i in k + 1..n {
                h[(i, j)] -= v[i] * s;
            }
        }
        // H <- H (I - tau v v^H)
        for i in 0..n {
            let s: Complex64 = (k + 1..n).map(|j| h[(i, j)] * v[j]).sum();
            let s = s * tau;
            for j in k + 1..n {
                h[(i, j)] -= s * v[j].conj();
            }
        }
        for i in k + 2..n {
            h[(i, k)] = ZERO;
        }
    }
    Ok(h)
}

/// Givens rotation `[[c, s], [-conj(s), c]]` with real `c` mapping `(x, y)` to `(r, 0)`.
#[inline]
fn givens(x: Complex64, y: Complex64) -> (f64, Complex64) {
    let ax = x.norm();
    let ay = y.norm();
    if ay == 0.0 {
        return (1.0, ZERO);
    }
    if ax == 0.0 {
        return (0.0, y.conj() / ay);
    }
    let rho = ax.hypot(ay);
    (ax / rho, (x / ax) * y.conj() / rho)
}

fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mid = (a + d) * 0.5;
    let l1 = mid + disc;
    let l2 = mid - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// All eigenvalues (with multiplicity) via Hessenberg reduction and
/// single-shift complex QR with Wilkinson shifts.
///
/// Only the active unreduced block is updated since no Schur vectors are
/// accumulated. `tol` scales the deflation test relative to machine epsilon
/// (pass `1.0` for the standard criterion).
pub fn hessenberg_eigenvalues(m: &ComplexMatrix, tol: f64) -> Result<Vec<Complex64>, NumError> {
    if !(tol > 0.0) {
        return Err(NumError::Dimension("tol must be positive".into()));
    }
    let mut h = hessenberg_reduce(m)?;
    let n = h.rows();
    let eps = f64::EPSILON * tol.max(1.0);
    let scale = h.norm_fro().max(f64::MIN_POSITIVE);
    let mut eig = Vec::with_capacity(n);
    let mut hi = n - 1;
    let mut its = 0usize;
    loop {
        if hi == 0 {
            eig.push(h[(0, 0)]);
            break;
        }
        let mut l = hi;
        while l > 0 {
            let sub = h[(l, l - 1)].norm();
            let diag = h[(l - 1, l - 1)].norm() + h[(l, l)].norm();
            let limit = if diag > 0.0 { eps * diag } else { eps * scale };
            if sub <= limit {
                h[(l, l - 1)] = ZERO;
                break;
            }
            l -= 1;
        }
        if l == hi {
            eig.push(h[(hi, hi)]);
            hi -= 1;
            its = 0;
            continue;
        }
        its += 1;
        if its > MAX_ITER_PER_EIGENVALUE {
            return Err(NumError::NoDeflation { index: hi, iterations: its - 1 });
        }
        let mu = if its % 11 == 0 {
            // exceptional shift to break cycles
            h[(hi, hi)] + Complex64::new(0.75 * h[(hi, hi - 1)].norm(), 0.4 * h[(hi, hi - 1)].norm())
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };
        qr_sweep(&mut h, l, hi, mu);
    }
    Ok(eig)
}

/// One implicit single-shift bulge chase on the block `[l, hi]`.
fn qr_sweep(h: &mut ComplexMatrix, l: usize, hi: usize, mu: Complex64) {
    let mut x = h[(l, l)] - mu;
    let mut y = h[(l + 1, l)];
    for k in l..hi {
        if k > l {
            x = h[(k, k - 1)];
            y = h[(k + 1, k - 1)];
        }
        let (c, s) = givens(x, y);
        let jstart = if k > l { k - 1 } else { l };
        let n = h.cols();
        let d = h.data_mut();
        {
            let (top, bottom) = d.split_at_mut((k + 1) * n);
            let rk = &mut top[k * n + jstart..k * n + hi + 1];
            let rk1 = &mut bottom[jstart..hi + 1];
            for (a, b) in rk.iter_mut().zip(rk1.iter_mut()) {
                let (x0, y0) = (*a, *b);
                *a = x0 * c + s * y0;
                *b = y0 * c - s.conj() * x0;
            }
        }
        if k > l {
            d[(k + 1) * n + k - 1] = ZERO;
        }
        let iend = (k + 2).min(hi);
        let sc = s.conj();
        for i in l..=iend {
            let pair = &mut d[i * n + k..i * n + k + 2];
            let (a, b) = (pair[0], pair[1]);
            pair[0] = a * c + b * sc;
            pair[1] = b * c - a * s;
        }
    }
}

/// Result of inverse iteration.
#[derive(Clone, Debug)]
pub struct EigenPair {
    pub value: Complex64,
    pub vector: Vec<Complex64>,
    pub iterations: usize,
    pub residual: f64,
    /// True when the shift had to be nudged off an exactly singular pencil.
    pub shift_perturbed: bool,
}

/// Inverse iteration at a fixed shift with Rayleigh-quotient refinement.
pub fn inverse_iteration(
    m: &ComplexMatrix,
    shift: Complex64,
    tol: f64,
    max_iter: usize,
) -> Result<EigenPair, NumError> {
    if !m.is_square() {
        return Err(NumError::NotSquare { rows: m.rows(), cols: m.cols() });
    }
    let n = m.rows();
    let mnorm = m.norm_inf().max(f64::MIN_POSITIVE);
    let mut sigma = shift;
    let mut perturbed = false;
    let lu = loop {
        match BandLu::factor(m, sigma, 0.0) {
            Ok(lu) => break lu,
            Err(NumError::SingularPivot { .. }) => {
                sigma += Complex64::new(mnorm * 1e3 * f64::EPSILON, mnorm * 7e2 * f64::EPSILON);
                perturbed = true;
            }
            Err(e) => return Err(e),
        }
    };
    let mut x: Vec<Complex64> = (0..n)
        .map(|i| Complex64::new(1.0 + 0.31 * (i as f64 * 0.7).sin(), 0.17 * (i as f64 * 1.3).cos()))
        .collect();
    let nx = norm2(&x);
    x.iter_mut().for_each(|z| *z /= nx);
    let mut residual = f64::INFINITY;
    for it in 1..=max_iter {
        let mut y = lu.solve(&x);
        let ny = norm2(&y);
        if !ny.is_finite() || ny == 0.0 {
            return Err(NumError::NoConvergence { iterations: it, residual });
        }
        y.iter_mut().for_each(|z| *z /= ny);
        let my = m.mul_vec(&y);
        let value = dot_c(&y, &my);
        residual = my
            .iter()
            .zip(&y)
            .map(|(a, b)| (a - value * b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        x = y;
        if residual <= tol * mnorm {
            return Ok(EigenPair { value, vector: x, iterations: it, residual, shift_perturbed: perturbed });
        }
    }
    Err(NumError::NoConvergence { iterations: max_iter, residual })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn contains(set: &[Complex64], z: Complex64, tol: f64) -> bool {
        set.iter().any(|w| (w - z).norm() < tol)
    }

    #[test]
    fn diagonal_matrix() {
        let m = ComplexMatrix::from_diag(&[c(3.0, 0.0), c(0.0, 2.0), c(-1.0, 0.0)]);
        let e = hessenberg_eigenvalues(&m, 1.0).unwrap();
        assert_eq!(e.len(), 3);
        for z in [c(3.0, 0.0), c(0.0, 2.0), c(-1.0, 0.0)] {
            assert!(contains(&e, z, 1e-14));
        }
    }

    #[test]
    fn rotation_matrix() {
        let m = ComplexMatrix::from_rows(&[vec![c(0.0, 0.0), c(-1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]]).unwrap();
        let e = hessenberg_eigenvalues(&m, 1.0).unwrap();
        assert!(contains(&e, c(0.0, 1.0), 1e-14));
        assert!(contains(&e, c(0.0, -1.0), 1e-14));
    }

    #[test]
    fn free_laplacian_eigenvector() {
        let n = 5;
        let m = ComplexMatrix::from_fn(n, n, |i, j| if i.abs_diff(j) == 1 { c(1.0, 0.0) } else { c(0.0, 0.0) })
            .with_band(1, 1)
            .unwrap();
        let target = 2.0 * (std::f64::consts::PI / 6.0).cos();
        let p = inverse_iteration(&m, c(target - 0.01, 0.0), 1e-12, 50).unwrap();
        assert!((p.value - c(target, 0.0)).norm() < 1e-12);
        let exact: Vec<f64> = (1..=n).map(|j| (std::f64::consts::PI * j as f64 / 6.0).sin()).collect();
        let en = exact.iter().map(|v| v * v).sum::<f64>().sqrt();
        let overlap: Complex64 = p.vector.iter().zip(&exact).map(|(a, b)| a * (b / en)).sum();
        assert!((overlap.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn diag_shift_picks_nearest() {
        let m = ComplexMatrix::from_diag(&[c(1.0, 0.0), c(5.0, 0.0)]);
        let p = inverse_iteration(&m, c(4.9, 0.0), 1e-13, 20).unwrap();
        assert!((p.value - c(5.0, 0.0)).norm() < 1e-13);
        assert!(p.vector[0].norm() < 1e-10 && (p.vector[1].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn exact_eigenvalue_shift_is_perturbed() {
        let m = ComplexMatrix::from_diag(&[c(1.0, 0.0), c(5.0, 0.0)]);
        let p = inverse_iteration(&m, c(5.0, 0.0), 1e-12, 20).unwrap();
        assert!(p.shift_perturbed);
        assert!((p.value - c(5.0, 0.0)).norm() < 1e-12);
    }
}
