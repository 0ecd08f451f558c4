use num_complex::Complex64;

use crate::{ComplexMatrix, NumError};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// LU factorization with partial pivoting in compact band storage.
///
/// Row `i` stores columns `[i - l, i + l + u]`; the extra `l` upper
/// diagonals hold pivoting fill-in.
#[derive(Clone, Debug)]
pub struct BandLu {
    n: usize,
    l: usize,
    u: usize,
    w: usize,
    ab: Vec<Complex64>,
    piv: Vec<usize>,
    min_pivot: f64,
}

impl BandLu {
    /// Factor `M - shift·I`. Pivots with modulus `<= threshold` are rejected.
    pub fn factor(m: &ComplexMatrix, shift: Complex64, threshold: f64) -> Result<Self, NumError> {
        if !m.is_square() {
            return Err(NumError::NotSquare { rows: m.rows(), cols: m.cols() });
        }
        let n = m.rows();
        let (l, u) = m.bandwidth();
        let w = 2 * l + u + 1;
        let mut lu = BandLu { n, l, u, w, ab: vec![ZERO; n * w], piv: vec![0; n], min_pivot: f64::INFINITY };
        for i in 0..n {
            let lo = i.saturating_sub(l);
            let hi = (i + u).min(n - 1);
            for j in lo..=hi {
                let mut v = m[(i, j)];
                if i == j {
                    v -= shift;
                }
                *lu.at_mut(i, j) = v;
            }
        }
        for k in 0..n {
            let last = (k + l).min(n - 1);
            let right = (k + l + u).min(n - 1);
            let mut p = k;
            let mut best = lu.at(k, k).norm();
            for r in k + 1..=last {
                let a = lu.at(r, k).norm();
                if a > best {
                    best = a;
                    p = r;
                }
            }
            if !(best > threshold) {
                return Err(NumError::SingularPivot { column: k, pivot: best });
            }
            lu.min_pivot = lu.min_pivot.min(best);
            lu.piv[k] = p;
            if p != k {
                for j in k..=right {
                    let a = lu.at(k, j);
                    let b = lu.at(p, j);
                    *lu.at_mut(k, j) = b;
                    *lu.at_mut(p, j) = a;
                }
            }
            let pivot = lu.at(k, k);
            for r in k + 1..=last {
                let f = lu.at(r, k) / pivot;
                *lu.at_mut(r, k) = f;
                if f == ZERO {
                    continue;
                }
                for j in k + 1..=right {
                    let t = lu.at(k, j);
                    *lu.at_mut(r, j) -= f * t;
                }
            }
        }
        Ok(lu)
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> Complex64 {
        self.ab[i * self.w + j + self.l - i]
    }

    #[inline]
    fn at_mut(&mut self, i: usize, j: usize) -> &mut Complex64 {
        &mut self.ab[i * self.w + j + self.l - i]
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Smallest pivot modulus encountered.
    pub fn min_pivot(&self) -> f64 {
        self.min_pivot
    }

    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(b.len(), self.n, "rhs length mismatch");
        let n = self.n;
        let mut x = b.to_vec();
        for k in 0..n {
            let p = self.piv[k];
            if p != k {
                x.swap(k, p);
            }
            let xk = x[k];
            if xk == ZERO {
                continue;
            }
            for r in k + 1..=(k + self.l).min(n - 1) {
                x[r] -= self.at(r, k) * xk;
            }
        }
        for k in (0..n).rev() {
            let mut s = x[k];
            for j in k + 1..=(k + self.l + self.u).min(n - 1) {
                s -= self.at(k, j) * x[j];
            }
            x[k] = s / self.at(k, k);
        }
        x
    }
}

/// Solve `M x = b` by banded LU with partial pivoting.
pub fn banded_solve(m: &ComplexMatrix, b: &[Complex64]) -> Result<Vec<Complex64>, NumError> {
    if b.len() != m.rows() {
        return Err(NumError::Dimension(format!("rhs {} vs {} rows", b.len(), m.rows())));
    }
    let threshold = f64::EPSILON * m.norm_inf() * 1e-3;
    let lu = BandLu::factor(m, ZERO, threshold)?;
    Ok(lu.solve(b))
}
