use num_complex::Complex64;

use crate::ComplexMatrix;

const MAX_SWEEPS: usize = 80;

/// Singular values in descending order by one-sided (Hestenes) Jacobi
/// orthogonalization of the columns of `M` (or of `M^H` when `M` is wide).
pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    let a = if m.rows() >= m.cols() { m.clone() } else { m.adjoint() };
    let rows = a.rows();
    let ncols = a.cols();
    // column-major working copy
    let mut cols: Vec<Vec<Complex64>> = (0..ncols).map(|j| (0..rows).map(|i| a[(i, j)]).collect()).collect();
    let mut norms: Vec<f64> = cols.iter().map(|c| c.iter().map(|z| z.norm_sqr()).sum()).collect();
    let eps = f64::EPSILON;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..ncols {
            for j in i + 1..ncols {
                let (ci, cj) = split_pair(&mut cols, i, j);
                let g: Complex64 = ci.iter().zip(cj.iter()).map(|(x, y)| x.conj() * y).sum();
                let gn = g.norm();
                let (alpha, beta) = (norms[i], norms[j]);
                if gn <= eps * (alpha * beta).sqrt() || gn == 0.0 {
                    continue;
                }
                rotated = true;
                let e = g / gn;
                let zeta = (beta - alpha) / (2.0 * gn);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for (x, y) in ci.iter_mut().zip(cj.iter_mut()) {
                    let b = *y * e.conj();
                    let xi = *x * c - b * s;
                    let xj = *x * s + b * c;
                    *x = xi;
                    *y = xj * e;
                }
                norms[i] = ci.iter().map(|z| z.norm_sqr()).sum();
                norms[j] = cj.iter().map(|z| z.norm_sqr()).sum();
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = norms.iter().map(|v| v.sqrt()).collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    sv
}

/// Right singular pairs `(σ, v)` in descending order of `σ`; wide
/// matrices are padded with zero rows.
pub fn right_singular_pairs(m: &ComplexMatrix) -> Vec<(f64, Vec<Complex64>)> {
    let rows = m.rows().max(m.cols());
    let ncols = m.cols();
    let mut cols: Vec<Vec<Complex64>> =
        (0..ncols).map(|j| (0..rows).map(|i| if i < m.rows() { m[(i, j)] } else { Complex64::new(0.0, 0.0) }).collect()).collect();
    let mut v: Vec<Vec<Complex64>> = (0..ncols)
        .map(|j| (0..ncols).map(|i| if i == j { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) }).collect())
        .collect();
    let mut norms: Vec<f64> = cols.iter().map(|c| c.iter().map(|z| z.norm_sqr()).sum()).collect();
    let eps = f64::EPSILON;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..ncols {
            for j in i + 1..ncols {
                let (ci, cj) = split_pair(&mut cols, i, j);
                let g: Complex64 = ci.iter().zip(cj.iter()).map(|(x, y)| x.conj() * y).sum();
                let gn = g.norm();
                let (alpha, beta) = (norms[i], norms[j]);
                if gn <= eps * (alpha * beta).sqrt() || gn == 0.0 {
                    continue;
                }
                rotated = true;
                let e = g / gn;
                let zeta = (beta - alpha) / (2.0 * gn);
                let t = if zeta == 0.0 { 1.0 } else { zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt()) };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let rot = |x: &mut Vec<Complex64>, y: &mut Vec<Complex64>| {
                    for (a, b) in x.iter_mut().zip(y.iter_mut()) {
                        let be = *b * e.conj();
                        let ai = *a * c - be * s;
                        let aj = *a * s + be * c;
                        *a = ai;
                        *b = aj * e;
                    }
                };
                rot(ci, cj);
                let (vi, vj) = split_pair(&mut v, i, j);
                rot(vi, vj);
                norms[i] = ci.iter().map(|z| z.norm_sqr()).sum();
                norms[j] = cj.iter().map(|z| z.norm_sqr()).sum();
            }
        }
        if !rotated {
            break;
        }
    }
    let mut out: Vec<(f64, Vec<Complex64>)> = norms.iter().map(|n| n.sqrt()).zip(v).collect();
    out.sort_by(|a, b| b.0.total_cmp(&a.0));
    out
}

/// Orthonormal basis of `{v : Mv ≈ 0}`: right singular vectors with
/// `σ ≤ rel_tol · σ_max`.
pub fn null_space(m: &ComplexMatrix, rel_tol: f64) -> Vec<Vec<Complex64>> {
    let pairs = right_singular_pairs(m);
    let top = pairs.first().map_or(0.0, |p| p.0);
    pairs.into_iter().filter(|p| p.0 <= rel_tol * top).map(|p| p.1).collect()
}

fn split_pair(cols: &mut [Vec<Complex64>], i: usize, j: usize) -> (&mut Vec<Complex64>, &mut Vec<Complex64>) {
    debug_assert!(i < j);
    let (left, right) = cols.split_at_mut(j);
    (&mut left[i], &mut right[0])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_values_sorted_by_modulus() {
        let m = ComplexMatrix::from_diag(&[Complex64::new(3.0, 0.0), Complex64::new(-4.0, 0.0)]);
        let s = singular_values(&m);
        assert!((s[0] - 4.0).abs() < 1e-15 && (s[1] - 3.0).abs() < 1e-15);
    }

    #[test]
    fn wide_matrix_uses_adjoint() {
        let m = ComplexMatrix::from_rows(&[vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0), Complex64::new(1.0, 1.0)]]).unwrap();
        let s = singular_values(&m);
        assert_eq!(s.len(), 1);
        assert!((s[0] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn null_space_of_rank_deficient_matrix() {
        let c = |re: f64, im: f64| Complex64::new(re, im);
        // third column is the sum of the first two
        let m = ComplexMatrix::from_rows(&[
            vec![c(1.0, 0.0), c(0.0, 1.0), c(1.0, 1.0)],
            vec![c(2.0, -1.0), c(1.0, 0.0), c(3.0, -1.0)],
            vec![c(0.0, 0.5), c(-1.0, 2.0), c(-1.0, 2.5)],
            vec![c(1.0, 1.0), c(1.0, 1.0), c(2.0, 2.0)],
        ])
        .unwrap();
        let ns = null_space(&m, 1e-12);
        assert_eq!(ns.len(), 1);
        let r = m.mul_vec(&ns[0]);
        assert!(crate::norm2(&r) < 1e-13);
        assert!((crate::norm2(&ns[0]) - 1.0).abs() < 1e-13);
        let pairs = right_singular_pairs(&m);
        let sv = singular_values(&m);
        for (p, s) in pairs.iter().zip(&sv) {
            assert!((p.0 - s).abs() < 1e-12 * sv[0]);
        }
    }
}
