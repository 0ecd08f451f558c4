use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::NumError;

/// Row-major complex matrix with an optional (lower, upper) bandwidth hint.
///
/// When a hint is present every entry outside the band is exactly zero;
/// [`ComplexMatrix::set_band`] checks this and mutation through `IndexMut`
/// is the caller's responsibility.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
    band: Option<(usize, usize)>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows >= 1 && cols >= 1, "matrix dimensions must be positive");
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
            band: None,
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m.band = Some((0, 0));
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.data[i * cols + j] = f(i, j);
            }
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self, NumError> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if r == 0 || c == 0 || rows.iter().any(|row| row.len() != c) {
            return Err(NumError::Dimension("ragged or empty row list".into()));
        }
        Ok(Self::from_fn(r, c, |i, j| rows[i][j]))
    }

    pub fn from_diag(d: &[Complex64]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, &z) in d.iter().enumerate() {
            m[(i, i)] = z;
        }
        m.band = Some((0, 0));
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn band(&self) -> Option<(usize, usize)> {
        self.band
    }

    /// Declare a bandwidth; fails if a nonzero entry lies outside it.
    pub fn set_band(&mut self, lower: usize, upper: usize) -> Result<(), NumError> {
        for i in 0..self.rows {
            for j in 0..self.cols {
                let outside = i > j + lower || j > i + upper;
                if outside && self.data[i * self.cols + j] != Complex64::new(0.0, 0.0) {
                    return Err(NumError::BandViolation { row: i, col: j });
                }
            }
        }
        self.band = Some((lower, upper));
        Ok(())
    }

    pub fn with_band(mut self, lower: usize, upper: usize) -> Result<Self, NumError> {
        self.set_band(lower, upper)?;
        Ok(self)
    }

    pub fn clear_band(&mut self) {
        self.band = None;
    }

    /// Effective (lower, upper) bandwidth: the hint, or full otherwise.
    pub fn bandwidth(&self) -> (usize, usize) {
        self.band
            .unwrap_or((self.rows.saturating_sub(1), self.cols.saturating_sub(1)))
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub(crate) fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)]);
        t.band = self.band.map(|(l, u)| (u, l));
        t
    }

    pub fn adjoint(&self) -> Self {
        let mut t = Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj());
        t.band = self.band.map(|(l, u)| (u, l));
        t
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut m = self.clone();
        m.data.iter_mut().for_each(|z| *z *= s);
        m
    }

    pub fn add(&self, other: &Self) -> Result<Self, NumError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(NumError::Dimension("add".into()));
        }
        let mut m = self.clone();
        m.band = match (self.band, other.band) {
            (Some((a, b)), Some((c, d))) => Some((a.max(c), b.max(d))),
            _ => None,
        };
        m.data
            .iter_mut()
            .zip(&other.data)
            .for_each(|(x, y)| *x += y);
        Ok(m)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, NumError> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn matmul(&self, other: &Self) -> Result<Self, NumError> {
        if self.cols != other.rows {
            return Err(NumError::Dimension(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let orow = other.row(k);
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, b) in dst.iter_mut().zip(orow) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.cols, "vector length mismatch");
        let (l, u) = self.bandwidth();
        (0..self.rows)
            .map(|i| {
                let lo = i.saturating_sub(l);
                let hi = (i + u + 1).min(self.cols);
                let row = self.row(i);
                (lo..hi).map(|j| row[j] * x[j]).sum()
            })
            .collect()
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn norm_fro(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Copy of the square block `[start, start+len)` on both axes.
    pub fn principal_block(&self, start: usize, len: usize) -> Self {
        let mut m = Self::from_fn(len, len, |i, j| self[(start + i, start + j)]);
        m.band = self.band;
        m
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}
