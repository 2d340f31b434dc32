//! Dense complex matrices stored row-major.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;

use crate::error::{Error, Result};

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// A dense `rows x cols` complex matrix with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major data, rejecting length mismatches and
    /// non-finite entries.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(Error::ShapeData { rows, cols, len: data.len() });
        }
        let m = Self { rows, cols, data };
        m.ensure_finite()?;
        Ok(m)
    }

    pub(crate) fn from_vec_unchecked(rows: usize, cols: usize, data: Vec<Complex64>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_vec_unchecked(rows, cols, vec![ZERO; rows * cols])
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self::from_vec_unchecked(rows, cols, data)
    }

    pub fn from_diag(diag: &[Complex64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { diag[i] } else { ZERO })
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { Complex64::new(diag[i], 0.0) } else { ZERO })
    }

    /// Real-valued matrix from nested rows; convenient in tests.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows[0].len();
        Self::from_fn(r, c, |i, j| Complex64::new(rows[i][j], 0.0))
    }

    pub fn from_rows(rows: &[&[Complex64]]) -> Self {
        let r = rows.len();
        let c = rows[0].len();
        Self::from_fn(r, c, |i, j| rows[i][j])
    }

    /// Matrix whose columns are the given vectors (all of length `rows`).
    pub fn from_columns(rows: usize, columns: &[Vec<Complex64>]) -> Self {
        Self::from_fn(rows, columns.len(), |i, j| columns[j][i])
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn ensure_finite(&self) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(Error::NonFinite)
        }
    }

    pub fn ensure_square(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::DimensionMismatch { expected: self.rows, found: self.cols })
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::from_vec_unchecked(self.rows, self.cols, self.data.iter().map(|z| z * s).collect())
    }

    pub fn scale_real(&self, s: f64) -> Self {
        Self::from_vec_unchecked(self.rows, self.cols, self.data.iter().map(|z| z * s).collect())
    }

    /// `(M + M*) / 2`.
    pub fn hermitian_part(&self) -> Self {
        let n = self.rows;
        Self::from_fn(n, n, |i, j| (self.get(i, j) + self.get(j, i).conj()) * 0.5)
    }

    /// `(M - M*) / (2i)`, so that `M = hermitian_part + i * skew_hermitian_part`.
    pub fn skew_hermitian_part(&self) -> Self {
        let n = self.rows;
        Self::from_fn(n, n, |i, j| (self.get(i, j) - self.get(j, i).conj()) * Complex64::new(0.0, -0.5))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    /// Frobenius norm of `M - M*`.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.rows;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += (self.get(i, j) - self.get(j, i).conj()).norm_sqr();
            }
        }
        acc.sqrt()
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, x.len(), "matrix-vector dimension mismatch");
        (0..self.rows)
            .map(|i| {
                let row = &self.data[i * self.cols..(i + 1) * self.cols];
                row.iter().zip(x).map(|(a, b)| a * b).sum()
            })
            .collect()
    }

    /// `sum_k c_k M_k` for equally shaped matrices.
    pub fn linear_combination(terms: &[(Complex64, &ComplexMatrix)]) -> Self {
        let (_, first) = terms[0];
        let mut out = Self::zeros(first.rows, first.cols);
        for (c, m) in terms {
            assert_eq!((m.rows, m.cols), (first.rows, first.cols), "shape mismatch");
            for (o, z) in out.data.iter_mut().zip(&m.data) {
                *o += c * z;
            }
        }
        out
    }

    pub(crate) fn to_nalgebra(&self) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|z| z.is_zero())
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in add");
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect();
        ComplexMatrix::from_vec_unchecked(self.rows, self.cols, data)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in sub");
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect();
        ComplexMatrix::from_vec_unchecked(self.rows, self.cols, data)
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.scale_real(-1.0)
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "shape mismatch in mul");
        let (n, m, p) = (self.rows, self.cols, rhs.cols);
        let mut out = vec![ZERO; n * p];
        for i in 0..n {
            for k in 0..m {
                let a = self.data[i * m + k];
                if a.is_zero() {
                    continue;
                }
                let row = &rhs.data[k * p..(k + 1) * p];
                let dst = &mut out[i * p..(i + 1) * p];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        ComplexMatrix::from_vec_unchecked(n, p, out)
    }
}

/// `<x, y> = sum_i x_i conj(y_i)`, linear in the first argument.
pub fn inner(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    x.iter().zip(y).map(|(a, b)| a * b.conj()).sum()
}

pub fn vec_norm(x: &[Complex64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn vec_scale(x: &[Complex64], s: Complex64) -> Vec<Complex64> {
    x.iter().map(|z| z * s).collect()
}

/// Quadratic form `<M x, x>`.
pub fn quadratic_form(m: &ComplexMatrix, x: &[Complex64]) -> Complex64 {
    inner(&m.mul_vec(x), x)
}

/// Rescales `x` to unit length; `None` for the zero vector.
pub fn normalized(x: &[Complex64]) -> Option<Vec<Complex64>> {
    let n = vec_norm(x);
    if n > 0.0 && n.is_finite() {
        Some(vec_scale(x, Complex64::new(1.0 / n, 0.0)))
    } else {
        None
    }
}

/// Multiplies `x` by a unit phase so its first non-negligible entry is real
/// and positive.
pub fn fix_phase(x: &mut [Complex64]) {
    let scale = x.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return;
    }
    if let Some(z) = x.iter().find(|z| z.norm() > 1e-8 * scale).copied() {
        let phase = z.conj() / z.norm();
        for v in x.iter_mut() {
            *v *= phase;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_shapes_and_nan() {
        assert!(ComplexMatrix::new(2, 2, vec![ONE; 3]).is_err());
        assert_eq!(
            ComplexMatrix::new(1, 2, vec![ONE, Complex64::new(f64::NAN, 0.0)]),
            Err(Error::NonFinite)
        );
        assert!(ComplexMatrix::new(1, 1, vec![ONE]).is_ok());
    }

    #[test]
    fn cartesian_parts_recombine() {
        let m = ComplexMatrix::from_fn(3, 3, |i, j| Complex64::new(i as f64 - 2.0 * j as f64, (i * j) as f64 + 0.5));
        let h = m.hermitian_part();
        let k = m.skew_hermitian_part();
        let back = &h + &k.scale(I);
        assert!((&back - &m).frobenius_norm() < 1e-14);
        assert!(h.hermitian_defect() < 1e-14 && k.hermitian_defect() < 1e-14);
    }

    #[test]
    fn product_matches_hand_computation() {
        let a = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let b = ComplexMatrix::from_rows(&[&[ONE, I], &[ZERO, ONE]]);
        let p = &a * &b;
        assert_eq!(p.get(0, 1), Complex64::new(2.0, 1.0));
        assert_eq!(p.get(1, 1), Complex64::new(4.0, 3.0));
    }
}
