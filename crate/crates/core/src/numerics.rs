//! Dense complex linear-algebra primitives: Hermitian eigendecomposition,
//! SVD, Moore-Penrose pseudoinverse, PSD square root and range bases.
//!
//! Eigendecompositions are delegated to `nalgebra`; this module adds the
//! validation, ordering and phase conventions the rest of the crate relies on.

use alloc::vec::Vec;

use nalgebra::SymmetricEigen;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::matrix::{fix_phase, inner, vec_norm, ComplexMatrix, ZERO};

/// Relative asymmetry allowed for inputs declared Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Relative negativity allowed for inputs declared positive semidefinite.
pub const PSD_TOL: f64 = 1e-10;

/// Default numerical-rank threshold (relative to the largest singular value).
pub fn default_rank_tol(n: usize) -> f64 {
    n as f64 * f64::EPSILON
}

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal columns, column `k` paired with `eigenvalues[k]`.
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEig {
    pub fn max(&self) -> f64 {
        *self.eigenvalues.last().expect("non-empty spectrum")
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// `V diag(f(lambda)) V*`.
    pub fn apply_spectral(&self, mut f: impl FnMut(f64) -> f64) -> ComplexMatrix {
        let n = self.eigenvectors.rows();
        let v = &self.eigenvectors;
        let weights: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        ComplexMatrix::from_fn(n, n, |i, j| {
            let mut acc = ZERO;
            for (k, &w) in weights.iter().enumerate() {
                if w != 0.0 {
                    acc += v.get(i, k) * v.get(j, k).conj() * w;
                }
            }
            acc
        })
    }
}

fn check_hermitian(m: &ComplexMatrix) -> Result<()> {
    m.ensure_finite()?;
    m.ensure_square()?;
    let defect = m.hermitian_defect();
    let scale = 1.0 + m.frobenius_norm();
    if defect > HERMITIAN_TOL * scale {
        return Err(Error::NotHermitian(defect / scale));
    }
    Ok(())
}

/// Eigen-decomposition of a Hermitian matrix with ascending eigenvalues.
///
/// The input is replaced by `(M + M*)/2` before solving. Each eigenvector is
/// phase-normalised so its first non-negligible component is real positive.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<HermitianEig> {
    check_hermitian(m)?;
    Ok(hermitian_eig_unchecked(&m.hermitian_part()))
}

/// As [`hermitian_eig`] but for inputs already known to be exactly Hermitian.
pub(crate) fn hermitian_eig_unchecked(h: &ComplexMatrix) -> HermitianEig {
    let n = h.rows();
    let eig = SymmetricEigen::new(h.to_nalgebra());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let columns: Vec<Vec<Complex64>> = order
        .iter()
        .map(|&k| {
            let mut col: Vec<Complex64> = eig.eigenvectors.column(k).iter().copied().collect();
            fix_phase(&mut col);
            col
        })
        .collect();
    HermitianEig { eigenvalues, eigenvectors: ComplexMatrix::from_columns(n, &columns) }
}

/// Ascending eigenvalues of an exactly Hermitian matrix, without vectors.
pub(crate) fn hermitian_eigenvalues(h: &ComplexMatrix) -> Vec<f64> {
    match h.rows() {
        1 => alloc::vec![h.get(0, 0).re],
        2 => {
            let a = h.get(0, 0).re;
            let d = h.get(1, 1).re;
            let b = h.get(0, 1);
            let mean = 0.5 * (a + d);
            let r = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
            alloc::vec![mean - r, mean + r]
        }
        _ => {
            let mut ev: Vec<f64> = h.to_nalgebra().symmetric_eigenvalues().iter().copied().collect();
            ev.sort_by(f64::total_cmp);
            ev
        }
    }
}

/// Singular value decomposition `M = U diag(s) V*` with descending `s`.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: ComplexMatrix,
    pub singular_values: Vec<f64>,
    pub v: ComplexMatrix,
}

fn augmented(m: &ComplexMatrix) -> ComplexMatrix {
    let (r, c) = (m.rows(), m.cols());
    ComplexMatrix::from_fn(r + c, r + c, |i, j| {
        if i < r && j >= r {
            m.get(i, j - r)
        } else if i >= r && j < r {
            m.get(j, i - r).conj()
        } else {
            ZERO
        }
    })
}

/// Orthonormalizes `x` against `basis` (two passes); `None` if little is left.
fn orthogonalize(x: &[Complex64], basis: &[Vec<Complex64>]) -> Option<Vec<Complex64>> {
    let before = vec_norm(x);
    let mut y = x.to_vec();
    for _ in 0..2 {
        for b in basis {
            let p = inner(&y, b);
            for (yi, bi) in y.iter_mut().zip(b) {
                *yi -= p * bi;
            }
        }
    }
    let after = vec_norm(&y);
    if before == 0.0 || after < 0.5 * before {
        return None;
    }
    Some(y.iter().map(|z| z / after).collect())
}

fn push_orthonormal(cols: &mut Vec<Vec<Complex64>>, candidate: &[Complex64], dim: usize) {
    if let Some(y) = orthogonalize(candidate, cols) {
        cols.push(y);
        return;
    }
    for k in 0..dim {
        let mut e = alloc::vec![ZERO; dim];
        e[k] = Complex64::new(1.0, 0.0);
        if let Some(y) = orthogonalize(&e, cols) {
            cols.push(y);
            return;
        }
    }
}

/// Thin SVD.
///
/// Computed from the Hermitian eigendecomposition of `[[0, M], [M*, 0]]`,
/// whose spectrum is `{+-s_k}` (plus zeros when `M` is not square).
/// Columns belonging to negligible singular values are completed to
/// orthonormal bases.
pub fn svd(m: &ComplexMatrix) -> Result<Svd> {
    m.ensure_finite()?;
    let (r, c) = (m.rows(), m.cols());
    let k = r.min(c);
    let eig = hermitian_eig_unchecked(&augmented(m));
    let p = r + c;
    let singular_values: Vec<f64> = (0..k).map(|i| eig.eigenvalues[p - 1 - i].max(0.0)).collect();
    let smax = singular_values.first().copied().unwrap_or(0.0);
    let negligible = 8.0 * p as f64 * f64::EPSILON * smax;
    let mut u_cols: Vec<Vec<Complex64>> = Vec::with_capacity(r);
    let mut v_cols: Vec<Vec<Complex64>> = Vec::with_capacity(c);
    for (i, &s) in singular_values.iter().enumerate() {
        let col = eig.eigenvectors.column(p - 1 - i);
        let (top, bottom) = col.split_at(r);
        if s > negligible {
            let (nu, nv) = (vec_norm(top), vec_norm(bottom));
            u_cols.push(top.iter().map(|z| z / nu).collect());
            v_cols.push(bottom.iter().map(|z| z / nv).collect());
        } else {
            push_orthonormal(&mut u_cols, top, r);
            push_orthonormal(&mut v_cols, bottom, c);
        }
    }
    Ok(Svd {
        u: ComplexMatrix::from_columns(r, &u_cols),
        singular_values,
        v: ComplexMatrix::from_columns(c, &v_cols),
    })
}

/// Largest singular value.
pub fn spectral_norm(m: &ComplexMatrix) -> Result<f64> {
    m.ensure_finite()?;
    Ok(spectral_norm_unchecked(m))
}

pub(crate) fn spectral_norm_unchecked(m: &ComplexMatrix) -> f64 {
    if m.is_zero() {
        return 0.0;
    }
    hermitian_eigenvalues(&augmented(m)).last().copied().unwrap_or(0.0).max(0.0)
}

/// Moore-Penrose pseudoinverse; singular values at or below
/// `rank_tol * sigma_max` are treated as zero.
pub fn pinv(m: &ComplexMatrix, rank_tol: f64) -> Result<ComplexMatrix> {
    if !(rank_tol >= 0.0) {
        return Err(Error::BadParameter("rank_tol must be non-negative"));
    }
    let Svd { u, singular_values, v } = svd(m)?;
    let smax = singular_values.first().copied().unwrap_or(0.0);
    let cutoff = rank_tol * smax;
    let (rows, cols) = (m.cols(), m.rows());
    Ok(ComplexMatrix::from_fn(rows, cols, |i, j| {
        let mut acc = ZERO;
        for (k, &s) in singular_values.iter().enumerate() {
            if s > cutoff && s > 0.0 {
                acc += v.get(i, k) * u.get(j, k).conj() / s;
            }
        }
        acc
    }))
}

fn check_psd(eig: &HermitianEig) -> Result<()> {
    let (min, max) = (eig.min(), eig.max());
    if min < -PSD_TOL * max.max(0.0) {
        return Err(Error::NotPsd { min, max });
    }
    Ok(())
}

/// Eigendecomposition of a PSD matrix, rejecting inputs whose most negative
/// eigenvalue falls below `-1e-10 * lambda_max`.
pub fn psd_eig(a: &ComplexMatrix) -> Result<HermitianEig> {
    let eig = hermitian_eig(a)?;
    check_psd(&eig)?;
    Ok(eig)
}

/// Hermitian PSD square root; round-off negative eigenvalues are clamped to 0.
pub fn psd_sqrt(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = psd_eig(a)?;
    Ok(eig.apply_spectral(|l| l.max(0.0).sqrt()))
}

/// Orthonormal basis `U` (n x r) of the range of a PSD matrix, with `r` the
/// number of eigenvalues above `rank_tol * lambda_max`.
pub fn range_basis(a: &ComplexMatrix, rank_tol: f64) -> Result<(ComplexMatrix, usize)> {
    let eig = psd_eig(a)?;
    let cols = range_columns(&eig, rank_tol);
    let r = cols.len();
    Ok((ComplexMatrix::from_columns(a.rows(), &cols), r))
}

/// Eigenvectors spanning the numerical range, largest eigenvalue first.
pub(crate) fn range_columns(eig: &HermitianEig, rank_tol: f64) -> Vec<Vec<Complex64>> {
    let cutoff = rank_tol * eig.max();
    let n = eig.eigenvalues.len();
    (0..n)
        .rev()
        .filter(|&k| eig.eigenvalues[k] > cutoff && eig.eigenvalues[k] > 0.0)
        .map(|k| eig.eigenvectors.column(k))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{I, ONE};

    fn close(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> bool {
        (a - b).frobenius_norm() <= tol
    }

    #[test]
    fn diagonal_spectrum_is_sorted() {
        let e = hermitian_eig(&ComplexMatrix::from_real_diag(&[3.0, -1.0])).unwrap();
        assert_eq!(e.eigenvalues, alloc::vec![-1.0, 3.0]);
    }

    #[test]
    fn pauli_x_spectrum() {
        let x = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let e = hermitian_eig(&x).unwrap();
        assert!((e.eigenvalues[0] + 1.0).abs() < 1e-14);
        assert!((e.eigenvalues[1] - 1.0).abs() < 1e-14);
        let fast = hermitian_eigenvalues(&x);
        assert!((fast[0] + 1.0).abs() < 1e-15 && (fast[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_matrix_spectrum() {
        let e = hermitian_eig(&ComplexMatrix::zeros(3, 3)).unwrap();
        assert!(e.eigenvalues.iter().all(|&l| l == 0.0));
    }

    #[test]
    fn rejects_non_hermitian_and_nan() {
        let m = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(hermitian_eig(&m), Err(Error::NotHermitian(_))));
        let mut bad = ComplexMatrix::identity(2);
        bad.set(0, 0, Complex64::new(f64::INFINITY, 0.0));
        assert_eq!(hermitian_eig(&bad).unwrap_err(), Error::NonFinite);
    }

    #[test]
    fn eigvectors_reconstruct() {
        let m = ComplexMatrix::from_rows(&[
            &[ONE * 2.0, I, ZERO],
            &[-I, ONE * 3.0, ONE],
            &[ZERO, ONE, -ONE],
        ]);
        let e = hermitian_eig(&m).unwrap();
        let v = &e.eigenvectors;
        let mv = &m * v;
        let vl = v * &ComplexMatrix::from_real_diag(&e.eigenvalues);
        assert!(close(&mv, &vl, 1e-10 * (1.0 + m.frobenius_norm())));
        assert!(close(&(&v.adjoint() * v), &ComplexMatrix::identity(3), 1e-10));
    }

    #[test]
    fn pinv_examples() {
        let id = ComplexMatrix::identity(2);
        assert!(close(&pinv(&id, 1e-12).unwrap(), &id, 1e-14));
        let d = ComplexMatrix::from_real_diag(&[2.0, 0.0]);
        assert!(close(&pinv(&d, 1e-12).unwrap(), &ComplexMatrix::from_real_diag(&[0.5, 0.0]), 1e-14));
        let j = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let jp = pinv(&j, 1e-12).unwrap();
        assert!(close(&jp, &ComplexMatrix::from_real_rows(&[&[0.0, 0.0], &[1.0, 0.0]]), 1e-14));
    }

    #[test]
    fn psd_sqrt_examples() {
        let s = psd_sqrt(&ComplexMatrix::from_real_diag(&[4.0, 9.0])).unwrap();
        assert!(close(&s, &ComplexMatrix::from_real_diag(&[2.0, 3.0]), 1e-14));
        let a = ComplexMatrix::from_real_rows(&[&[2.0, 1.0], &[1.0, 2.0]]);
        let s = psd_sqrt(&a).unwrap();
        assert!(close(&(&s * &s), &a, 1e-12));
        let neg = ComplexMatrix::from_real_diag(&[1.0, -0.5]);
        assert!(matches!(psd_sqrt(&neg), Err(Error::NotPsd { .. })));
    }

    #[test]
    fn range_basis_of_projector() {
        let (u, r) = range_basis(&ComplexMatrix::from_real_diag(&[1.0, 0.0]), 1e-12).unwrap();
        assert_eq!(r, 1);
        assert!((u.get(0, 0) - ONE).norm() < 1e-14 && u.get(1, 0).norm() < 1e-14);
        let (_, r3) = range_basis(&ComplexMatrix::identity(3), 1e-12).unwrap();
        assert_eq!(r3, 3);
    }
}
