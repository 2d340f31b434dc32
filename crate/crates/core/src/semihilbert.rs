//! The semi-Hilbertian layer: a validated positive operator `A`, the
//! `A`-inner product and seminorm, `A`-adjoints, the `A`-Cartesian
//! decomposition, rank-one `A`-projections, and the compression of an
//! `A`-bounded operator to an ordinary operator on the range of `A`.
//!
//! In finite dimension the range of `A^{1/2}` coincides with the range of `A`,
//! so the induced operator is represented concretely in the coordinates
//! `y = Lambda^{1/2} U* x`, where `U` is an orthonormal basis of `R(A)` and
//! `Lambda` the corresponding eigenvalues. With those coordinates
//! `||x||_A = ||y||` and `<Tx, x>_A = <M y, y>` for the reduced matrix `M`.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{inner, vec_norm, ComplexMatrix, ZERO};
use crate::numerics::{hermitian_eig, range_columns, PSD_TOL};

/// Tolerances used when building an [`AContext`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContextOptions {
    /// Eigenvalues of `A` at or below `rank_tol * lambda_max` count as zero.
    pub rank_tol: f64,
    /// Relative residual accepted by the range-inclusion membership tests.
    pub residual_tol: f64,
}

impl Default for ContextOptions {
    fn default() -> Self {
        Self { rank_tol: 1e-10, residual_tol: 1e-8 }
    }
}

/// A validated non-zero positive semidefinite `A` with its derived artifacts.
#[derive(Debug, Clone)]
pub struct AContext {
    a: ComplexMatrix,
    sqrt_a: ComplexMatrix,
    sqrt_a_pinv: ComplexMatrix,
    a_pinv: ComplexMatrix,
    /// n x r orthonormal basis of R(A), largest eigenvalue first.
    u: ComplexMatrix,
    /// Eigenvalues of `A` on its range, matching the columns of `u`.
    range_eigenvalues: Vec<f64>,
    projector: ComplexMatrix,
    options: ContextOptions,
    a_norm_f: f64,
}

/// Conditioning summary of a context.
#[derive(Debug, Clone, Serialize)]
pub struct ContextDiagnostics {
    pub dim: usize,
    pub rank: usize,
    pub lambda_max: f64,
    pub lambda_min_nonzero: f64,
    pub condition_on_range: f64,
    pub sqrt_residual: f64,
    pub projector_residual: f64,
    pub rank_tol: f64,
    pub residual_tol: f64,
}

impl AContext {
    /// Validates `A` (Hermitian, PSD, non-zero) and derives `A^{1/2}`,
    /// `(A^{1/2})^+`, `A^+` and an orthonormal range basis.
    pub fn new(a: &ComplexMatrix, options: ContextOptions) -> Result<Self> {
        if !(options.rank_tol >= 0.0) || !(options.residual_tol >= 0.0) {
            return Err(Error::BadParameter("tolerances must be non-negative"));
        }
        let eig = hermitian_eig(a)?;
        let (min, max) = (eig.min(), eig.max());
        if min < -PSD_TOL * max.max(0.0) {
            return Err(Error::NotPsd { min, max });
        }
        if max <= 0.0 {
            return Err(Error::ZeroOperator);
        }
        let n = a.rows();
        let cols = range_columns(&eig, options.rank_tol);
        let cutoff = options.rank_tol * max;
        let range_eigenvalues: Vec<f64> =
            eig.eigenvalues.iter().rev().copied().filter(|&l| l > cutoff && l > 0.0).collect();
        let u = ComplexMatrix::from_columns(n, &cols);
        let spectral = |f: &dyn Fn(f64) -> f64| {
            ComplexMatrix::from_fn(n, n, |i, j| {
                let mut acc = ZERO;
                for (k, col) in cols.iter().enumerate() {
                    acc += col[i] * col[j].conj() * f(range_eigenvalues[k]);
                }
                acc
            })
        };
        let sqrt_a = spectral(&|l| l.sqrt());
        let sqrt_a_pinv = spectral(&|l| 1.0 / l.sqrt());
        let a_pinv = spectral(&|l| 1.0 / l);
        let projector = spectral(&|_| 1.0);
        Ok(Self {
            a: a.hermitian_part(),
            sqrt_a,
            sqrt_a_pinv,
            a_pinv,
            u,
            range_eigenvalues,
            projector,
            options,
            a_norm_f: a.frobenius_norm(),
        })
    }

    /// Context for the identity on `C^n` (the classical Hilbert-space case).
    pub fn identity(n: usize) -> Self {
        Self::new(&ComplexMatrix::identity(n), ContextOptions::default()).expect("identity is PSD")
    }

    pub fn dim(&self) -> usize {
        self.a.rows()
    }

    pub fn rank(&self) -> usize {
        self.range_eigenvalues.len()
    }

    pub fn a(&self) -> &ComplexMatrix {
        &self.a
    }

    pub fn sqrt_a(&self) -> &ComplexMatrix {
        &self.sqrt_a
    }

    pub fn sqrt_a_pinv(&self) -> &ComplexMatrix {
        &self.sqrt_a_pinv
    }

    pub fn a_pinv(&self) -> &ComplexMatrix {
        &self.a_pinv
    }

    pub fn range_basis(&self) -> &ComplexMatrix {
        &self.u
    }

    pub fn range_eigenvalues(&self) -> &[f64] {
        &self.range_eigenvalues
    }

    /// Orthogonal projector `U U*` onto `R(A)`.
    pub fn projector(&self) -> &ComplexMatrix {
        &self.projector
    }

    pub fn options(&self) -> ContextOptions {
        self.options
    }

    pub fn rank_tol(&self) -> f64 {
        self.options.rank_tol
    }

    pub fn residual_tol(&self) -> f64 {
        self.options.residual_tol
    }

    pub fn is_identity_like(&self) -> bool {
        (&self.a - &ComplexMatrix::identity(self.dim())).frobenius_norm() == 0.0
    }

    pub fn diagnostics(&self) -> ContextDiagnostics {
        let lambda_max = self.range_eigenvalues[0];
        let lambda_min_nonzero = *self.range_eigenvalues.last().expect("rank >= 1");
        let sqrt_residual = (&(&self.sqrt_a * &self.sqrt_a) - &self.a).frobenius_norm();
        let projector_residual = (&(&self.projector * &self.a) - &self.a).frobenius_norm();
        ContextDiagnostics {
            dim: self.dim(),
            rank: self.rank(),
            lambda_max,
            lambda_min_nonzero,
            condition_on_range: lambda_max / lambda_min_nonzero,
            sqrt_residual,
            projector_residual,
            rank_tol: self.options.rank_tol,
            residual_tol: self.options.residual_tol,
        }
    }

    fn check_vec(&self, x: &[Complex64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: x.len() });
        }
        Ok(())
    }

    fn check_op(&self, t: &ComplexMatrix) -> Result<()> {
        t.ensure_finite()?;
        if t.rows() != self.dim() || t.cols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: if t.rows() != self.dim() { t.rows() } else { t.cols() },
            });
        }
        Ok(())
    }

    /// `<x, y>_A = <A x, y>`.
    pub fn a_inner(&self, x: &[Complex64], y: &[Complex64]) -> Result<Complex64> {
        self.check_vec(x)?;
        self.check_vec(y)?;
        Ok(inner(&self.a.mul_vec(x), y))
    }

    /// `||x||_A = <A x, x>^{1/2}`; round-off negatives are clamped to zero.
    pub fn a_norm(&self, x: &[Complex64]) -> Result<f64> {
        Ok(self.a_inner(x, x)?.re.max(0.0).sqrt())
    }

    /// Relative residual `||(I - UU*) T* A||_F / (1 + ||T* A||_F)` of the
    /// range inclusion `R(T* A) ⊆ R(A)`.
    pub fn adjoint_residual(&self, t: &ComplexMatrix) -> Result<f64> {
        self.check_op(t)?;
        let ta = &t.adjoint() * &self.a;
        let off = &ta - &(&self.projector * &ta);
        Ok(off.frobenius_norm() / (1.0 + ta.frobenius_norm()))
    }

    /// Douglas criterion: `T` admits an `A`-adjoint iff `R(T* A) ⊆ R(A)`.
    pub fn admits_a_adjoint(&self, t: &ComplexMatrix) -> Result<bool> {
        Ok(self.adjoint_residual(t)? <= self.options.residual_tol)
    }

    /// The distinguished `A`-adjoint `T^# = A^+ T* A`, whose range lies in `R(A)`.
    pub fn a_adjoint(&self, t: &ComplexMatrix) -> Result<ComplexMatrix> {
        let res = self.adjoint_residual(t)?;
        if res > self.options.residual_tol {
            return Err(Error::NoAAdjoint(res));
        }
        Ok(&(&self.a_pinv * &t.adjoint()) * &self.a)
    }

    /// `A`-Cartesian decomposition `T = Re_A(T) + i Im_A(T)` with
    /// `Re_A(T) = (T + T^#)/2` and `Im_A(T) = (T - T^#)/(2i)`.
    pub fn cartesian(&self, t: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix)> {
        let sharp = self.a_adjoint(t)?;
        let re = (t + &sharp).scale_real(0.5);
        let im = (t - &sharp).scale(Complex64::new(0.0, -0.5));
        Ok((re, im))
    }

    /// Relative `A`-selfadjointness residual `||A T - T* A||_F / (1 + ||A||_F ||T||_F)`.
    pub fn selfadjoint_residual(&self, t: &ComplexMatrix) -> Result<f64> {
        self.check_op(t)?;
        let at = &self.a * t;
        let res = (&at - &at.adjoint()).frobenius_norm();
        Ok(res / (1.0 + self.a_norm_f * t.frobenius_norm()))
    }

    pub fn is_a_selfadjoint(&self, t: &ComplexMatrix) -> Result<bool> {
        Ok(self.selfadjoint_residual(t)? <= self.options.residual_tol)
    }

    /// The rank-one operator `z -> <z, x>_A x`, i.e. `x (A x)*`.
    pub fn rank_one_a(&self, x: &[Complex64]) -> Result<ComplexMatrix> {
        let norm = self.a_norm(x)?;
        let floor = (self.options.rank_tol * self.range_eigenvalues[0]).sqrt() * vec_norm(x);
        if !(norm > floor) || norm == 0.0 {
            return Err(Error::DegenerateVector);
        }
        let ax = self.a.mul_vec(x);
        let n = self.dim();
        Ok(ComplexMatrix::from_fn(n, n, |i, j| x[i] * ax[j].conj()))
    }

    /// Rescales `x` to `||x||_A = 1`.
    pub fn a_normalize(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        let norm = self.a_norm(x)?;
        let floor = (self.options.rank_tol * self.range_eigenvalues[0]).sqrt() * vec_norm(x);
        if !(norm > floor) || norm == 0.0 {
            return Err(Error::DegenerateVector);
        }
        Ok(x.iter().map(|z| z / norm).collect())
    }

    /// Relative residual `||A^{1/2} T (I - UU*)||_F / (1 + ||A^{1/2}||_F ||T||_F)`;
    /// zero exactly when `T` maps `N(A)` into `N(A)`.
    pub fn bounded_residual(&self, t: &ComplexMatrix) -> Result<f64> {
        self.check_op(t)?;
        let st = &self.sqrt_a * t;
        let off = &st - &(&st * &self.projector);
        Ok(off.frobenius_norm() / (1.0 + self.sqrt_a.frobenius_norm() * t.frobenius_norm()))
    }

    /// Compression of an `A`-bounded `T` to the r x r matrix
    /// `M = U* A^{1/2} T (A^{1/2})^+ U`, which satisfies
    /// `w_A(T) = w(M)`, `c_A(T) = c(M)` and `||T||_A = ||M||`.
    pub fn reduce(&self, t: &ComplexMatrix) -> Result<ComplexMatrix> {
        let res = self.bounded_residual(t)?;
        if res > self.options.residual_tol {
            return Err(Error::NotABounded(res));
        }
        Ok(self.reduce_unchecked(t))
    }

    pub(crate) fn reduce_unchecked(&self, t: &ComplexMatrix) -> ComplexMatrix {
        let r = self.rank();
        let ut = self.u.adjoint();
        let left: Vec<f64> = self.range_eigenvalues.iter().map(|l| l.sqrt()).collect();
        let core = &(&ut * t) * &self.u;
        ComplexMatrix::from_fn(r, r, |i, j| core.get(i, j) * (left[i] / left[j]))
    }

    /// Coordinates `Lambda^{1/2} U* x` of `A^{1/2} x` in the range basis.
    pub fn reduced_coordinates(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check_vec(x)?;
        let ut = self.u.adjoint();
        Ok(ut
            .mul_vec(x)
            .into_iter()
            .zip(&self.range_eigenvalues)
            .map(|(z, l)| z * l.sqrt())
            .collect())
    }

    /// Lifts reduced coordinates `y` to an ambient `x` with `||x||_A = ||y||`.
    pub fn lift(&self, y: &[Complex64]) -> Vec<Complex64> {
        let scaled: Vec<Complex64> =
            y.iter().zip(&self.range_eigenvalues).map(|(z, l)| z / l.sqrt()).collect();
        self.u.mul_vec(&scaled)
    }
}

/// `make_context` with explicit tolerances.
pub fn make_context(a: &ComplexMatrix, rank_tol: f64, residual_tol: f64) -> Result<AContext> {
    AContext::new(a, ContextOptions { rank_tol, residual_tol })
}

/// An operator on the semi-Hilbertian space together with its `A`-adjoint
/// (when it exists) and its reduced matrix, both computed eagerly.
#[derive(Debug, Clone)]
pub struct AOperator {
    pub t: ComplexMatrix,
    pub sharp: Option<ComplexMatrix>,
    pub reduced: ComplexMatrix,
}

impl AOperator {
    pub fn new(ctx: &AContext, t: ComplexMatrix) -> Result<Self> {
        let reduced = ctx.reduce(&t)?;
        let sharp = if ctx.admits_a_adjoint(&t)? { Some(ctx.a_adjoint(&t)?) } else { None };
        Ok(Self { t, sharp, reduced })
    }

    /// `A`-adjoint residual `||A T^# - T* A||_F` and range leakage
    /// `||(I - UU*) T^#||_F`.
    pub fn sharp_residuals(&self, ctx: &AContext) -> Option<(f64, f64)> {
        let sharp = self.sharp.as_ref()?;
        let eq = (&(ctx.a() * sharp) - &(&self.t.adjoint() * ctx.a())).frobenius_norm();
        let leak = (sharp - &(ctx.projector() * sharp)).frobenius_norm();
        Some((eq, leak))
    }
}
