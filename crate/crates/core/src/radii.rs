//! Optimization engines for the sup/inf quantities: numerical radius,
//! Crawford number, operator norm, and the Euclidean operator radius and
//! seminorm of pairs, plus `A`-weighted wrappers that go through
//! [`AContext::reduce`].
//!
//! The numerical radius uses the support function of the numerical range,
//! `h(theta) = lambda_max(Re(e^{i theta} M))`, so that `w(M) = max h`. A
//! uniform angle grid is refined by golden-section search, then certified:
//! the supporting lines at every evaluated angle bound a polygon containing
//! `W(M)`, and the largest modulus over that polygon is an upper bound for
//! `w(M)`. Intervals whose bound is loosest are split until the gap between
//! that bound and the best attained `|<Mx, x>|` drops below the target.

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::f64::consts::{FRAC_PI_2, TAU};

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{quadratic_form, ComplexMatrix, ZERO};
use crate::numerics::{hermitian_eig_unchecked, hermitian_eigenvalues, svd, HermitianEig};
use crate::semihilbert::AContext;

/// Which side of the true value a computed quantity can lie on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ErrorDirection {
    /// Attained at a witness, so never above the supremum.
    LowerEstimate,
    /// Closed form up to floating-point round-off.
    Exact,
    UpperEstimate,
}

/// A computed supremum or infimum with the point that attains it.
#[derive(Debug, Clone, Serialize)]
pub struct RadiusResult {
    pub value: f64,
    /// Unit vector in the (reduced) space at which `value` is attained.
    pub witness_vector: Vec<Complex64>,
    /// Rotation angle `theta` of the maximizing direction.
    pub witness_angle: f64,
    /// `(t, phi)` of the maximizing combination `cos t M1 + e^{i phi} sin t M2`
    /// for pair quantities.
    pub pair_angles: Option<(f64, f64)>,
    pub error_direction: ErrorDirection,
    /// Bound on how far `value` can lie below the true supremum. For the
    /// numerical radius this is certified by the circumscribed polygon; for
    /// pair radii it certifies local stationarity of the ascent.
    pub certified_gap: f64,
    pub evaluations: usize,
}

impl RadiusResult {
    fn exact(value: f64, witness_vector: Vec<Complex64>) -> Self {
        Self {
            value,
            witness_vector,
            witness_angle: 0.0,
            pair_angles: None,
            error_direction: ErrorDirection::Exact,
            certified_gap: 0.0,
            evaluations: 1,
        }
    }
}

/// Grid and stopping parameters of the optimizers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadiiConfig {
    /// Uniform angles on `[0, 2 pi)` for the single-operator searches.
    pub theta_grid: usize,
    /// Width at which golden-section refinement stops.
    pub golden_tol: f64,
    /// Relative gap at which polygon certification stops.
    pub target_rel_gap: f64,
    /// Maximum number of extra support evaluations spent on certification.
    pub max_cuts: usize,
    /// Coarse grid for pair radii: `t` on `[0, pi/2]`.
    pub pair_t_grid: usize,
    /// Coarse grid for pair radii: `phi` on `[0, 2 pi)`.
    pub pair_phi_grid: usize,
    /// Coarse grid for pair radii: `theta` on `[0, 2 pi)`.
    pub pair_theta_grid: usize,
    /// Number of best coarse cells used as ascent starts.
    pub pair_starts: usize,
    pub pair_max_iter: usize,
    /// Relative improvement below which the ascent stops.
    pub pair_rel_tol: f64,
    /// Cell budget of the pair branch and bound.
    pub pair_max_nodes: usize,
}

impl Default for RadiiConfig {
    fn default() -> Self {
        Self {
            theta_grid: 512,
            golden_tol: 1e-12,
            target_rel_gap: 1e-9,
            max_cuts: 2048,
            pair_t_grid: 9,
            pair_phi_grid: 16,
            pair_theta_grid: 16,
            pair_starts: 6,
            pair_max_iter: 20_000,
            pair_rel_tol: 1e-15,
            pair_max_nodes: 200_000,
        }
    }
}

/// Hermitian and skew-Hermitian parts, so that
/// `Re(e^{i theta} M) = cos(theta) H - sin(theta) K`.
struct Rotator {
    h: ComplexMatrix,
    k: ComplexMatrix,
}

impl Rotator {
    fn new(m: &ComplexMatrix) -> Self {
        Self { h: m.hermitian_part(), k: m.skew_hermitian_part() }
    }

    fn at(&self, theta: f64) -> ComplexMatrix {
        let (s, c) = theta.sin_cos();
        ComplexMatrix::linear_combination(&[
            (Complex64::new(c, 0.0), &self.h),
            (Complex64::new(-s, 0.0), &self.k),
        ])
    }
}

fn check_square(m: &ComplexMatrix) -> Result<usize> {
    m.ensure_finite()?;
    m.ensure_square()
}

/// Maximizes `f` on `[a, b]` by golden-section search and returns the best
/// evaluated point (including the endpoints) and the number of evaluations.
pub fn golden_section_max(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, tol: f64) -> (f64, f64, usize) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (a, b);
    let mut best = (a, f(a));
    let fb = f(b);
    if fb > best.1 {
        best = (b, fb);
    }
    let mut evals = 2;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    evals += 2;
    while hi - lo > tol && evals < 400 {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
        evals += 1;
    }
    for (x, fx) in [(x1, f1), (x2, f2)] {
        if fx > best.1 {
            best = (x, fx);
        }
    }
    (best.0, best.1, evals)
}

/// One arc `[theta_a, theta_b]` between two evaluated support angles.
#[derive(Debug, Clone, Copy)]
struct Arc {
    a: f64,
    b: f64,
    ha: f64,
    hb: f64,
    bound: f64,
    split_at: Option<f64>,
}

impl Arc {
    /// Largest `max_{phi in [a,b]} Re(e^{i phi} v)` over the wedge vertex
    /// `v` cut out by the two supporting lines, plus a round-off allowance
    /// `delta` for the support values.
    fn new(a: f64, b: f64, ha: f64, hb: f64, delta: f64) -> Self {
        let d = b - a;
        let (sd, cd) = d.sin_cos();
        let s = (ha * cd - hb) / sd;
        let v = Complex64::from_polar(1.0, -a) * Complex64::new(ha, s);
        let peak = wrap_angle(-v.arg());
        let inside = if peak >= a { peak <= b } else { peak + TAU <= b };
        let slack = delta * (1.0 + 2.0 / sd);
        if inside {
            let at = if peak >= a { peak } else { peak + TAU };
            Arc { a, b, ha, hb, bound: v.norm() + slack, split_at: Some(at) }
        } else {
            Arc { a, b, ha, hb, bound: ha.max(hb) + slack, split_at: None }
        }
    }
}

impl PartialEq for Arc {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Arc {}
impl PartialOrd for Arc {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Arc {
    fn cmp(&self, other: &Self) -> Ordering {
        self.bound.total_cmp(&other.bound).then_with(|| other.a.total_cmp(&self.a))
    }
}

fn wrap_angle(t: f64) -> f64 {
    let r = t % TAU;
    if r < 0.0 {
        r + TAU
    } else {
        r
    }
}

fn top_pair(eig: &HermitianEig) -> (f64, Vec<Complex64>) {
    let n = eig.eigenvalues.len();
    (eig.max(), eig.eigenvectors.column(n - 1))
}

/// Numerical radius `w(M) = sup_{||x|| = 1} |<Mx, x>|` with default settings.
pub fn numerical_radius(m: &ComplexMatrix) -> Result<RadiusResult> {
    numerical_radius_with(m, &RadiiConfig::default())
}

pub fn numerical_radius_with(m: &ComplexMatrix, cfg: &RadiiConfig) -> Result<RadiusResult> {
    let n = check_square(m)?;
    if m.is_zero() {
        let mut e = vec![ZERO; n];
        e[0] = Complex64::new(1.0, 0.0);
        return Ok(RadiusResult::exact(0.0, e));
    }
    let rot = Rotator::new(m);
    let support = |theta: f64| *hermitian_eigenvalues(&rot.at(theta)).last().expect("n >= 1");
    let grid = cfg.theta_grid.max(8);
    let step = TAU / grid as f64;
    let h: Vec<f64> = (0..grid).map(|k| support(k as f64 * step)).collect();
    let mut evals = grid;

    let k_best = (0..grid).fold(0, |best, k| if h[k] > h[best] { k } else { best });
    let centre = k_best as f64 * step;
    let (theta_star, _, ge) = golden_section_max(support, centre - step, centre + step, cfg.golden_tol);
    evals += ge;

    // Witness at the refined angle; its |<Mx,x>| is the reported lower estimate.
    let mut best_theta = wrap_angle(theta_star);
    let (_, mut best_x) = top_pair(&hermitian_eig_unchecked(&rot.at(best_theta)));
    let mut lower = quadratic_form(m, &best_x).norm();
    evals += 1;

    let delta = 4.0 * n as f64 * f64::EPSILON * m.frobenius_norm();
    let mut heap = BinaryHeap::with_capacity(grid + 8);
    for k in 0..grid {
        let a = k as f64 * step;
        heap.push(Arc::new(a, a + step, h[k], h[(k + 1) % grid], delta));
    }

    let min_width = 1e-9;
    let mut frozen_bound = f64::NEG_INFINITY;
    let mut cuts = 0;
    while let Some(arc) = heap.peek().copied() {
        let upper = arc.bound.max(frozen_bound);
        if upper - lower <= cfg.target_rel_gap * lower.max(f64::MIN_POSITIVE) || cuts >= cfg.max_cuts {
            break;
        }
        heap.pop();
        let at = match arc.split_at {
            Some(at) if arc.b - arc.a > min_width && at - arc.a > min_width / 4.0 && arc.b - at > min_width / 4.0 => at,
            _ => {
                // Too narrow to split further; its bound stands.
                frozen_bound = frozen_bound.max(arc.bound);
                continue;
            }
        };
        let eig = hermitian_eig_unchecked(&rot.at(at));
        let (h_at, x) = top_pair(&eig);
        let z = quadratic_form(m, &x).norm();
        if z > lower {
            lower = z;
            best_x = x;
            best_theta = wrap_angle(at);
        }
        heap.push(Arc::new(arc.a, at, arc.ha, h_at, delta));
        heap.push(Arc::new(at, arc.b, h_at, arc.hb, delta));
        cuts += 1;
        evals += 1;
    }
    let upper = heap.peek().map_or(f64::NEG_INFINITY, |a| a.bound).max(frozen_bound);
    let gap = (upper - lower).max(0.0);
    Ok(RadiusResult {
        value: lower,
        witness_vector: best_x,
        witness_angle: best_theta,
        pair_angles: None,
        error_direction: ErrorDirection::LowerEstimate,
        certified_gap: gap,
        evaluations: evals,
    })
}

/// Crawford number `c(M) = inf_{||x|| = 1} |<Mx, x>|`, the distance from the
/// origin to the numerical range: `max(0, max_theta lambda_min(Re(e^{i theta} M)))`.
pub fn crawford(m: &ComplexMatrix) -> Result<RadiusResult> {
    crawford_with(m, &RadiiConfig::default())
}

pub fn crawford_with(m: &ComplexMatrix, cfg: &RadiiConfig) -> Result<RadiusResult> {
    let n = check_square(m)?;
    let rot = Rotator::new(m);
    let lower_support = |theta: f64| hermitian_eigenvalues(&rot.at(theta))[0];
    let grid = cfg.theta_grid.max(8);
    let step = TAU / grid as f64;
    let g: Vec<f64> = (0..grid).map(|k| lower_support(k as f64 * step)).collect();
    let k_best = (0..grid).fold(0, |best, k| if g[k] > g[best] { k } else { best });
    let centre = k_best as f64 * step;
    let (theta_star, g_star, ge) =
        golden_section_max(lower_support, centre - step, centre + step, cfg.golden_tol);
    let theta_star = wrap_angle(theta_star);
    let eig = hermitian_eig_unchecked(&rot.at(theta_star));
    let x = eig.eigenvectors.column(0);
    let z_norm = quadratic_form(m, &x).norm();

    // Upper bounds: any point of W(M) bounds the distance, and g is Lipschitz
    // with constant ||M|| <= ||M||_F between grid angles.
    let lipschitz = m.frobenius_norm();
    let grid_max = g[k_best].max(g_star);
    let lip_bound = (grid_max + lipschitz * step / 2.0).max(0.0);
    let upper = z_norm.min(lip_bound);
    let value = g_star.max(0.0);
    let delta = 4.0 * n as f64 * f64::EPSILON * lipschitz;
    let certified_gap = if lip_bound == 0.0 { 0.0 } else { (upper - value).max(0.0) + delta };
    Ok(RadiusResult {
        value,
        witness_vector: x,
        witness_angle: theta_star,
        pair_angles: None,
        error_direction: ErrorDirection::LowerEstimate,
        certified_gap,
        evaluations: grid + ge + 1,
    })
}

/// Operator norm (largest singular value).
pub fn op_norm(m: &ComplexMatrix) -> Result<RadiusResult> {
    let dec = svd(m)?;
    Ok(RadiusResult::exact(dec.singular_values[0], dec.v.column(0)))
}

/// Four Hermitian matrices `(H1, K1, H2, K2)` with
/// `<M1 x, x> = <H1 x, x> + i <K1 x, x>` and likewise for `M2`.
struct PairForms {
    f: [ComplexMatrix; 4],
}

impl PairForms {
    fn new(m1: &ComplexMatrix, m2: &ComplexMatrix) -> Self {
        Self { f: [m1.hermitian_part(), m1.skew_hermitian_part(), m2.hermitian_part(), m2.skew_hermitian_part()] }
    }

    fn combine(&self, u: &[f64; 4]) -> ComplexMatrix {
        ComplexMatrix::linear_combination(&[
            (Complex64::new(u[0], 0.0), &self.f[0]),
            (Complex64::new(u[1], 0.0), &self.f[1]),
            (Complex64::new(u[2], 0.0), &self.f[2]),
            (Complex64::new(u[3], 0.0), &self.f[3]),
        ])
    }

    fn forms(&self, x: &[Complex64]) -> [f64; 4] {
        let mut v = [0.0; 4];
        for (vi, fi) in v.iter_mut().zip(&self.f) {
            *vi = quadratic_form(fi, x).re;
        }
        v
    }
}

/// `u` for `Re(e^{i theta}(cos t M1 + e^{i phi} sin t M2))`.
fn pair_direction(t: f64, phi: f64, theta: f64) -> [f64; 4] {
    let (st, ct) = t.sin_cos();
    let (s1, c1) = theta.sin_cos();
    let (s2, c2) = (theta + phi).sin_cos();
    [ct * c1, -ct * s1, st * c2, -st * s2]
}

fn decode_direction(u: &[f64; 4]) -> (f64, f64, f64) {
    let r1 = (u[0] * u[0] + u[1] * u[1]).sqrt();
    let r2 = (u[2] * u[2] + u[3] * u[3]).sqrt();
    let t = r2.atan2(r1);
    let theta = if r1 > 0.0 { (-u[1]).atan2(u[0]) } else { 0.0 };
    let psi = if r2 > 0.0 { (-u[3]).atan2(u[2]) } else { theta };
    (t, wrap_angle(psi - theta), wrap_angle(theta))
}

fn norm4(v: &[f64; 4]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Monotone fixed-point ascent `u <- v(x) / ||v(x)||` from `u`, where `x` is
/// the top eigenvector for direction `u` and `v(x)` collects the four real
/// quadratic forms. Returns `(||v||, x, u, evaluations)`.
fn pair_ascent(forms: &PairForms, mut u: [f64; 4], max_iter: usize, rel_tol: f64) -> (f64, Vec<Complex64>, [f64; 4], usize) {
    let mut value = f64::NEG_INFINITY;
    let mut x = Vec::new();
    let mut evals = 0;
    for _ in 0..max_iter.max(1) {
        let eig = hermitian_eig_unchecked(&forms.combine(&u));
        evals += 1;
        let (_, xv) = top_pair(&eig);
        let v = forms.forms(&xv);
        let nv = norm4(&v);
        if nv <= value * (1.0 + rel_tol) {
            break;
        }
        value = nv;
        x = xv;
        if nv == 0.0 {
            break;
        }
        u = [v[0] / nv, v[1] / nv, v[2] / nv, v[3] / nv];
    }
    (value, x, u, evals)
}

/// Cell of a cube-sphere partition: a cube `corner + [0, size]^k` on one
/// facet of `[-1, 1]^(k+1)`, projected to the unit sphere. `k = 3` covers the
/// sphere of `R^4`; `k = 2` covers the slice `{(a, 0, b, c)}`.
struct Cell {
    key: f64,
    face: u8,
    corner: [f64; 3],
    size: f64,
    h_upper: f64,
    rho: f64,
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        self.key.total_cmp(&other.key).is_eq()
    }
}

impl Eq for Cell {}

impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Cell {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key.total_cmp(&other.key)
    }
}

fn face_point(k: usize, face: u8, q: [f64; 3]) -> [f64; 4] {
    let axis = (face / 2) as usize;
    let mut p = [0.0; 4];
    p[axis] = if face % 2 == 0 { 1.0 } else { -1.0 };
    let mut j = 0;
    for (i, pi) in p.iter_mut().enumerate().take(k + 1) {
        if i != axis {
            *pi = q[j];
            j += 1;
        }
    }
    let r = norm4(&p);
    if k == 2 {
        [p[0] / r, 0.0, p[1] / r, p[2] / r]
    } else {
        [p[0] / r, p[1] / r, p[2] / r, p[3] / r]
    }
}

fn sphere_angle(p: &[f64; 4], q: &[f64; 4]) -> f64 {
    let d: f64 = p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    2.0 * (0.5 * d).min(1.0).asin()
}

/// Offsets of the `2^k` sub-cubes (or corners) of a `k`-cube of side `s`.
fn octants(k: usize, s: f64) -> impl Iterator<Item = [f64; 3]> {
    (0..1usize << k).map(move |i| [s * (i & 1) as f64, s * ((i >> 1) & 1) as f64, s * ((i >> 2) & 1) as f64])
}

/// Looks for a Hermitian `D` with `[D, M1] = M1` and `[D, M2] = s M2`,
/// `s = +-1`. Then `e^{-i phi D} M_k e^{i phi D}` rotates `M1` by `-phi` and
/// `M2` by `-s phi`, the joint numerical range is invariant under these
/// rotations, and every direction can be rotated into the slice `u_2 = 0`.
/// For an approximate solution with residuals `E_k`, the conjugated operators
/// stay within `|phi| ||E_k||` of the rotated ones; the returned
/// `pi (||E_1||^2 + ||E_2||^2)^{1/2}` bounds what the slice can miss.
fn circular_grading(m1: &ComplexMatrix, m2: &ComplexMatrix) -> Option<f64> {
    [1.0, -1.0].into_iter().find_map(|s| grading_with_sign(m1, m2, s))
}

fn grading_with_sign(m1: &ComplexMatrix, m2: &ComplexMatrix, s: f64) -> Option<f64> {
    let n = m1.rows();
    let basis: Vec<ComplexMatrix> = (0..n)
        .flat_map(|i| (i..n).map(move |j| (i, j)))
        .flat_map(|(i, j)| {
            let mut re = ComplexMatrix::zeros(n, n);
            re.set(i, j, Complex64::new(1.0, 0.0));
            re.set(j, i, Complex64::new(1.0, 0.0));
            let im = (i != j).then(|| {
                let mut im = ComplexMatrix::zeros(n, n);
                im.set(i, j, Complex64::new(0.0, 1.0));
                im.set(j, i, Complex64::new(0.0, -1.0));
                im
            });
            core::iter::once(re).chain(im)
        })
        .collect();
    let flatten = |a: &ComplexMatrix, b: &ComplexMatrix| -> Vec<f64> {
        a.data().iter().chain(b.data()).flat_map(|z| [z.re, z.im]).collect()
    };
    let cols: Vec<Vec<f64>> = basis
        .iter()
        .map(|e| flatten(&(&(e * m1) - &(m1 * e)), &(&(e * m2) - &(m2 * e))))
        .collect();
    let m2s = m2.scale_real(s);
    let rhs = flatten(m1, &m2s);
    let p = cols.len();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let gram = nalgebra::DMatrix::from_fn(p, p, |i, j| dot(&cols[i], &cols[j]));
    let b = nalgebra::DVector::from_fn(p, |i, _| dot(&cols[i], &rhs));
    let eig = nalgebra::SymmetricEigen::new(gram);
    let cut = eig.eigenvalues.amax() * 1e-12;
    let mut d = nalgebra::DVector::<f64>::zeros(p);
    for (k, &lam) in eig.eigenvalues.iter().enumerate() {
        if lam > cut {
            let v = eig.eigenvectors.column(k);
            d += v * (v.dot(&b) / lam);
        }
    }
    let dm = ComplexMatrix::linear_combination(
        &basis.iter().zip(d.iter()).map(|(e, &c)| (Complex64::new(c, 0.0), e)).collect::<Vec<_>>(),
    );
    let residual = |m: &ComplexMatrix, t: &ComplexMatrix| (&(&(&dm * m) - &(m * &dm)) - t).frobenius_norm();
    let err = core::f64::consts::PI * residual(m1, m1).hypot(residual(m2, &m2s));
    let scale = m1.frobenius_norm() + m2.frobenius_norm();
    (err <= 1e-11 * scale).then_some(err)
}

/// Upper bound on `max h(u)` over a cap of angular radius `rho` whose centre
/// has `h <= h_upper`, given `W >= max h`: every support point `r` has
/// `||r|| <= W` and `<c, r> <= h_upper`.
fn cap_bound(h_upper: f64, rho: f64, w: f64) -> f64 {
    if rho >= FRAC_PI_2 || w * rho.cos() <= h_upper {
        return w;
    }
    let (s, c) = rho.sin_cos();
    (h_upper * c + s * (w * w - h_upper * h_upper).max(0.0).sqrt()).min(w)
}

/// Euclidean operator radius `w_e(M1, M2) = sup_{||x||=1} (|<M1x,x>|^2 + |<M2x,x>|^2)^{1/2}`.
pub fn euclidean_radius(m1: &ComplexMatrix, m2: &ComplexMatrix) -> Result<RadiusResult> {
    euclidean_radius_with(m1, m2, &RadiiConfig::default())
}

/// Maximizes `h(u) = lambda_max(u_1 H1 + u_2 K1 + u_3 H2 + u_4 K2)` over the
/// unit sphere of `R^4`; the maximum equals `w_e`.
///
/// A coarse grid in `(t, phi, theta)` seeds fixed-point ascents that give the
/// lower estimate; a branch and bound over a cube-sphere partition of the
/// 3-sphere, with [`cap_bound`] on each cell, certifies the gap. When the
/// joint numerical range is circular (see [`circular_grading`]) the maximum
/// is attained on a whole circle, and the search runs on a 2-sphere slice
/// that meets each such circle.
pub fn euclidean_radius_with(m1: &ComplexMatrix, m2: &ComplexMatrix, cfg: &RadiiConfig) -> Result<RadiusResult> {
    let n = check_square(m1)?;
    let n2 = check_square(m2)?;
    if n != n2 {
        return Err(Error::DimensionMismatch { expected: n, found: n2 });
    }
    if m2.is_zero() {
        let mut r = numerical_radius_with(m1, cfg)?;
        r.pair_angles = Some((0.0, 0.0));
        return Ok(r);
    }
    if m1.is_zero() {
        let mut r = numerical_radius_with(m2, cfg)?;
        r.pair_angles = Some((FRAC_PI_2, 0.0));
        return Ok(r);
    }
    let forms = PairForms::new(m1, m2);
    let nt = cfg.pair_t_grid.max(2);
    let nphi = cfg.pair_phi_grid.max(1);
    let ntheta = cfg.pair_theta_grid.max(1);
    let mut cells: Vec<(f64, [f64; 4])> = Vec::with_capacity(nt * nphi * ntheta);
    for i in 0..nt {
        let t = FRAC_PI_2 * i as f64 / (nt - 1) as f64;
        let phis = if i == 0 { 1 } else { nphi };
        for j in 0..phis {
            let phi = TAU * j as f64 / nphi as f64;
            for l in 0..ntheta {
                let theta = TAU * l as f64 / ntheta as f64;
                let u = pair_direction(t, phi, theta);
                let top = *hermitian_eigenvalues(&forms.combine(&u)).last().expect("n >= 1");
                cells.push((top, u));
            }
        }
    }
    let mut evals = cells.len();
    // Stable sort keeps grid order among ties.
    cells.sort_by(|a, b| b.0.total_cmp(&a.0));

    let mut best: Option<(f64, Vec<Complex64>, [f64; 4])> = None;
    for &(_, start) in cells.iter().take(cfg.pair_starts.max(1)) {
        let (value, x, u, e) = pair_ascent(&forms, start, cfg.pair_max_iter, cfg.pair_rel_tol);
        evals += e;
        if best.as_ref().is_none_or(|b| value > b.0) {
            best = Some((value, x, u));
        }
    }
    let (mut lower, mut x_best, mut u_best) = best.expect("at least one start");

    // Branch and bound.
    let delta = 8.0 * n as f64 * f64::EPSILON * forms.f.iter().map(ComplexMatrix::frobenius_norm).sum::<f64>();
    let (k, slice_err) = match circular_grading(m1, m2) {
        Some(err) => (2, err),
        None => (3, 0.0),
    };
    let mut w_upper = euclidean_norm_pair(m1, m2)? + delta;
    let mut heap: BinaryHeap<Cell> = BinaryHeap::new();
    let mut nodes = 0usize;
    let eval_cell = |face: u8, corner: [f64; 3], size: f64, w: f64, lower: &mut f64, x_best: &mut Vec<Complex64>, u_best: &mut [f64; 4], evals: &mut usize| {
        let at = |d: [f64; 3]| face_point(k, face, [corner[0] + d[0], corner[1] + d[1], corner[2] + d[2]]);
        let h = 0.5 * size;
        let u = at([h; 3]);
        let rho = octants(k, size).map(|d| sphere_angle(&u, &at(d))).fold(0.0, f64::max);
        let eig = hermitian_eig_unchecked(&forms.combine(&u));
        *evals += 1;
        let (top, xv) = top_pair(&eig);
        let v = forms.forms(&xv);
        let nv = norm4(&v);
        if nv > *lower {
            let (value, x, uu, e) = pair_ascent(&forms, [v[0] / nv, v[1] / nv, v[2] / nv, v[3] / nv], 200, cfg.pair_rel_tol);
            *evals += e;
            if value > nv {
                (*lower, *x_best, *u_best) = (value, x, uu);
            } else {
                (*lower, *x_best, *u_best) = (nv, xv, [v[0] / nv, v[1] / nv, v[2] / nv, v[3] / nv]);
            }
        }
        let h_upper = top + delta;
        Cell { key: cap_bound(h_upper, rho, w), face, corner, size, h_upper, rho }
    };
    for face in 0..2 * (k as u8 + 1) {
        let cell = eval_cell(face, [-1.0; 3], 2.0, w_upper, &mut lower, &mut x_best, &mut u_best, &mut evals);
        heap.push(cell);
        nodes += 1;
    }
    let target = |lower: f64| cfg.target_rel_gap * lower + delta;
    while let Some(top) = heap.pop() {
        // Keys were computed with an older, larger W; refresh lazily.
        let fresh = cap_bound(top.h_upper, top.rho, w_upper);
        if fresh < top.key {
            heap.push(Cell { key: fresh, ..top });
            continue;
        }
        w_upper = w_upper.min(fresh.max(lower));
        if fresh <= lower + target(lower) || nodes >= cfg.pair_max_nodes {
            heap.push(top);
            break;
        }
        let half = 0.5 * top.size;
        for d in octants(k, half) {
            let corner = [top.corner[0] + d[0], top.corner[1] + d[1], top.corner[2] + d[2]];
            let cell = eval_cell(top.face, corner, half, w_upper, &mut lower, &mut x_best, &mut u_best, &mut evals);
            if cell.key > lower + target(lower) {
                heap.push(cell);
            }
            nodes += 1;
        }
    }
    let upper = heap.peek().map_or(lower, |c| c.key.min(w_upper).max(lower)) + slice_err;
    let (t, phi, theta) = decode_direction(&u_best);
    Ok(RadiusResult {
        value: lower,
        witness_vector: x_best,
        witness_angle: theta,
        pair_angles: Some((t, phi)),
        error_direction: ErrorDirection::LowerEstimate,
        // Pruned cells may reach `lower + target`.
        certified_gap: (upper - lower).max(target(lower)),
        evaluations: evals,
    })
}

/// Euclidean operator norm of a pair: `sqrt(lambda_max(M1* M1 + M2* M2))`.
pub fn euclidean_norm_pair(m1: &ComplexMatrix, m2: &ComplexMatrix) -> Result<f64> {
    let n = check_square(m1)?;
    let n2 = check_square(m2)?;
    if n != n2 {
        return Err(Error::DimensionMismatch { expected: n, found: n2 });
    }
    let g = &(&m1.adjoint() * m1) + &(&m2.adjoint() * m2);
    let top = *hermitian_eigenvalues(&g.hermitian_part()).last().expect("n >= 1");
    Ok(top.max(0.0).sqrt())
}

/// `A`-Euclidean operator seminorm `sup_{||x||_A = 1} (||Bx||_A^2 + ||Cx||_A^2)^{1/2}`.
pub fn euclidean_seminorm_pair(ctx: &AContext, b: &ComplexMatrix, c: &ComplexMatrix) -> Result<f64> {
    euclidean_norm_pair(&ctx.reduce(b)?, &ctx.reduce(c)?)
}

/// `w_A(T) = w(T~)`.
pub fn a_numerical_radius(ctx: &AContext, t: &ComplexMatrix) -> Result<RadiusResult> {
    numerical_radius(&ctx.reduce(t)?)
}

/// `c_A(T) = c(T~)`.
pub fn a_crawford(ctx: &AContext, t: &ComplexMatrix) -> Result<RadiusResult> {
    crawford(&ctx.reduce(t)?)
}

/// `||T||_A = ||T~||`.
pub fn a_op_norm(ctx: &AContext, t: &ComplexMatrix) -> Result<RadiusResult> {
    op_norm(&ctx.reduce(t)?)
}

/// `w_{A,e}(B, C) = w_e(B~, C~)`.
pub fn a_euclidean_radius(ctx: &AContext, b: &ComplexMatrix, c: &ComplexMatrix) -> Result<RadiusResult> {
    euclidean_radius(&ctx.reduce(b)?, &ctx.reduce(c)?)
}
