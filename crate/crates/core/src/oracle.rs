//! Brute-force estimators used to cross-check the optimizers: random
//! sampling of the (A-)unit sphere followed by normalized-gradient ascent
//! with backtracking. Nothing here uses eigen-solvers, so agreement with
//! [`crate::radii`] is an independent check.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{inner, vec_norm, ComplexMatrix};
use crate::radii::{ErrorDirection, RadiusResult};
use crate::rng::{complex_normal_vec, stream};
use crate::semihilbert::AContext;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    pub n_restarts: usize,
    pub n_samples: usize,
    pub ascent_steps: usize,
    pub step_init: f64,
    pub seed: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self { n_restarts: 64, n_samples: 100_000, ascent_steps: 500, step_init: 0.1, seed: 0 }
    }
}

impl OracleConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self { seed, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_restarts == 0 || self.n_samples == 0 || self.ascent_steps == 0 {
            return Err(Error::BadParameter("oracle counts must be positive"));
        }
        if !(self.step_init > 0.0 && self.step_init <= 1.0) {
            return Err(Error::BadParameter("step_init must lie in (0, 1]"));
        }
        Ok(())
    }
}

// Stream tags keep the oracles' draws apart for a shared seed.
const TAG_PAIR: u64 = 1;
const TAG_A_SPHERE: u64 = 2;
const TAG_BUZANO: u64 = 3;

/// `f(x) = sum_k |<G T_k x, x>|^2 / <G x, x>^2` for a PSD weight `G`
/// (identity when absent), with its Wirtinger gradient.
struct Objective<'a> {
    g: Option<&'a ComplexMatrix>,
    // Projector onto R(G). Steps are confined to it: the exact gradient has
    // no kernel component, and round-off along the kernel would otherwise
    // let the iterate grow there without bound.
    range: Option<&'a ComplexMatrix>,
    // G^+: ascent follows the gradient for the metric <G., .>, which keeps
    // the step well scaled when G is ill-conditioned.
    metric: Option<&'a ComplexMatrix>,
    // G T_k, and T_k^* G.
    gt: Vec<ComplexMatrix>,
    tg: Vec<ComplexMatrix>,
}

impl<'a> Objective<'a> {
    fn new(g: Option<&'a ComplexMatrix>, range: Option<&'a ComplexMatrix>, metric: Option<&'a ComplexMatrix>, ts: &[ComplexMatrix]) -> Self {
        let gt = ts.iter().map(|t| g.map_or_else(|| t.clone(), |g| g * t)).collect();
        let tg = ts.iter().map(|t| g.map_or_else(|| t.adjoint(), |g| &t.adjoint() * g)).collect();
        Self { g, range, metric, gt, tg }
    }

    fn weight(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.g.map_or_else(|| x.to_vec(), |g| g.mul_vec(x))
    }

    fn value(&self, x: &[Complex64]) -> f64 {
        let s = inner(&self.weight(x), x).re;
        if !(s > 0.0) {
            return 0.0;
        }
        let num: f64 = self.gt.iter().map(|m| inner(&m.mul_vec(x), x).norm_sqr()).sum();
        num / (s * s)
    }

    /// `df/dx-bar`; the directional derivative along `d` is `2 Re <grad, d>`.
    fn gradient(&self, x: &[Complex64]) -> Vec<Complex64> {
        let gx = self.weight(x);
        let s = inner(&gx, x).re;
        let mut grad = vec![Complex64::new(0.0, 0.0); x.len()];
        let mut total = 0.0;
        for (gt, tg) in self.gt.iter().zip(&self.tg) {
            let gtx = gt.mul_vec(x);
            let a = inner(&gtx, x);
            total += a.norm_sqr();
            let tgx = tg.mul_vec(x);
            for i in 0..x.len() {
                grad[i] += (a.conj() * gtx[i] + a * tgx[i]) / (s * s);
            }
        }
        for i in 0..x.len() {
            grad[i] -= gx[i] * (2.0 * total / (s * s * s));
        }
        grad
    }

    fn normalize(&self, x: &[Complex64]) -> Option<Vec<Complex64>> {
        let s = inner(&self.weight(x), x).re;
        if s > 0.0 && s.is_finite() {
            let r = 1.0 / s.sqrt();
            Some(x.iter().map(|z| z * r).collect())
        } else {
            None
        }
    }

    /// Normalized-gradient ascent with backtracking from a normalized start.
    fn ascend(&self, mut x: Vec<Complex64>, steps: usize, step_init: f64) -> (f64, Vec<Complex64>) {
        let mut fx = self.value(&x);
        let mut eta = step_init;
        for _ in 0..steps {
            let grad = self.gradient(&x);
            let grad = match (self.metric, self.range) {
                (Some(m), _) => m.mul_vec(&grad),
                (None, Some(p)) => p.mul_vec(&grad),
                (None, None) => grad,
            };
            let size = |v: &[Complex64]| match self.metric {
                Some(_) => inner(&self.weight(v), v).re.max(0.0).sqrt(),
                None => vec_norm(v),
            };
            let gn = size(&grad);
            if !(gn > 0.0) {
                break;
            }
            let xn = size(&x);
            let mut accepted = false;
            for _ in 0..40 {
                let step = eta * xn / gn;
                let mut trial: Vec<Complex64> = x.iter().zip(&grad).map(|(a, g)| a + g * step).collect();
                if let Some(p) = self.range {
                    hold_kernel_ratio(p, &x, &mut trial);
                }
                if let Some(trial) = self.normalize(&trial) {
                    let ft = self.value(&trial);
                    if ft > fx {
                        x = trial;
                        fx = ft;
                        accepted = true;
                        break;
                    }
                }
                eta *= 0.5;
            }
            if !accepted {
                break;
            }
            eta = (eta * 2.0).min(1.0);
        }
        (fx, x)
    }
}

/// Rescales the kernel part of `trial` so that its size relative to the
/// range part matches `x`.
fn hold_kernel_ratio(p: &ComplexMatrix, x: &[Complex64], trial: &mut [Complex64]) {
    let px = p.mul_vec(x);
    let pt = p.mul_vec(trial);
    let (rx, rt) = (vec_norm(&px), vec_norm(&pt));
    if !(rx > 0.0 && rt > 0.0) {
        return;
    }
    let kx: f64 = x.iter().zip(&px).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
    let kt: f64 = trial.iter().zip(&pt).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
    if !(kt > 0.0) {
        return;
    }
    let f = (kx / rx) * rt / kt;
    for (z, r) in trial.iter_mut().zip(&pt) {
        *z = r + (*z - r) * f;
    }
}

fn finish(best: f64, x: Vec<Complex64>) -> RadiusResult {
    RadiusResult {
        value: best.max(0.0).sqrt(),
        witness_vector: x,
        witness_angle: 0.0,
        pair_angles: None,
        error_direction: ErrorDirection::LowerEstimate,
        certified_gap: f64::INFINITY,
        evaluations: 0,
    }
}

fn check_tuple(ts: &[ComplexMatrix]) -> Result<usize> {
    let first = ts.first().ok_or(Error::BadParameter("empty operator tuple"))?;
    first.ensure_finite()?;
    let n = first.ensure_square()?;
    for t in &ts[1..] {
        t.ensure_finite()?;
        let m = t.ensure_square()?;
        if m != n {
            return Err(Error::DimensionMismatch { expected: n, found: m });
        }
    }
    Ok(n)
}

/// Samples, keeps the best sample per restart, then ascends from each.
fn sample_and_ascend(
    obj: &Objective<'_>,
    cfg: &OracleConfig,
    tag: u64,
    mut draw: impl FnMut(&mut ChaCha20Rng) -> Option<Vec<Complex64>>,
) -> Result<(f64, Vec<Complex64>)> {
    cfg.validate()?;
    let per_restart = cfg.n_samples.div_ceil(cfg.n_restarts);
    let mut best: Option<(f64, Vec<Complex64>)> = None;
    for r in 0..cfg.n_restarts {
        let mut rng = stream(cfg.seed, &[tag, r as u64]);
        let mut start: Option<(f64, Vec<Complex64>)> = None;
        for _ in 0..per_restart {
            let Some(x) = draw(&mut rng) else { continue };
            let Some(x) = obj.normalize(&x) else { continue };
            let f = obj.value(&x);
            if start.as_ref().is_none_or(|s| f > s.0) {
                start = Some((f, x));
            }
        }
        let Some((_, x0)) = start else { continue };
        let (f, x) = obj.ascend(x0, cfg.ascent_steps, cfg.step_init);
        if best.as_ref().is_none_or(|b| f > b.0) {
            best = Some((f, x));
        }
    }
    best.ok_or(Error::DegenerateVector)
}

/// Maximizes `sum_k |<M_k x, x>|^2` over the Euclidean unit sphere; the
/// result is the square root of the best value found.
pub fn direct_tuple_ascent(ms: &[ComplexMatrix], cfg: &OracleConfig) -> Result<RadiusResult> {
    let n = check_tuple(ms)?;
    let obj = Objective::new(None, None, None, ms);
    let (f, x) = sample_and_ascend(&obj, cfg, TAG_PAIR, |rng| Some(complex_normal_vec(rng, n)))?;
    Ok(finish(f, x))
}

/// Oracle for the Euclidean operator radius of a pair.
pub fn direct_pair_ascent(m1: &ComplexMatrix, m2: &ComplexMatrix, cfg: &OracleConfig) -> Result<RadiusResult> {
    direct_tuple_ascent(&[m1.clone(), m2.clone()], cfg)
}

/// Random ambient vector `(A^{1/2})^+ u + k` with a kernel component `k`
/// of length uniform in `[0, 10] ||(A^{1/2})^+ u||`.
fn a_sphere_draw(ctx: &AContext, rng: &mut ChaCha20Rng) -> Vec<Complex64> {
    let n = ctx.dim();
    let u = complex_normal_vec(rng, n);
    let mut x = ctx.sqrt_a_pinv().mul_vec(&u);
    if ctx.rank() == n {
        return x;
    }
    let noise = complex_normal_vec(rng, n);
    let p = ctx.projector().mul_vec(&noise);
    let k: Vec<Complex64> = noise.iter().zip(&p).map(|(a, b)| a - b).collect();
    let kn = vec_norm(&k);
    let mag: f64 = rng.random_range(0.0..=10.0) * vec_norm(&x);
    if kn > 0.0 {
        for (xi, ki) in x.iter_mut().zip(&k) {
            *xi += ki * (mag / kn);
        }
    }
    x
}

/// Literal sup of `sum_k |<A T_k x, x>|^2 / <Ax, x>^2` over ambient vectors;
/// the witness is an `A`-unit ambient vector.
pub fn direct_a_sphere_tuple(ctx: &AContext, ts: &[ComplexMatrix], cfg: &OracleConfig) -> Result<RadiusResult> {
    let n = check_tuple(ts)?;
    if n != ctx.dim() {
        return Err(Error::DimensionMismatch { expected: ctx.dim(), found: n });
    }
    let obj = Objective::new(Some(ctx.a()), Some(ctx.projector()), Some(ctx.a_pinv()), ts);
    let (f, x) = sample_and_ascend(&obj, cfg, TAG_A_SPHERE, |rng| Some(a_sphere_draw(ctx, rng)))?;
    Ok(finish(f, x))
}

/// Lower estimate of `w_A(T)` by sampling the `A`-unit sphere in the
/// ambient space.
pub fn direct_a_sphere(ctx: &AContext, t: &ComplexMatrix, cfg: &OracleConfig) -> Result<f64> {
    Ok(direct_a_sphere_tuple(ctx, core::slice::from_ref(t), cfg)?.value)
}

/// Smallest `rhs - lhs` of the generalized Buzano inequality
/// `|<x,e>_A <e,y>_A| <= (|<x,y>_A| + max{1,|alpha-1|} ||x||_A ||y||_A) / |alpha|`
/// over sampled triples with `||e||_A = 1`.
pub fn buzano_sample(ctx: &AContext, cfg: &OracleConfig, alpha: Complex64) -> Result<f64> {
    cfg.validate()?;
    if alpha.norm() == 0.0 || !alpha.is_finite() {
        return Err(Error::BadParameter("alpha must be a finite nonzero complex number"));
    }
    let factor = 1f64.max((alpha - 1.0).norm());
    let modulus = alpha.norm();
    let a = ctx.a();
    let slack = |x: &[Complex64], e: &[Complex64], y: &[Complex64]| {
        let (ax, ay) = (a.mul_vec(x), a.mul_vec(y));
        let xe = inner(&ax, e);
        let ey = inner(&a.mul_vec(e), y);
        let xy = inner(&ax, y);
        let nx = inner(&ax, x).re.max(0.0).sqrt();
        let ny = inner(&ay, y).re.max(0.0).sqrt();
        (xy.norm() + factor * nx * ny) / modulus - (xe * ey).norm()
    };
    let per_restart = cfg.n_samples.div_ceil(cfg.n_restarts);
    let mut worst = f64::INFINITY;
    for r in 0..cfg.n_restarts {
        let mut rng = stream(cfg.seed, &[TAG_BUZANO, r as u64]);
        for i in 0..per_restart {
            let e = ctx.a_normalize(&a_sphere_draw(ctx, &mut rng))?;
            let x = a_sphere_draw(ctx, &mut rng);
            let y = a_sphere_draw(ctx, &mut rng);
            let s = match i % 4 {
                // Equality-adjacent configurations.
                0 => slack(&e, &e, &e),
                1 => slack(&x, &e, &x),
                2 => {
                    let c: Complex64 = complex_normal_vec(&mut rng, 1)[0];
                    let y2: Vec<Complex64> = e.iter().zip(&x).map(|(ei, xi)| ei * c + xi * 0.1).collect();
                    slack(&x, &e, &y2)
                }
                _ => slack(&x, &e, &y),
            };
            worst = worst.min(s);
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semihilbert::ContextOptions;

    fn small() -> OracleConfig {
        OracleConfig { n_restarts: 8, n_samples: 2000, ascent_steps: 300, step_init: 0.1, seed: 3 }
    }

    #[test]
    fn gradient_matches_central_differences() {
        let mut rng = stream(11, &[0]);
        let a = {
            let g = crate::rng::ginibre(&mut rng, 2, 3);
            &g.adjoint() * &g
        };
        let t = crate::rng::ginibre(&mut rng, 3, 3);
        let obj = Objective::new(Some(&a), None, None, core::slice::from_ref(&t));
        let x = complex_normal_vec(&mut rng, 3);
        let d = complex_normal_vec(&mut rng, 3);
        let grad = obj.gradient(&x);
        let analytic = 2.0 * inner(&d, &grad).re;
        let h = 1e-6;
        let plus: Vec<_> = x.iter().zip(&d).map(|(a, b)| a + b * h).collect();
        let minus: Vec<_> = x.iter().zip(&d).map(|(a, b)| a - b * h).collect();
        let numeric = (obj.value(&plus) - obj.value(&minus)) / (2.0 * h);
        assert!((analytic - numeric).abs() <= 1e-4 * (1.0 + numeric.abs()), "{analytic} {numeric}");
    }

    #[test]
    fn pair_examples() {
        let i2 = ComplexMatrix::identity(2);
        let z = ComplexMatrix::zeros(2, 2);
        assert!((direct_pair_ascent(&i2, &z, &small()).unwrap().value - 1.0).abs() < 1e-12);
        let e1 = ComplexMatrix::from_real_diag(&[1.0, 0.0]);
        let e2 = ComplexMatrix::from_real_diag(&[0.0, 1.0]);
        assert!((direct_pair_ascent(&e1, &e2, &small()).unwrap().value - 1.0).abs() < 1e-8);
    }

    #[test]
    fn a_sphere_examples() {
        let jordan = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let w = direct_a_sphere(&AContext::identity(2), &jordan, &small()).unwrap();
        assert!(w <= 0.5 + 1e-12 && w > 0.5 - 1e-6, "{w}");
        let ctx = AContext::new(&ComplexMatrix::from_real_diag(&[1.0, 0.0]), ContextOptions::default()).unwrap();
        let w = direct_a_sphere(&ctx, &ComplexMatrix::from_real_diag(&[2.0, 5.0]), &small()).unwrap();
        assert!((w - 2.0).abs() < 1e-12);
    }

    #[test]
    fn buzano_classical_case() {
        let ctx = AContext::identity(3);
        let s = buzano_sample(&ctx, &small(), Complex64::new(2.0, 0.0)).unwrap();
        assert!(s >= -1e-10);
    }

    #[test]
    fn rejects_bad_config() {
        let cfg = OracleConfig { step_init: 0.0, ..small() };
        assert!(cfg.validate().is_err());
    }
}

