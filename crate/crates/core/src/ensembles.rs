//! Seeded generators for contexts and operands.
//!
//! All operands come out in the class of operators admitting an
//! `A`-adjoint. The generic construction is
//! `T = (A^{1/2})^+ S A^{1/2} + (I - P) R` with `S`, `R` Ginibre and `P` the
//! projector onto `R(A)`; the second term moves kernel vectors around
//! without leaving the class, so `T^#` differs from `T` on the kernel.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, ZERO};
use crate::rng::{complex_normal, complex_normal_vec, ginibre, stream};
use crate::semihilbert::{AContext, ContextOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum OperandKind {
    GenericACompatible,
    ASelfadjoint,
    RankOneA,
    Nilpotent,
    CommutingPair,
    Zero,
}

impl OperandKind {
    pub const ALL: [OperandKind; 6] = [
        OperandKind::GenericACompatible,
        OperandKind::ASelfadjoint,
        OperandKind::RankOneA,
        OperandKind::Nilpotent,
        OperandKind::CommutingPair,
        OperandKind::Zero,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OperandKind::GenericACompatible => "GENERIC_A_COMPATIBLE",
            OperandKind::ASelfadjoint => "A_SELFADJOINT",
            OperandKind::RankOneA => "RANK_ONE_A",
            OperandKind::Nilpotent => "NILPOTENT",
            OperandKind::CommutingPair => "COMMUTING_PAIR",
            OperandKind::Zero => "ZERO",
        }
    }
}

impl fmt::Display for OperandKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OperandKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let up: alloc::string::String = s.chars().map(|c| if c == '-' { '_' } else { c.to_ascii_uppercase() }).collect();
        match up.as_str() {
            "GENERIC" | "GENERIC_A_COMPATIBLE" => Ok(OperandKind::GenericACompatible),
            "SELFADJOINT" | "A_SELFADJOINT" => Ok(OperandKind::ASelfadjoint),
            "RANK_ONE" | "RANK_ONE_A" => Ok(OperandKind::RankOneA),
            "NILPOTENT" => Ok(OperandKind::Nilpotent),
            "COMMUTING" | "COMMUTING_PAIR" => Ok(OperandKind::CommutingPair),
            "ZERO" => Ok(OperandKind::Zero),
            _ => Err(Error::BadParameter("unknown operand kind")),
        }
    }
}

/// Rank of the generated `A`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ARank {
    Full,
    Rank(usize),
}

impl ARank {
    pub fn resolve(self, dim: usize) -> usize {
        match self {
            ARank::Full => dim,
            ARank::Rank(r) => r,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub dim: usize,
    pub a_rank: ARank,
    pub operand_kind: OperandKind,
    pub scale: f64,
    pub seed: u64,
}

impl EnsembleSpec {
    pub fn validate(&self) -> Result<()> {
        if !(1..=64).contains(&self.dim) {
            return Err(Error::BadParameter("dim must lie in [1, 64]"));
        }
        let r = self.a_rank.resolve(self.dim);
        if r == 0 || r > self.dim {
            return Err(Error::BadParameter("a_rank must lie in [1, dim]"));
        }
        if !(self.scale > 0.0 && self.scale <= 1e3) {
            return Err(Error::BadParameter("scale must lie in (0, 1000]"));
        }
        Ok(())
    }
}

// Stream slots.
const SLOT_A: u64 = 0;
const SLOT_B: u64 = 1;
const SLOT_C: u64 = 2;

/// `A = G* G` with `G` an `a_rank x dim` complex Gaussian matrix, redrawn
/// in the unlikely event the numerical rank comes out different.
pub fn random_psd(dim: usize, a_rank: usize, seed: u64) -> Result<ComplexMatrix> {
    random_psd_at(dim, a_rank, seed, &[])
}

fn random_psd_at(dim: usize, a_rank: usize, seed: u64, path: &[u64]) -> Result<ComplexMatrix> {
    if dim == 0 || a_rank == 0 || a_rank > dim {
        return Err(Error::BadParameter("random_psd needs 1 <= a_rank <= dim"));
    }
    let opts = ContextOptions::default();
    for attempt in 0..16u64 {
        let mut full: Vec<u64> = path.to_vec();
        full.extend_from_slice(&[SLOT_A, attempt]);
        let mut rng = stream(seed, &full);
        let g = ginibre(&mut rng, a_rank, dim);
        let a = (&g.adjoint() * &g).hermitian_part();
        if AContext::new(&a, opts).map(|c| c.rank()) == Ok(a_rank) {
            return Ok(a);
        }
    }
    Err(Error::BadParameter("could not draw a PSD matrix of the requested rank"))
}

/// Context built on [`random_psd`] with default tolerances.
pub fn random_context(dim: usize, a_rank: usize, seed: u64) -> Result<AContext> {
    AContext::new(&random_psd(dim, a_rank, seed)?, ContextOptions::default())
}

fn generic(ctx: &AContext, rng: &mut ChaCha20Rng) -> ComplexMatrix {
    let n = ctx.dim();
    let s = ginibre(rng, n, n);
    let r = ginibre(rng, n, n);
    let core = &(ctx.sqrt_a_pinv() * &s) * ctx.sqrt_a();
    let kernel = &ComplexMatrix::identity(n) - ctx.projector();
    &core + &(&kernel * &r)
}

/// `U Lambda^{-1/2} N Lambda^{1/2} U*` with `N = [[0, G], [0, 0]]`, so the
/// reduced operator is `N` and `T^2 = 0`.
fn nilpotent(ctx: &AContext, rng: &mut ChaCha20Rng) -> ComplexMatrix {
    let r = ctx.rank();
    let k = (r / 2).max(1);
    let nmat = ComplexMatrix::from_fn(r, r, |i, j| if i < k && j >= k { complex_normal(rng) } else { ZERO });
    let lam = ctx.range_eigenvalues();
    let scaled = ComplexMatrix::from_fn(r, r, |i, j| nmat.get(i, j) * (lam[j].sqrt() / lam[i].sqrt()));
    let u = ctx.range_basis();
    &(u * &scaled) * &u.adjoint()
}

/// Random `x` with `||x||_A = 1`, including a kernel component.
pub fn random_a_unit<R: Rng + ?Sized>(ctx: &AContext, rng: &mut R) -> Result<Vec<Complex64>> {
    let n = ctx.dim();
    let u = complex_normal_vec(rng, n);
    let mut x = ctx.sqrt_a_pinv().mul_vec(&u);
    let noise = complex_normal_vec(rng, n);
    let p = ctx.projector().mul_vec(&noise);
    for i in 0..n {
        x[i] += noise[i] - p[i];
    }
    ctx.a_normalize(&x)
}

/// Polynomial `c0 I + c1 C + c2 C^2`, which commutes with `C`.
fn polynomial_in(c: &ComplexMatrix, rng: &mut ChaCha20Rng) -> ComplexMatrix {
    let n = c.rows();
    let c2 = c * c;
    let id = ComplexMatrix::identity(n);
    let (k0, k1, k2) = (complex_normal(rng), complex_normal(rng), complex_normal(rng) * 0.5);
    ComplexMatrix::linear_combination(&[(k0, &id), (k1, c), (k2, &c2)])
}

fn draw_with(ctx: &AContext, kind: OperandKind, rng: &mut ChaCha20Rng) -> Result<ComplexMatrix> {
    let n = ctx.dim();
    Ok(match kind {
        OperandKind::GenericACompatible | OperandKind::CommutingPair => generic(ctx, rng),
        OperandKind::ASelfadjoint => ctx.cartesian(&generic(ctx, rng))?.0,
        OperandKind::RankOneA => {
            let x = random_a_unit(ctx, rng)?;
            ctx.rank_one_a(&x)?
        }
        OperandKind::Nilpotent => nilpotent(ctx, rng),
        OperandKind::Zero => ComplexMatrix::zeros(n, n),
    })
}

/// One operand of the requested kind. For `COMMUTING_PAIR` this is the
/// generic member of the pair; see [`random_pair`].
pub fn random_compatible(ctx: &AContext, kind: OperandKind, seed: u64) -> Result<ComplexMatrix> {
    draw_with(ctx, kind, &mut stream(seed, &[SLOT_B]))
}

/// Operand drawn from an explicit stream path.
pub fn random_compatible_at(ctx: &AContext, kind: OperandKind, seed: u64, path: &[u64]) -> Result<ComplexMatrix> {
    draw_with(ctx, kind, &mut stream(seed, path))
}

/// A generated instance: context plus two operands.
#[derive(Debug, Clone)]
pub struct Instance {
    pub ctx: AContext,
    pub b: ComplexMatrix,
    pub c: ComplexMatrix,
}

/// Context and operand pair for a spec. `COMMUTING_PAIR` yields
/// `B = p(C)` for a random quadratic `p`; the other kinds draw `B` and `C`
/// independently from the same kind.
pub fn random_pair(spec: &EnsembleSpec) -> Result<Instance> {
    random_pair_at(spec, &[])
}

/// [`random_pair`] drawing from the sub-streams under `path`.
pub fn random_pair_at(spec: &EnsembleSpec, path: &[u64]) -> Result<Instance> {
    spec.validate()?;
    let r = spec.a_rank.resolve(spec.dim);
    let a = random_psd_at(spec.dim, r, spec.seed, path)?;
    let ctx = AContext::new(&a, ContextOptions::default())?;
    let sub = |slot: u64| {
        let mut p = path.to_vec();
        p.push(slot);
        stream(spec.seed, &p)
    };
    let c = draw_with(&ctx, spec.operand_kind, &mut sub(SLOT_C))?.scale_real(spec.scale);
    let b = if spec.operand_kind == OperandKind::CommutingPair {
        polynomial_in(&c, &mut sub(SLOT_B))
    } else {
        draw_with(&ctx, spec.operand_kind, &mut sub(SLOT_B))?.scale_real(spec.scale)
    };
    Ok(Instance { ctx, b, c })
}

/// Relative structural defect of an operand of the given kind:
/// `A`-adjoint residual for all kinds, plus `A`-selfadjointness, `T^2 = 0`,
/// or idempotence of the reduced operator as appropriate.
pub fn structure_residual(ctx: &AContext, kind: OperandKind, t: &ComplexMatrix) -> Result<f64> {
    let base = ctx.adjoint_residual(t)?;
    let extra = match kind {
        OperandKind::ASelfadjoint => ctx.selfadjoint_residual(t)?,
        OperandKind::Nilpotent => (t * t).frobenius_norm() / (1.0 + t.frobenius_norm().powi(2)),
        OperandKind::RankOneA => {
            let m = ctx.reduce(t)?;
            (&(&m * &m) - &m).frobenius_norm() / (1.0 + m.frobenius_norm())
        }
        OperandKind::Zero => t.max_abs(),
        _ => 0.0,
    };
    Ok(base.max(extra))
}
