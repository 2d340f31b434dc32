#![allow(dead_code)]

use semirad_core::ensembles::{random_compatible, random_context, OperandKind};
use semirad_core::matrix::ComplexMatrix;
use semirad_core::AContext;

/// Context of dimension `dim`; `rank_pick` selects a rank in `1..=dim`.
pub fn context(dim: usize, rank_pick: usize, seed: u64) -> AContext {
    let rank = 1 + rank_pick % dim;
    random_context(dim, rank, seed).unwrap()
}

pub fn compatible(ctx: &AContext, kind: OperandKind, seed: u64) -> ComplexMatrix {
    random_compatible(ctx, kind, seed).unwrap()
}

pub fn dist(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    (a - b).frobenius_norm()
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300) || (a - b).abs() <= 1e-14
}
