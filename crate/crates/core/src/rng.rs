//! Seeded, splittable random streams.
//!
//! Every consumer asks for a stream by `(seed, path)`, where `path` names
//! the position in the work tree (cell, trial, operand slot, restart, ...).
//! The path is folded with SplitMix64 into a ChaCha20 stream id, so draws
//! never depend on scheduling order.

use alloc::vec::Vec;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::matrix::ComplexMatrix;

/// Algorithm name recorded in reports.
pub const RNG_ALGORITHM: &str = "ChaCha20 (rand_chacha 0.9) seeded from u64, stream = splitmix64 fold of path";

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent generator for `(seed, path)`.
pub fn stream(seed: u64, path: &[u64]) -> ChaCha20Rng {
    let id = path.iter().fold(0x5EED_u64, |acc, &p| splitmix64(acc ^ splitmix64(p)));
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Complex standard normal: real and imaginary parts `N(0, 1/2)`.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * core::f64::consts::FRAC_1_SQRT_2
}

pub fn complex_normal_vec<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<Complex64> {
    (0..n).map(|_| complex_normal(rng)).collect()
}

/// Complex Ginibre matrix with `E|g_ij|^2 = 1`.
pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| complex_normal(rng))
}
