use proptest::prelude::*;
use semirad_core::matrix::{quadratic_form, vec_norm};
use semirad_core::numerics::{hermitian_eig, pinv, psd_sqrt, range_basis, svd};
use semirad_core::rng::{complex_normal_vec, ginibre, stream};
use semirad_core::{Complex64, ComplexMatrix};

mod common;
use common::dist;

fn hermitian(n: usize, seed: u64) -> ComplexMatrix {
    let g = ginibre(&mut stream(seed, &[n as u64]), n, n);
    g.hermitian_part()
}

/// Random `rows x cols` matrix of rank at most `rank`.
fn low_rank(rows: usize, cols: usize, rank: usize, seed: u64) -> ComplexMatrix {
    let mut rng = stream(seed, &[rows as u64, cols as u64, rank as u64]);
    let l = ginibre(&mut rng, rows, rank);
    let r = ginibre(&mut rng, rank, cols);
    &l * &r
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eig_reconstructs_with_orthonormal_vectors(n in 1usize..7, seed in any::<u64>()) {
        let h = hermitian(n, seed);
        let e = hermitian_eig(&h).unwrap();
        let v = &e.eigenvectors;
        prop_assert!(dist(&(&v.adjoint() * v), &ComplexMatrix::identity(n)) < 1e-12);
        prop_assert!(dist(&e.apply_spectral(|l| l), &h) < 1e-12 * (1.0 + h.frobenius_norm()));
        prop_assert!(e.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn sampled_rayleigh_quotients_stay_below_lambda_max(n in 1usize..6, seed in any::<u64>()) {
        let h = hermitian(n, seed);
        let top = hermitian_eig(&h).unwrap().max();
        let mut rng = stream(seed, &[99]);
        let mut best = f64::NEG_INFINITY;
        for _ in 0..10_000 {
            let x = complex_normal_vec(&mut rng, n);
            let s = vec_norm(&x);
            best = best.max(quadratic_form(&h, &x).re / (s * s));
        }
        prop_assert!(best <= top + 1e-12 * (1.0 + top.abs()));
        if n == 1 {
            prop_assert!((best - top).abs() < 1e-12);
        }
    }

    #[test]
    fn svd_reconstructs_rank_deficient(rows in 1usize..6, cols in 1usize..6, rank in 1usize..6, seed in any::<u64>()) {
        let m = low_rank(rows, cols, rank.min(rows).min(cols), seed);
        let d = svd(&m).unwrap();
        let k = rows.min(cols);
        let sigma = ComplexMatrix::from_fn(k, k, |i, j| if i == j { Complex64::new(d.singular_values[i], 0.0) } else { Complex64::new(0.0, 0.0) });
        let rec = &(&d.u * &sigma) * &d.v.adjoint();
        prop_assert!(dist(&rec, &m) < 1e-12 * (1.0 + m.frobenius_norm()));
        prop_assert!(dist(&(&d.u.adjoint() * &d.u), &ComplexMatrix::identity(k)) < 1e-10);
        prop_assert!(dist(&(&d.v.adjoint() * &d.v), &ComplexMatrix::identity(k)) < 1e-10);
        prop_assert!(d.singular_values.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn pinv_of_pinv_restores_matrix(n in 1usize..6, rank in 1usize..6, seed in any::<u64>()) {
        let m = low_rank(n, n, rank.min(n), seed);
        let tol = 1e-10;
        let back = pinv(&pinv(&m, tol).unwrap(), tol).unwrap();
        prop_assert!(dist(&back, &m) < 1e-8 * (1.0 + m.frobenius_norm()));
        let p = pinv(&m, tol).unwrap();
        prop_assert!(dist(&(&(&m * &p) * &m), &m) < 1e-8 * (1.0 + m.frobenius_norm()));
    }

    #[test]
    fn psd_sqrt_squares_back_and_commutes(n in 1usize..6, rank in 1usize..6, seed in any::<u64>()) {
        let g = low_rank(n, n, rank.min(n), seed);
        let a = &g.adjoint() * &g;
        let s = psd_sqrt(&a).unwrap();
        let af = a.frobenius_norm();
        prop_assert!(dist(&(&s * &s), &a) < 1e-10 * (1.0 + af));
        prop_assert!(dist(&(&s * &a), &(&a * &s)) <= 1e-9 * af * af + 1e-12);
        prop_assert!(s.hermitian_defect() < 1e-12 * (1.0 + s.frobenius_norm()));
    }

    #[test]
    fn range_basis_has_the_right_rank(n in 1usize..7, rank in 1usize..7, seed in any::<u64>()) {
        let r = rank.min(n);
        let g = low_rank(r, n, r, seed);
        let a = &g.adjoint() * &g;
        let (u, got) = range_basis(&a, 1e-10).unwrap();
        prop_assert_eq!(got, r);
        prop_assert!(dist(&(&u.adjoint() * &u), &ComplexMatrix::identity(r)) < 1e-10);
    }
}

#[test]
fn svd_of_complex_rank_one_projection_complement() {
    // Hermitian with spectrum {0, -1}; an early decomposition got its norm wrong.
    let m = ComplexMatrix::new(
        2,
        2,
        vec![
            Complex64::new(-0.38541829436552527, 0.0),
            Complex64::new(-0.4758175566703872, -0.10231659444155333),
            Complex64::new(-0.4758175566703872, 0.10231659444155333),
            Complex64::new(-0.6145817056344751, 0.0),
        ],
    )
    .unwrap();
    let s = svd(&m).unwrap().singular_values;
    assert!((s[0] - 1.0).abs() < 1e-12, "{s:?}");
    assert!(s[1].abs() < 1e-12);
}
