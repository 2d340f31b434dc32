use proptest::prelude::*;
use semirad_core::ensembles::OperandKind;
use semirad_core::radii::{
    a_crawford, a_numerical_radius, a_op_norm, crawford, euclidean_radius, numerical_radius, op_norm,
};
use semirad_core::rng::{complex_normal, ginibre, stream};
use semirad_core::Complex64;

mod common;
use common::{compatible, context, rel_close};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn scaling_and_phase(n in 1usize..6, seed in any::<u64>(), phase in 0.0f64..std::f64::consts::TAU) {
        let m = ginibre(&mut stream(seed, &[1]), n, n);
        let c = complex_normal(&mut stream(seed, &[2]));
        let w = numerical_radius(&m).unwrap().value;
        let wc = numerical_radius(&m.scale(c)).unwrap().value;
        prop_assert!(rel_close(wc, c.norm() * w, 1e-9), "{wc} vs {}", c.norm() * w);
        let wp = numerical_radius(&m.scale(Complex64::from_polar(1.0, phase))).unwrap().value;
        prop_assert!(rel_close(wp, w, 1e-9));
    }

    #[test]
    fn crawford_radius_norm_chain(n in 1usize..6, seed in any::<u64>()) {
        let m = ginibre(&mut stream(seed, &[3]), n, n);
        let c = crawford(&m).unwrap().value;
        let w = numerical_radius(&m).unwrap();
        let nrm = op_norm(&m).unwrap().value;
        let tol = 1e-9 * nrm;
        prop_assert!(c <= w.value + tol);
        prop_assert!(w.value <= nrm + tol);
        prop_assert!(nrm <= 2.0 * (w.value + w.certified_gap) + tol);
    }

    #[test]
    fn euclidean_radius_between_max_and_root_sum(n in 1usize..5, seed in any::<u64>()) {
        let mut rng = stream(seed, &[4]);
        let m1 = ginibre(&mut rng, n, n);
        let m2 = ginibre(&mut rng, n, n);
        let w1 = numerical_radius(&m1).unwrap();
        let w2 = numerical_radius(&m2).unwrap();
        let we = euclidean_radius(&m1, &m2).unwrap().value;
        let lower = w1.value.max(w2.value);
        prop_assert!(we >= lower - 1e-8 * (1.0 + lower), "{we} < {lower}");
        let upper = ((w1.value + w1.certified_gap).powi(2) + (w2.value + w2.certified_gap).powi(2)).sqrt();
        prop_assert!(we <= upper + 1e-8);
    }

    #[test]
    fn power_inequality(dim in 1usize..5, rank in 0usize..5, seed in any::<u64>()) {
        let ctx = context(dim, rank, seed);
        let t = compatible(&ctx, OperandKind::GenericACompatible, seed ^ 5);
        let w = a_numerical_radius(&ctx, &t).unwrap();
        let wt = w.value + w.certified_gap;
        let t2 = &t * &t;
        let t3 = &t2 * &t;
        let w2 = a_numerical_radius(&ctx, &t2).unwrap().value;
        let w3 = a_numerical_radius(&ctx, &t3).unwrap().value;
        prop_assert!(w2 <= wt.powi(2) + 1e-8 * (1.0 + wt.powi(2)));
        prop_assert!(w3 <= wt.powi(3) + 1e-8 * (1.0 + wt.powi(3)));
    }

    #[test]
    fn a_selfadjoint_radius_equals_seminorm(dim in 1usize..5, rank in 0usize..5, seed in any::<u64>()) {
        let ctx = context(dim, rank, seed);
        let t = compatible(&ctx, OperandKind::ASelfadjoint, seed ^ 6);
        let w = a_numerical_radius(&ctx, &t).unwrap().value;
        let n = a_op_norm(&ctx, &t).unwrap().value;
        prop_assert!((w - n).abs() <= 1e-7 * (1.0 + n), "{w} vs {n}");
    }

    #[test]
    fn a_sandwich(dim in 1usize..5, rank in 0usize..5, seed in any::<u64>()) {
        let ctx = context(dim, rank, seed);
        let t = compatible(&ctx, OperandKind::GenericACompatible, seed ^ 7);
        let c = a_crawford(&ctx, &t).unwrap().value;
        let w = a_numerical_radius(&ctx, &t).unwrap();
        let n = a_op_norm(&ctx, &t).unwrap().value;
        let tol = 1e-9 * (1.0 + n);
        prop_assert!(c <= w.value + tol && w.value <= n + tol && n <= 2.0 * (w.value + w.certified_gap) + tol);
    }
}

#[test]
fn jordan_block_radius_is_one_half() {
    let m = semirad_core::ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
    let w = numerical_radius(&m).unwrap();
    assert!((w.value - 0.5).abs() < 1e-8, "{}", w.value);
}
