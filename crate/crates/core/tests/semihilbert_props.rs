use proptest::prelude::*;
use semirad_core::ensembles::{random_a_unit, OperandKind};
use semirad_core::rng::{complex_normal, complex_normal_vec, stream};

mod common;
use common::{compatible, context, dist};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn double_and_triple_sharp(dim in 1usize..6, rank in 0usize..6, seed in any::<u64>()) {
        let ctx = context(dim, rank, seed);
        let t = compatible(&ctx, OperandKind::GenericACompatible, seed ^ 1);
        let s1 = ctx.a_adjoint(&t).unwrap();
        let s2 = ctx.a_adjoint(&s1).unwrap();
        let s3 = ctx.a_adjoint(&s2).unwrap();
        let p = ctx.projector();
        let scale = 1.0 + t.frobenius_norm();
        prop_assert!(dist(&s2, &(&(p * &t) * p)) <= 1e-8 * scale);
        prop_assert!(dist(&s3, &s1) <= 1e-8 * (1.0 + s1.frobenius_norm()));
    }

    #[test]
    fn reduction_is_a_star_homomorphism(dim in 1usize..6, rank in 0usize..6, seed in any::<u64>()) {
        let ctx = context(dim, rank, seed);
        let s = compatible(&ctx, OperandKind::GenericACompatible, seed ^ 2);
        let t = compatible(&ctx, OperandKind::GenericACompatible, seed ^ 3);
        let lambda = complex_normal(&mut stream(seed, &[4]));
        let (rs, rt) = (ctx.reduce(&s).unwrap(), ctx.reduce(&t).unwrap());
        let scale = (1.0 + rs.frobenius_norm()) * (1.0 + rt.frobenius_norm());
        prop_assert!(dist(&ctx.reduce(&(&s * &t)).unwrap(), &(&rs * &rt)) <= 1e-8 * scale);
        let lin = ctx.reduce(&(&s + &t.scale(lambda))).unwrap();
        prop_assert!(dist(&lin, &(&rs + &rt.scale(lambda))) <= 1e-8 * scale);
        let sharp = ctx.reduce(&ctx.a_adjoint(&t).unwrap()).unwrap();
        prop_assert!(dist(&sharp, &rt.adjoint()) <= 1e-8 * (1.0 + rt.frobenius_norm()));
    }

    #[test]
    fn cauchy_schwarz_for_the_semi_inner_product(dim in 1usize..6, rank in 0usize..6, seed in any::<u64>()) {
        let ctx = context(dim, rank, seed);
        let mut rng = stream(seed, &[5]);
        let x = complex_normal_vec(&mut rng, dim);
        let y = complex_normal_vec(&mut rng, dim);
        let ip = ctx.a_inner(&x, &y).unwrap().norm();
        prop_assert!(ip <= ctx.a_norm(&x).unwrap() * ctx.a_norm(&y).unwrap() + 1e-12);
    }

    #[test]
    fn cartesian_parts_are_a_selfadjoint(dim in 1usize..6, rank in 0usize..6, seed in any::<u64>()) {
        let ctx = context(dim, rank, seed);
        let t = compatible(&ctx, OperandKind::GenericACompatible, seed ^ 6);
        let (re, im) = ctx.cartesian(&t).unwrap();
        let scale = 1.0 + t.frobenius_norm();
        prop_assert!(ctx.selfadjoint_residual(&re).unwrap() <= 1e-9 * scale);
        prop_assert!(ctx.selfadjoint_residual(&im).unwrap() <= 1e-9 * scale);
        let i = semirad_core::Complex64::new(0.0, 1.0);
        let back = &re + &im.scale(i);
        prop_assert!(dist(&ctx.reduce(&back).unwrap(), &ctx.reduce(&t).unwrap()) <= 1e-8 * scale);
    }

    #[test]
    fn rank_one_projection_reduces_to_orthogonal_projection(dim in 1usize..6, rank in 0usize..6, seed in any::<u64>()) {
        let ctx = context(dim, rank, seed);
        let x = random_a_unit(&ctx, &mut stream(seed, &[7])).unwrap();
        prop_assert!((ctx.a_norm(&x).unwrap() - 1.0).abs() < 1e-10);
        let m = ctx.reduce(&ctx.rank_one_a(&x).unwrap()).unwrap();
        prop_assert!(dist(&(&m * &m), &m) < 1e-9);
        prop_assert!(dist(&m, &m.adjoint()) < 1e-9);
    }
}
