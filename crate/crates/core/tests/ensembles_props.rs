use proptest::prelude::*;
use semirad_core::ensembles::{random_pair, random_psd, structure_residual, ARank, EnsembleSpec, OperandKind};
use semirad_core::numerics::range_basis;
use semirad_core::radii::{a_numerical_radius, a_op_norm};

mod common;
use common::{compatible, context};

fn kind() -> impl Strategy<Value = OperandKind> {
    proptest::sample::select(OperandKind::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn psd_has_requested_rank(dim in 1usize..8, rank in 0usize..8, seed in any::<u64>()) {
        let r = 1 + rank % dim;
        let a = random_psd(dim, r, seed).unwrap();
        prop_assert!(a.hermitian_defect() == 0.0 || a.hermitian_defect() < 1e-14 * a.frobenius_norm());
        prop_assert_eq!(range_basis(&a, 1e-10).unwrap().1, r);
    }

    #[test]
    fn operands_are_compatible_and_structured(dim in 1usize..6, rank in 0usize..6, seed in any::<u64>(), k in kind()) {
        let ctx = context(dim, rank, seed);
        let t = compatible(&ctx, k, seed ^ 9);
        let scale = 1.0 + t.frobenius_norm();
        prop_assert!(ctx.admits_a_adjoint(&t).unwrap());
        prop_assert!(structure_residual(&ctx, k, &t).unwrap() <= 1e-9 * scale, "{k}");
    }

    #[test]
    fn identical_specs_give_identical_operands(dim in 1usize..6, seed in any::<u64>(), k in kind(), scale in 0.01f64..100.0) {
        let spec = EnsembleSpec { dim, a_rank: ARank::Full, operand_kind: k, scale, seed };
        let x = random_pair(&spec).unwrap();
        let y = random_pair(&spec).unwrap();
        prop_assert_eq!(x.ctx.a(), y.ctx.a());
        prop_assert_eq!(&x.b, &y.b);
        prop_assert_eq!(&x.c, &y.c);
    }
}

#[test]
fn generic_ratios_cover_loose_and_tight_regimes() {
    let mut loose = false;
    let mut tight = false;
    for seed in 0..1000u64 {
        let ctx = context(4, 3, seed);
        let t = compatible(&ctx, OperandKind::GenericACompatible, seed + 5000);
        let r = a_numerical_radius(&ctx, &t).unwrap().value / a_op_norm(&ctx, &t).unwrap().value;
        loose |= (0.5..=0.75).contains(&r);
        tight |= (0.9..=1.0).contains(&r);
    }
    assert!(loose && tight, "loose {loose} tight {tight}");
}

#[test]
fn rejects_bad_specs() {
    let bad = EnsembleSpec { dim: 3, a_rank: ARank::Rank(4), operand_kind: OperandKind::Zero, scale: 1.0, seed: 0 };
    assert!(random_pair(&bad).is_err());
    let bad = EnsembleSpec { dim: 3, a_rank: ARank::Full, operand_kind: OperandKind::Zero, scale: 0.0, seed: 0 };
    assert!(random_pair(&bad).is_err());
    assert!(random_psd(2, 0, 1).is_err());
}
