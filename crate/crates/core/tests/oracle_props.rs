use proptest::prelude::*;
use semirad_core::ensembles::OperandKind;
use semirad_core::oracle::{buzano_sample, direct_a_sphere, direct_a_sphere_tuple, direct_pair_ascent, OracleConfig};
use semirad_core::radii::{a_euclidean_radius, a_numerical_radius, euclidean_radius};
use semirad_core::rng::{ginibre, stream};
use semirad_core::Complex64;

mod common;
use common::{compatible, context};

fn light(seed: u64) -> OracleConfig {
    OracleConfig { n_restarts: 8, n_samples: 2000, ascent_steps: 200, step_init: 0.1, seed }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn oracle_never_beats_certified_radius(dim in 1usize..5, rank in 0usize..5, seed in any::<u64>()) {
        let ctx = context(dim, rank, seed);
        let t = compatible(&ctx, OperandKind::GenericACompatible, seed ^ 1);
        let w = a_numerical_radius(&ctx, &t).unwrap();
        let o = direct_a_sphere(&ctx, &t, &light(seed)).unwrap();
        prop_assert!(o <= w.value + w.certified_gap + 1e-9 * (1.0 + w.value), "{o} > {}", w.value);
    }

    #[test]
    fn pair_oracle_stays_below_pair_optimizer(n in 1usize..5, seed in any::<u64>()) {
        let mut rng = stream(seed, &[2]);
        let m1 = ginibre(&mut rng, n, n);
        let m2 = ginibre(&mut rng, n, n);
        let we = euclidean_radius(&m1, &m2).unwrap().value;
        let o = direct_pair_ascent(&m1, &m2, &light(seed)).unwrap().value;
        prop_assert!(o <= we * (1.0 + 1e-9), "{we} vs {o}");
    }

    #[test]
    fn a_sphere_pair_matches_reduced_pair(dim in 1usize..5, rank in 0usize..5, seed in any::<u64>()) {
        let ctx = context(dim, rank, seed);
        let b = compatible(&ctx, OperandKind::GenericACompatible, seed ^ 3);
        let c = compatible(&ctx, OperandKind::GenericACompatible, seed ^ 4);
        let we = a_euclidean_radius(&ctx, &b, &c).unwrap();
        let o = direct_a_sphere_tuple(&ctx, &[b, c], &light(seed)).unwrap();
        prop_assert!(o.value <= we.value + we.certified_gap + 1e-9 * (1.0 + we.value));
        prop_assert!((ctx.a_norm(&o.witness_vector).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn structured_pairs_stay_certified(dim in 2usize..5, rank in 0usize..5, seed in any::<u64>(), k in 0usize..OperandKind::ALL.len()) {
        let ctx = context(dim, rank, seed);
        let kind = OperandKind::ALL[k];
        let b = compatible(&ctx, kind, seed ^ 5);
        let c = compatible(&ctx, kind, seed ^ 6);
        let we = a_euclidean_radius(&ctx, &b, &c).unwrap();
        prop_assert!(we.certified_gap <= 1e-8 * (1.0 + we.value), "gap {}", we.certified_gap);
        let o = direct_a_sphere_tuple(&ctx, &[b, c], &light(seed)).unwrap();
        prop_assert!(o.value <= we.value + we.certified_gap + 1e-9 * (1.0 + we.value), "{} vs {}", we.value, o.value);
    }

    #[test]
    fn buzano_slack_is_nonnegative(dim in 1usize..5, rank in 0usize..5, seed in any::<u64>(), re in -3.0f64..3.0, im in -3.0f64..3.0) {
        prop_assume!(re.hypot(im) > 0.05);
        let ctx = context(dim, rank, seed);
        let cfg = OracleConfig { n_samples: 1000, ..light(seed) };
        let slack = buzano_sample(&ctx, &cfg, Complex64::new(re, im)).unwrap();
        prop_assert!(slack >= -1e-10, "{slack}");
    }
}

#[test]
fn oracle_is_deterministic() {
    let ctx = context(3, 1, 11);
    let t = compatible(&ctx, OperandKind::GenericACompatible, 12);
    let a = direct_a_sphere_tuple(&ctx, &[t.clone()], &light(5)).unwrap();
    let b = direct_a_sphere_tuple(&ctx, &[t], &light(5)).unwrap();
    assert_eq!(a.value.to_bits(), b.value.to_bits());
    assert_eq!(a.witness_vector, b.witness_vector);
}

#[test]
fn pair_optimizer_finds_off_slice_maximum() {
    let seed = 10879354762880436572u64;
    let mut rng = stream(seed, &[2]);
    let m1 = ginibre(&mut rng, 4, 4);
    let m2 = ginibre(&mut rng, 4, 4);
    let we = euclidean_radius(&m1, &m2).unwrap();
    let o = direct_pair_ascent(&m1, &m2, &light(seed)).unwrap().value;
    assert!(o <= we.value * (1.0 + 1e-9), "{} vs {o}", we.value);
    assert!(we.certified_gap <= 1e-6 * we.value);
}
