//! Property tests over randomly drawn shapes, tuples and states.

use proptest::prelude::*;

use pru_lab_core::harness::{
    build_state_for_dim, CheckParams, CheckRecord, ExperimentReport, Relation, StateFamily,
};
use pru_lab_core::operators::{
    conjugate_registers, perm_op, phase_op, BooleanFunction, DenseOperator, PermutationD,
};
use pru_lab_core::symgroup::{factorial, partitions, specht_dim};
use pru_lab_core::twirls::{
    haar_twirl_exact, pf_basis_element_by_group, pf_twirl, pf_twirl_basis_element,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn random_rho(d: usize, t: usize, dim_e: usize, seed: u64) -> DenseOperator {
    build_state_for_dim(StateFamily::RandomPure, d, t, dim_e, seed)
        .unwrap()
        .outer_product()
}

fn tuple_strategy() -> impl Strategy<Value = (usize, Vec<usize>, Vec<usize>)> {
    (2usize..=5, 1usize..=3).prop_flat_map(|(d, t)| {
        (
            Just(d),
            prop::collection::vec(0..d, t),
            prop::collection::vec(0..d, t),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn basis_element_rule_matches_group_average((d, x, y) in tuple_strategy()) {
        let rule = pf_twirl_basis_element(&x, &y, d).unwrap();
        let group = pf_basis_element_by_group(&x, &y, d).unwrap();
        prop_assert!(rule.max_abs_diff(&group) < 1e-12);
    }

    #[test]
    fn specht_dimensions_square_sum_to_group_order(t in 1usize..=6) {
        let sum: u128 = partitions(t).unwrap().iter().map(|l| specht_dim(l).pow(2)).sum();
        prop_assert_eq!(sum, factorial(t));
    }

    #[test]
    fn haar_twirl_is_idempotent_and_trace_preserving(
        d in 2usize..=4, t in 1usize..=2, dim_e in 1usize..=2, seed in any::<u64>()
    ) {
        let rho = random_rho(d, t, dim_e, seed);
        let once = haar_twirl_exact(&rho, t).unwrap().operator;
        let twice = haar_twirl_exact(&once, t).unwrap().operator;
        prop_assert!(twice.max_abs_diff(&once) < 1e-10);
        prop_assert!((once.trace().re - 1.0).abs() < 1e-10);
        // The workspace marginal is untouched.
        let keep = [t];
        let before = rho.partial_trace(&keep).unwrap();
        let after = once.partial_trace(&keep).unwrap();
        prop_assert!(before.max_abs_diff(&after) < 1e-10);
    }

    #[test]
    fn pf_twirl_absorbs_signed_permutations(
        d in 2usize..=4, t in 1usize..=3, seed in any::<u64>()
    ) {
        let rho = random_rho(d, t, 2, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let u = perm_op(&PermutationD::random(d, &mut rng))
            .mul(&phase_op(&BooleanFunction::random(d, &mut rng)))
            .unwrap();
        let targets: Vec<usize> = (0..t).collect();
        let moved = conjugate_registers(&rho, u.matrix(), &targets).unwrap();
        let a = pf_twirl(&rho, t).unwrap();
        let b = pf_twirl(&moved, t).unwrap();
        prop_assert!(a.max_abs_diff(&b) < 1e-12);
        prop_assert!((a.trace().re - 1.0).abs() < 1e-10);
    }

    #[test]
    fn csv_and_json_carry_identical_numbers(measured in any::<f64>(), bound in any::<f64>(), seed in any::<u64>()) {
        prop_assume!(measured.is_finite() && bound.is_finite());
        let mut report = ExperimentReport::new("prop", serde_json::Value::Null, seed);
        report.push_check(
            CheckRecord::new("prop-check", CheckParams::new(4, 2, 2), measured, bound, Relation::AtMost, "f", "s")
                .with_seed(seed),
        );
        let json: serde_json::Value = serde_json::from_str(&report.to_json().unwrap()).unwrap();
        let csv = report.to_csv().unwrap();
        let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
        prop_assert_eq!(row[4].parse::<f64>().unwrap(), json["checks"][0]["measured"].as_f64().unwrap());
        prop_assert_eq!(row[5].parse::<f64>().unwrap(), json["checks"][0]["bound"].as_f64().unwrap());
        prop_assert_eq!(row[4].parse::<f64>().unwrap(), measured);
        prop_assert_eq!(row[6] == "true", measured <= bound);
    }
}
