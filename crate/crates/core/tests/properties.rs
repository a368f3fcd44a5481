use kendall_core::young::factorial;
use kendall_core::{
    ball_size, compose, coset_action_matrix, hook_length_dimension, inverse, kendall_distance,
    Execution, NumberPartition, Permutation, YoungSubgroup,
};
use num_bigint::BigUint;
use proptest::prelude::*;

fn perm(n: usize) -> impl Strategy<Value = Permutation> {
    Just((1..=n).collect::<Vec<usize>>())
        .prop_shuffle()
        .prop_map(|w| Permutation::from_one_line(&w).unwrap())
}

fn triple() -> impl Strategy<Value = (Permutation, Permutation, Permutation)> {
    (2usize..=12).prop_flat_map(|n| (perm(n), perm(n), perm(n)))
}

fn partition() -> impl Strategy<Value = NumberPartition> {
    prop::collection::vec(1usize..=3, 1..=3).prop_map(|mut parts| {
        parts.sort_unstable_by(|a, b| b.cmp(a));
        NumberPartition::new(parts).unwrap()
    })
}

proptest! {
    #[test]
    fn distance_is_a_metric((a, b, c) in triple()) {
        let ab = kendall_distance(&a, &b).unwrap();
        prop_assert_eq!(ab, kendall_distance(&b, &a).unwrap());
        prop_assert_eq!(ab == 0, a == b);
        let ac = kendall_distance(&a, &c).unwrap();
        let cb = kendall_distance(&c, &b).unwrap();
        prop_assert!(ab <= ac + cb);
        let n = a.n() as u64;
        prop_assert!(ab <= n * (n - 1) / 2);
    }

    #[test]
    fn distance_is_right_invariant((a, b, c) in triple()) {
        let d = kendall_distance(&a, &b).unwrap();
        let ac = compose(&a, &c).unwrap();
        let bc = compose(&b, &c).unwrap();
        prop_assert_eq!(d, kendall_distance(&ac, &bc).unwrap());
    }

    #[test]
    fn inverse_undoes_compose((a, _b, _c) in triple()) {
        let id = compose(&a, &inverse(&a)).unwrap();
        prop_assert!(id.is_identity());
        prop_assert_eq!(a.inversions(), inverse(&a).inversions());
    }

    #[test]
    fn ball_sizes_grow_to_the_group(n in 2usize..=10, r in 0usize..=50) {
        let full = n * (n - 1) / 2;
        let size = ball_size(n, r);
        prop_assert!(size <= factorial(n));
        prop_assert_eq!(size == factorial(n), r >= full);
        if r > 0 {
            prop_assert!(ball_size(n, r - 1) <= size);
        }
    }

    #[test]
    fn coset_matrix_rows_sum_to_the_generator_count(lambda in partition()) {
        let n = lambda.n();
        prop_assume!(n >= 2);
        let h = YoungSubgroup::new(lambda.clone()).unwrap();
        let m = coset_action_matrix(&h, 1, 100_000, Execution::Sequential).unwrap();
        prop_assert_eq!(BigUint::from(m.dim()) * lambda.young_order(), factorial(n));
        prop_assert!(m.entries.is_symmetric());
        prop_assert!(m.entries.row_sums().iter().all(|&s| s == n as u64));
    }

    #[test]
    fn hook_dimension_of_conjugate_agrees(lambda in partition()) {
        prop_assert_eq!(hook_length_dimension(&lambda), hook_length_dimension(&lambda.conjugate()));
    }
}
