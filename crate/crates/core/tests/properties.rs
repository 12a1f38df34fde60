//! Randomized checks of the structural inequalities behind the counting
//! bounds: containment in the strip, affine pieces, Lipschitz constants and
//! the per-column oscillation bound.

mod common;

use num_bigint::BigInt;
use num_traits::Signed;
use proptest::prelude::*;

use takagi::oracle::{check_column_bound, check_lipschitz, check_midpoint_linearity};
use takagi::rational::{big_pow, ratio};
use takagi::series::{
    build_partial_sum, build_window_sum, eval_certified, eval_exact, partial_sum_at, window_sum_at,
};
use takagi::{CoefficientSequence, Limits, Rational};

fn seq_strategy() -> impl Strategy<Value = CoefficientSequence> {
    prop::sample::select(common::finite_eta_sequences())
}

fn unit_rational() -> impl Strategy<Value = Rational> {
    (1i64..1 << 24).prop_flat_map(|q| (0..=q).prop_map(move |p| ratio(p, q)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn partial_sums_stay_in_eta_strip(seq in seq_strategy(), n in 0u32..=12, extra in 0u32..=6, seed in any::<u64>()) {
        let level = common::max_level(seq.base(), n + extra).max(n);
        let top = big_pow(seq.base(), level);
        let j: BigInt = BigInt::from(seed) % (&top + 1u32);
        let x = Rational::new(j.clone(), top);
        let f = eval_exact(&seq, &j, level).unwrap();
        let gap = (f - partial_sum_at(&seq, n, &x)).abs();
        let eta = seq.eta().value().unwrap().clone();
        prop_assert!(gap <= eta / Rational::from_integer(big_pow(seq.base(), n)));
        prop_assert!(gap <= seq.tail_bound(n));
    }

    #[test]
    fn lipschitz_constants(seq in seq_strategy(), n in 0u32..=12, m in 1u32..=12, x1 in unit_rational(), x2 in unit_rational()) {
        prop_assert!(check_lipschitz(&seq, n, m, &[(x1, x2)]).unwrap());
    }

    #[test]
    fn affine_between_grid_points(seq in seq_strategy(), n in 0u32..=10, cell in any::<u64>()) {
        let n = n.min(common::max_level(seq.base(), 10));
        let cells = 2 * seq.base().pow(n);
        prop_assert!(check_midpoint_linearity(&seq, n, &[cell % cells]).unwrap());
    }

    #[test]
    fn certified_interval_brackets_exact_value(seq in seq_strategy(), level in 0u32..=14, seed in any::<u64>(), digits in 3u32..=12) {
        let level = level.min(common::max_level(seq.base(), 14));
        let top = big_pow(seq.base(), level);
        let j: BigInt = BigInt::from(seed) % (&top + 1u32);
        let exact = eval_exact(&seq, &j, level).unwrap();
        let eps = Rational::new(1.into(), big_pow(10, digits));
        let v = eval_certified(&seq, &Rational::new(j, top), &eps).unwrap();
        prop_assert!(v.radius <= eps);
        prop_assert!(v.contains(&exact));
    }

    #[test]
    fn grid_interpolation_matches_direct_sum(seq in seq_strategy(), n in 0u32..=8, x in unit_rational()) {
        let n = n.min(common::max_level(seq.base(), 8));
        let pl = build_partial_sum(&seq, n, &Limits::default()).unwrap();
        prop_assert_eq!(pl.eval(&x).unwrap(), partial_sum_at(&seq, n, &x));
    }

    #[test]
    fn window_sums_telescope(seq in seq_strategy(), n in 0u32..=6, m in 1u32..=6, x in unit_rational()) {
        let whole = partial_sum_at(&seq, n + m, &x);
        prop_assert_eq!(partial_sum_at(&seq, n, &x) + window_sum_at(&seq, n, m, &x), whole);
        if seq.base() == 2 {
            let w = build_window_sum(&seq, n, m, &Limits::default()).unwrap();
            prop_assert_eq!(w.eval(&x).unwrap(), window_sum_at(&seq, n, m, &x));
        }
    }
}

#[test]
fn oscillation_bound_per_column() {
    let limits = Limits::default();
    for seq in common::finite_eta_sequences() {
        let top = common::max_level(seq.base(), 12);
        for n in 0..=top {
            let pl = build_partial_sum(&seq, n, &limits).unwrap();
            for level in n.saturating_sub(1)..=(n + 1).min(top) {
                assert!(
                    check_column_bound(&pl, level, &limits).unwrap(),
                    "{} n={n} level={level}",
                    seq.describe()
                );
            }
        }
    }
}

#[test]
fn lipschitz_checks_refuse_infinite_eta() {
    let seq = CoefficientSequence::geometric(2, ratio(7, 10)).unwrap();
    assert!(check_lipschitz(&seq, 2, 2, &[(ratio(0, 1), ratio(1, 2))]).is_err());
}
