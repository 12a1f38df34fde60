#![allow(dead_code)]

use takagi::rational::ratio;
use takagi::{CoefficientSequence, SignRule};

/// Sequences with finite η that every suite runs over.
pub fn finite_eta_sequences() -> Vec<CoefficientSequence> {
    let mut seqs = vec![
        CoefficientSequence::classical(),
        CoefficientSequence::signed_power(2, SignRule::Alternating).unwrap(),
        CoefficientSequence::signed_power(2, SignRule::Cyclic(vec![1, 1, -1])).unwrap(),
        CoefficientSequence::geometric(2, ratio(1, 3)).unwrap(),
        CoefficientSequence::generalized(3).unwrap(),
        CoefficientSequence::explicit(
            2,
            vec![ratio(1, 1), ratio(0, 1), ratio(-1, 4), ratio(1, 16)],
            ratio(1, 3),
        )
        .unwrap(),
    ];
    seqs.extend((0..4).map(|s| CoefficientSequence::signed_power(2, SignRule::Seeded(s)).unwrap()));
    seqs
}

/// Finite-η sequences plus one with a > 1/b.
pub fn all_sequences() -> Vec<CoefficientSequence> {
    let mut seqs = finite_eta_sequences();
    seqs.push(CoefficientSequence::geometric(2, ratio(7, 10)).unwrap());
    seqs
}

/// Deepest level worth exhausting for this base.
pub fn max_level(base: u64, binary_max: u32) -> u32 {
    match base {
        2 => binary_max,
        3 => binary_max * 2 / 3,
        _ => binary_max / 3,
    }
}
