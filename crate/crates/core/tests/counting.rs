//! Fast counters against the brute-force segment walker, and the ordering
//! invariants between the different counts.

mod common;

use std::sync::Arc;

use takagi::counting::{
    connected_lower_count, graph_point_lower_count, make_strip, strip_mesh_count,
    verify_lemma_key_exhaustive, LocalizedScanner, MeshCounter, Strip, Window,
};
use takagi::dimension::box_counts;
use takagi::oracle::pl_graph_mesh_count;
use takagi::rational::ratio;
use takagi::{CoefficientSequence, Limits, PartialSums, Rational};

fn limits() -> Limits {
    Limits::default()
}

#[test]
fn exact_graph_count_matches_segment_walk() {
    for seq in common::all_sequences() {
        let sums = PartialSums::new(seq.clone(), limits());
        for n in 0..=common::max_level(seq.base(), 8) {
            let hn = sums.get(n).unwrap();
            let strip = Strip::exact_graph(Arc::clone(&hn));
            for level in n..=n + 1 {
                if seq.base().pow(level) > 1 << 10 {
                    continue;
                }
                let fast = strip_mesh_count(&strip, level, None, &limits()).unwrap();
                let walk = pl_graph_mesh_count(&hn, level, &limits()).unwrap();
                assert_eq!(fast, walk.count, "{} n={n} level={level}", seq.describe());
                let columns = MeshCounter::new(&strip, level, &limits())
                    .unwrap()
                    .column_counts();
                let walked: Vec<u64> = walk.per_column().values().copied().collect();
                assert_eq!(columns, walked, "{} n={n} level={level}", seq.describe());
            }
        }
    }
}

#[test]
fn sandwich_between_points_graph_and_strip() {
    for seq in common::all_sequences() {
        let sums = PartialSums::new(seq.clone(), limits());
        for n in 0..=common::max_level(seq.base(), 8) {
            let hn = sums.get(n).unwrap();
            let graph = pl_graph_mesh_count(&hn, n, &limits()).unwrap().count;
            let points = graph_point_lower_count(&sums, n, None, 0).unwrap();
            let strip =
                strip_mesh_count(&make_strip(&sums, n).unwrap(), n, None, &limits()).unwrap();
            assert!(
                points <= graph && graph <= strip,
                "{} n={n}: {points} {graph} {strip}",
                seq.describe()
            );
        }
    }
}

#[test]
fn lower_counts_order_and_refine() {
    for seq in common::all_sequences() {
        let sums = PartialSums::new(seq.clone(), limits());
        for n in 1..=common::max_level(seq.base(), 7) {
            let mut previous = 0;
            for q in 0..=2 {
                let points = graph_point_lower_count(&sums, n, None, q).unwrap();
                let connected = connected_lower_count(&sums, n, None, q).unwrap();
                assert!(points <= connected);
                assert!(connected >= previous, "{} n={n} q={q}", seq.describe());
                previous = connected;
            }
            let row = box_counts(&sums, n, 2).unwrap();
            assert!(row.lower <= row.upper, "{} n={n}", seq.describe());
        }
    }
}

#[test]
fn strip_count_grows_with_halfwidth() {
    for seq in common::finite_eta_sequences() {
        let sums = PartialSums::new(seq.clone(), limits());
        let n = common::max_level(seq.base(), 6);
        let strip = make_strip(&sums, n).unwrap();
        let mut previous = 0;
        for k in 0..6 {
            let wider = strip
                .with_halfwidth(strip.halfwidth() * ratio(k, 2))
                .unwrap();
            let count = strip_mesh_count(&wider, n + 1, None, &limits()).unwrap();
            assert!(count >= previous);
            previous = count;
        }
    }
}

#[test]
fn window_counts_decompose_by_columns() {
    let sums = PartialSums::new(CoefficientSequence::classical(), limits());
    let strip = make_strip(&sums, 5).unwrap();
    let counter = MeshCounter::new(&strip, 7, &limits()).unwrap();
    let columns = counter.column_counts();
    assert_eq!(columns.iter().sum::<u64>(), counter.total());
    let tall = |lo: Rational, hi: Rational| Window {
        x_lo: lo,
        x_hi: hi,
        y_lo: ratio(-10, 1),
        y_hi: ratio(10, 1),
    };
    for (a, b) in [(0, 128), (3, 9), (17, 18), (64, 128)] {
        let w = tall(ratio(a, 128), ratio(b, 128));
        let expect: u64 = columns[a as usize..b as usize].iter().sum();
        assert_eq!(counter.count(Some(&w)), expect);
    }
    // a window inside one column snaps outward to the whole column
    let w = tall(ratio(1, 1000), ratio(2, 1000));
    assert_eq!(counter.count(Some(&w)), columns[0]);
}

#[test]
fn windowed_lower_bounds_stay_below_upper() {
    for seq in common::finite_eta_sequences() {
        let sums = PartialSums::new(seq.clone(), limits());
        let n = common::max_level(seq.base(), 4);
        for m in 1..=3 {
            let scanner = LocalizedScanner::new(&sums, n, m, 2).unwrap();
            for row in scanner.scan_grid().unwrap() {
                assert!(
                    row.bounds.lower <= row.bounds.upper,
                    "{} x0={}",
                    seq.describe(),
                    row.x0
                );
            }
        }
    }
}

#[test]
fn parallel_results_do_not_depend_on_thread_count() {
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        pool.install(|| {
            let sums = PartialSums::new(CoefficientSequence::classical(), limits());
            let lemma = verify_lemma_key_exhaustive(&sums, 4, 3).unwrap();
            let local = LocalizedScanner::new(&sums, 4, 3, 2)
                .unwrap()
                .scan_grid()
                .unwrap();
            let boxes = box_counts(&sums, 9, 2).unwrap();
            (lemma, local, boxes)
        })
    };
    let one = run(1);
    assert_eq!(one, run(4));
    assert_eq!(one, run(3));
}
