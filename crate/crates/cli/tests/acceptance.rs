//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Run with `cargo test -p takagi-cli --test acceptance`.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use takagi::counting::{
    graph_point_lower_count, make_strip, strip_mesh_count, verify_lemma_key_exhaustive,
    LocalizedScanner, Strip,
};
use takagi::dimension::{assouad_profile, assouad_slope, box_dimension_fit, CountKind, X0Strategy};
use takagi::oracle::{
    check_column_bound, check_lipschitz, check_midpoint_linearity, pl_graph_mesh_count,
};
use takagi::rational::{big_pow, ratio};
use takagi::series::{eval_certified, eval_exact, partial_sum_at};
use takagi::{CoefficientSequence, Limits, PartialSums, Rational, SignRule};

struct Outcome {
    ok: bool,
    detail: String,
}

type Criterion = (&'static str, fn() -> Outcome);

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        ok,
        detail: detail.into(),
    }
}

fn limits() -> Limits {
    Limits::default()
}

fn sign_sequences() -> Vec<CoefficientSequence> {
    let mut seqs = vec![
        CoefficientSequence::classical(),
        CoefficientSequence::signed_power(2, SignRule::Alternating).unwrap(),
    ];
    seqs.extend(
        (0..20).map(|s| CoefficientSequence::signed_power(2, SignRule::Seeded(s)).unwrap()),
    );
    seqs
}

fn key_count_exhaustive() -> Outcome {
    let mut rows = 0;
    let mut violations = 0;
    for seq in sign_sequences() {
        let sums = PartialSums::new(seq, limits());
        for n in 0..=8 {
            for m in 1..=6 {
                let found = verify_lemma_key_exhaustive(&sums, n, m).unwrap();
                rows += found.len();
                violations += found.iter().filter(|r| !r.check.ok).count();
            }
        }
    }
    outcome(
        violations == 0,
        format!("22 sequences, {rows} (n, m, i, y) keys, {violations} violations"),
    )
}

fn theorem_bound() -> Outcome {
    let mut windows = 0;
    let mut violations = 0;
    let mut worst: f64 = 0.0;
    for seq in sign_sequences() {
        let sums = PartialSums::new(seq, limits());
        for n in 0..=8 {
            for m in 1..=6 {
                for row in LocalizedScanner::new(&sums, n, m, 2)
                    .unwrap()
                    .scan_grid()
                    .unwrap()
                {
                    windows += 1;
                    let bound = row.theorem_bound.clone().expect("finite eta");
                    let ratio = row.bounds.upper as f64 / bound.to_string().parse::<f64>().unwrap();
                    worst = worst.max(ratio);
                    if row.within_theorem_bound() != Some(true) {
                        violations += 1;
                    }
                }
            }
        }
    }
    outcome(
        violations == 0,
        format!("{windows} windows, {violations} violations, max count/bound {worst:.3}"),
    )
}

fn assouad_dichotomy() -> Outcome {
    let ns: Vec<u32> = (2..=8).collect();
    let ms: Vec<u32> = (1..=8).collect();
    let half = PartialSums::new(CoefficientSequence::classical(), limits());
    let profile = assouad_profile(&half, &ns, &ms, X0Strategy::Grid, true, 2).unwrap();
    let upper = assouad_slope(&profile, 2, CountKind::Upper).unwrap().slope;
    let lower = assouad_slope(&profile, 2, CountKind::Lower).unwrap().slope;
    let steep = PartialSums::new(
        CoefficientSequence::geometric(2, ratio(7, 10)).unwrap(),
        limits(),
    );
    let profile = assouad_profile(&steep, &ns, &ms, X0Strategy::Grid, false, 2).unwrap();
    let steep_lower = assouad_slope(&profile, 2, CountKind::Lower).unwrap().slope;
    let band = |s: f64| (0.90..=1.12).contains(&s);
    outcome(
        band(upper) && band(lower) && steep_lower >= 1.2,
        format!("a=1/2 upper {upper:.4} lower {lower:.4} in [0.90, 1.12]; a=7/10 lower {steep_lower:.4} >= 1.2"),
    )
}

fn box_dimension() -> Outcome {
    let fit = |seq: CoefficientSequence, lo, hi| {
        let start = Instant::now();
        let f = box_dimension_fit(&PartialSums::new(seq, limits()), lo, hi, 2).unwrap();
        (f.estimate.slope, start.elapsed().as_secs_f64())
    };
    let target = 2.0 + 0.7f64.ln() / 2f64.ln();
    let (steep, t1) = fit(
        CoefficientSequence::geometric(2, ratio(7, 10)).unwrap(),
        6,
        16,
    );
    let (half, t2) = fit(CoefficientSequence::classical(), 6, 14);
    let (vdw, t3) = fit(CoefficientSequence::generalized(10).unwrap(), 2, 5);
    let unit = |s: f64| (0.95..=1.08).contains(&s);
    let fast = t1 < 60.0 && t2 < 60.0 && t3 < 60.0;
    outcome(
        (steep - target).abs() <= 0.10 && unit(half) && unit(vdw) && fast,
        format!(
            "a=7/10 {steep:.4} vs {target:.4} ({t1:.1}s); a=1/2 {half:.4} ({t2:.1}s); b=10 {vdw:.4} ({t3:.1}s)"
        ),
    )
}

fn oracle_equivalence() -> Outcome {
    let mut seqs = sign_sequences();
    seqs.push(CoefficientSequence::geometric(2, ratio(7, 10)).unwrap());
    seqs.push(CoefficientSequence::generalized(3).unwrap());
    seqs.push(
        CoefficientSequence::explicit(2, vec![ratio(1, 1), ratio(0, 1), ratio(-1, 4)], ratio(1, 3))
            .unwrap(),
    );
    let vdw = CoefficientSequence::generalized(10).unwrap();
    let mut cases = 0;
    let mut discrepancies = 0;
    for seq in seqs.into_iter().chain(std::iter::once(vdw)) {
        let top = match seq.base() {
            2 => 8,
            3 => 5,
            _ => 3,
        };
        let sums = PartialSums::new(seq, limits());
        for n in 0..=top {
            let hn = sums.get(n).unwrap();
            let walk = pl_graph_mesh_count(&hn, n, &limits()).unwrap().count;
            let fast =
                strip_mesh_count(&Strip::exact_graph(hn.clone()), n, None, &limits()).unwrap();
            let points = graph_point_lower_count(&sums, n, None, 0).unwrap();
            let strip =
                strip_mesh_count(&make_strip(&sums, n).unwrap(), n, None, &limits()).unwrap();
            cases += 1;
            if fast != walk || points > walk || walk > strip {
                discrepancies += 1;
            }
        }
    }
    outcome(
        discrepancies == 0,
        format!("{cases} (sequence, N) cases, {discrepancies} discrepancies"),
    )
}

fn exactness() -> Outcome {
    let start = Instant::now();
    let t = CoefficientSequence::classical();
    let signal = CoefficientSequence::signed_power(2, SignRule::Alternating).unwrap();
    let at = |seq: &CoefficientSequence, p: i64, level: u32| {
        eval_exact(seq, &BigInt::from(p), level).unwrap()
    };
    let checks = [
        at(&t, 1, 1) == ratio(1, 2),
        at(&t, 1, 2) == ratio(1, 2),
        at(&t, 1, 3) == ratio(3, 8),
        at(&signal, 1, 2) == ratio(0, 1),
        eval_certified(&t, &ratio(1, 3), &ratio(1, 1_000_000_000))
            .unwrap()
            .contains(&ratio(2, 3)),
    ];
    let elapsed = start.elapsed().as_secs_f64();
    let passed = checks.iter().filter(|&&c| c).count();
    outcome(
        passed == checks.len() && elapsed < 1.0,
        format!("{passed}/{} exact checks in {elapsed:.3}s", checks.len()),
    )
}

fn random_unit(rng: &mut ChaCha8Rng) -> Rational {
    let q: i64 = rng.gen_range(1..=1 << 24);
    ratio(rng.gen_range(0..=q), q)
}

fn property_suites() -> Outcome {
    const SAMPLES: usize = 1000;
    let seqs = sign_sequences();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut failures = [0usize; 4];
    for _ in 0..SAMPLES {
        let seq = &seqs[rng.gen_range(0..seqs.len())];
        let n = rng.gen_range(0..=12);
        let m = rng.gen_range(1..=12);

        let level = n + rng.gen_range(0..=6);
        let top = big_pow(2, level);
        let j = BigInt::from(rng.gen_range(0..=1u64 << level));
        let x = Rational::new(j.clone(), top);
        let gap = (eval_exact(seq, &j, level).unwrap() - partial_sum_at(seq, n, &x)).abs();
        if gap > Rational::new(1.into(), big_pow(2, n)) {
            failures[0] += 1;
        }

        if !check_lipschitz(seq, n, m, &[(random_unit(&mut rng), random_unit(&mut rng))]).unwrap() {
            failures[1] += 1;
        }

        let n_lin = n.min(10);
        let cell = rng.gen_range(0..2u64 << n_lin);
        if !check_midpoint_linearity(seq, n_lin, &[cell]).unwrap() {
            failures[2] += 1;
        }
    }
    let mut column_checks = 0;
    for seq in seqs.iter().take(4) {
        let sums = PartialSums::new(seq.clone(), limits());
        for n in 0..=12 {
            for level in [n, n + 1] {
                column_checks += 1;
                if !check_column_bound(&sums.get(n).unwrap(), level, &limits()).unwrap() {
                    failures[3] += 1;
                }
            }
        }
    }
    outcome(
        failures.iter().all(|&f| f == 0),
        format!(
            "containment {}/{SAMPLES}, lipschitz {}/{SAMPLES}, linearity {}/{SAMPLES}, column bound {}/{column_checks} failed",
            failures[0], failures[1], failures[2], failures[3]
        ),
    )
}

fn run_cli(out: &Path, workers: u32, args: &[&str]) {
    let status = Command::new(env!("CARGO_BIN_EXE_takagi"))
        .args([
            "--out",
            out.to_str().unwrap(),
            "--workers",
            &workers.to_string(),
            "--seed",
            "77",
        ])
        .args(args)
        .env_remove("TAKAGI_OUT_DIR")
        .output()
        .expect("run takagi");
    assert!(
        status.status.success(),
        "takagi {args:?} failed: {}",
        String::from_utf8_lossy(&status.stderr)
    );
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let verify = [
        "--signs",
        "seeded:5",
        "verify",
        "--n-max",
        "5",
        "--m-max",
        "4",
        "--samples",
        "200",
    ];
    let assouad = [
        "--a", "7/10", "assouad", "--n-max", "6", "--m-max", "5", "--sample", "64",
    ];
    let runs = [(1, "a"), (4, "b"), (4, "c"), (2, "d")];
    for (workers, tag) in runs {
        run_cli(&dir.path().join(format!("verify-{tag}")), workers, &verify);
        run_cli(
            &dir.path().join(format!("assouad-{tag}")),
            workers,
            &assouad,
        );
    }
    let mut compared = 0;
    let mut differing = 0;
    for (kind, files) in [
        ("verify", &["verify.csv", "theorem.csv"][..]),
        ("assouad", &["assouad.csv"][..]),
    ] {
        for file in files {
            let read = |tag: &str| {
                std::fs::read(dir.path().join(format!("{kind}-{tag}")).join(file)).unwrap()
            };
            let reference = read("a");
            for (_, tag) in &runs[1..] {
                compared += 1;
                if read(tag) != reference {
                    differing += 1;
                }
            }
        }
    }
    outcome(
        differing == 0,
        format!("{compared} CSV comparisons across 1/2/4 workers, {differing} differ"),
    )
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("key count bound, exhaustive", key_count_exhaustive),
        ("localized theorem bound", theorem_bound),
        ("localized slope dichotomy", assouad_dichotomy),
        ("box-counting slopes", box_dimension),
        ("oracle equivalence", oracle_equivalence),
        ("exact values", exactness),
        ("property suites", property_suites),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let secs = start.elapsed().as_secs_f64();
        println!(
            "criterion {}: {} {name}: {} [{secs:.1}s]",
            k + 1,
            if result.ok { "PASS" } else { "FAIL" },
            result.detail
        );
        failed += usize::from(!result.ok);
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
