use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use takagi::counting::{verify_lemma_key_exhaustive, LocalizedScanner};
use takagi::dimension::{
    assouad_profile, assouad_slope, box_dimension_fit, profile_by_m, theorem_slope_ceiling,
    CountKind, X0Strategy,
};
use takagi::oracle::{
    check_column_bound, check_lipschitz, check_midpoint_linearity, dense_containment_check,
};
use takagi::rational::{badic_level, big_pow, format_decimal, format_exact, parse_rational};
use takagi::report::{
    write_box_csv, write_lemma_csv, write_localized_csv, write_pl_csv, write_profile_csv,
};
use takagi::series::{build_window_sum, eval_certified, eval_exact};
use takagi::{Error, PartialSums, Rational};

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::output::Sink;

fn sequence_json(cfg: &RunConfig) -> Value {
    json!({
        "sequence": cfg.seq.describe(),
        "base": cfg.seq.base(),
        "eta": cfg.seq.eta().to_string(),
        "seed": cfg.seed,
    })
}

fn scaled(digits: u32) -> Rational {
    Rational::from_integer(big_pow(10, digits))
}

/// `r` rounded down to `digits` decimals.
fn decimal_floor(r: &Rational, digits: u32) -> String {
    let s = scaled(digits);
    format_decimal(&((r * &s).floor() / &s), digits)
}

/// `r` rounded up to `digits` decimals.
fn decimal_ceil(r: &Rational, digits: u32) -> String {
    let s = scaled(digits);
    format_decimal(&((r * &s).ceil() / &s), digits)
}

pub fn eval(cfg: &RunConfig, x: &str, eps: &str, digits: u32) -> CliResult<()> {
    let x = parse_rational(x)?;
    if x.is_negative() || x > Rational::one() {
        return Err(Error::Domain(format!("x = {} outside [0, 1]", format_exact(&x))).into());
    }
    match badic_level(&x, cfg.seq.base()) {
        Some((j, level)) => {
            let v = eval_exact(&cfg.seq, &j, level)?;
            println!("{}", format_exact(&v));
        }
        None => {
            let eps = parse_rational(eps)?;
            let v = eval_certified(&cfg.seq, &x, &eps)?;
            println!(
                "[{}, {}] center {} radius {} terms {}",
                decimal_floor(&v.lo(), digits),
                decimal_ceil(&v.hi(), digits),
                format_decimal(&v.center, digits),
                decimal_ceil(&v.radius, digits),
                v.terms
            );
        }
    }
    Ok(())
}

pub fn psum(
    cfg: &RunConfig,
    sink: &Sink,
    n: u32,
    m: Option<u32>,
    digits: u32,
    exact: bool,
) -> CliResult<()> {
    let pl = match m {
        Some(m) => build_window_sum(&cfg.seq, n, m, &cfg.limits)?,
        None => PartialSums::new(cfg.seq.clone(), cfg.limits)
            .get(n)?
            .as_ref()
            .clone(),
    };
    let mut buf = Vec::new();
    write_pl_csv(&pl, digits, exact, &mut buf)?;
    sink.primary("psum.csv", &buf)
}

#[derive(Debug, Clone)]
pub struct VerifyParams {
    pub n_max: u32,
    pub m_max: u32,
    pub samples: u64,
    pub property_max: u32,
    pub refine: u32,
}

fn suite(name: &str, checks: usize, failures: usize) -> Value {
    eprintln!(
        "{name:<12} {} ({checks} checks, {failures} failed)",
        if failures == 0 { "PASS" } else { "FAIL" }
    );
    json!({ "suite": name, "checks": checks, "failures": failures })
}

fn random_unit_rational(rng: &mut ChaCha8Rng) -> Rational {
    let q: i64 = rng.gen_range(1..=1 << 20);
    let p: i64 = rng.gen_range(0..=q);
    Rational::new(p.into(), q.into())
}

pub fn verify(cfg: &RunConfig, sink: &Sink, p: &VerifyParams) -> CliResult<()> {
    cfg.seq.eta().require("verification")?;
    let seq = &cfg.seq;
    let b = seq.base();
    let sums = PartialSums::new(seq.clone(), cfg.limits);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut suites = Vec::new();
    let mut total_failures = 0;

    let levels = p.n_max + p.m_max;
    let mut fails = 0;
    for n in 0..=levels {
        fails += usize::from(!dense_containment_check(seq, n, p.samples)?);
    }
    total_failures += fails;
    suites.push(suite("containment", levels as usize + 1, fails));

    let mut fails = 0;
    let mut checks = 0;
    for n in 0..=p.property_max.min(10) {
        let cells = 2 * b.checked_pow(n).unwrap_or(u64::MAX / 2);
        let picks: Vec<u64> = if cells <= p.samples {
            (0..cells).collect()
        } else {
            (0..p.samples).map(|_| rng.gen_range(0..cells)).collect()
        };
        checks += picks.len();
        fails += usize::from(!check_midpoint_linearity(seq, n, &picks)?);
    }
    total_failures += fails;
    suites.push(suite("linearity", checks, fails));

    let mut fails = 0;
    for _ in 0..p.samples {
        let n = rng.gen_range(0..=p.property_max);
        let m = rng.gen_range(1..=p.property_max.max(1));
        let pair = (
            random_unit_rational(&mut rng),
            random_unit_rational(&mut rng),
        );
        fails += usize::from(!check_lipschitz(seq, n, m, &[pair])?);
    }
    total_failures += fails;
    suites.push(suite("lipschitz", p.samples as usize, fails));

    let mut fails = 0;
    let mut checks = 0;
    for n in 0..=p.property_max {
        for level in n..=n + 1 {
            if b.checked_pow(level).is_none_or(|c| c > 1 << 14) {
                continue;
            }
            checks += 1;
            fails += usize::from(!check_column_bound(
                sums.get(n)?.as_ref(),
                level,
                &cfg.limits,
            )?);
        }
    }
    total_failures += fails;
    suites.push(suite("oscillation", checks, fails));

    let mut lemma_rows = Vec::new();
    for n in 0..=p.n_max {
        for m in 1..=p.m_max {
            lemma_rows.extend(verify_lemma_key_exhaustive(&sums, n, m)?);
        }
    }
    let fails = lemma_rows.iter().filter(|r| !r.check.ok).count();
    total_failures += fails;
    suites.push(suite("key-count", lemma_rows.len(), fails));

    let mut theorem_rows = Vec::new();
    for n in 0..=p.n_max {
        for m in 1..=p.m_max {
            theorem_rows.extend(LocalizedScanner::new(&sums, n, m, p.refine)?.scan_grid()?);
        }
    }
    let fails = theorem_rows
        .iter()
        .filter(|r| r.within_theorem_bound() != Some(true))
        .count();
    total_failures += fails;
    suites.push(suite("theorem", theorem_rows.len(), fails));

    let mut buf = Vec::new();
    write_lemma_csv(&lemma_rows, &mut buf)?;
    sink.primary("verify.csv", &buf)?;
    let mut buf = Vec::new();
    write_localized_csv(&theorem_rows, &mut buf)?;
    sink.secondary("theorem.csv", &buf)?;
    sink.summary(&json!({
        "config": sequence_json(cfg),
        "n_max": p.n_max,
        "m_max": p.m_max,
        "samples": p.samples,
        "property_max": p.property_max,
        "refine": p.refine,
        "suites": suites,
        "ok": total_failures == 0,
    }))?;
    if total_failures > 0 {
        return Err(CliError::VerificationFailed(total_failures));
    }
    Ok(())
}

pub fn boxdim(cfg: &RunConfig, sink: &Sink, n_min: u32, n_max: u32, refine: u32) -> CliResult<()> {
    let sums = PartialSums::new(cfg.seq.clone(), cfg.limits);
    let fit = box_dimension_fit(&sums, n_min, n_max, refine)?;
    let mut buf = Vec::new();
    write_box_csv(&fit.rows, &mut buf)?;
    sink.primary("boxdim.csv", &buf)?;
    let expected = match cfg.seq.kind() {
        takagi::SequenceKind::Geometric { ratio } => {
            let a = takagi::rational::to_f64(ratio);
            let b = cfg.seq.base() as f64;
            Some(if a * b > 1.0 {
                2.0 + a.ln() / b.ln()
            } else {
                1.0
            })
        }
        _ => None,
    };
    sink.summary(&json!({
        "config": sequence_json(cfg),
        "n_min": n_min,
        "n_max": n_max,
        "refine": refine,
        "slope": fit.estimate.slope,
        "intercept": fit.estimate.intercept,
        "residual_rms": fit.estimate.residual_rms,
        "lower_slope": fit.lower.slope,
        "upper_slope": fit.upper.slope,
        "expected": expected,
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Counts {
    /// Upper counts when η is finite, otherwise lower only.
    Auto,
    Lower,
    Both,
}

#[derive(Debug, Clone)]
pub struct AssouadParams {
    pub n_min: u32,
    pub n_max: u32,
    pub m_min: u32,
    pub m_max: u32,
    pub sample: Option<usize>,
    pub refine: u32,
    pub counts: Counts,
}

pub fn assouad(cfg: &RunConfig, sink: &Sink, p: &AssouadParams) -> CliResult<()> {
    let sums = PartialSums::new(cfg.seq.clone(), cfg.limits);
    let with_upper = match p.counts {
        Counts::Auto => cfg.seq.eta().is_finite(),
        Counts::Lower => false,
        Counts::Both => true,
    };
    let strategy = match p.sample {
        Some(size) => X0Strategy::Seeded {
            size,
            seed: cfg.seed,
        },
        None => X0Strategy::Grid,
    };
    let ns: Vec<u32> = (p.n_min..=p.n_max).collect();
    let ms: Vec<u32> = (p.m_min..=p.m_max).collect();
    let profile = assouad_profile(&sums, &ns, &ms, strategy, with_upper, p.refine)?;
    let mut buf = Vec::new();
    write_profile_csv(&profile, &mut buf)?;
    sink.primary("assouad.csv", &buf)?;

    let lower = assouad_slope(&profile, cfg.seq.base(), CountKind::Lower)?;
    let upper = if with_upper {
        Some(assouad_slope(&profile, cfg.seq.base(), CountKind::Upper)?)
    } else {
        None
    };
    let ceiling = profile_by_m(&profile).last().and_then(|(m, _, _, bound)| {
        bound
            .as_ref()
            .map(|bd| theorem_slope_ceiling(bd, cfg.seq.base(), *m))
    });
    sink.summary(&json!({
        "config": sequence_json(cfg),
        "n": [p.n_min, p.n_max],
        "m": [p.m_min, p.m_max],
        "x0": match p.sample { Some(s) => json!({ "seeded": s }), None => json!("grid") },
        "refine": p.refine,
        "lower_slope": lower.slope,
        "upper_slope": upper.as_ref().map(|e| e.slope),
        "lower_residual_rms": lower.residual_rms,
        "theorem_slope_ceiling": ceiling,
    }))
}

pub fn render(cfg: &RunConfig, sink: &Sink, n: u32, points_log2: u32, eps: &str) -> CliResult<()> {
    let eps = parse_rational(eps)?;
    if !eps.is_positive() {
        return Err(Error::Domain("eps must be positive".into()).into());
    }
    let sums = PartialSums::new(cfg.seq.clone(), cfg.limits);
    let hn = sums.get(n)?;
    let halfwidth = cfg.seq.tail_bound(n);
    let count = 1u64 << points_log2;
    let step = Rational::new(BigInt::one(), BigInt::from(count));
    let mut samples = Vec::with_capacity(count as usize + 1);
    let mut x = Rational::zero();
    for _ in 0..=count {
        let f = eval_certified(&cfg.seq, &x, &eps)?;
        let h = hn.eval(&x)?;
        samples.push(crate::svg::Sample { x: x.clone(), f, h });
        x += &step;
    }
    let svg = crate::svg::render(&hn, &halfwidth, &samples);
    let csv = crate::svg::samples_csv(&samples, &halfwidth, 12);
    sink.primary("render.svg", svg.as_bytes())?;
    sink.secondary("render.csv", csv.as_bytes())
}
