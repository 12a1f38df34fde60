//! Dimension estimates from exact count tables.
//!
//! Counts stay exact integers up to this module; logs are taken in `f64`
//! only for the least-squares fits.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::counting::{connected_lower_count, make_strip, strip_mesh_count, LocalizedScanner};
use crate::error::{Error, Result};
use crate::series::PartialSums;
use crate::Rational;

/// Ordinary least-squares line through `(x, y)` points.
#[derive(Debug, Clone, PartialEq)]
pub struct DimensionEstimate {
    pub slope: f64,
    pub intercept: f64,
    pub residual_rms: f64,
    pub points: Vec<(f64, f64)>,
}

pub fn least_squares(points: Vec<(f64, f64)>) -> Result<DimensionEstimate> {
    if points.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "a fit needs at least 3 points, got {}",
            points.len()
        )));
    }
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData("all abscissae coincide".into()));
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let residual_rms = (points
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    if !slope.is_finite() {
        return Err(Error::InsufficientData("non-finite slope".into()));
    }
    Ok(DimensionEstimate {
        slope,
        intercept,
        residual_rms,
        points,
    })
}

/// Global counts at one scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoxRow {
    pub level: u32,
    pub lower: u64,
    pub upper: u64,
}

impl BoxRow {
    pub fn geometric_mean(&self) -> f64 {
        ((self.lower as f64) * (self.upper as f64)).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoxFit {
    /// Fit through the geometric means of the lower and upper counts.
    pub estimate: DimensionEstimate,
    pub lower: DimensionEstimate,
    pub upper: DimensionEstimate,
    pub rows: Vec<BoxRow>,
}

/// Lower ([`connected_lower_count`] at refinement `q`) and upper (strip `S_N`) counts of
/// the whole graph at scale `b^{-N}`.
pub fn box_counts(sums: &PartialSums, level: u32, refinement: u32) -> Result<BoxRow> {
    let upper = strip_mesh_count(&make_strip(sums, level)?, level, None, sums.limits())?;
    let lower = connected_lower_count(sums, level, None, refinement)?;
    Ok(BoxRow {
        level,
        lower,
        upper,
    })
}

/// Least-squares slope of `log 𝒩` against `N log b` over `N_min..=N_max`.
pub fn box_dimension_fit(
    sums: &PartialSums,
    level_min: u32,
    level_max: u32,
    refinement: u32,
) -> Result<BoxFit> {
    if level_max < level_min + 2 {
        return Err(Error::InsufficientData(format!(
            "box fit needs N_max - N_min >= 2, got {level_min}..={level_max}"
        )));
    }
    let rows = (level_min..=level_max)
        .map(|n| box_counts(sums, n, refinement))
        .collect::<Result<Vec<_>>>()?;
    let log_b = (sums.seq().base() as f64).ln();
    let fit = |count: &dyn Fn(&BoxRow) -> f64| {
        least_squares(
            rows.iter()
                .map(|r| (r.level as f64 * log_b, count(r).ln()))
                .collect(),
        )
    };
    Ok(BoxFit {
        estimate: fit(&|r| r.geometric_mean())?,
        lower: fit(&|r| r.lower as f64)?,
        upper: fit(&|r| r.upper as f64)?,
        rows,
    })
}

/// How window centers `x0` are chosen for a localized profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum X0Strategy {
    /// Every level-`n` grid point `j / b^n`.
    Grid,
    /// `size` points `j / b^{n+m}` drawn uniformly with a seeded ChaCha8
    /// stream (one stream per `(n, m)`).
    Seeded { size: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProfileRow {
    pub n: u32,
    pub m: u32,
    pub windows: usize,
    pub max_lower: u64,
    pub max_upper: Option<u64>,
    pub bound: Option<BigInt>,
}

fn window_centers(base: u64, n: u32, m: u32, strategy: X0Strategy) -> Vec<Rational> {
    match strategy {
        X0Strategy::Grid => {
            let top = base.pow(n);
            (0..=top)
                .map(|j| Rational::new(BigInt::from(j), BigInt::from(top)))
                .collect()
        }
        X0Strategy::Seeded { size, seed } => {
            let top = base.pow(n + m);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream((u64::from(n) << 32) | u64::from(m));
            let mut js: Vec<u64> = (0..size).map(|_| rng.gen_range(0..=top)).collect();
            js.sort_unstable();
            js.dedup();
            js.into_iter()
                .map(|j| Rational::new(BigInt::from(j), BigInt::from(top)))
                .collect()
        }
    }
}

/// Maximum localized counts over the chosen centers for every `(n, m)`.
/// Rows are ordered by `n`, then `m`.
pub fn assouad_profile(
    sums: &PartialSums,
    n_list: &[u32],
    m_list: &[u32],
    strategy: X0Strategy,
    with_upper: bool,
    refinement: u32,
) -> Result<Vec<ProfileRow>> {
    if with_upper && !sums.seq().eta().is_finite() {
        return Err(Error::EtaInfinite("an upper-count profile"));
    }
    let base = sums.seq().base();
    let mut out = Vec::with_capacity(n_list.len() * m_list.len());
    for &n in n_list {
        for &m in m_list {
            let scanner = LocalizedScanner::new(sums, n, m, refinement)?;
            let centers = window_centers(base, n, m, strategy);
            let rows = scanner.scan(&centers)?;
            let max_lower = rows.par_iter().map(|r| r.bounds.lower).max().unwrap_or(0);
            let max_upper = rows.par_iter().map(|r| r.bounds.upper).max().unwrap_or(0);
            out.push(ProfileRow {
                n,
                m,
                windows: rows.len(),
                max_lower,
                max_upper: with_upper.then_some(max_upper),
                bound: rows.first().and_then(|r| r.theorem_bound.clone()),
            });
        }
    }
    Ok(out)
}

/// Per-`m` maxima over `n` of a profile: `(m, max_lower, max_upper, bound)`.
pub fn profile_by_m(profile: &[ProfileRow]) -> Vec<(u32, u64, Option<u64>, Option<BigInt>)> {
    let mut ms: Vec<u32> = profile.iter().map(|r| r.m).collect();
    ms.sort_unstable();
    ms.dedup();
    ms.into_iter()
        .map(|m| {
            let rows: Vec<&ProfileRow> = profile.iter().filter(|r| r.m == m).collect();
            let lower = rows.iter().map(|r| r.max_lower).max().unwrap_or(0);
            let upper = rows.iter().filter_map(|r| r.max_upper).max();
            let bound = rows.iter().find_map(|r| r.bound.clone());
            (m, lower, upper, bound)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CountKind {
    Lower,
    Upper,
}

/// Slope of `log_b(max count)` against `m`, the max taken over `n` and `x0`.
pub fn assouad_slope(
    profile: &[ProfileRow],
    base: u64,
    kind: CountKind,
) -> Result<DimensionEstimate> {
    let log_b = (base as f64).ln();
    let mut points = Vec::new();
    for (m, lower, upper, _) in profile_by_m(profile) {
        let count = match kind {
            CountKind::Lower => Some(lower),
            CountKind::Upper => upper,
        };
        let Some(count) = count else {
            return Err(Error::InsufficientData(
                "profile has no upper counts".into(),
            ));
        };
        if count == 0 {
            return Err(Error::InsufficientData(format!("zero count at m = {m}")));
        }
        points.push((m as f64, (count as f64).ln() / log_b));
    }
    least_squares(points)
}

/// `1 + log_b(3(10η + mη + 4)) / m`: the largest slope the theorem bound
/// permits for a profile ending at `m`.
pub fn theorem_slope_ceiling(bound_at_m: &BigInt, base: u64, m: u32) -> f64 {
    let ratio = bound_at_m.to_f64().unwrap_or(f64::INFINITY) / (base as f64).powi(m as i32);
    1.0 + ratio.ln() / (base as f64).ln() / m as f64
}
