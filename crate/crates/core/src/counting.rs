//! Strip enclosures of the graph and exact mesh-cell counts.
//!
//! Cells are half-open, `[iδ,(i+1)δ) × [jδ,(j+1)δ)` with `δ = b^{-N}`, and the
//! graph is taken over `x ∈ [0, 1)`, so every point lies in exactly one cell
//! and the column range is `0 ≤ i < b^N`. A value sitting on a horizontal grid
//! line belongs to the cell above the line (the one whose lower edge it is).
//!
//! Upper counts come from strips `{|y − H_n(x)| ≤ w}` that contain the graph;
//! lower counts from exact graph points at b-adic abscissae.

use std::cmp::Ordering;
use std::ops::Range;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rational::{
    badic_level, big_pow, ceil, ceil_div, floor, floor_div, format_exact, lcm, Rational,
};
use crate::series::{eval_exact, Limits, PartialSums, PiecewiseLinearFunction};

/// `{(x, y) : x ∈ [0,1], |center(x) − y| ≤ halfwidth}`.
#[derive(Debug, Clone)]
pub struct Strip {
    center: Arc<PiecewiseLinearFunction>,
    halfwidth: Rational,
}

impl Strip {
    pub fn new(center: Arc<PiecewiseLinearFunction>, halfwidth: Rational) -> Result<Self> {
        if halfwidth.is_negative() {
            return Err(Error::Domain("strip half-width must be nonnegative".into()));
        }
        Ok(Self { center, halfwidth })
    }

    /// The graph of `pl` itself.
    pub fn exact_graph(pl: Arc<PiecewiseLinearFunction>) -> Self {
        Self {
            center: pl,
            halfwidth: Rational::zero(),
        }
    }

    pub fn center(&self) -> &PiecewiseLinearFunction {
        &self.center
    }

    pub fn halfwidth(&self) -> &Rational {
        &self.halfwidth
    }

    pub fn level(&self) -> u32 {
        self.center.level()
    }

    pub fn with_halfwidth(&self, halfwidth: Rational) -> Result<Self> {
        Self::new(Arc::clone(&self.center), halfwidth)
    }

    pub fn contains(&self, x: &Rational, y: &Rational) -> Result<bool> {
        Ok((self.center.eval(x)? - y).abs() <= self.halfwidth)
    }
}

/// `S_n` with the tightest certified half-width, `tail_bound(n)`.
pub fn make_strip(sums: &PartialSums, n: u32) -> Result<Strip> {
    Strip::new(sums.get(n)?, sums.seq().tail_bound(n))
}

/// `S_n` with the half-width `η b^{-n}` used by the counting lemma.
pub fn eta_strip(sums: &PartialSums, n: u32) -> Result<Strip> {
    let eta = sums
        .seq()
        .eta()
        .require("the eta-normalized strip")?
        .clone();
    Strip::new(
        sums.get(n)?,
        eta / Rational::from_integer(big_pow(sums.seq().base(), n)),
    )
}

/// Counting region: `x ∈ [x_lo, x_hi)` (half-open like the cells) and
/// `y ∈ [y_lo, y_hi]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Window {
    pub x_lo: Rational,
    pub x_hi: Rational,
    pub y_lo: Rational,
    pub y_hi: Rational,
}

impl Window {
    /// `[(i−1)/b^n, i/b^n) × [y − η b^{-n}, y + η b^{-n}]` for `1 ≤ i ≤ b^n`.
    pub fn lemma(base: u64, n: u32, i: u64, y: &Rational, eta: &Rational) -> Self {
        let scale = Rational::from_integer(big_pow(base, n));
        let h = eta / &scale;
        Self {
            x_lo: Rational::from_integer(BigInt::from(i - 1)) / &scale,
            x_hi: Rational::from_integer(BigInt::from(i)) / &scale,
            y_lo: y - &h,
            y_hi: y + h,
        }
    }

    /// The square `Q((x0, y0), b^{-n})` clipped to `[0, 1] × ℝ`.
    pub fn around(base: u64, x0: &Rational, y0: &Rational, n: u32) -> Self {
        let h = Rational::new(BigInt::one(), big_pow(base, n));
        let zero = Rational::zero();
        let one = Rational::one();
        let x_lo = x0 - &h;
        let x_hi = x0 + &h;
        Self {
            x_lo: if x_lo < zero { zero } else { x_lo },
            x_hi: if x_hi > one { one } else { x_hi },
            y_lo: y0 - &h,
            y_hi: y0 + h,
        }
    }

    /// Columns at scale `b^{-level}` meeting `[x_lo, x_hi)`, widened outward to
    /// whole columns and clipped to `[0, b^level)`.
    pub fn columns(&self, base: u64, level: u32) -> Range<u64> {
        let scale = Rational::from_integer(big_pow(base, level));
        let top = big_pow(base, level);
        let clamp = |v: BigInt| -> u64 {
            if v.is_negative() {
                0
            } else if v > top {
                top.to_u64().expect("column count fits u64")
            } else {
                v.to_u64().expect("column fits u64")
            }
        };
        if self.x_lo >= self.x_hi {
            return 0..0;
        }
        clamp(floor(&(&self.x_lo * &scale)))..clamp(ceil(&(&self.x_hi * &scale)))
    }
}

/// Exact bounds on a mesh count: `lower ≤ 𝒩_{b^{-level}} ≤ upper`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountBounds {
    pub lower: u64,
    pub upper: u64,
    pub level: u32,
    pub window: Option<Window>,
}

/// y-extent of the strip over one half-open column, in units of `1/K`.
#[derive(Debug, Clone)]
struct Span {
    lo: BigInt,
    lo_closed: bool,
    hi: BigInt,
    hi_closed: bool,
    row_lo: i128,
    row_hi: i128,
}

impl Span {
    /// Values attained over a half-open x-range: the closed hull of `vmin..=vmax`
    /// joined with the approach to the excluded right-end value `end`, then
    /// widened by `width`. Everything is in units of `1/units`.
    fn new(
        vmin: BigInt,
        vmax: BigInt,
        end: BigInt,
        width: &BigInt,
        scale: &BigInt,
        units: &BigInt,
    ) -> Self {
        let (bottom, lo_closed) = if vmin <= end {
            (vmin, true)
        } else {
            (end.clone(), false)
        };
        let (top, hi_closed) = if vmax >= end {
            (vmax, true)
        } else {
            (end, false)
        };
        let lo = bottom - width;
        let hi = top + width;
        let row_lo = to_row(floor_div(&(&lo * scale), units));
        let row_hi = if hi_closed {
            to_row(floor_div(&(&hi * scale), units))
        } else {
            to_row(ceil_div(&(&hi * scale), units)) - 1
        };
        Span {
            lo,
            lo_closed,
            hi,
            hi_closed,
            row_lo,
            row_hi,
        }
    }

    fn rows(&self) -> u64 {
        (self.row_hi - self.row_lo + 1) as u64
    }
}

/// A closed y-range prepared for one counter's units.
struct YRange {
    lo_scaled: Rational,
    hi_scaled: Rational,
    row_lo: i128,
    row_hi: i128,
}

impl YRange {
    fn new(lo: &Rational, hi: &Rational, units: &BigInt, scale: &BigInt) -> Self {
        let units = Rational::from_integer(units.clone());
        let scale = Rational::from_integer(scale.clone());
        YRange {
            lo_scaled: lo * &units,
            hi_scaled: hi * &units,
            row_lo: to_row(floor(&(lo * &scale))),
            row_hi: to_row(floor(&(hi * &scale))),
        }
    }
}

fn cmp_int_rat(a: &BigInt, r: &Rational) -> Ordering {
    (a * r.denom()).cmp(r.numer())
}

fn to_row(v: BigInt) -> i128 {
    v.to_i128().expect("row index fits i128")
}

/// Per-column strip extents at one scale; answers full and windowed counts.
#[derive(Debug, Clone)]
pub struct MeshCounter {
    base: u64,
    level: u32,
    units: BigInt,
    scale: BigInt,
    spans: Vec<Span>,
}

impl MeshCounter {
    pub fn new(strip: &Strip, level: u32, limits: &Limits) -> Result<Self> {
        if level < strip.level() {
            return Err(Error::Precondition(format!(
                "mesh level {level} is coarser than the strip level {}",
                strip.level()
            )));
        }
        let refined;
        let pl = if level == strip.level() {
            strip.center()
        } else {
            refined = strip.center().refine(level, limits)?;
            &refined
        };
        let base = pl.base();
        let units = lcm(pl.denom(), strip.halfwidth().denom());
        let factor = &units / pl.denom();
        let width = strip.halfwidth().numer() * (&units / strip.halfwidth().denom());
        let scale = big_pow(base, level);
        let columns = (pl.cells() / 2) as usize;
        let numers = pl.numers();
        let scaled = |idx: usize| -> BigInt {
            if factor.is_one() {
                numers[idx].clone()
            } else {
                &numers[idx] * &factor
            }
        };
        let spans = (0..columns)
            .into_par_iter()
            .map(|c| {
                // a column [cδ, (c+1)δ) holds grid points 2c and 2c+1; 2c+2 is its open end
                let (a, mid) = (scaled(2 * c), scaled(2 * c + 1));
                let (vmin, vmax) = if a <= mid { (a, mid) } else { (mid, a) };
                Span::new(vmin, vmax, scaled(2 * c + 2), &width, &scale, &units)
            })
            .collect();
        Ok(Self {
            base,
            level,
            units,
            scale,
            spans,
        })
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn columns(&self) -> u64 {
        self.spans.len() as u64
    }

    /// Cells met in each column, in column order.
    pub fn column_counts(&self) -> Vec<u64> {
        self.spans.iter().map(Span::rows).collect()
    }

    pub fn total(&self) -> u64 {
        self.spans.par_iter().map(Span::rows).sum()
    }

    fn rows_in(span: &Span, y: &YRange) -> u64 {
        match cmp_int_rat(&span.lo, &y.hi_scaled) {
            Ordering::Greater => return 0,
            Ordering::Equal if !span.lo_closed => return 0,
            _ => {}
        }
        match cmp_int_rat(&span.hi, &y.lo_scaled) {
            Ordering::Less => return 0,
            Ordering::Equal if !span.hi_closed => return 0,
            _ => {}
        }
        let lo = span.row_lo.max(y.row_lo);
        let hi = span.row_hi.min(y.row_hi);
        if hi < lo {
            0
        } else {
            (hi - lo + 1) as u64
        }
    }

    fn count_columns(&self, cols: Range<u64>, y: Option<&YRange>) -> u64 {
        let spans = &self.spans[cols.start as usize..cols.end as usize];
        match y {
            None => spans.iter().map(Span::rows).sum(),
            Some(y) => spans.iter().map(|s| Self::rows_in(s, y)).sum(),
        }
    }

    /// Cells meeting the strip, restricted to the window when one is given.
    /// Window x-bounds are widened to whole columns.
    pub fn count(&self, window: Option<&Window>) -> u64 {
        match window {
            None => self.total(),
            Some(w) => {
                if w.y_lo > w.y_hi {
                    return 0;
                }
                let y = YRange::new(&w.y_lo, &w.y_hi, &self.units, &self.scale);
                self.count_columns(w.columns(self.base, self.level), Some(&y))
            }
        }
    }
}

/// Exact number of `b^{-level}` cells meeting the strip (and the window).
pub fn strip_mesh_count(
    strip: &Strip,
    level: u32,
    window: Option<&Window>,
    limits: &Limits,
) -> Result<u64> {
    Ok(MeshCounter::new(strip, level, limits)?.count(window))
}

/// Distinct cells containing the exact graph points `(j/b^{N+q}, f(j/b^{N+q}))`
/// with `x < 1`, restricted to the window when given.
pub fn graph_point_lower_count(
    sums: &PartialSums,
    level: u32,
    window: Option<&Window>,
    refinement: u32,
) -> Result<u64> {
    let fine = level + refinement;
    // f = H_{N+q} at the level-(N+q) b-adic points, i.e. at even grid indices
    let pl = sums.get(fine)?;
    let base = sums.seq().base();
    let per_column = base.pow(refinement);
    let scale = big_pow(base, level);
    let denom = pl.denom().clone();
    let fine_scale = Rational::from_integer(big_pow(base, fine));
    let points = big_pow(base, fine).to_u64().expect("point count fits u64");
    let (first, last, y_bounds) = match window {
        None => (0, points, None),
        Some(w) => {
            let clamp = |v: BigInt| {
                v.max(BigInt::zero())
                    .min(BigInt::from(points))
                    .to_u64()
                    .expect("fits")
            };
            let first = clamp(ceil(&(&w.x_lo * &fine_scale)));
            let last = clamp(ceil(&(&w.x_hi * &fine_scale)));
            let units = Rational::from_integer(denom.clone());
            (first, last, Some((&w.y_lo * &units, &w.y_hi * &units)))
        }
    };
    if first >= last {
        return Ok(0);
    }
    let numers = pl.numers();
    let first_col = first / per_column;
    let last_col = (last - 1) / per_column;
    let total = (first_col..=last_col)
        .into_par_iter()
        .map(|col| {
            let lo = first.max(col * per_column);
            let hi = last.min((col + 1) * per_column);
            let mut rows: Vec<BigInt> = (lo..hi)
                .map(|j| &numers[2 * j as usize])
                .filter(|y| match &y_bounds {
                    None => true,
                    Some((ya, yb)) => {
                        cmp_int_rat(y, ya) != Ordering::Less
                            && cmp_int_rat(y, yb) != Ordering::Greater
                    }
                })
                .map(|y| floor_div(&(y * &scale), &denom))
                .collect();
            rows.sort();
            rows.dedup();
            rows.len() as u64
        })
        .sum();
    Ok(total)
}

/// Lower bound using continuity of `f`: inside each column the graph attains
/// every value between the sampled points `f(j/b^{N+q})`, and every value
/// strictly between the last sample and `f` at the column's excluded right
/// end. Rows of that attained range (clipped to the window) are all met, so
/// the result dominates [`graph_point_lower_count`] and never exceeds the true
/// count.
pub fn connected_lower_count(
    sums: &PartialSums,
    level: u32,
    window: Option<&Window>,
    refinement: u32,
) -> Result<u64> {
    let fine = level + refinement;
    let pl = sums.get(fine)?;
    let base = sums.seq().base();
    let per_column = base.pow(refinement);
    let scale = big_pow(base, level);
    let units = pl.denom().clone();
    let fine_scale = Rational::from_integer(big_pow(base, fine));
    let points = big_pow(base, fine).to_u64().expect("point count fits u64");
    let (first, last, y_range) = match window {
        None => (0, points, None),
        Some(w) => {
            if w.y_lo > w.y_hi {
                return Ok(0);
            }
            let clamp = |v: BigInt| {
                v.max(BigInt::zero())
                    .min(BigInt::from(points))
                    .to_u64()
                    .expect("fits")
            };
            let first = clamp(ceil(&(&w.x_lo * &fine_scale)));
            let last = clamp(ceil(&(&w.x_hi * &fine_scale)));
            (
                first,
                last,
                Some(YRange::new(&w.y_lo, &w.y_hi, &units, &scale)),
            )
        }
    };
    if first >= last {
        return Ok(0);
    }
    let numers = pl.numers();
    let zero = BigInt::zero();
    let total = (first / per_column..=(last - 1) / per_column)
        .into_par_iter()
        .map(|col| {
            let lo = first.max(col * per_column);
            let hi = last.min((col + 1) * per_column);
            let samples = (lo..hi).map(|j| &numers[2 * j as usize]);
            let vmin = samples.clone().min().expect("nonempty column").clone();
            let vmax = samples.max().expect("nonempty column").clone();
            let span = Span::new(
                vmin,
                vmax,
                numers[2 * hi as usize].clone(),
                &zero,
                &scale,
                &units,
            );
            match &y_range {
                None => span.rows(),
                Some(y) => MeshCounter::rows_in(&span, y),
            }
        })
        .sum();
    Ok(total)
}

/// `D = {x ∈ column i : |H_n(x) − y| ≤ 2η b^{-n}}`, one (possibly empty)
/// closed interval per half-column since `H_n` is affine on each half.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RestrictedDomain {
    /// Pieces on `J₁ = [(i−1)/b^n, (2i−1)/(2b^n)]` and `J₂ = [(2i−1)/(2b^n), i/b^n]`.
    pub halves: [Option<(Rational, Rational)>; 2],
}

impl RestrictedDomain {
    pub fn intervals(&self) -> Vec<(Rational, Rational)> {
        self.halves.iter().flatten().cloned().collect()
    }

    pub fn is_empty(&self) -> bool {
        self.halves.iter().all(Option::is_none)
    }

    pub fn contains(&self, x: &Rational) -> bool {
        self.halves.iter().flatten().any(|(a, b)| a <= x && x <= b)
    }
}

/// Solves `|H_n(x) − y| ≤ 2η b^{-n}` on column `i` (1-based) of `hn = H_n`,
/// whose level must be `n`.
pub fn restricted_domain(
    hn: &PiecewiseLinearFunction,
    i: u64,
    y: &Rational,
    eta: &Rational,
) -> Result<RestrictedDomain> {
    let n = hn.level();
    let columns = hn.cells() / 2;
    if i == 0 || i > columns {
        return Err(Error::Domain(format!("column {i} outside 1..={columns}")));
    }
    let radius = Rational::from_integer(BigInt::from(2)) * eta
        / Rational::from_integer(big_pow(hn.base(), n));
    let (lo, hi) = (y - &radius, y + &radius);
    let first = 2 * (i as usize - 1);
    let solve = |j: usize| -> Option<(Rational, Rational)> {
        let (x0, x1) = (hn.grid_x(j), hn.grid_x(j + 1));
        let (v0, v1) = (hn.value(j), hn.value(j + 1));
        if v0 == v1 {
            return (lo <= v0 && v0 <= hi).then_some((x0, x1));
        }
        let dv = &v1 - &v0;
        let (mut t0, mut t1) = ((&lo - &v0) / &dv, (&hi - &v0) / &dv);
        if t0 > t1 {
            std::mem::swap(&mut t0, &mut t1);
        }
        let t0 = t0.max(Rational::zero());
        let t1 = t1.min(Rational::one());
        if t0 > t1 {
            return None;
        }
        let dx = &x1 - &x0;
        Some((&x0 + &dx * t0, &x0 + dx * t1))
    };
    Ok(RestrictedDomain {
        halves: [solve(first), solve(first + 1)],
    })
}

/// `⌈(10η + mη + 4) b^m⌉`.
pub fn lemma_bound(eta: &Rational, m: u32, base: u64) -> BigInt {
    let ten = Rational::from_integer(BigInt::from(10));
    let four = Rational::from_integer(BigInt::from(4));
    let mm = Rational::from_integer(BigInt::from(m));
    ceil(&((ten * eta + mm * eta + four) * Rational::from_integer(big_pow(base, m))))
}

/// `⌈3 (10η + mη + 4) b^m⌉`.
pub fn theorem_bound(eta: &Rational, m: u32, base: u64) -> BigInt {
    let ten = Rational::from_integer(BigInt::from(10));
    let four = Rational::from_integer(BigInt::from(4));
    let mm = Rational::from_integer(BigInt::from(m));
    let three = Rational::from_integer(BigInt::from(3));
    ceil(&(three * (ten * eta + mm * eta + four) * Rational::from_integer(big_pow(base, m))))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LemmaCheck {
    pub count: u64,
    pub bound: BigInt,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LemmaRow {
    pub n: u32,
    pub m: u32,
    pub i: u64,
    pub y: Rational,
    pub check: LemmaCheck,
}

/// Counts the η-strip `S_{n+m}` inside the window of column `i` at height `y`
/// and compares with `(10η + mη + 4) b^m`.
pub fn verify_lemma_key(
    sums: &PartialSums,
    n: u32,
    m: u32,
    i: u64,
    y: &Rational,
) -> Result<LemmaCheck> {
    let eta = sums.seq().eta().require("the counting lemma")?.clone();
    let strip = eta_strip(sums, n + m)?;
    let window = Window::lemma(sums.seq().base(), n, i, y, &eta);
    let count = strip_mesh_count(&strip, n + m, Some(&window), sums.limits())?;
    let bound = lemma_bound(&eta, m, sums.seq().base());
    Ok(LemmaCheck {
        ok: BigInt::from(count) <= bound,
        count,
        bound,
    })
}

/// Window heights for column `i`: the level-`n` grid values of `H_n` inside
/// the column, each also shifted by `±η b^{-n}`; sorted and deduplicated.
pub fn lemma_y_centers(hn: &PiecewiseLinearFunction, i: u64, eta: &Rational) -> Vec<Rational> {
    let h = eta / Rational::from_integer(big_pow(hn.base(), hn.level()));
    let first = 2 * (i as usize - 1);
    let mut ys: Vec<Rational> = (first..first + 3)
        .flat_map(|j| {
            let v = hn.value(j);
            [&v - &h, v.clone(), &v + &h]
        })
        .collect();
    ys.sort();
    ys.dedup();
    ys
}

/// Every column `i` and every height from [`lemma_y_centers`] at one `(n, m)`.
/// Rows come out ordered by `(i, y)`.
pub fn verify_lemma_key_exhaustive(sums: &PartialSums, n: u32, m: u32) -> Result<Vec<LemmaRow>> {
    let eta = sums.seq().eta().require("the counting lemma")?.clone();
    let base = sums.seq().base();
    let counter = MeshCounter::new(&eta_strip(sums, n + m)?, n + m, sums.limits())?;
    let hn = sums.get(n)?;
    let bound = lemma_bound(&eta, m, base);
    let columns = base.pow(n);
    let rows: Vec<Vec<LemmaRow>> = (1..=columns)
        .into_par_iter()
        .map(|i| {
            lemma_y_centers(&hn, i, &eta)
                .into_iter()
                .map(|y| {
                    let window = Window::lemma(base, n, i, &y, &eta);
                    let count = counter.count(Some(&window));
                    let ok = BigInt::from(count) <= bound;
                    LemmaRow {
                        n,
                        m,
                        i,
                        y,
                        check: LemmaCheck {
                            count,
                            bound: bound.clone(),
                            ok,
                        },
                    }
                })
                .collect()
        })
        .collect();
    Ok(rows.into_iter().flatten().collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalizedRow {
    pub x0: Rational,
    pub n: u32,
    pub m: u32,
    pub bounds: CountBounds,
    /// `3 (10η + mη + 4) b^m`, absent when η is infinite.
    pub theorem_bound: Option<BigInt>,
}

impl LocalizedRow {
    pub fn within_theorem_bound(&self) -> Option<bool> {
        self.theorem_bound
            .as_ref()
            .map(|b| BigInt::from(self.bounds.upper) <= *b)
    }
}

/// Shared state for many localized counts at one `(n, m)`.
pub struct LocalizedScanner<'a> {
    sums: &'a PartialSums,
    n: u32,
    m: u32,
    refinement: u32,
    counter: MeshCounter,
    theorem_bound: Option<BigInt>,
}

impl<'a> LocalizedScanner<'a> {
    pub fn new(sums: &'a PartialSums, n: u32, m: u32, refinement: u32) -> Result<Self> {
        if m == 0 {
            return Err(Error::Precondition("localized counts need m >= 1".into()));
        }
        let counter = MeshCounter::new(&make_strip(sums, n + m)?, n + m, sums.limits())?;
        let theorem_bound = sums
            .seq()
            .eta()
            .value()
            .map(|eta| theorem_bound(eta, m, sums.seq().base()));
        Ok(Self {
            sums,
            n,
            m,
            refinement,
            counter,
            theorem_bound,
        })
    }

    /// Bounds on `𝒩_{b^{-n-m}}(G f ∩ Q((x0, f(x0)), b^{-n}))` for b-adic `x0`.
    pub fn count(&self, x0: &Rational) -> Result<LocalizedRow> {
        let base = self.sums.seq().base();
        if x0.is_negative() || *x0 > Rational::one() {
            return Err(Error::Domain(format!(
                "x0 = {} lies outside [0, 1]",
                format_exact(x0)
            )));
        }
        let (j, level) = badic_level(x0, base).ok_or_else(|| {
            Error::Domain(format!("x0 = {} is not {base}-adic", format_exact(x0)))
        })?;
        let y0 = eval_exact(self.sums.seq(), &j, level)?;
        let level_nm = self.n + self.m;
        let window = Window::around(base, x0, &y0, self.n);
        let upper = self.counter.count(Some(&window));
        let lower = connected_lower_count(self.sums, level_nm, Some(&window), self.refinement)?;
        Ok(LocalizedRow {
            x0: x0.clone(),
            n: self.n,
            m: self.m,
            bounds: CountBounds {
                lower,
                upper,
                level: level_nm,
                window: Some(window),
            },
            theorem_bound: self.theorem_bound.clone(),
        })
    }

    /// All level-`n` grid points `x0 = j / b^n`, `0 ≤ j ≤ b^n`, in order.
    pub fn scan_grid(&self) -> Result<Vec<LocalizedRow>> {
        let base = self.sums.seq().base();
        let top = base.pow(self.n);
        self.scan(
            &(0..=top)
                .map(|j| Rational::new(BigInt::from(j), BigInt::from(top)))
                .collect::<Vec<_>>(),
        )
    }

    pub fn scan(&self, points: &[Rational]) -> Result<Vec<LocalizedRow>> {
        points.par_iter().map(|x0| self.count(x0)).collect()
    }
}

/// One-shot localized count: upper bound from the tight strip `S_{n+m}`,
/// lower bound from [`connected_lower_count`] at refinement `q`.
pub fn localized_count(
    sums: &PartialSums,
    x0: &Rational,
    n: u32,
    m: u32,
    refinement: u32,
) -> Result<CountBounds> {
    Ok(LocalizedScanner::new(sums, n, m, refinement)?
        .count(x0)?
        .bounds)
}

/// Whether `x` is a multiple of `b^{-level}`.
pub fn is_on_grid(x: &Rational, base: u64, level: u32) -> bool {
    (x * Rational::from_integer(big_pow(base, level)))
        .denom()
        .is_one()
}
