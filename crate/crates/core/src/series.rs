//! Exact triangle-wave arithmetic and the piecewise-linear partial sums
//! `H_n = Σ_{k<n} c_k φ(b^k x)` and `H_{n,m} = Σ_{n≤k<n+m} c_k φ(b^k x)`.
//!
//! A [`PiecewiseLinearFunction`] stores its values on the uniform grid
//! `j / (2 b^L)` as integer numerators over one shared denominator, which
//! keeps the counting code in pure integer arithmetic.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::coefficients::CoefficientSequence;
use crate::error::{Error, Result};
use crate::rational::{big_pow, floor, format_exact, lcm, Rational};

/// Default cap on the number of grid points in one piecewise-linear function.
pub const DEFAULT_MAX_GRID_POINTS: u64 = 1 << 26;
/// Default cap on the number of mesh cells the oracle may enumerate.
pub const DEFAULT_ORACLE_CELL_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_grid_points: u64,
    pub oracle_cell_budget: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            max_grid_points: DEFAULT_MAX_GRID_POINTS,
            oracle_cell_budget: DEFAULT_ORACLE_CELL_BUDGET,
        }
    }
}

impl Limits {
    /// Number of grid points `2 b^level + 1`, checked against the cap.
    pub fn grid_points(&self, base: u64, level: u32) -> Result<usize> {
        let needed = (base as u128)
            .checked_pow(level)
            .and_then(|p| p.checked_mul(2))
            .and_then(|p| p.checked_add(1))
            .unwrap_or(u128::MAX);
        if needed > self.max_grid_points as u128 {
            return Err(Error::Resource {
                what: "piecewise-linear grid",
                needed,
                cap: self.max_grid_points,
            });
        }
        Ok(needed as usize)
    }
}

/// Distance from `t` to the nearest integer.
pub fn phi(t: &Rational) -> Rational {
    let frac = t - Rational::from_integer(floor(t));
    let other = Rational::one() - &frac;
    if frac <= other {
        frac
    } else {
        other
    }
}

/// `φ(j / modulus)` as the integer `min(r, modulus − r)` with `r = j mod modulus`;
/// the value of φ is this divided by `modulus`.
fn triangle_numerator(j: u64, modulus: u64) -> u64 {
    let r = j % modulus;
    r.min(modulus - r)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiecewiseLinearFunction {
    base: u64,
    level: u32,
    denom: BigInt,
    numers: Vec<BigInt>,
}

impl PiecewiseLinearFunction {
    pub fn zero(base: u64, level: u32, limits: &Limits) -> Result<Self> {
        let len = limits.grid_points(base, level)?;
        Ok(Self {
            base,
            level,
            denom: BigInt::one(),
            numers: vec![BigInt::zero(); len],
        })
    }

    /// Builds a function from its exact values at the `2 b^level + 1` grid points.
    pub fn from_values(base: u64, level: u32, values: &[Rational]) -> Result<Self> {
        let expected = Limits {
            max_grid_points: u64::MAX,
            ..Limits::default()
        }
        .grid_points(base, level)?;
        if values.len() != expected {
            return Err(Error::Precondition(format!(
                "level {level} in base {base} needs {expected} values, got {}",
                values.len()
            )));
        }
        let denom = values
            .iter()
            .fold(BigInt::one(), |acc, v| lcm(&acc, v.denom()));
        let numers = values
            .iter()
            .map(|v| v.numer() * (&denom / v.denom()))
            .collect();
        Ok(Self {
            base,
            level,
            denom,
            numers,
        })
    }

    pub fn base(&self) -> u64 {
        self.base
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    /// Shared denominator of every stored value.
    pub fn denom(&self) -> &BigInt {
        &self.denom
    }

    /// Numerators over [`denom`](Self::denom), in grid order.
    pub fn numers(&self) -> &[BigInt] {
        &self.numers
    }

    pub fn len(&self) -> usize {
        self.numers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.numers.is_empty()
    }

    /// Number of grid cells, `2 b^level`.
    pub fn cells(&self) -> u64 {
        self.numers.len() as u64 - 1
    }

    pub fn value(&self, j: usize) -> Rational {
        Rational::new(self.numers[j].clone(), self.denom.clone())
    }

    pub fn grid_x(&self, j: usize) -> Rational {
        Rational::new(BigInt::from(j), BigInt::from(self.cells()))
    }

    pub fn values(&self) -> impl Iterator<Item = Rational> + '_ {
        self.numers
            .iter()
            .map(|n| Rational::new(n.clone(), self.denom.clone()))
    }

    fn check_domain(x: &Rational) -> Result<()> {
        if x.is_negative() || *x > Rational::one() {
            return Err(Error::Domain(format!(
                "x = {} lies outside [0, 1]",
                format_exact(x)
            )));
        }
        Ok(())
    }

    /// Exact value at `x ∈ [0, 1]` by linear interpolation in the containing cell.
    pub fn eval(&self, x: &Rational) -> Result<Rational> {
        Self::check_domain(x)?;
        Ok(self.eval_unchecked(x))
    }

    fn eval_unchecked(&self, x: &Rational) -> Rational {
        let pos = x * Rational::from_integer(BigInt::from(self.cells()));
        let j = floor(&pos).to_usize().expect("grid index");
        if j as u64 >= self.cells() {
            return self.value(self.len() - 1);
        }
        let t = pos - Rational::from_integer(BigInt::from(j));
        let left = self.value(j);
        if t.is_zero() {
            return left;
        }
        &left + (self.value(j + 1) - &left) * t
    }

    /// The same function sampled on the finer grid of `level ≥ self.level`.
    /// Exact, since the function is affine between its own grid points.
    pub fn refine(&self, level: u32, limits: &Limits) -> Result<Self> {
        if level < self.level {
            return Err(Error::Precondition(format!(
                "cannot refine level {} down to {level}",
                self.level
            )));
        }
        if level == self.level {
            return Ok(self.clone());
        }
        let len = limits.grid_points(self.base, level)?;
        let factor = self.base.pow(level - self.level);
        let numers = (0..len as u64)
            .into_par_iter()
            .map(|u| {
                let (j, r) = u.div_rem(&factor);
                let left = &self.numers[j as usize] * BigInt::from(factor - r);
                if r == 0 {
                    left
                } else {
                    left + &self.numers[j as usize + 1] * BigInt::from(r)
                }
            })
            .collect();
        Ok(Self {
            base: self.base,
            level,
            denom: &self.denom * BigInt::from(factor),
            numers,
        })
    }

    /// Values at `u`, at every grid point strictly inside `(u, v)`, and at `v`.
    fn samples(&self, u: &Rational, v: &Rational) -> Vec<Rational> {
        let cells = Rational::from_integer(BigInt::from(self.cells()));
        let first: BigInt = floor(&(u * &cells)) + 1;
        let last: BigInt = -floor(&(-(v * &cells))) - 1;
        let mut out = vec![self.eval_unchecked(u)];
        let mut j = first;
        while j <= last {
            out.push(self.value(j.to_usize().expect("grid index")));
            j += 1;
        }
        out.push(self.eval_unchecked(v));
        out
    }

    fn check_interval(u: &Rational, v: &Rational) -> Result<()> {
        Self::check_domain(u)?;
        Self::check_domain(v)
    }

    /// `max − min` over `[u, v]`; zero for an empty (`u > v`) interval.
    pub fn oscillation(&self, u: &Rational, v: &Rational) -> Result<Rational> {
        Self::check_interval(u, v)?;
        if u > v {
            return Ok(Rational::zero());
        }
        let samples = self.samples(u, v);
        let max = samples.iter().max().expect("nonempty");
        let min = samples.iter().min().expect("nonempty");
        Ok(max - min)
    }

    /// Total variation over `[u, v]`; zero for an empty interval.
    pub fn variation(&self, u: &Rational, v: &Rational) -> Result<Rational> {
        Self::check_interval(u, v)?;
        if u > v {
            return Ok(Rational::zero());
        }
        let samples = self.samples(u, v);
        Ok(samples.windows(2).map(|w| (&w[1] - &w[0]).abs()).sum())
    }
}

impl std::ops::Sub for &PiecewiseLinearFunction {
    type Output = PiecewiseLinearFunction;

    /// Pointwise difference of two functions on the same grid.
    fn sub(self, rhs: Self) -> PiecewiseLinearFunction {
        assert_eq!(
            (self.base, self.level),
            (rhs.base, rhs.level),
            "grids must match"
        );
        let denom = lcm(&self.denom, &rhs.denom);
        let ls = &denom / &self.denom;
        let rs = &denom / &rhs.denom;
        let numers = self
            .numers
            .iter()
            .zip(&rhs.numers)
            .map(|(a, b)| a * &ls - b * &rs)
            .collect();
        PiecewiseLinearFunction {
            base: self.base,
            level: self.level,
            denom,
            numers,
        }
    }
}

/// `Σ_{k=start}^{end-1} c_k φ(b^k x)` sampled exactly at level `level ≥ end`.
fn build_sum(
    seq: &CoefficientSequence,
    start: u32,
    end: u32,
    level: u32,
    limits: &Limits,
) -> Result<PiecewiseLinearFunction> {
    debug_assert!(end <= level || start == end);
    let base = seq.base();
    let len = limits.grid_points(base, level)?;
    let cells = len as u64 - 1;
    let common = seq.common_denominator(start, end);
    // term k contributes c_k · min(r, M−r)/M with M = 2b^{level−k}; over the
    // shared denominator 2b^level·common that is P_k · b^k · min(r, M−r)
    let terms: Vec<(BigInt, u64)> = (start..end)
        .map(|k| {
            let c = seq.coeff(k);
            let scaled = c.numer() * (&common / c.denom()) * big_pow(base, k);
            (scaled, cells / base.pow(k))
        })
        .filter(|(w, _)| !w.is_zero())
        .collect();
    let numers = (0..len as u64)
        .into_par_iter()
        .map(|j| {
            let mut acc = BigInt::zero();
            for (weight, modulus) in &terms {
                let tri = triangle_numerator(j, *modulus);
                if tri != 0 {
                    acc += weight * tri;
                }
            }
            acc
        })
        .collect();
    Ok(PiecewiseLinearFunction {
        base,
        level,
        denom: common * BigInt::from(cells),
        numers,
    })
}

/// `H_n` on the level-`n` grid `j / (2 b^n)`.
pub fn build_partial_sum(
    seq: &CoefficientSequence,
    n: u32,
    limits: &Limits,
) -> Result<PiecewiseLinearFunction> {
    build_sum(seq, 0, n, n, limits)
}

/// `H_{n,m}` on the level-`(n+m)` grid.
pub fn build_window_sum(
    seq: &CoefficientSequence,
    n: u32,
    m: u32,
    limits: &Limits,
) -> Result<PiecewiseLinearFunction> {
    if m == 0 {
        return Err(Error::Precondition("window sum needs m >= 1".into()));
    }
    build_sum(seq, n, n + m, n + m, limits)
}

/// `f(j / b^N)` exactly. Every term with `k ≥ N` vanishes at such points, so
/// this is the finite sum `H_N(j / b^N)`, computed term by term.
pub fn eval_exact(seq: &CoefficientSequence, j: &BigInt, level: u32) -> Result<Rational> {
    let b = seq.base();
    let top = big_pow(b, level);
    if j.is_negative() || *j > top {
        return Err(Error::Domain(format!("index {j} outside [0, {b}^{level}]")));
    }
    let mut total = Rational::zero();
    for k in 0..level {
        let modulus = big_pow(b, level - k);
        let r = j.mod_floor(&modulus);
        let other = &modulus - &r;
        let tri = if r <= other { r } else { other };
        if !tri.is_zero() {
            total += seq.coeff(k) * Rational::new(tri, modulus);
        }
    }
    Ok(total)
}

/// `H_n(x)` by direct summation, without building a grid.
pub fn partial_sum_at(seq: &CoefficientSequence, n: u32, x: &Rational) -> Rational {
    window_sum_at(seq, 0, n, x)
}

/// `H_{n,m}(x)` by direct summation.
pub fn window_sum_at(seq: &CoefficientSequence, n: u32, m: u32, x: &Rational) -> Rational {
    let b = Rational::from_integer(BigInt::from(seq.base()));
    let mut scaled = x * crate::rational::rat_pow(&b, n);
    let mut total = Rational::zero();
    for k in n..n + m {
        total += seq.coeff(k) * phi(&scaled);
        scaled *= &b;
    }
    total
}

/// A value known to lie in `[center − radius, center + radius]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertifiedValue {
    pub center: Rational,
    pub radius: Rational,
    /// Number of terms summed for the center.
    pub terms: u32,
}

impl CertifiedValue {
    pub fn lo(&self) -> Rational {
        &self.center - &self.radius
    }

    pub fn hi(&self) -> Rational {
        &self.center + &self.radius
    }

    pub fn contains(&self, v: &Rational) -> bool {
        (v - &self.center).abs() <= self.radius
    }
}

/// Least `N` with `tail_bound(N) ≤ eps`.
pub fn terms_for_tolerance(seq: &CoefficientSequence, eps: &Rational) -> Result<u32> {
    if !eps.is_positive() {
        return Err(Error::Domain(format!(
            "tolerance must be positive, got {}",
            format_exact(eps)
        )));
    }
    const MAX_TERMS: u32 = 1 << 20;
    (0..MAX_TERMS)
        .find(|&n| seq.tail_bound(n) <= *eps)
        .ok_or(Error::Resource {
            what: "terms for the requested tolerance",
            needed: MAX_TERMS as u128,
            cap: MAX_TERMS as u64,
        })
}

/// `f(x)` to within `eps`: the center is `H_N(x)` and the radius the
/// closed-form tail bound at `N`.
pub fn eval_certified(
    seq: &CoefficientSequence,
    x: &Rational,
    eps: &Rational,
) -> Result<CertifiedValue> {
    PiecewiseLinearFunction::check_domain(x)?;
    let terms = terms_for_tolerance(seq, eps)?;
    Ok(CertifiedValue {
        center: partial_sum_at(seq, terms, x),
        radius: seq.tail_bound(terms),
        terms,
    })
}

/// Memoized `H_n` builds for one sequence, shared between threads.
#[derive(Debug)]
pub struct PartialSums {
    seq: CoefficientSequence,
    limits: Limits,
    built: Mutex<HashMap<u32, Arc<PiecewiseLinearFunction>>>,
}

impl PartialSums {
    pub fn new(seq: CoefficientSequence, limits: Limits) -> Self {
        Self {
            seq,
            limits,
            built: Mutex::new(HashMap::new()),
        }
    }

    pub fn seq(&self) -> &CoefficientSequence {
        &self.seq
    }

    pub fn limits(&self) -> &Limits {
        &self.limits
    }

    pub fn get(&self, n: u32) -> Result<Arc<PiecewiseLinearFunction>> {
        if let Some(pl) = self.built.lock().expect("cache lock").get(&n) {
            return Ok(Arc::clone(pl));
        }
        let pl = Arc::new(build_partial_sum(&self.seq, n, &self.limits)?);
        let mut guard = self.built.lock().expect("cache lock");
        Ok(Arc::clone(guard.entry(n).or_insert(pl)))
    }
}
