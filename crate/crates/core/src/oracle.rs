//! Brute-force ground truth at small sizes.
//!
//! Everything here is written directly from the geometry with plain rational
//! arithmetic and shares no code with [`crate::counting`]. It is the arbiter
//! for the fast counting paths, so it stays single-threaded and simple.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{self, Write};

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::coefficients::CoefficientSequence;
use crate::error::{Error, Result};
use crate::rational::{big_pow, ceil_log, floor, ratio, Rational};
use crate::series::{eval_exact, partial_sum_at, window_sum_at, Limits, PiecewiseLinearFunction};

/// Mesh cells visited by a graph, as `(column, row)` pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentWalkResult {
    pub cells: BTreeSet<(i64, i64)>,
    pub count: u64,
}

impl SegmentWalkResult {
    pub fn per_column(&self) -> BTreeMap<i64, u64> {
        let mut out = BTreeMap::new();
        for (col, _) in &self.cells {
            *out.entry(*col).or_insert(0) += 1;
        }
        out
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "col,row")?;
        for (col, row) in &self.cells {
            writeln!(out, "{col},{row}")?;
        }
        Ok(())
    }
}

fn cell_of(x: &Rational, y: &Rational, inv_delta: &Rational) -> (i64, i64) {
    let col = floor(&(x * inv_delta)).to_i64().expect("column fits i64");
    let row = floor(&(y * inv_delta)).to_i64().expect("row fits i64");
    (col, row)
}

/// Cells of `[iδ,(i+1)δ) × [jδ,(j+1)δ)` met by the graph of `pl` over
/// `[0, 1)`, found by cutting every linear segment at each vertical and
/// horizontal grid line it crosses.
pub fn pl_graph_mesh_count(
    pl: &PiecewiseLinearFunction,
    level: u32,
    limits: &Limits,
) -> Result<SegmentWalkResult> {
    let inv_delta = Rational::from_integer(big_pow(pl.base(), level));
    let mut cells = BTreeSet::new();
    for j in 0..pl.cells() as usize {
        let (x0, x1) = (pl.grid_x(j), pl.grid_x(j + 1));
        let (y0, y1) = (pl.value(j), pl.value(j + 1));
        let at = |x: &Rational| &y0 + (&y1 - &y0) * (x - &x0) / (&x1 - &x0);

        let mut cuts = vec![x0.clone()];
        // vertical grid lines strictly inside (x0, x1)
        let mut k: BigInt = floor(&(&x0 * &inv_delta)) + 1;
        loop {
            let x = Rational::from_integer(k.clone()) / &inv_delta;
            if x >= x1 {
                break;
            }
            cuts.push(x);
            k += 1;
        }
        // horizontal grid lines crossed strictly between the endpoint values
        if y0 != y1 {
            let (lo, hi) = if y0 < y1 { (&y0, &y1) } else { (&y1, &y0) };
            let mut k: BigInt = floor(&(lo * &inv_delta)) + 1;
            loop {
                let y = Rational::from_integer(k.clone()) / &inv_delta;
                if y >= *hi {
                    break;
                }
                cuts.push(&x0 + (&y - &y0) * (&x1 - &x0) / (&y1 - &y0));
                k += 1;
            }
        }
        cuts.sort();
        cuts.dedup();
        for (i, start) in cuts.iter().enumerate() {
            cells.insert(cell_of(start, &at(start), &inv_delta));
            let end = cuts.get(i + 1).unwrap_or(&x1);
            let mid = (start + end) * ratio(1, 2);
            cells.insert(cell_of(&mid, &at(&mid), &inv_delta));
        }
        if cells.len() as u64 > limits.oracle_cell_budget {
            return Err(Error::Resource {
                what: "oracle cell budget",
                needed: cells.len() as u128,
                cap: limits.oracle_cell_budget,
            });
        }
    }
    let count = cells.len() as u64;
    Ok(SegmentWalkResult { cells, count })
}

/// Checks `cells in column ≤ O(pl, column)/δ + 2` for every column of width
/// `δ = b^{-level}`.
pub fn check_column_bound(
    pl: &PiecewiseLinearFunction,
    level: u32,
    limits: &Limits,
) -> Result<bool> {
    let walk = pl_graph_mesh_count(pl, level, limits)?;
    let per_column = walk.per_column();
    let columns = big_pow(pl.base(), level);
    let inv_delta = Rational::from_integer(columns.clone());
    let mut col = BigInt::zero();
    while col < columns {
        let u = Rational::from_integer(col.clone()) / &inv_delta;
        let v = Rational::from_integer(&col + 1) / &inv_delta;
        let bound = pl.oscillation(&u, &v)? * &inv_delta + Rational::from_integer(BigInt::from(2));
        let count = per_column
            .get(&col.to_i64().expect("column fits i64"))
            .copied()
            .unwrap_or(0);
        if Rational::from_integer(BigInt::from(count)) > bound {
            return Ok(false);
        }
        col += 1;
    }
    Ok(true)
}

/// Checks `|f(x) − H_n(x)| ≤ η b^{-n}` at `samples` b-adic points, with `f`
/// from [`eval_exact`] and `H_n` by direct summation.
pub fn dense_containment_check(seq: &CoefficientSequence, n: u32, samples: u64) -> Result<bool> {
    let eta = seq.eta().require("the containment check")?.clone();
    let b = seq.base();
    let halfwidth = eta / Rational::from_integer(big_pow(b, n));
    let level = n.max(ceil_log(b, samples.max(2)));
    let top = big_pow(b, level);
    let indices: Vec<BigInt> = if top < BigInt::from(samples) {
        (0..=top.to_u64().expect("small grid"))
            .map(BigInt::from)
            .collect()
    } else {
        let last = BigInt::from(samples.max(2) - 1);
        (0..samples.max(2))
            .map(|k| BigInt::from(k) * &top / &last)
            .collect()
    };
    let scale = Rational::from_integer(top);
    for j in indices {
        let x = Rational::from_integer(j.clone()) / &scale;
        let f = eval_exact(seq, &j, level)?;
        let h = partial_sum_at(seq, n, &x);
        if (f - h).abs() > halfwidth {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Checks that `H_n` is affine on the given cells `[j/(2b^n), (j+1)/(2b^n)]`:
/// the direct sum at the cell midpoint equals the mean of the endpoint sums.
pub fn check_midpoint_linearity(seq: &CoefficientSequence, n: u32, cells: &[u64]) -> Result<bool> {
    let grid = Rational::from_integer(BigInt::from(2) * big_pow(seq.base(), n));
    let total = grid.to_integer();
    for &j in cells {
        if BigInt::from(j) >= total {
            return Err(Error::Domain(format!(
                "cell {j} outside the level-{n} grid"
            )));
        }
        let left = ratio(j as i64, 1) / &grid;
        let right = ratio(j as i64 + 1, 1) / &grid;
        let mid = (&left + &right) / ratio(2, 1);
        let expected =
            (partial_sum_at(seq, n, &left) + partial_sum_at(seq, n, &right)) / ratio(2, 1);
        if partial_sum_at(seq, n, &mid) != expected {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Checks the Lipschitz bounds `|ΔH_n| ≤ nη|Δx|` and `|ΔH_{n,m}| ≤ mη|Δx|`
/// on every pair.
pub fn check_lipschitz(
    seq: &CoefficientSequence,
    n: u32,
    m: u32,
    pairs: &[(Rational, Rational)],
) -> Result<bool> {
    let eta = seq.eta().require("the Lipschitz check")?.clone();
    let n_const = &eta * ratio(i64::from(n), 1);
    let m_const = &eta * ratio(i64::from(m), 1);
    for (x1, x2) in pairs {
        let dx = (x1 - x2).abs();
        let dh = (partial_sum_at(seq, n, x1) - partial_sum_at(seq, n, x2)).abs();
        let dw = (window_sum_at(seq, n, m, x1) - window_sum_at(seq, n, m, x2)).abs();
        if dh > &n_const * &dx || dw > &m_const * &dx {
            return Ok(false);
        }
    }
    Ok(true)
}
