//! CSV emitters for partial sums, count tables and profiles. Output is a
//! pure function of its input, so identical runs give identical bytes.

use std::io::{self, Write};

use crate::counting::{LemmaRow, LocalizedRow};
use crate::dimension::{BoxRow, ProfileRow};
use crate::rational::{format_decimal, format_exact};
use crate::series::PiecewiseLinearFunction;

/// `x,y` in grid order, plus a `y_exact` column of `p/q` values when asked.
pub fn write_pl_csv<W: Write>(
    pl: &PiecewiseLinearFunction,
    digits: u32,
    exact: bool,
    mut out: W,
) -> io::Result<()> {
    writeln!(out, "{}", if exact { "x,y,y_exact" } else { "x,y" })?;
    for (j, y) in pl.values().enumerate() {
        let x = format_decimal(&pl.grid_x(j), digits);
        if exact {
            writeln!(
                out,
                "{x},{},{}",
                format_decimal(&y, digits),
                format_exact(&y)
            )?;
        } else {
            writeln!(out, "{x},{}", format_decimal(&y, digits))?;
        }
    }
    Ok(())
}

pub fn write_lemma_csv<W: Write>(rows: &[LemmaRow], mut out: W) -> io::Result<()> {
    writeln!(out, "n,m,i,y,count,bound,ok")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.n,
            r.m,
            r.i,
            format_exact(&r.y),
            r.check.count,
            r.check.bound,
            r.check.ok
        )?;
    }
    Ok(())
}

pub fn write_localized_csv<W: Write>(rows: &[LocalizedRow], mut out: W) -> io::Result<()> {
    writeln!(out, "x0,n,m,lower,upper,theorem_bound")?;
    for r in rows {
        let bound = r
            .theorem_bound
            .as_ref()
            .map(|b| b.to_string())
            .unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{},{}",
            format_exact(&r.x0),
            r.n,
            r.m,
            r.bounds.lower,
            r.bounds.upper,
            bound
        )?;
    }
    Ok(())
}

/// Per-`m` maxima over `n`: `m,max_lower,max_upper,bound`.
pub fn write_profile_csv<W: Write>(profile: &[ProfileRow], mut out: W) -> io::Result<()> {
    writeln!(out, "m,max_lower,max_upper,bound")?;
    for (m, lower, upper, bound) in crate::dimension::profile_by_m(profile) {
        let upper = upper.map(|u| u.to_string()).unwrap_or_default();
        let bound = bound.map(|b| b.to_string()).unwrap_or_default();
        writeln!(out, "{m},{lower},{upper},{bound}")?;
    }
    Ok(())
}

pub fn write_box_csv<W: Write>(rows: &[BoxRow], mut out: W) -> io::Result<()> {
    writeln!(out, "N,lower,upper")?;
    for r in rows {
        writeln!(out, "{},{},{}", r.level, r.lower, r.upper)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::CoefficientSequence;
    use crate::series::{build_partial_sum, Limits};

    #[test]
    fn pl_csv_layout() {
        let h1 =
            build_partial_sum(&CoefficientSequence::classical(), 1, &Limits::default()).unwrap();
        let mut buf = Vec::new();
        write_pl_csv(&h1, 3, true, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "x,y,y_exact\n0.000,0.000,0\n0.250,0.250,1/4\n0.500,0.500,1/2\n0.750,0.250,1/4\n1.000,0.000,0\n"
        );
        let mut plain = Vec::new();
        write_pl_csv(&h1, 1, false, &mut plain).unwrap();
        assert!(String::from_utf8(plain)
            .unwrap()
            .starts_with("x,y\n0.0,0.0\n"));
    }
}
