//! Exact rational helpers shared by the rest of the crate: parsing of
//! `p/q` and exact decimal literals, decimal rendering, and small integer
//! utilities.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn int(v: i64) -> BigInt {
    BigInt::from(v)
}

pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn big_pow(base: u64, exp: u32) -> BigInt {
    num_traits::pow(BigInt::from(base), exp as usize)
}

pub fn rat_pow(base: &Rational, exp: u32) -> Rational {
    num_traits::pow(base.clone(), exp as usize)
}

/// `base^exp` as a checked `u64`, `None` on overflow.
pub fn checked_pow_u64(base: u64, exp: u32) -> Option<u64> {
    base.checked_pow(exp)
}

pub fn lcm(a: &BigInt, b: &BigInt) -> BigInt {
    a.lcm(b)
}

pub fn floor_div(a: &BigInt, b: &BigInt) -> BigInt {
    a.div_floor(b)
}

pub fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    -((-a).div_floor(b))
}

pub fn floor(r: &Rational) -> BigInt {
    r.numer().div_floor(r.denom())
}

pub fn ceil(r: &Rational) -> BigInt {
    ceil_div(r.numer(), r.denom())
}

/// Parses an exact rational. Accepted forms: `p/q`, integers, and decimal
/// literals with an optional exponent (`0.7`, `1e-6`, `-2.5E3`). Decimal
/// literals are converted digit-by-digit, never through a float.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty number".into()));
    }
    if let Some((p, q)) = s.split_once('/') {
        let p = parse_integer(p.trim()).ok_or_else(|| bad(text))?;
        let q = parse_integer(q.trim()).ok_or_else(|| bad(text))?;
        if q.is_zero() {
            return Err(Error::Parse(format!("zero denominator in `{text}`")));
        }
        return Ok(Rational::new(p, q));
    }
    parse_decimal(s).ok_or_else(|| bad(text))
}

fn bad(text: &str) -> Error {
    Error::Parse(format!(
        "`{text}` is not an exact rational (expected p/q, integer or decimal)"
    ))
}

fn parse_integer(s: &str) -> Option<BigInt> {
    let digits = s.strip_prefix(['+', '-']).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|c| c.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

fn parse_decimal(s: &str) -> Option<Rational> {
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let exp_text = &s[pos + 1..];
            let body = exp_text.strip_prefix(['+', '-']).unwrap_or(exp_text);
            if body.is_empty() || !body.bytes().all(|c| c.is_ascii_digit()) {
                return None;
            }
            (&s[..pos], exp_text.parse::<i32>().ok()?)
        }
        None => (s, 0),
    };
    let (negative, unsigned) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (whole, frac) = unsigned.split_once('.').unwrap_or((unsigned, ""));
    if whole.is_empty() && frac.is_empty() {
        return None;
    }
    if !whole
        .bytes()
        .chain(frac.bytes())
        .all(|c| c.is_ascii_digit())
    {
        return None;
    }
    let digits: BigInt = format!("{whole}{frac}").parse().ok()?;
    let scale = exponent - frac.len() as i32;
    let mut value = Rational::from_integer(digits);
    if scale >= 0 {
        value *= Rational::from_integer(big_pow(10, scale as u32));
    } else {
        value /= Rational::from_integer(big_pow(10, (-scale) as u32));
    }
    Some(if negative { -value } else { value })
}

/// Renders `p/q`, or just `p` for integers.
pub fn format_exact(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Decimal rendering with `digits` fractional digits, rounding half up.
pub fn format_decimal(r: &Rational, digits: u32) -> String {
    let scale = big_pow(10, digits);
    let scaled = r * Rational::from_integer(scale.clone()) + ratio(1, 2);
    let rounded = floor(&scaled);
    let negative = rounded.is_negative();
    let magnitude = rounded.abs();
    let (whole, frac) = magnitude.div_rem(&scale);
    let sign = if negative { "-" } else { "" };
    if digits == 0 {
        format!("{sign}{whole}")
    } else {
        format!(
            "{sign}{whole}.{:0>width$}",
            frac.to_string(),
            width = digits as usize
        )
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Smallest `k ≥ 0` with `b^k ≥ n`.
pub fn ceil_log(base: u64, n: u64) -> u32 {
    let mut k = 0;
    let mut p: u128 = 1;
    while p < n as u128 {
        p *= base as u128;
        k += 1;
    }
    k
}

/// If `x` is b-adic, returns `(j, K)` with `x = j / b^K` and `K` minimal.
pub fn badic_level(x: &Rational, base: u64) -> Option<(BigInt, u32)> {
    let b = BigInt::from(base);
    let mut scaled = x.clone();
    let mut level = 0u32;
    loop {
        if scaled.denom().is_one() {
            return Some((scaled.numer().clone(), level));
        }
        if scaled.denom().gcd(&b).is_one() {
            return None;
        }
        scaled *= Rational::from_integer(b.clone());
        level += 1;
    }
}
