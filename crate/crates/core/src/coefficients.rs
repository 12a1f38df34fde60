//! Coefficient sequences `c = {c_k}` of the Takagi class together with the
//! base `b`, the constant η and certified tail bounds.
//!
//! η is computed as `max{1, sup_k b^k |c_k|}`. The classical definition uses
//! a limsup; the sup is what makes the strip containment hold for every `n`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::rational::{big_pow, format_exact, lcm, rat_pow, ratio, Rational};

/// Rule producing the signs `r_k ∈ {+1, −1}` of a signed power sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SignRule {
    /// `r_k = (−1)^k`.
    Alternating,
    /// A literal list, repeated periodically.
    Cyclic(Vec<i8>),
    /// Independent fair signs drawn from a ChaCha8 stream with the given seed.
    /// Sign `k` is bit `k mod 32` of word `k / 32`, so any index can be
    /// queried directly.
    Seeded(u64),
}

impl SignRule {
    pub fn sign(&self, k: u32) -> i8 {
        match self {
            SignRule::Alternating => {
                if k.is_multiple_of(2) {
                    1
                } else {
                    -1
                }
            }
            SignRule::Cyclic(list) => list[k as usize % list.len()],
            SignRule::Seeded(seed) => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                rng.set_word_pos(u128::from(k / 32));
                if (rng.next_u32() >> (k % 32)) & 1 == 1 {
                    1
                } else {
                    -1
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SequenceKind {
    /// `c_k = a^k` with `0 < a < 1`.
    Geometric { ratio: Rational },
    /// `c_k = r_k · b^{-k}`.
    SignedPower { signs: SignRule },
    /// `c_k = head[k]` for `k < len`, then `head[len-1] · ρ^{k-len+1}`.
    Explicit {
        head: Vec<Rational>,
        tail_ratio: Rational,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoefficientSequence {
    base: u64,
    kind: SequenceKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Eta {
    Finite {
        value: Rational,
        attained_sup: Rational,
    },
    Infinite,
}

impl Eta {
    pub fn value(&self) -> Option<&Rational> {
        match self {
            Eta::Finite { value, .. } => Some(value),
            Eta::Infinite => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Eta::Finite { .. })
    }

    pub fn require(&self, what: &'static str) -> Result<&Rational> {
        self.value().ok_or(Error::EtaInfinite(what))
    }
}

impl fmt::Display for Eta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Eta::Finite { value, .. } => write!(f, "{}", format_exact(value)),
            Eta::Infinite => write!(f, "inf"),
        }
    }
}

fn check_base(base: u64) -> Result<()> {
    if base < 2 {
        return Err(Error::Domain(format!(
            "base must be an integer >= 2, got {base}"
        )));
    }
    Ok(())
}

impl CoefficientSequence {
    pub fn geometric(base: u64, a: Rational) -> Result<Self> {
        check_base(base)?;
        if !(a.is_positive() && a < Rational::one()) {
            return Err(Error::Domain(format!(
                "geometric ratio must satisfy 0 < a < 1, got {}",
                format_exact(&a)
            )));
        }
        Ok(Self {
            base,
            kind: SequenceKind::Geometric { ratio: a },
        })
    }

    pub fn signed_power(base: u64, signs: SignRule) -> Result<Self> {
        check_base(base)?;
        if let SignRule::Cyclic(list) = &signs {
            if list.is_empty() || list.iter().any(|s| *s != 1 && *s != -1) {
                return Err(Error::Domain(
                    "sign list must be a non-empty list of +1/-1".into(),
                ));
            }
        }
        Ok(Self {
            base,
            kind: SequenceKind::SignedPower { signs },
        })
    }

    pub fn explicit(base: u64, head: Vec<Rational>, tail_ratio: Rational) -> Result<Self> {
        check_base(base)?;
        if tail_ratio.is_negative() || tail_ratio >= Rational::one() {
            return Err(Error::Domain(format!(
                "tail ratio must lie in [0, 1), got {}",
                format_exact(&tail_ratio)
            )));
        }
        Ok(Self {
            base,
            kind: SequenceKind::Explicit { head, tail_ratio },
        })
    }

    /// The classical Takagi function `Σ 2^{-k} φ(2^k x)`.
    pub fn classical() -> Self {
        Self::geometric(2, ratio(1, 2)).expect("valid")
    }

    /// `T_b = Σ b^{-k} φ(b^k x)`; `b = 10` is the van der Waerden function.
    pub fn generalized(base: u64) -> Result<Self> {
        Self::geometric(base, ratio(1, base as i64))
    }

    pub fn base(&self) -> u64 {
        self.base
    }

    pub fn kind(&self) -> &SequenceKind {
        &self.kind
    }

    pub fn coeff(&self, k: u32) -> Rational {
        match &self.kind {
            SequenceKind::Geometric { ratio } => rat_pow(ratio, k),
            SequenceKind::SignedPower { signs } => {
                Rational::new(BigInt::from(signs.sign(k)), big_pow(self.base, k))
            }
            SequenceKind::Explicit { head, tail_ratio } => {
                let len = head.len() as u32;
                if k < len {
                    head[k as usize].clone()
                } else if len == 0 {
                    Rational::zero()
                } else {
                    &head[len as usize - 1] * rat_pow(tail_ratio, k - len + 1)
                }
            }
        }
    }

    pub fn eta(&self) -> Eta {
        let b = Rational::from_integer(BigInt::from(self.base));
        let sup = match &self.kind {
            SequenceKind::Geometric { ratio } => {
                if ratio * &b > Rational::one() {
                    return Eta::Infinite;
                }
                // (ab)^k ≤ 1 with equality at k = 0
                Rational::one()
            }
            SequenceKind::SignedPower { .. } => Rational::one(),
            SequenceKind::Explicit { head, tail_ratio } => {
                let mut sup = Rational::zero();
                for (k, h) in head.iter().enumerate() {
                    let weighted = h.abs() * rat_pow(&b, k as u32);
                    if weighted > sup {
                        sup = weighted;
                    }
                }
                let has_tail = head.last().is_some_and(|h| !h.is_zero()) && !tail_ratio.is_zero();
                if has_tail && tail_ratio * &b > Rational::one() {
                    return Eta::Infinite;
                }
                // with bρ ≤ 1 the tail terms are dominated by the last head term
                sup
            }
        };
        let value = if sup > Rational::one() {
            sup.clone()
        } else {
            Rational::one()
        };
        Eta::Finite {
            value,
            attained_sup: sup,
        }
    }

    /// An exact `W_n ≥ (1/2) Σ_{k≥n} |c_k|`, i.e. a valid half-width for
    /// `|f − H_n|`. Closed form for every kind, capped by `η b^{-n}` when η
    /// is finite.
    pub fn tail_bound(&self, n: u32) -> Rational {
        let half = ratio(1, 2);
        let b_pow = Rational::from_integer(big_pow(self.base, n));
        let closed_form = match &self.kind {
            SequenceKind::Geometric { ratio } => {
                &half * rat_pow(ratio, n) / (Rational::one() - ratio)
            }
            SequenceKind::SignedPower { .. } => {
                let b = self.base as i64;
                &half * crate::rational::ratio(b, b - 1) / &b_pow
            }
            SequenceKind::Explicit { head, tail_ratio } => {
                let len = head.len() as u32;
                let mut total: Rational = head.iter().skip(n as usize).map(|h| h.abs()).sum();
                if len > 0 && !tail_ratio.is_zero() {
                    let start = n.max(len) - len + 1;
                    total += head[len as usize - 1].abs() * rat_pow(tail_ratio, start)
                        / (Rational::one() - tail_ratio);
                }
                &half * total
            }
        };
        match self.eta().value() {
            Some(eta) => {
                let eta_width = eta / &b_pow;
                if eta_width < closed_form {
                    eta_width
                } else {
                    closed_form
                }
            }
            None => closed_form,
        }
    }

    /// Least common denominator of `c_start, …, c_{end-1}`.
    pub fn common_denominator(&self, start: u32, end: u32) -> BigInt {
        (start..end).fold(BigInt::one(), |acc, k| lcm(&acc, self.coeff(k).denom()))
    }

    /// Short human-readable description, used for configuration echoes.
    pub fn describe(&self) -> String {
        match &self.kind {
            SequenceKind::Geometric { ratio } => {
                format!("geometric(b={}, a={})", self.base, format_exact(ratio))
            }
            SequenceKind::SignedPower { signs } => {
                let rule = match signs {
                    SignRule::Alternating => "alternating".to_string(),
                    SignRule::Cyclic(list) => {
                        let parts: Vec<String> = list.iter().map(|s| s.to_string()).collect();
                        format!("[{}]", parts.join(","))
                    }
                    SignRule::Seeded(seed) => format!("seeded:{seed}"),
                };
                format!("signed_power(b={}, signs={rule})", self.base)
            }
            SequenceKind::Explicit { head, tail_ratio } => {
                let parts: Vec<String> = head.iter().map(format_exact).collect();
                format!(
                    "explicit(b={}, head=[{}], tail_ratio={})",
                    self.base,
                    parts.join(","),
                    format_exact(tail_ratio)
                )
            }
        }
    }
}
