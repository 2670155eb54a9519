//! Valuation values: rational numbers with denominator 1 or 2, plus +infinity.
//!
//! Every valuation appearing in this crate lives in (1/2)Z union {+inf}: base
//! fields are unramified (integer valuations) and the only ramified extensions
//! that occur are quadratic (half-integer valuations). Keeping the denominator
//! this constrained lets `Val` stay exact with no rational-arithmetic crate.

use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Sub};

/// A valuation value: either a finite half-integer `num/den` with
/// `den` in {1, 2} and the fraction in lowest terms, or `+inf`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub enum Val {
    Finite { num: i64, den: i64 },
    Infinite,
}

impl Val {
    pub const ZERO: Val = Val::Finite { num: 0, den: 1 };

    /// Integer valuation `n`.
    pub fn int(n: i64) -> Val {
        Val::Finite { num: n, den: 1 }
    }

    /// Valuation `num/2`, normalized to lowest terms.
    pub fn half(num: i64) -> Val {
        if num % 2 == 0 {
            Val::Finite { num: num / 2, den: 1 }
        } else {
            Val::Finite { num, den: 2 }
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Val::Finite { .. })
    }

    /// Numerator over denominator 2, i.e. the value as a count of half-units.
    /// Panics on `Infinite`.
    pub fn half_units(self) -> i64 {
        match self {
            Val::Finite { num, den } => num * (2 / den),
            Val::Infinite => panic!("half_units of infinite valuation"),
        }
    }

    /// The finite value as an integer, or `None` if infinite or a strict half-integer.
    pub fn as_int(self) -> Option<i64> {
        match self {
            Val::Finite { num, den: 1 } => Some(num),
            _ => None,
        }
    }
}

impl Add for Val {
    type Output = Val;
    fn add(self, rhs: Val) -> Val {
        match (self, rhs) {
            (Val::Finite { .. }, Val::Finite { .. }) => {
                Val::half(self.half_units() + rhs.half_units())
            }
            _ => Val::Infinite,
        }
    }
}

impl Sub for Val {
    type Output = Val;
    /// Panics when subtracting infinity from infinity.
    fn sub(self, rhs: Val) -> Val {
        match (self, rhs) {
            (Val::Finite { .. }, Val::Finite { .. }) => {
                Val::half(self.half_units() - rhs.half_units())
            }
            (Val::Infinite, Val::Finite { .. }) => Val::Infinite,
            _ => panic!("cannot subtract an infinite valuation"),
        }
    }
}

impl PartialOrd for Val {
    fn partial_cmp(&self, other: &Val) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Val {
    fn cmp(&self, other: &Val) -> Ordering {
        match (self, other) {
            (Val::Infinite, Val::Infinite) => Ordering::Equal,
            (Val::Infinite, _) => Ordering::Greater,
            (_, Val::Infinite) => Ordering::Less,
            _ => self.half_units().cmp(&other.half_units()),
        }
    }
}

impl fmt::Display for Val {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Val::Finite { num, den: 1 } => write!(f, "{num}"),
            Val::Finite { num, den } => write!(f, "{num}/{den}"),
            Val::Infinite => write!(f, "inf"),
        }
    }
}

impl fmt::Debug for Val {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for Val {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Frac {
            num: i64,
            den: i64,
        }
        match *self {
            Val::Finite { num, den } => Frac { num, den }.serialize(ser),
            Val::Infinite => "inf".serialize(ser),
        }
    }
}

impl<'de> Deserialize<'de> for Val {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Frac { num: i64, den: i64 },
            Inf(String),
        }
        match Raw::deserialize(de)? {
            Raw::Frac { num, den: 1 } => Ok(Val::int(num)),
            Raw::Frac { num, den: 2 } => Ok(Val::half(num)),
            Raw::Frac { .. } => Err(serde::de::Error::custom("valuation denominator must be 1 or 2")),
            Raw::Inf(s) if s == "inf" => Ok(Val::Infinite),
            Raw::Inf(_) => Err(serde::de::Error::custom("expected {num, den} or \"inf\"")),
        }
    }
}
