use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{NumericsError, Rational, Separator};

/// A point of the extended line: a rational, the separator, or ±∞.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum ExtendedPoint {
    NegInf,
    Fin(Rational),
    Sep(Separator),
    PosInf,
}

impl ExtendedPoint {
    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtendedPoint::NegInf | ExtendedPoint::PosInf)
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            ExtendedPoint::Fin(r) => Some(r),
            _ => None,
        }
    }

    /// Multiply by a positive rational.
    pub fn scale(&self, k: &Rational) -> ExtendedPoint {
        debug_assert!(k.is_positive());
        match self {
            ExtendedPoint::Fin(r) => ExtendedPoint::Fin(r * k),
            ExtendedPoint::Sep(s) => ExtendedPoint::Sep(s.scale(k)),
            inf => inf.clone(),
        }
    }

    pub fn shift(&self, d: &Rational) -> ExtendedPoint {
        match self {
            ExtendedPoint::Fin(r) => ExtendedPoint::Fin(r + d),
            ExtendedPoint::Sep(s) => ExtendedPoint::Sep(s.add_rational(d)),
            inf => inf.clone(),
        }
    }

    pub fn neg(&self) -> ExtendedPoint {
        match self {
            ExtendedPoint::NegInf => ExtendedPoint::PosInf,
            ExtendedPoint::PosInf => ExtendedPoint::NegInf,
            ExtendedPoint::Fin(r) => ExtendedPoint::Fin(-r),
            ExtendedPoint::Sep(s) => ExtendedPoint::Sep(s.scale(&Rational::integer(-1))),
        }
    }

    /// `1/p` for `p >= 0`, with `1/0 = +∞` and `1/+∞ = 0`.
    pub(crate) fn recip_nonneg(&self) -> ExtendedPoint {
        match self {
            ExtendedPoint::Fin(r) if r.is_zero() => ExtendedPoint::PosInf,
            ExtendedPoint::Fin(r) => ExtendedPoint::Fin(r.recip().expect("nonzero")),
            ExtendedPoint::Sep(s) => ExtendedPoint::Sep(s.recip()),
            ExtendedPoint::PosInf => ExtendedPoint::Fin(Rational::zero()),
            ExtendedPoint::NegInf => panic!("recip_nonneg of -inf"),
        }
    }

    /// Smallest integer strictly above the point; `None` for −∞ (no bound).
    pub fn int_strictly_above(&self) -> Option<BigInt> {
        match self {
            ExtendedPoint::NegInf => None,
            ExtendedPoint::Fin(r) => Some(r.floor() + BigInt::one()),
            ExtendedPoint::Sep(s) => Some(s.floor() + BigInt::one()),
            ExtendedPoint::PosInf => panic!("no integer above +inf"),
        }
    }

    /// Largest integer strictly below the point; `None` for +∞ (no bound).
    pub fn int_strictly_below(&self) -> Option<BigInt> {
        match self {
            ExtendedPoint::PosInf => None,
            ExtendedPoint::Fin(r) => Some(r.ceil() - BigInt::one()),
            ExtendedPoint::Sep(s) => Some(s.floor()),
            ExtendedPoint::NegInf => panic!("no integer below -inf"),
        }
    }

    /// Largest integer `<=` a finite point.
    pub(crate) fn floor(&self) -> BigInt {
        match self {
            ExtendedPoint::Fin(r) => r.floor(),
            ExtendedPoint::Sep(s) => s.floor(),
            _ => panic!("floor of an infinite point"),
        }
    }

    /// Report-only decimal rendering.
    pub fn to_decimal(&self, digits: u32) -> String {
        match self {
            ExtendedPoint::Fin(r) => r.to_decimal(digits as usize),
            ExtendedPoint::Sep(s) => s.to_decimal(digits),
            other => other.to_string(),
        }
    }
}

impl From<Rational> for ExtendedPoint {
    fn from(r: Rational) -> Self {
        ExtendedPoint::Fin(r)
    }
}

impl From<Separator> for ExtendedPoint {
    fn from(s: Separator) -> Self {
        ExtendedPoint::Sep(s)
    }
}

impl Ord for ExtendedPoint {
    fn cmp(&self, other: &Self) -> Ordering {
        use ExtendedPoint::*;
        match (self, other) {
            (NegInf, NegInf) | (PosInf, PosInf) => Ordering::Equal,
            (NegInf, _) | (_, PosInf) => Ordering::Less,
            (_, NegInf) | (PosInf, _) => Ordering::Greater,
            (Fin(a), Fin(b)) => a.cmp(b),
            (Sep(s), Fin(r)) => s.cmp_rational(r),
            (Fin(r), Sep(s)) => s.cmp_rational(r).reverse(),
            (Sep(a), Sep(b)) => a.cmp_separator(b),
        }
    }
}

impl PartialOrd for ExtendedPoint {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Total order on extended points; never `Equal` between a rational and a separator.
pub fn compare(x: &ExtendedPoint, y: &ExtendedPoint) -> Ordering {
    x.cmp(y)
}

impl fmt::Display for ExtendedPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedPoint::NegInf => f.write_str("-inf"),
            ExtendedPoint::PosInf => f.write_str("+inf"),
            ExtendedPoint::Fin(r) => fmt::Display::fmt(r, f),
            ExtendedPoint::Sep(s) => fmt::Display::fmt(s, f),
        }
    }
}

impl fmt::Debug for ExtendedPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for ExtendedPoint {
    type Err = NumericsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "-inf" => Ok(ExtendedPoint::NegInf),
            "+inf" => Ok(ExtendedPoint::PosInf),
            _ if s.ends_with("*sqrt2") => Ok(ExtendedPoint::Sep(s.parse()?)),
            _ => Ok(ExtendedPoint::Fin(s.parse()?)),
        }
    }
}

impl Serialize for ExtendedPoint {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ExtendedPoint {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Open interval `(lo, hi)` of the extended line with `lo < hi`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OpenInterval {
    lo: ExtendedPoint,
    hi: ExtendedPoint,
}

impl OpenInterval {
    pub fn new(lo: ExtendedPoint, hi: ExtendedPoint) -> Result<Self, NumericsError> {
        if lo >= hi {
            return Err(NumericsError::EmptyInterval { lo: lo.to_string(), hi: hi.to_string() });
        }
        Ok(OpenInterval { lo, hi })
    }

    pub fn rational(lo: Rational, hi: Rational) -> Result<Self, NumericsError> {
        Self::new(lo.into(), hi.into())
    }

    pub fn whole_line() -> Self {
        OpenInterval { lo: ExtendedPoint::NegInf, hi: ExtendedPoint::PosInf }
    }

    pub fn lo(&self) -> &ExtendedPoint {
        &self.lo
    }

    pub fn hi(&self) -> &ExtendedPoint {
        &self.hi
    }

    /// Strict membership; ±∞ is never a valid query point.
    pub fn contains(&self, p: &ExtendedPoint) -> Result<bool, NumericsError> {
        if p.is_infinite() {
            return Err(NumericsError::InfiniteQueryPoint);
        }
        Ok(self.lo < *p && *p < self.hi)
    }

    pub fn contains_rational(&self, r: &Rational) -> bool {
        let p = ExtendedPoint::Fin(r.clone());
        self.lo < p && p < self.hi
    }

    /// Intersection with another open interval, `None` when empty.
    pub fn intersect(&self, other: &OpenInterval) -> Option<OpenInterval> {
        let lo = std::cmp::max(&self.lo, &other.lo).clone();
        let hi = std::cmp::min(&self.hi, &other.hi).clone();
        (lo < hi).then_some(OpenInterval { lo, hi })
    }

    pub fn is_bounded(&self) -> bool {
        !self.lo.is_infinite() && !self.hi.is_infinite()
    }

    /// Whether a finite point lies in the closure `[lo, hi]`.
    pub fn closure_contains(&self, r: &Rational) -> bool {
        let p = ExtendedPoint::Fin(r.clone());
        self.lo <= p && p <= self.hi
    }
}

impl fmt::Display for OpenInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.lo, self.hi)
    }
}

impl fmt::Debug for OpenInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
