use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{NumericsError, Rational};

/// Sign of `a + b·√2`, decided with integer arithmetic only.
pub(crate) fn quadratic_sign(a: &Rational, b: &Rational) -> Ordering {
    let sa = a.cmp(&Rational::zero());
    let sb = b.cmp(&Rational::zero());
    if sb == Ordering::Equal {
        return sa;
    }
    if sa == Ordering::Equal || sa == sb {
        return sb;
    }
    // Opposite signs: the larger magnitude wins, |a| vs |b|·√2.
    let a2 = a * a;
    let b2 = &(b * b) * &Rational::integer(2);
    if a2 > b2 {
        sa
    } else {
        sb
    }
}

/// The irrational number `a + b·√2` with `b != 0`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Separator {
    a: Rational,
    b: Rational,
}

impl Separator {
    pub fn new(a: Rational, b: Rational) -> Result<Self, NumericsError> {
        if b.is_zero() {
            return Err(NumericsError::RationalSeparator);
        }
        Ok(Separator { a, b })
    }

    /// `√2 − 1`
    pub fn sqrt2_minus_one() -> Self {
        Separator { a: Rational::integer(-1), b: Rational::one() }
    }

    pub fn rational_part(&self) -> &Rational {
        &self.a
    }

    pub fn sqrt2_coefficient(&self) -> &Rational {
        &self.b
    }

    /// Exact comparison of `self` against a rational.
    pub fn cmp_rational(&self, r: &Rational) -> Ordering {
        quadratic_sign(&(&self.a - r), &self.b)
    }

    pub fn cmp_separator(&self, other: &Separator) -> Ordering {
        quadratic_sign(&(&self.a - &other.a), &(&self.b - &other.b))
    }

    pub fn add_rational(&self, r: &Rational) -> Separator {
        Separator { a: &self.a + r, b: self.b.clone() }
    }

    /// `k · self` for a nonzero rational `k`.
    pub fn scale(&self, k: &Rational) -> Separator {
        assert!(!k.is_zero(), "scaling a separator by zero");
        Separator { a: &self.a * k, b: &self.b * k }
    }

    pub fn recip(&self) -> Separator {
        // 1/(a + b√2) = (a − b√2)/(a² − 2b²); the norm is nonzero since √2 is irrational.
        let norm = &(&self.a * &self.a) - &(&(&self.b * &self.b) * &Rational::integer(2));
        let inv = norm.recip().expect("nonzero norm");
        Separator { a: &self.a * &inv, b: -(&self.b * &inv) }
    }

    /// Largest integer below the value (the value itself is never an integer).
    pub fn floor(&self) -> BigInt {
        let floor_b_sqrt2 = {
            let p = self.b.numer().abs();
            let q = self.b.denom();
            let root = (&p * &p * BigInt::from(2)).sqrt();
            let f = root.div_floor(q);
            if self.b.is_positive() {
                f
            } else {
                -f - BigInt::one()
            }
        };
        let n0 = self.a.floor() + floor_b_sqrt2;
        let n1 = &n0 + BigInt::one();
        if self.cmp_rational(&Rational::integer(n1.clone())) == Ordering::Greater {
            n1
        } else {
            n0
        }
    }

    /// Decimal rendering for reports; uses an integer square root, never floats.
    pub fn to_decimal(&self, digits: u32) -> String {
        let scale = BigInt::from(10).pow(digits);
        let scaled = self.scale(&Rational::integer(scale.clone()));
        let fl = scaled.floor();
        Rational::new(fl, scale).expect("positive scale").to_decimal(digits as usize)
    }
}

impl fmt::Display for Separator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}+{}*sqrt2", self.a, self.b)
    }
}

impl fmt::Debug for Separator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Separator {
    type Err = NumericsError;

    /// Parses the canonical `a/b+c/d*sqrt2` form.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || NumericsError::Parse(s.to_string());
        let body = s.strip_suffix("*sqrt2").ok_or_else(bad)?;
        // The rational part may itself start with '-', so split at the first '+'.
        let (a, b) = body.split_once('+').ok_or_else(bad)?;
        let a: Rational = a.parse()?;
        let b: Rational = b.parse()?;
        Separator::new(a, b)
    }
}

impl Serialize for Separator {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Separator {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt2_minus_one_against_halves() {
        let g = Separator::sqrt2_minus_one();
        // √2 − 1 ≈ 0.41421
        assert_eq!(g.cmp_rational(&Rational::frac(1, 2)), Ordering::Less);
        assert_eq!(g.cmp_rational(&Rational::frac(2, 5)), Ordering::Greater);
        assert_eq!(g.cmp_rational(&Rational::frac(41421, 100000)), Ordering::Greater);
        assert_eq!(g.cmp_rational(&Rational::frac(41422, 100000)), Ordering::Less);
    }

    #[test]
    fn floor_matches_known_values() {
        assert_eq!(Separator::sqrt2_minus_one().floor(), BigInt::from(0));
        let neg = Separator::new(Rational::integer(1), Rational::integer(-1)).unwrap();
        assert_eq!(neg.floor(), BigInt::from(-1));
        let big = Separator::new(Rational::integer(0), Rational::integer(1000)).unwrap();
        assert_eq!(big.floor(), BigInt::from(1414));
        let frac = Separator::new(Rational::frac(1, 3), Rational::frac(-7, 5)).unwrap();
        // 1/3 − 1.4·1.41421 ≈ −1.6466
        assert_eq!(frac.floor(), BigInt::from(-2));
    }

    #[test]
    fn recip_is_inverse() {
        let s = Separator::new(Rational::frac(3, 7), Rational::frac(-2, 5)).unwrap();
        let r = s.recip();
        // (a + b√2)(c + d√2) = (ac + 2bd) + (ad + bc)√2
        let re = &(&s.a * &r.a) + &(&(&s.b * &r.b) * &Rational::integer(2));
        let im = &(&s.a * &r.b) + &(&s.b * &r.a);
        assert_eq!(re, Rational::one());
        assert!(im.is_zero());
    }

    #[test]
    fn text_round_trip() {
        let g = Separator::sqrt2_minus_one();
        assert_eq!(g.to_string(), "-1/1+1/1*sqrt2");
        assert_eq!(g.to_string().parse::<Separator>().unwrap(), g);
        let h = Separator::new(Rational::frac(2, 3), Rational::frac(-5, 4)).unwrap();
        assert_eq!(h.to_string(), "2/3+-5/4*sqrt2");
        assert_eq!(h.to_string().parse::<Separator>().unwrap(), h);
        assert!("1/2+0/1*sqrt2".parse::<Separator>().is_err());
        assert!("1/2*sqrt2".parse::<Separator>().is_err());
    }

    #[test]
    fn decimal() {
        assert_eq!(Separator::sqrt2_minus_one().to_decimal(5), "0.41421");
    }
}
