//! Arithmetic progressions `start + i·step`, finite or unbounded.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use super::{Census, Search, SetError};
use crate::numerics::{ExtendedPoint, OpenInterval, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Progression {
    pub(crate) start: Rational,
    pub(crate) step: Rational,
    pub(crate) count: Option<u64>,
}

/// Inclusive index range; `hi = None` means unbounded above.
struct IndexRange {
    lo: BigInt,
    hi: Option<BigInt>,
}

impl Progression {
    pub(crate) fn term(&self, i: &BigInt) -> Rational {
        &self.start + &self.step.mul_int(i)
    }

    pub(crate) fn enumerate(&self, i: u64) -> Option<Rational> {
        if self.count.is_some_and(|c| i >= c) {
            return None;
        }
        Some(self.term(&BigInt::from(i)))
    }

    fn position(&self, q: &Rational) -> Option<BigInt> {
        let t = &(q - &self.start) / &self.step;
        if !t.is_integer() || t.is_negative() {
            return None;
        }
        let t = t.numer().clone();
        match self.count {
            Some(c) if t >= BigInt::from(c) => None,
            _ => Some(t),
        }
    }

    pub(crate) fn contains(&self, q: &Rational) -> bool {
        self.position(q).is_some()
    }

    pub(crate) fn index_of(&self, q: &Rational) -> Result<Option<u64>, SetError> {
        match self.position(q) {
            None => Ok(None),
            Some(t) => t.to_u64().map(Some).ok_or_else(|| SetError::IndexOutOfReach(q.to_string())),
        }
    }

    /// Map a point to progression-index coordinates `(p − start)/step`.
    fn to_index_coord(&self, p: &ExtendedPoint) -> ExtendedPoint {
        let shifted = p.shift(&-&self.start);
        let inv = self.step.recip().expect("nonzero step");
        if inv.is_positive() {
            shifted.scale(&inv)
        } else {
            shifted.scale(&inv.abs()).neg()
        }
    }

    fn index_range(&self, within: &OpenInterval) -> Option<IndexRange> {
        let (a, b) = {
            let a = self.to_index_coord(within.lo());
            let b = self.to_index_coord(within.hi());
            if self.step.is_positive() {
                (a, b)
            } else {
                (b, a)
            }
        };
        let lo = match a {
            ExtendedPoint::PosInf => return None,
            ref p => p.int_strictly_above().unwrap_or_else(BigInt::zero).max(BigInt::zero()),
        };
        let mut hi = match b {
            ExtendedPoint::NegInf => return None,
            ref p => p.int_strictly_below(),
        };
        if let Some(c) = self.count {
            let cap = BigInt::from(c) - 1u32;
            hi = Some(hi.map_or(cap.clone(), |h| h.min(cap)));
        }
        if hi.as_ref().is_some_and(|h| *h < lo) {
            return None;
        }
        Some(IndexRange { lo, hi })
    }

    pub(crate) fn census(&self, within: &OpenInterval) -> Census {
        match self.index_range(within) {
            None => Census::Empty,
            Some(IndexRange { hi: None, .. }) => Census::Infinite,
            Some(IndexRange { lo, hi: Some(hi) }) => {
                Census::finite((hi - lo + 1u32).to_u64().unwrap_or(u64::MAX))
            }
        }
    }

    pub(crate) fn members_in(&self, within: &OpenInterval) -> Option<Vec<Rational>> {
        match self.index_range(within) {
            None => Some(Vec::new()),
            Some(IndexRange { hi: None, .. }) => None,
            Some(IndexRange { lo, hi: Some(hi) }) => {
                let mut out = Vec::new();
                let mut i = lo;
                while i <= hi {
                    out.push(self.term(&i));
                    i += 1;
                }
                Some(out)
            }
        }
    }

    pub(crate) fn first_match(&self, search: &Search<'_>) -> Result<Option<Rational>, SetError> {
        let Some(range) = self.index_range(search.within) else {
            return Ok(None);
        };
        let mut i = range.lo;
        let mut examined = 0u64;
        while range.hi.as_ref().is_none_or(|h| i <= *h) {
            let q = self.term(&i);
            if !(search.skip)(&q) {
                return Ok(Some(q));
            }
            examined += 1;
            search.check_cap(examined)?;
            i += 1;
        }
        Ok(None)
    }

    /// Nearest other term to `p`.
    pub(crate) fn nearest_distance(&self, p: &Rational) -> Option<Rational> {
        let t = &(p - &self.start) / &self.step;
        let base = t.floor();
        let mut best: Option<Rational> = None;
        for d in -1..=2 {
            let mut i = (&base + BigInt::from(d)).max(BigInt::zero());
            if let Some(c) = self.count {
                if c == 0 {
                    return None;
                }
                i = i.min(BigInt::from(c - 1));
            }
            let term = self.term(&i);
            if term == *p {
                continue;
            }
            let dist = (&term - p).abs();
            best = Some(best.map_or(dist.clone(), |b| b.min(dist)));
        }
        best
    }

}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::Separator;

    fn naturals() -> Progression {
        Progression { start: Rational::one(), step: Rational::one(), count: None }
    }

    #[test]
    fn census_with_separator_endpoint() {
        let g = Separator::new(Rational::integer(2), Rational::integer(-1)).unwrap(); // 2 − √2 ≈ 0.586
        let left = OpenInterval::new(ExtendedPoint::NegInf, g.clone().into()).unwrap();
        let right = OpenInterval::new(g.into(), ExtendedPoint::PosInf).unwrap();
        assert_eq!(naturals().census(&left), Census::Empty);
        assert_eq!(naturals().census(&right), Census::Infinite);
        let mid = OpenInterval::rational(Rational::frac(3, 2), Rational::integer(7)).unwrap();
        assert_eq!(naturals().census(&mid), Census::Finite(5));
        assert_eq!(naturals().members_in(&mid).unwrap().len(), 5);
    }

    #[test]
    fn descending_progression() {
        let p = Progression { start: Rational::zero(), step: Rational::frac(-1, 2), count: Some(10) };
        let iv = OpenInterval::rational(Rational::integer(-2), Rational::frac(-1, 4)).unwrap();
        // terms -1/2, -1, -3/2
        assert_eq!(p.census(&iv), Census::Finite(3));
        assert_eq!(p.index_of(&Rational::frac(-3, 2)).unwrap(), Some(3));
        assert_eq!(p.index_of(&Rational::integer(-5)).unwrap(), None);
        let skip = |_: &Rational| false;
        let search = Search::new(&iv, &skip);
        assert_eq!(p.first_match(&search).unwrap(), Some(Rational::frac(-1, 2)));
    }

    #[test]
    fn nearest() {
        assert_eq!(naturals().nearest_distance(&Rational::one()), Some(Rational::one()));
        assert_eq!(naturals().nearest_distance(&Rational::frac(5, 2)), Some(Rational::frac(1, 2)));
        assert_eq!(naturals().nearest_distance(&Rational::integer(-3)), Some(Rational::integer(4)));
    }
}
