//! Dyadic rationals `m/2^k` (`k >= 1`, `m` odd) inside an open interval,
//! enumerated level by level with ascending numerators.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{Search, SetError};
use crate::numerics::{ExtendedPoint, OpenInterval, Rational};

/// Odd integers strictly between `a` and `b`, as `(first, count)`.
fn odd_range(a: &ExtendedPoint, b: &ExtendedPoint) -> (BigInt, BigInt) {
    let mut first = a.int_strictly_above().expect("bounded below");
    if first.is_even() {
        first += 1;
    }
    let last = b.int_strictly_below().expect("bounded above");
    if last < first {
        return (first, BigInt::zero());
    }
    let count = (&last - &first) / 2 + 1;
    (first, count)
}

fn level_range(lo: &Rational, hi: &Rational, k: u32) -> (BigInt, BigInt) {
    let scale = Rational::integer(Rational::pow2(k));
    odd_range(&ExtendedPoint::Fin(lo * &scale), &ExtendedPoint::Fin(hi * &scale))
}

pub(crate) fn is_dyadic_level(q: &Rational) -> Option<u32> {
    let d = q.denom();
    if d.is_one() {
        return None;
    }
    let k = d.trailing_zeros()?;
    (d.bits() == k + 1).then_some(k as u32)
}

pub(crate) fn contains(lo: &Rational, hi: &Rational, q: &Rational) -> bool {
    is_dyadic_level(q).is_some() && lo < q && q < hi
}

pub(crate) fn enumerate(lo: &Rational, hi: &Rational, i: u64) -> Rational {
    let mut rest = BigInt::from(i);
    let mut k = 1u32;
    loop {
        let (first, count) = level_range(lo, hi, k);
        if rest < count {
            let m = first + rest * 2;
            return Rational::new(m, Rational::pow2(k)).expect("power of two");
        }
        rest -= count;
        k += 1;
    }
}

pub(crate) fn index_of(lo: &Rational, hi: &Rational, q: &Rational) -> Result<Option<u64>, SetError> {
    if !contains(lo, hi, q) {
        return Ok(None);
    }
    let k = is_dyadic_level(q).expect("dyadic");
    let mut offset = BigInt::zero();
    for level in 1..k {
        offset += level_range(lo, hi, level).1;
    }
    let (first, _) = level_range(lo, hi, k);
    offset += (q.numer() - first) / 2;
    offset.to_u64().map(Some).ok_or(SetError::IndexOutOfReach(q.to_string()))
}

/// Least-index member of the open support `(lo, hi)` inside `search.within`.
pub(crate) fn first_match(lo: &Rational, hi: &Rational, search: &Search<'_>) -> Result<Option<Rational>, SetError> {
    let support = OpenInterval::rational(lo.clone(), hi.clone()).expect("validated support");
    let Some(window) = support.intersect(search.within) else {
        return Ok(None);
    };
    let mut examined = 0u64;
    let mut k = 1u32;
    loop {
        let scale = Rational::integer(Rational::pow2(k));
        let (first, count) = odd_range(&window.lo().scale(&scale), &window.hi().scale(&scale));
        let mut m = first;
        let mut left = count;
        while left.is_positive() {
            let q = Rational::new(m.clone(), Rational::pow2(k)).expect("power of two");
            if !(search.skip)(&q) {
                return Ok(Some(q));
            }
            examined += 1;
            search.check_cap(examined)?;
            m += 2;
            left -= 1;
        }
        k += 1;
    }
}

/// Streaming enumeration state.
#[derive(Clone, Debug)]
pub(crate) struct DyadicCursor {
    lo: Rational,
    hi: Rational,
    k: u32,
    m: BigInt,
    left: BigInt,
}

impl DyadicCursor {
    pub(crate) fn new(lo: &Rational, hi: &Rational) -> Self {
        DyadicCursor { lo: lo.clone(), hi: hi.clone(), k: 0, m: BigInt::zero(), left: BigInt::zero() }
    }

    pub(crate) fn next_value(&mut self) -> Rational {
        while !self.left.is_positive() {
            self.k += 1;
            let (first, count) = level_range(&self.lo, &self.hi, self.k);
            self.m = first;
            self.left = count;
        }
        let q = Rational::new(self.m.clone(), Rational::pow2(self.k)).expect("power of two");
        self.m += 2;
        self.left -= 1;
        q
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn breadth_first_order() {
        let (lo, hi) = (Rational::zero(), Rational::one());
        let got: Vec<_> = (0..5).map(|i| enumerate(&lo, &hi, i).to_string()).collect();
        assert_eq!(got, ["1/2", "1/4", "3/4", "1/8", "3/8"]);
        assert_eq!(index_of(&lo, &hi, &Rational::frac(3, 8)).unwrap(), Some(4));
        assert_eq!(index_of(&lo, &hi, &Rational::frac(1, 3)).unwrap(), None);
        assert_eq!(index_of(&lo, &hi, &Rational::one()).unwrap(), None);
    }

    #[test]
    fn shifted_support() {
        let (lo, hi) = (Rational::frac(1, 3), Rational::frac(5, 2));
        // level 1: 1/2, 3/2; level 2: 3/4, 5/4, 7/4, 9/4
        let got: Vec<_> = (0..6).map(|i| enumerate(&lo, &hi, i).to_string()).collect();
        assert_eq!(got, ["1/2", "3/2", "3/4", "5/4", "7/4", "9/4"]);
        let mut cur = DyadicCursor::new(&lo, &hi);
        for want in got {
            assert_eq!(cur.next_value().to_string(), want);
        }
    }

    #[test]
    fn out_of_reach_index() {
        let q = Rational::new(1, Rational::pow2(80)).unwrap();
        assert!(matches!(
            index_of(&Rational::zero(), &Rational::one(), &q),
            Err(SetError::IndexOutOfReach(_))
        ));
    }
}
