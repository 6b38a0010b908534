//! Reduced fractions inside an open interval ordered by denominator, then
//! numerator. Two variants: every denominator `1, 2, 3, …` or odd
//! denominators `3, 5, 7, …`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::{Search, SetError};
use crate::numerics::{ExtendedPoint, OpenInterval, Rational};

/// Largest denominator for which `index_of` sums per-denominator counts.
const INDEX_REACH: u64 = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Denominators {
    All,
    Odd,
}

impl Denominators {
    fn first(self) -> u64 {
        match self {
            Denominators::All => 1,
            Denominators::Odd => 3,
        }
    }

    fn stride(self) -> u64 {
        match self {
            Denominators::All => 1,
            Denominators::Odd => 2,
        }
    }

    fn admits(self, q: &BigInt) -> bool {
        match self {
            Denominators::All => true,
            Denominators::Odd => q.is_odd() && *q >= BigInt::from(3),
        }
    }

    /// Smallest admissible denominator `>= q`.
    fn round_up(self, q: BigInt) -> BigInt {
        let q = q.max(BigInt::from(self.first()));
        if self == Denominators::Odd && q.is_even() {
            q + 1
        } else {
            q
        }
    }
}

fn distinct_primes(mut n: u64) -> Vec<u64> {
    let mut primes = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            primes.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        primes.push(n);
    }
    primes
}

/// Integers in `[a, b]` coprime to `q`, by inclusion–exclusion over the
/// prime divisors of `q`.
fn coprime_in(a: &BigInt, b: &BigInt, primes: &[u64]) -> BigInt {
    if b < a {
        return BigInt::zero();
    }
    let mut total = BigInt::zero();
    for mask in 0u32..(1 << primes.len()) {
        let mut d = 1u64;
        for (i, p) in primes.iter().enumerate() {
            if mask & (1 << i) != 0 {
                d *= p;
            }
        }
        let d = BigInt::from(d);
        let multiples = b.div_floor(&d) - (a - 1u32).div_floor(&d);
        if mask.count_ones() % 2 == 0 {
            total += multiples;
        } else {
            total -= multiples;
        }
    }
    total
}

/// Integer numerator range `[first, last]` strictly inside `(lo·q, hi·q)`.
fn numerator_range(lo: &ExtendedPoint, hi: &ExtendedPoint, q: &BigInt) -> (BigInt, BigInt) {
    let scale = Rational::integer(q.clone());
    let first = lo.scale(&scale).int_strictly_above().expect("bounded");
    let last = hi.scale(&scale).int_strictly_below().expect("bounded");
    (first, last)
}

fn count_at(lo: &Rational, hi: &Rational, q: u64) -> BigInt {
    let qb = BigInt::from(q);
    let (a, b) = numerator_range(&lo.clone().into(), &hi.clone().into(), &qb);
    coprime_in(&a, &b, &distinct_primes(q))
}

pub(crate) fn contains(kind: Denominators, lo: &Rational, hi: &Rational, r: &Rational) -> bool {
    kind.admits(r.denom()) && lo < r && r < hi
}

pub(crate) fn enumerate(kind: Denominators, lo: &Rational, hi: &Rational, i: u64) -> Rational {
    let mut rest = BigInt::from(i);
    let mut q = kind.first();
    loop {
        let count = count_at(lo, hi, q);
        if rest < count {
            let qb = BigInt::from(q);
            let (mut m, _) = numerator_range(&lo.clone().into(), &hi.clone().into(), &qb);
            loop {
                if m.gcd(&qb).is_one() {
                    if rest.is_zero() {
                        return Rational::new(m, qb).expect("positive");
                    }
                    rest -= 1;
                }
                m += 1;
            }
        }
        rest -= count;
        q += kind.stride();
    }
}

pub(crate) fn index_of(kind: Denominators, lo: &Rational, hi: &Rational, r: &Rational) -> Result<Option<u64>, SetError> {
    if !contains(kind, lo, hi, r) {
        return Ok(None);
    }
    let q = r
        .denom()
        .to_u64()
        .filter(|&q| q <= INDEX_REACH)
        .ok_or_else(|| SetError::IndexOutOfReach(r.to_string()))?;
    let mut offset = BigInt::zero();
    let mut d = kind.first();
    while d < q {
        offset += count_at(lo, hi, d);
        d += kind.stride();
    }
    let qb = BigInt::from(q);
    let (a, _) = numerator_range(&lo.clone().into(), &hi.clone().into(), &qb);
    offset += coprime_in(&a, &(r.numer() - 1), &distinct_primes(q));
    offset.to_u64().map(Some).ok_or_else(|| SetError::IndexOutOfReach(r.to_string()))
}

/// The fraction of least denominator (then least numerator) strictly inside
/// `(lo, hi)`, both finite. Continued-fraction descent, exact for rational
/// and separator endpoints alike.
pub(crate) fn simplest_between(lo: &ExtendedPoint, hi: &ExtendedPoint) -> (BigInt, BigInt) {
    let n = lo.int_strictly_above().expect("finite lower end");
    if ExtendedPoint::Fin(Rational::integer(n.clone())) < *hi {
        return (n, BigInt::one());
    }
    let f = lo.floor();
    let shift = Rational::integer(-f.clone());
    let lo_frac = lo.shift(&shift);
    let hi_frac = hi.shift(&shift);
    // p/q ∈ (lo', hi') ⊆ [0, 1]  ⟺  q/p ∈ (1/hi', 1/lo')
    let (a, b) = simplest_between(&hi_frac.recip_nonneg(), &lo_frac.recip_nonneg());
    (f * &a + b, a)
}

pub(crate) fn first_match(
    kind: Denominators,
    lo: &Rational,
    hi: &Rational,
    search: &Search<'_>,
) -> Result<Option<Rational>, SetError> {
    let support = OpenInterval::rational(lo.clone(), hi.clone()).expect("validated support");
    let Some(window) = support.intersect(search.within) else {
        return Ok(None);
    };
    let (_, q_min) = simplest_between(window.lo(), window.hi());
    let mut q = kind.round_up(q_min);
    let stride = BigInt::from(kind.stride());
    let mut examined = 0u64;
    loop {
        let (mut m, last) = numerator_range(window.lo(), window.hi(), &q);
        while m <= last {
            if m.gcd(&q).is_one() {
                let r = Rational::new(m.clone(), q.clone()).expect("positive");
                if !(search.skip)(&r) {
                    return Ok(Some(r));
                }
                examined += 1;
                search.check_cap(examined)?;
            }
            m += 1;
        }
        q += &stride;
    }
}

#[derive(Clone, Debug)]
pub(crate) struct GridCursor {
    kind: Denominators,
    lo: Rational,
    hi: Rational,
    q: BigInt,
    m: BigInt,
    last: BigInt,
}

impl GridCursor {
    pub(crate) fn new(kind: Denominators, lo: &Rational, hi: &Rational) -> Self {
        let q = BigInt::from(kind.first());
        let (m, last) = numerator_range(&lo.clone().into(), &hi.clone().into(), &q);
        GridCursor { kind, lo: lo.clone(), hi: hi.clone(), q, m, last }
    }

    pub(crate) fn next_value(&mut self) -> Rational {
        loop {
            while self.m > self.last {
                self.q += self.kind.stride();
                let (m, last) = numerator_range(&self.lo.clone().into(), &self.hi.clone().into(), &self.q);
                self.m = m;
                self.last = last;
            }
            let m = self.m.clone();
            self.m += 1;
            if m.gcd(&self.q).is_one() {
                return Rational::new(m, self.q.clone()).expect("positive");
            }
        }
    }
}
