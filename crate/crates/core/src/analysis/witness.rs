//! Monotone sequences from `Q ∪ F` converging to a target.

use serde::Serialize;

use super::AnalysisError;
use crate::numerics::{ExtendedPoint, OpenInterval, Rational};
use crate::sets::SetSpec;

/// Candidates rejected per term before giving up on a set.
const SCAN_CAP: u64 = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Below,
    Above,
}

impl std::str::FromStr for Side {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "below" => Ok(Side::Below),
            "above" => Ok(Side::Above),
            other => Err(format!("unknown side {other:?}")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Source {
    F,
    Q,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessTerm {
    pub value: Rational,
    pub source: Source,
    /// Enumeration index in its source set, when it fits in 64 bits.
    pub index: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessSequence {
    pub target: Rational,
    pub side: Side,
    pub terms: Vec<WitnessTerm>,
}

impl WitnessSequence {
    pub fn values(&self) -> impl Iterator<Item = &Rational> {
        self.terms.iter().map(|t| &t.value)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Window for term `i`: within `2^{−i−2}` of the target on `side`, and
/// strictly closer than the previous term.
pub(crate) fn window(target: &Rational, side: Side, i: u32, previous: Option<&Rational>) -> OpenInterval {
    let radius = Rational::inv_pow2(i + 2);
    let (lo, hi) = match side {
        Side::Below => {
            let far = target - &radius;
            (previous.map_or(far.clone(), |p| p.clone().max(far)), target.clone())
        }
        Side::Above => {
            let far = target + &radius;
            (target.clone(), previous.map_or(far.clone(), |p| p.clone().min(far)))
        }
    };
    OpenInterval::new(ExtendedPoint::Fin(lo), ExtendedPoint::Fin(hi)).expect("previous term lies strictly inside the last window")
}

/// Least-index member of `set` inside `within` satisfying `accept`.
pub(crate) fn least_in(
    set: &SetSpec,
    within: &OpenInterval,
    accept: &dyn Fn(&Rational) -> bool,
) -> Result<Option<Rational>, AnalysisError> {
    let skip = |q: &Rational| !accept(q);
    Ok(set.first_value_where(within, &skip, SCAN_CAP)?)
}

/// `count` terms approaching `target` from `side`; term `i` is the
/// least-index F-point of its window, or the least-index Q-point when the
/// window holds no F-point.
pub fn approach_sequence(
    q: &SetSpec,
    f: &SetSpec,
    target: &Rational,
    side: Side,
    count: usize,
) -> Result<WitnessSequence, AnalysisError> {
    assert!(count >= 1, "a witness sequence needs at least one term");
    let mut terms: Vec<WitnessTerm> = Vec::with_capacity(count);
    for i in 0..count {
        let w = window(target, side, i as u32, terms.last().map(|t| &t.value));
        let any = |_: &Rational| true;
        let found = match least_in(f, &w, &any)? {
            Some(v) => Some((v, Source::F)),
            None => least_in(q, &w, &any)?.map(|v| (v, Source::Q)),
        };
        let Some((value, source)) = found else {
            return Err(AnalysisError::IsolatedTarget { target: target.clone(), term: i });
        };
        let set = if source == Source::F { f } else { q };
        let index = set.index_of(&value).ok().flatten();
        terms.push(WitnessTerm { value, source, index });
    }
    Ok(WitnessSequence { target: target.clone(), side, terms })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i64, q: i64) -> Rational {
        Rational::frac(p, q)
    }

    fn sets() -> (SetSpec, SetSpec) {
        (SetSpec::odd_denominator(r(0, 1), r(1, 1)).unwrap(), SetSpec::dyadics(r(0, 1), r(1, 1)).unwrap())
    }

    #[test]
    fn below_one_half() {
        let (q, f) = sets();
        let seq = approach_sequence(&q, &f, &r(1, 2), Side::Below, 3).unwrap();
        let got: Vec<_> = seq.values().cloned().collect();
        assert_eq!(got, vec![r(3, 8), r(7, 16), r(15, 32)]);
        assert_eq!(seq.terms[0].index, Some(4));
    }

    #[test]
    fn above_three_quarters() {
        let (q, f) = sets();
        let seq = approach_sequence(&q, &f, &r(3, 4), Side::Above, 2).unwrap();
        let got: Vec<_> = seq.values().cloned().collect();
        assert_eq!(got, vec![r(7, 8), r(13, 16)]);
    }

    #[test]
    fn isolated_target() {
        let (q, f) = sets();
        assert!(matches!(
            approach_sequence(&q, &f, &r(2, 1), Side::Below, 1),
            Err(AnalysisError::IsolatedTarget { term: 0, .. })
        ));
    }

    #[test]
    fn falls_back_to_q() {
        let f = SetSpec::dyadics(r(0, 1), r(1, 2)).unwrap();
        let q = SetSpec::odd_denominator(r(0, 1), r(1, 1)).unwrap();
        let seq = approach_sequence(&q, &f, &r(3, 4), Side::Above, 2).unwrap();
        assert!(seq.terms.iter().all(|t| t.source == Source::Q));
        assert_eq!(seq.terms[0].value, r(4, 5));
    }

    #[test]
    fn window_bound_and_monotone() {
        let (q, f) = sets();
        let y = r(1, 3);
        let seq = approach_sequence(&q, &f, &y, Side::Below, 40).unwrap();
        for (i, t) in seq.terms.iter().enumerate() {
            assert!(t.value < y);
            assert!(&y - &t.value <= Rational::inv_pow2(i as u32 + 2));
        }
        assert!(seq.terms.windows(2).all(|w| w[0].value < w[1].value));
    }
}
