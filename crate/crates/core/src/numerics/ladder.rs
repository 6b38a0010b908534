use std::collections::{BTreeMap, BTreeSet};
use std::ops::Bound;

use super::{ExtendedPoint, NumericsError, OpenInterval, Separator};

/// A finite ordered set of endpoints; consecutive points bound the
/// intervals of the next interval family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EndpointLadder {
    points: BTreeSet<ExtendedPoint>,
    level: usize,
}

impl EndpointLadder {
    pub fn new(points: BTreeSet<ExtendedPoint>, level: usize) -> Self {
        EndpointLadder { points, level }
    }

    /// `{−∞, g, +∞}`, whose two intervals are the separator sides.
    pub fn separator_sides(g: &Separator) -> Self {
        let points = [ExtendedPoint::NegInf, ExtendedPoint::Sep(g.clone()), ExtendedPoint::PosInf]
            .into_iter()
            .collect();
        EndpointLadder { points, level: 0 }
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn points(&self) -> &BTreeSet<ExtendedPoint> {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, p: &ExtendedPoint) -> bool {
        self.points.contains(p)
    }

    /// The unique interval between consecutive ladder points that contains `p`.
    pub fn enclosing_interval(&self, p: &ExtendedPoint) -> Result<OpenInterval, NumericsError> {
        if self.points.contains(p) {
            return Err(NumericsError::LadderMember(p.to_string()));
        }
        let lo = self.points.range(..p).next_back().ok_or(NumericsError::OutsideLadder)?;
        let hi = self
            .points
            .range((Bound::Excluded(p), Bound::Unbounded))
            .next()
            .ok_or(NumericsError::OutsideLadder)?;
        OpenInterval::new(lo.clone(), hi.clone())
    }

    /// All intervals between consecutive points, in order.
    pub fn intervals(&self) -> Vec<OpenInterval> {
        self.points
            .iter()
            .zip(self.points.iter().skip(1))
            .map(|(a, b)| OpenInterval::new(a.clone(), b.clone()).expect("strictly increasing"))
            .collect()
    }
}

/// The chain `F_0 ⊆ F_1 ⊆ …` stored as a base set plus per-step additions.
///
/// Each point remembers the level at which it entered, so any past ladder
/// can be queried without materializing it.
#[derive(Clone, Debug)]
pub struct LadderHistory {
    deltas: Vec<Vec<ExtendedPoint>>,
    birth: BTreeMap<ExtendedPoint, usize>,
}

impl LadderHistory {
    pub fn new(base: Vec<ExtendedPoint>) -> Self {
        let mut history = LadderHistory { deltas: Vec::new(), birth: BTreeMap::new() };
        history.push_level(base);
        history
    }

    fn push_level(&mut self, points: Vec<ExtendedPoint>) {
        let level = self.deltas.len();
        for p in &points {
            let previous = self.birth.insert(p.clone(), level);
            assert!(previous.is_none(), "point {p} added to the ladder twice");
        }
        self.deltas.push(points);
    }

    /// Record the points added by the next step; returns the new level.
    pub fn push(&mut self, added: Vec<ExtendedPoint>) -> usize {
        self.push_level(added);
        self.current_level()
    }

    pub fn base(&self) -> &[ExtendedPoint] {
        &self.deltas[0]
    }

    /// Points added at level `n` (`n = 0` is the base).
    pub fn delta(&self, n: usize) -> Option<&[ExtendedPoint]> {
        self.deltas.get(n).map(Vec::as_slice)
    }

    pub fn current_level(&self) -> usize {
        self.deltas.len() - 1
    }

    pub fn birth_level(&self, p: &ExtendedPoint) -> Option<usize> {
        self.birth.get(p).copied()
    }

    pub fn contains_at(&self, level: usize, p: &ExtendedPoint) -> bool {
        self.birth.get(p).is_some_and(|&b| b <= level)
    }

    pub fn contains(&self, p: &ExtendedPoint) -> bool {
        self.birth.contains_key(p)
    }

    /// Number of points in the current ladder.
    pub fn len(&self) -> usize {
        self.birth.len()
    }

    pub fn is_empty(&self) -> bool {
        self.birth.is_empty()
    }

    pub fn len_at(&self, level: usize) -> usize {
        self.deltas.iter().take(level + 1).map(Vec::len).sum()
    }

    /// Materialize `F_n` by replaying the base and deltas `1..=n`.
    pub fn ladder_at(&self, n: usize) -> Result<EndpointLadder, NumericsError> {
        if n > self.current_level() {
            return Err(NumericsError::LevelNotComputed { requested: n, available: self.current_level() });
        }
        let points = self.deltas.iter().take(n + 1).flatten().cloned().collect();
        Ok(EndpointLadder::new(points, n))
    }

    pub fn current(&self) -> EndpointLadder {
        EndpointLadder::new(self.birth.keys().cloned().collect(), self.current_level())
    }

    /// Iterate the current ladder points in order.
    pub fn iter(&self) -> impl Iterator<Item = &ExtendedPoint> {
        self.birth.keys()
    }

    /// Nearest level-`n` ladder points strictly below and above `p`.
    pub fn neighbors_at(
        &self,
        n: usize,
        p: &ExtendedPoint,
    ) -> Result<(ExtendedPoint, ExtendedPoint), NumericsError> {
        if n > self.current_level() {
            return Err(NumericsError::LevelNotComputed { requested: n, available: self.current_level() });
        }
        let lo = self
            .birth
            .range(..p)
            .rev()
            .find(|(_, &b)| b <= n)
            .map(|(q, _)| q.clone())
            .ok_or(NumericsError::OutsideLadder)?;
        let hi = self
            .birth
            .range((Bound::Excluded(p), Bound::Unbounded))
            .find(|(_, &b)| b <= n)
            .map(|(q, _)| q.clone())
            .ok_or(NumericsError::OutsideLadder)?;
        Ok((lo, hi))
    }

    /// Same as `ladder_at(n)?.enclosing_interval(p)` without materializing the ladder.
    pub fn enclosing_at(&self, n: usize, p: &ExtendedPoint) -> Result<OpenInterval, NumericsError> {
        if self.contains_at(n, p) {
            return Err(NumericsError::LadderMember(p.to_string()));
        }
        let (lo, hi) = self.neighbors_at(n, p)?;
        OpenInterval::new(lo, hi)
    }

    /// Finite ladder points strictly inside `interval`, current level.
    pub fn points_inside<'a>(
        &'a self,
        interval: &'a OpenInterval,
    ) -> impl Iterator<Item = &'a ExtendedPoint> + 'a {
        self.birth
            .range((Bound::Excluded(interval.lo()), Bound::Excluded(interval.hi())))
            .map(|(p, _)| p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::Rational;

    fn fin(p: i64, q: i64) -> ExtendedPoint {
        ExtendedPoint::Fin(Rational::frac(p, q))
    }

    fn g() -> ExtendedPoint {
        ExtendedPoint::Sep(Separator::sqrt2_minus_one())
    }

    fn walkthrough_base() -> Vec<ExtendedPoint> {
        vec![ExtendedPoint::NegInf, ExtendedPoint::PosInf, g(), fin(1, 2), fin(3, 4), fin(1, 3)]
    }

    #[test]
    fn enclosing_interval_examples() {
        let ladder = EndpointLadder::new(walkthrough_base().into_iter().collect(), 0);
        assert_eq!(
            ladder.enclosing_interval(&fin(1, 4)).unwrap(),
            OpenInterval::new(ExtendedPoint::NegInf, fin(1, 3)).unwrap()
        );
        assert_eq!(
            ladder.enclosing_interval(&fin(9, 20)).unwrap(),
            OpenInterval::new(g(), fin(1, 2)).unwrap()
        );
        assert!(matches!(ladder.enclosing_interval(&fin(1, 2)), Err(NumericsError::LadderMember(_))));
    }

    #[test]
    fn history_replay() {
        let mut h = LadderHistory::new(walkthrough_base());
        h.push(vec![fin(1, 4), fin(1, 8), fin(2, 3)]);
        assert_eq!(h.ladder_at(0).unwrap().len(), 6);
        assert_eq!(h.ladder_at(1).unwrap().len(), 9);
        assert!(matches!(h.ladder_at(1_000_000), Err(NumericsError::LevelNotComputed { .. })));
        assert_eq!(h.birth_level(&fin(1, 8)), Some(1));
        // (-inf, 1/3) at level 0 becomes (1/4, 1/3) at level 1 around 3/10
        assert_eq!(
            h.enclosing_at(0, &fin(3, 10)).unwrap(),
            OpenInterval::new(ExtendedPoint::NegInf, fin(1, 3)).unwrap()
        );
        assert_eq!(h.enclosing_at(1, &fin(3, 10)).unwrap(), OpenInterval::new(fin(1, 4), fin(1, 3)).unwrap());
        assert_eq!(h.enclosing_at(0, &fin(1, 4)).unwrap(), h.ladder_at(0).unwrap().enclosing_interval(&fin(1, 4)).unwrap());
        assert_eq!(h.len_at(1), 9);
    }

    #[test]
    fn separator_sides() {
        let l = EndpointLadder::separator_sides(&Separator::sqrt2_minus_one());
        let ivs = l.intervals();
        assert_eq!(ivs.len(), 2);
        assert_eq!(ivs[0], OpenInterval::new(ExtendedPoint::NegInf, g()).unwrap());
    }
}
