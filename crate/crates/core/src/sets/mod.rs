//! Machine descriptions of countable sets of rationals.
//!
//! Every [`SetSpec`] has a fixed, deterministic enumeration order, exact
//! membership and index lookup, and a census oracle classifying its
//! intersection with an open interval as empty, finite, or infinite.
//! Built-in kinds answer census queries analytically; external lists are
//! scanned and carry a search budget.

mod dyadic;
mod grid;
mod progression;
mod validate;

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::numerics::{OpenInterval, Rational};
use grid::Denominators;
pub use progression::Progression;
pub use validate::{validate_inputs, IsolationFinding, ValidationReport, DEFAULT_ISOLATION_PREFIX};


#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SetError {
    #[error("index {index} is out of range for a set with {len} elements")]
    IndexOutOfRange { index: u64, len: u64 },
    #[error("enumeration index of {0} exceeds the supported range")]
    IndexOutOfReach(String),
    #[error("search budget of {budget} entries exhausted")]
    BudgetExceeded { budget: u64 },
    #[error("scan cap of {cap} candidates exhausted")]
    ScanCapExceeded { cap: u64 },
    #[error("invalid set description: {0}")]
    Invalid(String),
    #[error("cannot read {path}: {reason}")]
    External { path: String, reason: String },
}

/// Cardinality class of a set–interval intersection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "count", rename_all = "kebab-case")]
pub enum Census {
    Empty,
    Finite(u64),
    Infinite,
}

impl Census {
    /// `Finite(0)` normalizes to `Empty`.
    pub fn finite(k: u64) -> Census {
        if k == 0 {
            Census::Empty
        } else {
            Census::Finite(k)
        }
    }

    pub fn is_empty_or_infinite(self) -> bool {
        matches!(self, Census::Empty | Census::Infinite)
    }

    fn plus(self, other: Census) -> Census {
        match (self, other) {
            (Census::Infinite, _) | (_, Census::Infinite) => Census::Infinite,
            (Census::Empty, c) | (c, Census::Empty) => c,
            (Census::Finite(a), Census::Finite(b)) => Census::Finite(a.saturating_add(b)),
        }
    }
}

/// Parameters of a least-index search.
pub(crate) struct Search<'a> {
    pub within: &'a OpenInterval,
    pub skip: &'a dyn Fn(&Rational) -> bool,
    /// Entries an external list may scan.
    pub budget: u64,
    /// Upper bound on rejected candidates for any kind; `None` is unbounded.
    pub scan_cap: Option<u64>,
}

impl<'a> Search<'a> {
    #[cfg(test)]
    pub(crate) fn new(within: &'a OpenInterval, skip: &'a dyn Fn(&Rational) -> bool) -> Self {
        Search { within, skip, budget: u64::MAX, scan_cap: None }
    }

    pub(crate) fn check_cap(&self, examined: u64) -> Result<(), SetError> {
        match self.scan_cap {
            Some(cap) if examined >= cap => Err(SetError::ScanCapExceeded { cap }),
            _ => Ok(()),
        }
    }
}

/// A countable set of rationals with a canonical enumeration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SetSpec {
    /// `m/2^k`, `k >= 1`, inside the open interval.
    DyadicsIn { lo: Rational, hi: Rational },
    /// Every rational inside the open interval.
    AllRationalsIn { lo: Rational, hi: Rational },
    /// Reduced fractions with odd denominator `>= 3` inside the open interval.
    OddDenominatorIn { lo: Rational, hi: Rational },
    ArithmeticProgression(Progression),
    FiniteList(Arc<[Rational]>),
    /// Members interleaved round-robin; exhausted members drop out.
    Union(Arc<[SetSpec]>),
    /// Newline-separated `p/q` values read from a file.
    ExternalList { path: PathBuf, values: Arc<[Rational]>, declared_infinite: bool },
}

fn check_support(lo: &Rational, hi: &Rational) -> Result<(), SetError> {
    if lo >= hi {
        return Err(SetError::Invalid(format!("empty support ({lo}, {hi})")));
    }
    Ok(())
}

impl SetSpec {
    pub fn dyadics(lo: Rational, hi: Rational) -> Result<Self, SetError> {
        check_support(&lo, &hi)?;
        Ok(SetSpec::DyadicsIn { lo, hi })
    }

    pub fn all_rationals(lo: Rational, hi: Rational) -> Result<Self, SetError> {
        check_support(&lo, &hi)?;
        Ok(SetSpec::AllRationalsIn { lo, hi })
    }

    pub fn odd_denominator(lo: Rational, hi: Rational) -> Result<Self, SetError> {
        check_support(&lo, &hi)?;
        Ok(SetSpec::OddDenominatorIn { lo, hi })
    }

    pub fn progression(start: Rational, step: Rational, count: Option<u64>) -> Result<Self, SetError> {
        if step.is_zero() {
            return Err(SetError::Invalid("progression step must be nonzero".into()));
        }
        Ok(SetSpec::ArithmeticProgression(Progression { start, step, count }))
    }

    pub fn finite_list(values: Vec<Rational>) -> Self {
        SetSpec::FiniteList(values.into())
    }

    pub fn union(members: Vec<SetSpec>) -> Result<Self, SetError> {
        if members.is_empty() {
            return Err(SetError::Invalid("union needs at least one member".into()));
        }
        Ok(SetSpec::Union(members.into()))
    }

    /// Read a newline-delimited list of `p/q` strings; blank lines and `#` comments are skipped.
    pub fn external_list(path: &Path, declared_infinite: bool) -> Result<Self, SetError> {
        let err = |reason: String| SetError::External { path: path.display().to_string(), reason };
        let text = std::fs::read_to_string(path).map_err(|e| err(e.to_string()))?;
        let values = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
            .map(|(n, l)| l.trim().parse::<Rational>().map_err(|e| err(format!("line {}: {e}", n + 1))))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(SetSpec::ExternalList { path: path.to_path_buf(), values: values.into(), declared_infinite })
    }

    /// Number of elements, `None` when infinite. External lists report their
    /// file length even when declared infinite.
    pub fn cardinality(&self) -> Option<u64> {
        match self {
            SetSpec::DyadicsIn { .. } | SetSpec::AllRationalsIn { .. } | SetSpec::OddDenominatorIn { .. } => None,
            SetSpec::ArithmeticProgression(p) => p.count,
            SetSpec::FiniteList(v) => Some(v.len() as u64),
            SetSpec::ExternalList { values, .. } => Some(values.len() as u64),
            SetSpec::Union(members) => members
                .iter()
                .map(SetSpec::cardinality)
                .try_fold(0u64, |acc, c| c.map(|c| acc.saturating_add(c))),
        }
    }

    pub fn is_infinite(&self) -> bool {
        match self {
            SetSpec::ExternalList { declared_infinite, .. } => *declared_infinite,
            SetSpec::Union(members) => members.iter().any(SetSpec::is_infinite),
            other => other.cardinality().is_none(),
        }
    }

    /// Whether every open interval around a member holds infinitely many
    /// members (density in the support).
    pub fn is_locally_infinite(&self) -> bool {
        match self {
            SetSpec::DyadicsIn { .. } | SetSpec::AllRationalsIn { .. } | SetSpec::OddDenominatorIn { .. } => true,
            SetSpec::Union(members) => members.iter().all(SetSpec::is_locally_infinite),
            _ => false,
        }
    }

    /// Whether membership or census depends on file contents that only
    /// describe a prefix of the intended set.
    pub fn is_opaque(&self) -> bool {
        match self {
            SetSpec::ExternalList { declared_infinite, .. } => *declared_infinite,
            SetSpec::Union(members) => members.iter().any(SetSpec::is_opaque),
            _ => false,
        }
    }

    pub fn has_external(&self) -> bool {
        match self {
            SetSpec::ExternalList { .. } => true,
            SetSpec::Union(members) => members.iter().any(SetSpec::has_external),
            _ => false,
        }
    }

    /// The open interval the set is dense in, for the dense kinds.
    pub fn declared_support(&self) -> Option<(Rational, Rational)> {
        match self {
            SetSpec::DyadicsIn { lo, hi } | SetSpec::AllRationalsIn { lo, hi } | SetSpec::OddDenominatorIn { lo, hi } => {
                Some((lo.clone(), hi.clone()))
            }
            _ => None,
        }
    }

    pub fn contains(&self, q: &Rational) -> bool {
        match self {
            SetSpec::DyadicsIn { lo, hi } => dyadic::contains(lo, hi, q),
            SetSpec::AllRationalsIn { lo, hi } => grid::contains(Denominators::All, lo, hi, q),
            SetSpec::OddDenominatorIn { lo, hi } => grid::contains(Denominators::Odd, lo, hi, q),
            SetSpec::ArithmeticProgression(p) => p.contains(q),
            SetSpec::FiniteList(v) | SetSpec::ExternalList { values: v, .. } => v.contains(q),
            SetSpec::Union(members) => members.iter().any(|m| m.contains(q)),
        }
    }

    /// The `i`-th element in canonical order.
    pub fn enumerate(&self, i: u64) -> Result<Rational, SetError> {
        let out_of_range = |len: u64| SetError::IndexOutOfRange { index: i, len };
        match self {
            SetSpec::DyadicsIn { lo, hi } => Ok(dyadic::enumerate(lo, hi, i)),
            SetSpec::AllRationalsIn { lo, hi } => Ok(grid::enumerate(Denominators::All, lo, hi, i)),
            SetSpec::OddDenominatorIn { lo, hi } => Ok(grid::enumerate(Denominators::Odd, lo, hi, i)),
            SetSpec::ArithmeticProgression(p) => p.enumerate(i).ok_or_else(|| out_of_range(p.count.unwrap_or(0))),
            SetSpec::FiniteList(v) | SetSpec::ExternalList { values: v, .. } => {
                v.get(i as usize).cloned().ok_or_else(|| out_of_range(v.len() as u64))
            }
            SetSpec::Union(members) => {
                let (member, local) = union_locate(members, i).ok_or_else(|| out_of_range(self.cardinality().unwrap_or(0)))?;
                members[member].enumerate(local)
            }
        }
    }

    /// Inverse of [`SetSpec::enumerate`].
    pub fn index_of(&self, q: &Rational) -> Result<Option<u64>, SetError> {
        match self {
            SetSpec::DyadicsIn { lo, hi } => dyadic::index_of(lo, hi, q),
            SetSpec::AllRationalsIn { lo, hi } => grid::index_of(Denominators::All, lo, hi, q),
            SetSpec::OddDenominatorIn { lo, hi } => grid::index_of(Denominators::Odd, lo, hi, q),
            SetSpec::ArithmeticProgression(p) => p.index_of(q),
            SetSpec::FiniteList(v) | SetSpec::ExternalList { values: v, .. } => {
                Ok(v.iter().position(|x| x == q).map(|i| i as u64))
            }
            SetSpec::Union(members) => {
                for (j, m) in members.iter().enumerate() {
                    if let Some(local) = m.index_of(q)? {
                        return union_global_index(members, j, local).map(Some);
                    }
                }
                Ok(None)
            }
        }
    }

    /// Exact cardinality class of `self ∩ within`.
    pub fn census(&self, within: &OpenInterval) -> Census {
        match self {
            SetSpec::DyadicsIn { lo, hi } | SetSpec::AllRationalsIn { lo, hi } | SetSpec::OddDenominatorIn { lo, hi } => {
                let support = OpenInterval::rational(lo.clone(), hi.clone()).expect("validated support");
                if support.intersect(within).is_some() {
                    Census::Infinite
                } else {
                    Census::Empty
                }
            }
            SetSpec::ArithmeticProgression(p) => p.census(within),
            SetSpec::FiniteList(v) | SetSpec::ExternalList { values: v, .. } => {
                Census::finite(v.iter().filter(|q| within.contains_rational(q)).count() as u64)
            }
            SetSpec::Union(members) => members.iter().fold(Census::Empty, |acc, m| acc.plus(m.census(within))),
        }
    }

    /// All members inside `within` in canonical order, or `None` when there are infinitely many.
    pub fn members_in(&self, within: &OpenInterval) -> Option<Vec<Rational>> {
        match self {
            SetSpec::ArithmeticProgression(p) => p.members_in(within),
            SetSpec::FiniteList(v) | SetSpec::ExternalList { values: v, .. } => {
                Some(v.iter().filter(|q| within.contains_rational(q)).cloned().collect())
            }
            SetSpec::Union(members) => {
                let lists = members.iter().map(|m| m.members_in(within)).collect::<Option<Vec<_>>>()?;
                let mut all: Vec<(u64, Rational)> = lists
                    .into_iter()
                    .flatten()
                    .map(|q| (self.index_of(&q).ok().flatten().unwrap_or(u64::MAX), q))
                    .collect();
                all.sort();
                Some(all.into_iter().map(|(_, q)| q).collect())
            }
            dense => match dense.census(within) {
                Census::Empty => Some(Vec::new()),
                _ => None,
            },
        }
    }

    pub(crate) fn first_match(&self, search: &Search<'_>) -> Result<Option<Rational>, SetError> {
        match self {
            SetSpec::DyadicsIn { lo, hi } => dyadic::first_match(lo, hi, search),
            SetSpec::AllRationalsIn { lo, hi } => grid::first_match(Denominators::All, lo, hi, search),
            SetSpec::OddDenominatorIn { lo, hi } => grid::first_match(Denominators::Odd, lo, hi, search),
            SetSpec::ArithmeticProgression(p) => p.first_match(search),
            SetSpec::FiniteList(v) => {
                let mut examined = 0;
                for q in v.iter().filter(|q| search.within.contains_rational(q)) {
                    if !(search.skip)(q) {
                        return Ok(Some(q.clone()));
                    }
                    examined += 1;
                    search.check_cap(examined)?;
                }
                Ok(None)
            }
            SetSpec::ExternalList { values, declared_infinite, .. } => {
                for q in values.iter().take(search.budget.min(usize::MAX as u64) as usize) {
                    if search.within.contains_rational(q) && !(search.skip)(q) {
                        return Ok(Some(q.clone()));
                    }
                }
                if (values.len() as u64) > search.budget || *declared_infinite {
                    Err(SetError::BudgetExceeded { budget: search.budget.min(values.len() as u64) })
                } else {
                    Ok(None)
                }
            }
            SetSpec::Union(members) => {
                let mut best: Option<(u64, Rational)> = None;
                for (j, m) in members.iter().enumerate() {
                    if let Some(q) = m.first_match(search)? {
                        let local = m.index_of(&q)?.expect("member of its own set");
                        let global = union_global_index(members, j, local)?;
                        if best.as_ref().is_none_or(|(b, _)| global < *b) {
                            best = Some((global, q));
                        }
                    }
                }
                Ok(best.map(|(_, q)| q))
            }
        }
    }

    /// The member of `self ∩ within` outside `excluded` with the least
    /// enumeration index, with that index. `budget` bounds external scans only.
    pub fn first_available(
        &self,
        within: &OpenInterval,
        excluded: &BTreeSet<Rational>,
        budget: u64,
    ) -> Result<Option<(Rational, u64)>, SetError> {
        self.first_available_by(within, &|q| excluded.contains(q), budget)
    }

    /// Like [`SetSpec::first_available`] with exclusion given as a predicate.
    pub fn first_available_by(
        &self,
        within: &OpenInterval,
        excluded: &dyn Fn(&Rational) -> bool,
        budget: u64,
    ) -> Result<Option<(Rational, u64)>, SetError> {
        let search = Search { within, skip: excluded, budget, scan_cap: None };
        match self.first_match(&search)? {
            None => Ok(None),
            Some(q) => {
                let index = self.index_of(&q)?.expect("search returns members");
                Ok(Some((q, index)))
            }
        }
    }

    /// Least-index member inside `within` that is not skipped, examining at
    /// most `cap` rejected candidates. Index lookup is left to the caller.
    pub fn first_value_where(
        &self,
        within: &OpenInterval,
        skip: &dyn Fn(&Rational) -> bool,
        cap: u64,
    ) -> Result<Option<Rational>, SetError> {
        self.first_match(&Search { within, skip, budget: u64::MAX, scan_cap: Some(cap) })
    }

    /// Infimum of `|s − p|` over members `s != p`; `None` when no other member exists.
    pub fn nearest_distance(&self, p: &Rational) -> Option<Rational> {
        match self {
            SetSpec::DyadicsIn { lo, hi } | SetSpec::AllRationalsIn { lo, hi } | SetSpec::OddDenominatorIn { lo, hi } => {
                Some(if p < lo {
                    lo - p
                } else if p > hi {
                    p - hi
                } else {
                    Rational::zero()
                })
            }
            SetSpec::ArithmeticProgression(prog) => prog.nearest_distance(p),
            SetSpec::FiniteList(v) | SetSpec::ExternalList { values: v, .. } => {
                v.iter().filter(|q| *q != p).map(|q| (q - p).abs()).min()
            }
            SetSpec::Union(members) => members.iter().filter_map(|m| m.nearest_distance(p)).min(),
        }
    }

    /// Streaming enumeration in canonical order.
    pub fn iter(&self) -> Enumerator {
        Enumerator { cursor: Cursor::new(self), next_index: 0 }
    }

    /// Hull of the first `k` enumerated elements.
    pub fn prefix_hull(&self, k: u64) -> Option<(Rational, Rational)> {
        let mut it = self.iter().take(k as usize).map(|(_, q)| q);
        let first = it.next()?;
        Some(it.fold((first.clone(), first), |(lo, hi), q| (lo.min(q.clone()), hi.max(q))))
    }
}

/// Cardinalities of union members (`None` = infinite).
fn member_counts(members: &[SetSpec]) -> Vec<Option<u64>> {
    members.iter().map(SetSpec::cardinality).collect()
}

/// Global index of local element `local` of member `j` under round-robin
/// interleaving.
fn union_global_index(members: &[SetSpec], j: usize, local: u64) -> Result<u64, SetError> {
    let counts = member_counts(members);
    let mut total: u128 = 0;
    for (k, c) in counts.iter().enumerate() {
        let before_round = c.map_or(local, |c| c.min(local)) as u128;
        total += before_round;
        if k < j && c.is_none_or(|c| c > local) {
            total += 1;
        }
    }
    u64::try_from(total).map_err(|_| SetError::IndexOutOfReach(format!("union element {local} of member {j}")))
}

/// Inverse of [`union_global_index`]: `(member, local index)`.
fn union_locate(members: &[SetSpec], mut i: u64) -> Option<(usize, u64)> {
    let counts = member_counts(members);
    let mut round = 0u64;
    loop {
        let active: Vec<usize> = (0..members.len()).filter(|&k| counts[k].is_none_or(|c| c > round)).collect();
        if active.is_empty() {
            return None;
        }
        let next_drop = active.iter().filter_map(|&k| counts[k]).min();
        let per_round = active.len() as u64;
        let block = next_drop.map(|d| (d - round).saturating_mul(per_round));
        if block.is_none_or(|b| i < b) {
            let r = i / per_round;
            return Some((active[(i % per_round) as usize], round + r));
        }
        i -= block.expect("finite block");
        round = next_drop.expect("finite block");
    }
}

#[derive(Clone, Debug)]
enum Cursor {
    Dyadic(dyadic::DyadicCursor),
    Grid(grid::GridCursor),
    Progression { prog: Progression, i: u64 },
    List { values: Arc<[Rational]>, i: usize },
    Union { members: Vec<Cursor>, done: Vec<bool>, turn: usize },
}

impl Cursor {
    fn new(spec: &SetSpec) -> Self {
        match spec {
            SetSpec::DyadicsIn { lo, hi } => Cursor::Dyadic(dyadic::DyadicCursor::new(lo, hi)),
            SetSpec::AllRationalsIn { lo, hi } => Cursor::Grid(grid::GridCursor::new(Denominators::All, lo, hi)),
            SetSpec::OddDenominatorIn { lo, hi } => Cursor::Grid(grid::GridCursor::new(Denominators::Odd, lo, hi)),
            SetSpec::ArithmeticProgression(p) => Cursor::Progression { prog: p.clone(), i: 0 },
            SetSpec::FiniteList(v) | SetSpec::ExternalList { values: v, .. } => {
                Cursor::List { values: Arc::clone(v), i: 0 }
            }
            SetSpec::Union(members) => Cursor::Union {
                members: members.iter().map(Cursor::new).collect(),
                done: vec![false; members.len()],
                turn: 0,
            },
        }
    }

    fn next_value(&mut self) -> Option<Rational> {
        match self {
            Cursor::Dyadic(c) => Some(c.next_value()),
            Cursor::Grid(c) => Some(c.next_value()),
            Cursor::Progression { prog, i } => {
                let q = prog.enumerate(*i)?;
                *i += 1;
                Some(q)
            }
            Cursor::List { values, i } => {
                let q = values.get(*i)?.clone();
                *i += 1;
                Some(q)
            }
            Cursor::Union { members, done, turn } => {
                let n = members.len();
                for _ in 0..n {
                    let k = *turn;
                    *turn = (*turn + 1) % n;
                    if done[k] {
                        continue;
                    }
                    match members[k].next_value() {
                        Some(q) => return Some(q),
                        None => done[k] = true,
                    }
                }
                None
            }
        }
    }
}

/// Iterator over `(index, element)` pairs in canonical order.
#[derive(Clone, Debug)]
pub struct Enumerator {
    cursor: Cursor,
    next_index: u64,
}

impl Iterator for Enumerator {
    type Item = (u64, Rational);

    fn next(&mut self) -> Option<Self::Item> {
        let q = self.cursor.next_value()?;
        let i = self.next_index;
        self.next_index += 1;
        Some((i, q))
    }
}
