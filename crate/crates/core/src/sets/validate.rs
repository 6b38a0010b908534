//! Checks of the construction's hypotheses on a pair of input sets.

use serde::Serialize;

use super::SetSpec;
use crate::numerics::{OpenInterval, Rational};

/// How many leading F-points the isolation check inspects by default.
pub const DEFAULT_ISOLATION_PREFIX: u64 = 256;

/// Prefix length used when disjointness cannot be decided analytically.
const PREFIX_CHECK: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IsolationFinding {
    pub point: Rational,
    /// Infimum of distances to other points of `Q ∪ F`; absent when there is none.
    pub nearest_distance: Option<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub disjoint: bool,
    /// False when disjointness was only checked on enumeration prefixes.
    pub disjointness_exact: bool,
    pub duplicate_free: bool,
    pub f_infinite_declared: bool,
    pub isolated_point_findings: Vec<IsolationFinding>,
    pub resolution: Rational,
    pub isolation_points_checked: u64,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.disjoint && self.duplicate_free && self.f_infinite_declared && self.isolated_point_findings.is_empty()
    }
}

/// Two-valued answer plus whether it was decided exactly.
struct Verdict {
    holds: bool,
    exact: bool,
}

fn both(a: Verdict, b: Verdict) -> Verdict {
    Verdict { holds: a.holds && b.holds, exact: a.exact && b.exact }
}

fn dense_support(s: &SetSpec) -> Option<OpenInterval> {
    s.declared_support().map(|(lo, hi)| OpenInterval::rational(lo, hi).expect("validated support"))
}

fn all_outside(values: &[Rational], other: &SetSpec) -> Verdict {
    Verdict { holds: values.iter().all(|q| !other.contains(q)), exact: true }
}

fn disjoint(a: &SetSpec, b: &SetSpec) -> Verdict {
    use SetSpec::*;
    match (a, b) {
        (Union(ms), other) | (other, Union(ms)) => {
            ms.iter().fold(Verdict { holds: true, exact: true }, |acc, m| both(acc, disjoint(m, other)))
        }
        (FiniteList(v) | ExternalList { values: v, .. }, other) | (other, FiniteList(v) | ExternalList { values: v, .. }) => {
            all_outside(v, other)
        }
        (ArithmeticProgression(p), other) | (other, ArithmeticProgression(p)) if p.count.is_some() => {
            let terms: Vec<_> = SetSpec::ArithmeticProgression(p.clone()).iter().map(|(_, q)| q).collect();
            all_outside(&terms, other)
        }
        (ArithmeticProgression(p), dense) | (dense, ArithmeticProgression(p)) if dense.declared_support().is_some() => {
            let support = dense_support(dense).expect("dense kind");
            let inside = p.members_in(&support).expect("bounded support holds finitely many terms");
            all_outside(&inside, dense)
        }
        (ArithmeticProgression(_), ArithmeticProgression(_)) => {
            let holds = a.iter().take(PREFIX_CHECK).all(|(_, q)| !b.contains(&q))
                && b.iter().take(PREFIX_CHECK).all(|(_, q)| !a.contains(&q));
            Verdict { holds, exact: false }
        }
        _ => {
            let (sa, sb) = (dense_support(a).expect("dense"), dense_support(b).expect("dense"));
            if sa.intersect(&sb).is_none() {
                return Verdict { holds: true, exact: true };
            }
            // Denominators 2^k (k >= 1) and odd q >= 3 never coincide; every
            // other pairing of dense kinds overlaps on a common subinterval.
            let holds = matches!(
                (a, b),
                (DyadicsIn { .. }, OddDenominatorIn { .. }) | (OddDenominatorIn { .. }, DyadicsIn { .. })
            );
            Verdict { holds, exact: true }
        }
    }
}

fn duplicate_free(s: &SetSpec) -> Verdict {
    match s {
        SetSpec::FiniteList(v) | SetSpec::ExternalList { values: v, .. } => {
            let mut sorted: Vec<_> = v.iter().collect();
            sorted.sort();
            Verdict { holds: sorted.windows(2).all(|w| w[0] != w[1]), exact: true }
        }
        SetSpec::Union(ms) => {
            let mut acc = ms.iter().fold(Verdict { holds: true, exact: true }, |acc, m| both(acc, duplicate_free(m)));
            for (i, a) in ms.iter().enumerate() {
                for b in ms.iter().skip(i + 1) {
                    acc = both(acc, disjoint(a, b));
                }
            }
            acc
        }
        _ => Verdict { holds: true, exact: true },
    }
}

/// Check the hypotheses: `Q` and `F` disjoint and duplicate-free, `F`
/// infinite, and none of the first `prefix` points of `F` isolated in
/// `Q ∪ F` at the given resolution.
pub fn validate_inputs(q: &SetSpec, f: &SetSpec, resolution: &Rational, prefix: u64) -> ValidationReport {
    assert!(resolution.is_positive(), "resolution must be positive");
    let disjointness = disjoint(q, f);
    let dup = both(duplicate_free(q), duplicate_free(f));
    let mut findings = Vec::new();
    let mut checked = 0;
    for (_, p) in f.iter().take(prefix as usize) {
        checked += 1;
        let nearest = [f.nearest_distance(&p), q.nearest_distance(&p)].into_iter().flatten().min();
        if nearest.as_ref().is_none_or(|d| d >= resolution) {
            findings.push(IsolationFinding { point: p, nearest_distance: nearest });
        }
    }
    ValidationReport {
        disjoint: disjointness.holds,
        disjointness_exact: disjointness.exact && dup.exact,
        duplicate_free: dup.holds,
        f_infinite_declared: f.is_infinite(),
        isolated_point_findings: findings,
        resolution: resolution.clone(),
        isolation_points_checked: checked,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i64, q: i64) -> Rational {
        Rational::frac(p, q)
    }

    fn dyadics() -> SetSpec {
        SetSpec::dyadics(r(0, 1), r(1, 1)).unwrap()
    }

    fn odd() -> SetSpec {
        SetSpec::odd_denominator(r(0, 1), r(1, 1)).unwrap()
    }

    #[test]
    fn walkthrough_inputs_pass() {
        let rep = validate_inputs(&odd(), &dyadics(), &r(1, 1024), DEFAULT_ISOLATION_PREFIX);
        assert!(rep.disjoint && rep.disjointness_exact);
        assert!(rep.isolated_point_findings.is_empty());
        assert!(rep.passed());
    }

    #[test]
    fn identical_sets_overlap() {
        let rep = validate_inputs(&dyadics(), &dyadics(), &r(1, 1024), 16);
        assert!(!rep.disjoint);
        assert!(!rep.passed());
    }

    #[test]
    fn isolated_point_reported() {
        let f = SetSpec::union(vec![SetSpec::finite_list(vec![r(2, 1)]), dyadics()]).unwrap();
        let rep = validate_inputs(&odd(), &f, &r(1, 2), DEFAULT_ISOLATION_PREFIX);
        assert!(rep.disjoint);
        assert_eq!(rep.isolated_point_findings.len(), 1);
        let finding = &rep.isolated_point_findings[0];
        assert_eq!(finding.point, r(2, 1));
        assert!(finding.nearest_distance.as_ref().unwrap() >= &r(1, 1));
    }

    #[test]
    fn mixed_kind_disjointness() {
        let all = SetSpec::all_rationals(r(0, 1), r(1, 1)).unwrap();
        assert!(!disjoint(&all, &odd()).holds);
        let far = SetSpec::all_rationals(r(2, 1), r(3, 1)).unwrap();
        assert!(disjoint(&far, &odd()).holds);
        let naturals = SetSpec::progression(r(1, 1), r(1, 1), None).unwrap();
        assert!(disjoint(&naturals, &odd()).holds);
        assert!(!disjoint(&naturals, &SetSpec::all_rationals(r(0, 1), r(5, 2)).unwrap()).holds);
        let evens = SetSpec::progression(r(0, 1), r(2, 1), None).unwrap();
        let v = disjoint(&naturals, &evens);
        assert!(!v.holds && !v.exact);
    }

    #[test]
    fn duplicate_detection() {
        let dup = SetSpec::finite_list(vec![r(1, 2), r(2, 4)]);
        assert!(!duplicate_free(&dup).holds);
        let overlapping = SetSpec::union(vec![dyadics(), SetSpec::finite_list(vec![r(1, 4)])]).unwrap();
        assert!(!duplicate_free(&overlapping).holds);
    }
}
