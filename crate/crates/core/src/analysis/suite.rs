use std::collections::HashSet;
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};

use super::{naive_reference, AnalysisError};
use crate::builder::{evaluate, BuilderState, Evidence, ExportFormat, PairRecord};
use crate::numerics::ExtendedPoint;
use crate::sets::Census;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub checked: u64,
    /// First failing case, enough to reproduce it.
    pub counterexample: Option<Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: Vec<CheckResult>,
    /// Left out of the JSON so equal inputs give byte-identical reports.
    #[serde(skip)]
    pub runtime_ms: u128,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Accumulates one named check.
pub(crate) struct Tally {
    name: &'static str,
    checked: u64,
    counterexample: Option<Value>,
}

impl Tally {
    pub(crate) fn new(name: &'static str) -> Self {
        Tally { name, checked: 0, counterexample: None }
    }

    pub(crate) fn record(&mut self, ok: bool, witness: impl FnOnce() -> Value) {
        self.checked += 1;
        if !ok && self.counterexample.is_none() {
            self.counterexample = Some(witness());
        }
    }

    pub(crate) fn finish(self) -> CheckResult {
        CheckResult {
            name: self.name.to_string(),
            passed: self.counterexample.is_none(),
            checked: self.checked,
            counterexample: self.counterexample,
        }
    }
}

fn record_json(r: &PairRecord) -> Value {
    serde_json::to_value(r).expect("records serialize")
}

/// Replay every structural guarantee of the construction over the records
/// with `step ≤ depth`, and the identity on the first `depth` Q-points.
pub fn property_suite(state: &BuilderState, depth: usize) -> SuiteReport {
    let started = Instant::now();
    let records: Vec<&PairRecord> = state.records().iter().filter(|r| r.step <= depth).collect();
    let checks = vec![
        involution(state),
        domain_split(state),
        identity_on_q(state, depth),
        scheduling(state, &records),
        locality(state, &records),
        partner_minimality(state, &records),
        maximality(state, &records),
        ladder_growth(state),
        determinism(state),
    ];
    SuiteReport { suite: "construction".into(), checks, runtime_ms: started.elapsed().as_millis() }
}

/// Records of `state` through step `depth` against the naive oracle; `None`
/// when the sets are opaque to it.
pub fn naive_equivalence(state: &BuilderState, depth: usize) -> Option<CheckResult> {
    let mut t = Tally::new("naive-equivalence");
    let depth = depth.min(state.step_count());
    match naive_reference(state.config(), depth) {
        Err(AnalysisError::InfeasibleForOpaqueSets) => return None,
        Err(e) => t.record(false, || json!({ "error": e.to_string() })),
        Ok(naive) => {
            for (fast, slow) in state.records().iter().zip(&naive) {
                t.record(fast == slow, || json!({ "builder": record_json(fast), "naive": record_json(slow) }));
            }
            t.record(naive.len() == depth + 1, || json!({ "naive_records": naive.len(), "expected": depth + 1 }));
        }
    }
    Some(t.finish())
}

fn involution(state: &BuilderState) -> CheckResult {
    let mut t = Tally::new("involution");
    for (x, fx) in state.pairs() {
        let ffx = state.partner(fx);
        t.record(ffx == Some(x) && fx != x, || json!({ "x": x, "fx": fx, "ffx": ffx }));
    }
    t.finish()
}

fn domain_split(state: &BuilderState) -> CheckResult {
    let mut t = Tally::new("domain-split");
    let cfg = state.config();
    for x in state.pairs().keys() {
        let ok = cfg.f.contains(x) && !cfg.q.contains(x) && state.history().contains(&ExtendedPoint::Fin(x.clone()));
        t.record(ok, || json!({ "paired": x }));
    }
    t.finish()
}

fn identity_on_q(state: &BuilderState, depth: usize) -> CheckResult {
    let mut t = Tally::new("identity-on-q");
    let cfg = state.config();
    for (i, y) in cfg.q.iter().take(depth) {
        let value = evaluate(cfg, &y, 0).ok();
        let ok = value.as_ref() == Some(&y) && state.partner(&y).is_none();
        t.record(ok, || json!({ "index": i, "y": y, "f(y)": value }));
    }
    t.finish()
}

fn scheduling(state: &BuilderState, records: &[&PairRecord]) -> CheckResult {
    let mut t = Tally::new("scheduling");
    let mut paired = HashSet::new();
    let mut scan = state.config().f.iter().peekable();
    let mut previous: Option<u64> = None;
    for r in records {
        while scan.peek().is_some_and(|(_, q)| paired.contains(q)) {
            scan.next();
        }
        let expected = scan.peek().cloned();
        let least = expected.as_ref().is_some_and(|(i, q)| *i == r.primary_index && *q == r.primary);
        let increasing = previous.is_none_or(|p| p < r.primary_index);
        t.record(least && increasing, || {
            json!({ "record": record_json(r), "least_unpaired": expected.map(|(i, q)| json!({ "index": i, "value": q })) })
        });
        previous = Some(r.primary_index);
        paired.insert(r.primary.clone());
        paired.insert(r.partner.clone());
    }
    t.finish()
}

fn locality(state: &BuilderState, records: &[&PairRecord]) -> CheckResult {
    let mut t = Tally::new("locality");
    for r in records {
        let rebuilt = state.level_interval(r.level, &r.primary).ok();
        let ok = rebuilt.as_ref() == Some(&r.interval)
            && r.interval.contains_rational(&r.primary)
            && r.interval.contains_rational(&r.partner);
        t.record(ok, || json!({ "record": record_json(r), "rebuilt": rebuilt }));
    }
    t.finish()
}

/// Whether `q` was a ladder point before record `r` was made.
fn used_before(state: &BuilderState, r: &PairRecord, q: &crate::numerics::Rational) -> bool {
    r.step > 0 && state.history().contains_at(r.step - 1, &ExtendedPoint::Fin(q.clone()))
}

fn partner_minimality(state: &BuilderState, records: &[&PairRecord]) -> CheckResult {
    let mut t = Tally::new("partner-minimality");
    let cfg = state.config();
    for r in records {
        let skip = |q: &crate::numerics::Rational| *q == r.primary || used_before(state, r, q);
        let found = cfg.f.first_available_by(&r.interval, &skip, cfg.external_budget);
        let ok = matches!(&found, Ok(Some((p, i))) if *p == r.partner && *i == r.partner_index);
        t.record(ok, || json!({ "record": record_json(r), "least_available": format!("{found:?}") }));
    }
    t.finish()
}

fn maximality(state: &BuilderState, records: &[&PairRecord]) -> CheckResult {
    let mut t = Tally::new("maximality");
    let cfg = state.config();
    for r in records {
        let top = r.step;
        let ok = if r.level == top {
            r.evidence == Evidence::TopLevel
        } else {
            match state.level_interval(r.level + 1, &r.primary) {
                Err(_) => false,
                Ok(above) => match (cfg.f.census(&above), &r.evidence) {
                    (Census::Empty, Evidence::NextLevelEmpty { census }) => *census == Census::Empty,
                    (Census::Finite(_), Evidence::NextLevelExhausted { members }) => {
                        cfg.f.members_in(&above).as_ref() == Some(members)
                            && members.iter().all(|q| *q == r.primary || used_before(state, r, q))
                    }
                    (_, Evidence::BudgetCaveat { .. }) => cfg.f.is_opaque(),
                    _ => false,
                },
            }
        };
        t.record(ok, || record_json(r));
    }
    t.finish()
}

fn ladder_growth(state: &BuilderState) -> CheckResult {
    let mut t = Tally::new("ladder-growth");
    let history = state.history();
    let q_len = state.config().q.cardinality();
    let has_q = |i: usize| q_len.is_none_or(|c| (i as u64) < c);
    let seed = 5 + usize::from(has_q(0));
    t.record(history.len_at(0) == seed, || json!({ "level": 0, "size": history.len_at(0), "expected": seed }));
    for level in 1..=history.current_level() {
        let grew = history.len_at(level) - history.len_at(level - 1);
        let expected = 2 + usize::from(has_q(level));
        t.record(grew == expected, || json!({ "level": level, "added": grew, "expected": expected }));
    }
    t.finish()
}

fn determinism(state: &BuilderState) -> CheckResult {
    let mut t = Tally::new("determinism");
    let original = state.export_string(ExportFormat::Jsonl);
    let replay = BuilderState::init(state.config().clone()).and_then(|mut s| {
        s.run(state.step_count())?;
        Ok(s.export_string(ExportFormat::Jsonl))
    });
    let same = replay.as_ref().is_ok_and(|r| *r == original);
    t.record(same, || {
        let first_diff = replay.as_ref().ok().and_then(|r| {
            original.lines().zip(r.lines()).position(|(a, b)| a != b)
        });
        json!({ "replay_error": replay.as_ref().err().map(ToString::to_string), "first_differing_line": first_diff })
    });
    t.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builder::BuilderConfig;
    use crate::numerics::Rational;
    use crate::sets::SetSpec;

    fn r(p: i64, q: i64) -> Rational {
        Rational::frac(p, q)
    }

    fn state(steps: usize) -> BuilderState {
        let cfg = BuilderConfig::new(
            SetSpec::odd_denominator(r(0, 1), r(1, 1)).unwrap(),
            SetSpec::dyadics(r(0, 1), r(1, 1)).unwrap(),
        );
        let mut s = BuilderState::init(cfg).unwrap();
        s.run(steps).unwrap();
        s
    }

    #[test]
    fn fresh_state_passes() {
        let rep = property_suite(&state(0), 0);
        assert!(rep.passed(), "{}", rep.to_json());
        assert_eq!(rep.check("scheduling").unwrap().checked, 1);
    }

    #[test]
    fn built_state_passes() {
        let rep = property_suite(&state(200), 200);
        assert!(rep.passed(), "{}", rep.to_json());
        assert_eq!(rep.check("locality").unwrap().checked, 201);
        assert_eq!(rep.check("identity-on-q").unwrap().checked, 200);
    }

    #[test]
    fn naive_agrees() {
        let c = naive_equivalence(&state(40), 40).unwrap();
        assert!(c.passed);
        assert_eq!(c.checked, 42);
    }

    #[test]
    fn redirected_pair_is_caught() {
        let mut s = state(10);
        s.pairs_mut().insert(r(1, 2), r(1, 8));
        let rep = property_suite(&s, 10);
        let inv = rep.check("involution").unwrap();
        assert!(!inv.passed);
        let cx = inv.counterexample.as_ref().unwrap();
        assert_eq!(cx["x"], "1/2");
        assert_eq!(cx["fx"], "1/8");
        assert_eq!(cx["ffx"], "1/4");
    }

    #[test]
    fn relaxed_fallback_records_replay() {
        let f = SetSpec::union(vec![
            SetSpec::finite_list(vec![r(5, 2)]),
            SetSpec::progression(r(1, 1), r(1, 1), None).unwrap(),
        ])
        .unwrap();
        let mut s = BuilderState::init(BuilderConfig::new(SetSpec::finite_list(vec![]), f).relaxed()).unwrap();
        s.run(12).unwrap();
        let rep = property_suite(&s, 12);
        assert!(rep.passed(), "{}", rep.to_json());
    }
}
