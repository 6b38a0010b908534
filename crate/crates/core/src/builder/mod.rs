//! The pairing construction as a deterministic state machine.
//!
//! [`BuilderState::init`] pairs the first F-point inside its side of the
//! separator and seeds the ladder. Each [`BuilderState::step`] takes the
//! unpaired F-point of least index, finds the deepest ladder interval
//! around it that still holds an unused F-point, pairs it with the
//! least-index such point, and extends the ladder by both points and the
//! next Q-point.

mod export;
mod separator;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::{ExtendedPoint, LadderHistory, NumericsError, OpenInterval, Rational, Separator};
use crate::sets::{validate_inputs, Census, Enumerator, SetError, SetSpec, ValidationReport, DEFAULT_ISOLATION_PREFIX};

pub use export::ExportFormat;
pub use separator::{certify, choose_separator, SeparatorPolicy};
pub(crate) use separator::sides;

#[derive(Debug, Error)]
pub enum BuilderError {
    #[error("input validation failed: {}", summarize(.0))]
    Validation(Box<ValidationReport>),
    #[error("no certifiable separator: {0}")]
    SeparatorUnverifiable(String),
    #[error("the first F-point has no partner on its side of the separator")]
    SeedPartnerMissing,
    #[error("every enumerated F-point is already paired after {steps} steps")]
    FExhausted { steps: usize },
    #[error("{primary} has no feasible level")]
    NoFeasibleLevel { primary: Rational },
    #[error("no partner for {primary} inside {interval}")]
    PartnerMissing { primary: Rational, interval: Box<OpenInterval> },
    #[error("{0} belongs to neither Q nor F")]
    NotInDomain(Rational),
    #[error("{point} needs {needed} steps but the cap is {cap}")]
    WorkCapExceeded { point: Rational, needed: u64, cap: u64 },
    #[error("inconsistent inputs: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Set(#[from] SetError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

fn summarize(report: &ValidationReport) -> String {
    let mut problems = Vec::new();
    if !report.disjoint {
        problems.push("Q and F are not disjoint".to_string());
    }
    if !report.duplicate_free {
        problems.push("an enumeration repeats a value".to_string());
    }
    if !report.f_infinite_declared {
        problems.push("F is finite".to_string());
    }
    if let Some(first) = report.isolated_point_findings.first() {
        problems.push(format!(
            "{} isolated F-point(s) at resolution {}, first {}",
            report.isolated_point_findings.len(),
            report.resolution,
            first.point
        ));
    }
    problems.join("; ")
}

/// Whether `init` enforces the hypotheses or trusts the caller.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitMode {
    #[default]
    Strict,
    /// Skip input validation and accept an uncertified separator.
    Relaxed,
}

#[derive(Clone, Debug)]
pub struct BuilderConfig {
    pub q: SetSpec,
    pub f: SetSpec,
    pub separator_policy: SeparatorPolicy,
    pub validation_resolution: Rational,
    /// F-points checked for isolation during validation.
    pub isolation_prefix: u64,
    /// Entries an external list may scan per search.
    pub external_budget: u64,
    pub init_mode: InitMode,
}

impl BuilderConfig {
    pub fn new(q: SetSpec, f: SetSpec) -> Self {
        BuilderConfig {
            q,
            f,
            separator_policy: SeparatorPolicy::Affine,
            validation_resolution: Rational::frac(1, 1024),
            isolation_prefix: DEFAULT_ISOLATION_PREFIX,
            external_budget: 100_000,
            init_mode: InitMode::Strict,
        }
    }

    pub fn relaxed(mut self) -> Self {
        self.init_mode = InitMode::Relaxed;
        self
    }

    pub fn validate(&self) -> ValidationReport {
        validate_inputs(&self.q, &self.f, &self.validation_resolution, self.isolation_prefix)
    }

    /// Separator for this configuration, certified unless relaxed.
    pub fn separator(&self) -> Result<Separator, BuilderError> {
        match self.init_mode {
            InitMode::Strict => choose_separator(&self.f, &self.separator_policy),
            InitMode::Relaxed => separator::uncertified_separator(&self.f, &self.separator_policy),
        }
    }
}

/// Why the chosen level is the greatest feasible one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Evidence {
    /// The level is `n + 1`, the highest allowed.
    TopLevel,
    /// The interval one level up holds no F-point at all.
    NextLevelEmpty { census: Census },
    /// The interval one level up holds only these F-points, all used.
    NextLevelExhausted { members: Vec<Rational> },
    /// The set is only known through a file; the level above looked
    /// infeasible within this scan budget.
    BudgetCaveat { budget: u64 },
}

impl Evidence {
    pub fn tag(&self) -> &'static str {
        match self {
            Evidence::TopLevel => "top-level",
            Evidence::NextLevelEmpty { .. } => "next-level-empty",
            Evidence::NextLevelExhausted { .. } => "next-level-exhausted",
            Evidence::BudgetCaveat { .. } => "budget-caveat",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairRecord {
    /// Ladder level this record produced: 0 for the seed, `n + 1` for step `n`.
    pub step: usize,
    pub primary: Rational,
    pub primary_index: u64,
    pub partner: Rational,
    pub partner_index: u64,
    pub level: usize,
    pub interval: OpenInterval,
    pub evidence: Evidence,
}

/// Outcome of the level search for one primary point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelChoice {
    pub level: usize,
    pub interval: OpenInterval,
    pub evidence: Evidence,
}

#[derive(Clone, Debug)]
pub struct BuilderState {
    config: BuilderConfig,
    g: Separator,
    history: LadderHistory,
    pairs: BTreeMap<Rational, Rational>,
    f_scan: Enumerator,
    f_pending: Option<(u64, Rational)>,
    q_scan: Enumerator,
    q_processed: u64,
    step_count: usize,
    records: Vec<PairRecord>,
}

impl BuilderState {
    pub fn init(config: BuilderConfig) -> Result<Self, BuilderError> {
        if config.init_mode == InitMode::Strict {
            let report = config.validate();
            if !report.passed() {
                return Err(BuilderError::Validation(Box::new(report)));
            }
        }
        let g = config.separator()?;
        let mut f_scan = config.f.iter();
        let (x0_index, x0) = f_scan.next().ok_or(BuilderError::FExhausted { steps: 0 })?;
        let side = side_of(&g, &x0);
        let excluded = |q: &Rational| *q == x0;
        let (partner, partner_index) = config
            .f
            .first_available_by(&side, &excluded, config.external_budget)?
            .ok_or(BuilderError::SeedPartnerMissing)?;

        let mut q_scan = config.q.iter();
        let mut base = vec![
            ExtendedPoint::NegInf,
            ExtendedPoint::PosInf,
            ExtendedPoint::Sep(g.clone()),
            x0.clone().into(),
            partner.clone().into(),
        ];
        let mut q_processed = 0;
        if let Some((_, y0)) = q_scan.next() {
            base.push(y0.into());
            q_processed = 1;
        }
        let mut pairs = BTreeMap::new();
        pairs.insert(x0.clone(), partner.clone());
        pairs.insert(partner.clone(), x0.clone());
        let seed = PairRecord {
            step: 0,
            primary: x0,
            primary_index: x0_index,
            partner,
            partner_index,
            level: 0,
            interval: side,
            evidence: Evidence::TopLevel,
        };
        let mut state = BuilderState {
            config,
            g,
            history: LadderHistory::new(base),
            pairs,
            f_scan,
            f_pending: None,
            q_scan,
            q_processed,
            step_count: 0,
            records: vec![seed],
        };
        state.advance_primary();
        Ok(state)
    }

    pub fn config(&self) -> &BuilderConfig {
        &self.config
    }

    pub fn separator(&self) -> &Separator {
        &self.g
    }

    pub fn history(&self) -> &LadderHistory {
        &self.history
    }

    pub fn records(&self) -> &[PairRecord] {
        &self.records
    }

    /// Number of inductive steps taken since the seed.
    pub fn step_count(&self) -> usize {
        self.step_count
    }

    pub fn q_processed(&self) -> u64 {
        self.q_processed
    }

    pub fn pairs(&self) -> &BTreeMap<Rational, Rational> {
        &self.pairs
    }

    #[cfg(test)]
    pub(crate) fn pairs_mut(&mut self) -> &mut BTreeMap<Rational, Rational> {
        &mut self.pairs
    }

    pub fn partner(&self, x: &Rational) -> Option<&Rational> {
        self.pairs.get(x)
    }

    /// `f(p)` when already determined: identity on Q, the partner on paired F-points.
    pub fn image(&self, p: &Rational) -> Option<Rational> {
        if self.config.q.contains(p) {
            return Some(p.clone());
        }
        self.pairs.get(p).cloned()
    }

    /// The next primary: the unpaired F-point of least index.
    pub fn next_primary(&self) -> Option<&(u64, Rational)> {
        self.f_pending.as_ref()
    }

    fn advance_primary(&mut self) {
        self.f_pending = self.f_scan.by_ref().find(|(_, q)| !self.pairs.contains_key(q));
    }

    fn in_ladder(&self, q: &Rational) -> bool {
        self.history.contains(&ExtendedPoint::Fin(q.clone()))
    }

    /// `G_0` interval for `j = 0`, otherwise the interval of `F_{j−1}` around `x`.
    pub fn level_interval(&self, j: usize, x: &Rational) -> Result<OpenInterval, BuilderError> {
        if j == 0 {
            Ok(side_of(&self.g, x))
        } else {
            Ok(self.history.enclosing_at(j - 1, &x.clone().into())?)
        }
    }

    /// Whether `interval` holds an F-point outside the ladder other than `x`.
    /// `Err` carries the evidence of infeasibility.
    fn feasible(&self, interval: &OpenInterval, x: &Rational) -> Result<(), Evidence> {
        let f = &self.config.f;
        match f.census(interval) {
            Census::Infinite => Ok(()),
            Census::Empty => Err(self.caveat_or(Evidence::NextLevelEmpty { census: Census::Empty })),
            Census::Finite(_) => {
                let members = f.members_in(interval).expect("finite census lists its members");
                if members.iter().any(|q| q != x && !self.in_ladder(q)) {
                    Ok(())
                } else {
                    Err(self.caveat_or(Evidence::NextLevelExhausted { members }))
                }
            }
        }
    }

    fn caveat_or(&self, evidence: Evidence) -> Evidence {
        if self.config.f.is_opaque() {
            Evidence::BudgetCaveat { budget: self.config.external_budget }
        } else {
            evidence
        }
    }

    /// The greatest `j ≤ n + 1` whose interval around `x` still holds an
    /// unused F-point.
    pub fn greatest_feasible_level(&self, x: &Rational) -> Result<LevelChoice, BuilderError> {
        let top = self.step_count + 1;
        let mut evidence = Evidence::TopLevel;
        for j in (0..=top).rev() {
            let interval = self.level_interval(j, x)?;
            match self.feasible(&interval, x) {
                Ok(()) => return Ok(LevelChoice { level: j, interval, evidence }),
                Err(why) => evidence = why,
            }
        }
        Err(BuilderError::NoFeasibleLevel { primary: x.clone() })
    }

    pub fn step(&mut self) -> Result<(), BuilderError> {
        let (primary_index, primary) =
            self.f_pending.clone().ok_or(BuilderError::FExhausted { steps: self.step_count })?;
        let choice = self.greatest_feasible_level(&primary)?;
        let skip = |q: &Rational| *q == primary || self.in_ladder(q);
        let (partner, partner_index) = self
            .config
            .f
            .first_available_by(&choice.interval, &skip, self.config.external_budget)?
            .ok_or_else(|| BuilderError::PartnerMissing { primary: primary.clone(), interval: Box::new(choice.interval.clone()) })?;

        let mut added: Vec<ExtendedPoint> = vec![primary.clone().into(), partner.clone().into()];
        if let Some((_, y)) = self.q_scan.next() {
            let y = ExtendedPoint::Fin(y);
            if self.history.contains(&y) || added.contains(&y) {
                return Err(BuilderError::Inconsistent(format!("Q-point {y} is already a ladder point")));
            }
            added.push(y);
            self.q_processed += 1;
        }
        self.pairs.insert(primary.clone(), partner.clone());
        self.pairs.insert(partner.clone(), primary.clone());
        let level = self.history.push(added);
        self.step_count += 1;
        self.records.push(PairRecord {
            step: level,
            primary,
            primary_index,
            partner,
            partner_index,
            level: choice.level,
            interval: choice.interval,
            evidence: choice.evidence,
        });
        self.advance_primary();
        Ok(())
    }

    /// Step until `step_count` reaches `n`; a no-op when already there.
    pub fn run(&mut self, n: usize) -> Result<(), BuilderError> {
        while self.step_count < n {
            self.step()?;
        }
        Ok(())
    }

    /// Serialize the records in step order.
    pub fn export<W: std::io::Write>(&self, format: ExportFormat, sink: W) -> std::io::Result<()> {
        export::write_records(&self.records, format, sink)
    }

    pub fn export_string(&self, format: ExportFormat) -> String {
        let mut out = Vec::new();
        self.export(format, &mut out).expect("writing to memory");
        String::from_utf8(out).expect("exports are UTF-8")
    }
}

/// The half-line of `(−∞, g) | (g, +∞)` containing `x`.
pub(crate) fn side_of(g: &Separator, x: &Rational) -> OpenInterval {
    let (left, right) = sides(g);
    if left.contains_rational(x) {
        left
    } else {
        right
    }
}

/// `f(p)` computed from scratch, running no more than `max_steps` steps.
pub fn evaluate(config: &BuilderConfig, p: &Rational, max_steps: u64) -> Result<Rational, BuilderError> {
    if config.q.contains(p) {
        return Ok(p.clone());
    }
    let index = config.f.index_of(p)?.ok_or_else(|| BuilderError::NotInDomain(p.clone()))?;
    let mut state = BuilderState::init(config.clone())?;
    loop {
        if let Some(fx) = state.partner(p) {
            return Ok(fx.clone());
        }
        if state.step_count as u64 >= max_steps {
            return Err(BuilderError::WorkCapExceeded { point: p.clone(), needed: index + 1, cap: max_steps });
        }
        state.step()?;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i64, q: i64) -> Rational {
        Rational::frac(p, q)
    }

    fn walkthrough() -> BuilderConfig {
        BuilderConfig::new(
            SetSpec::odd_denominator(r(0, 1), r(1, 1)).unwrap(),
            SetSpec::dyadics(r(0, 1), r(1, 1)).unwrap(),
        )
    }

    fn fin(p: i64, q: i64) -> ExtendedPoint {
        ExtendedPoint::Fin(r(p, q))
    }

    #[test]
    fn seed_and_first_step() {
        let mut s = BuilderState::init(walkthrough()).unwrap();
        assert_eq!(s.partner(&r(1, 2)), Some(&r(3, 4)));
        let base: Vec<_> = s.history().ladder_at(0).unwrap().points().iter().cloned().collect();
        let g = ExtendedPoint::Sep(Separator::sqrt2_minus_one());
        assert_eq!(
            base,
            vec![ExtendedPoint::NegInf, fin(1, 3), g, fin(1, 2), fin(3, 4), ExtendedPoint::PosInf]
        );
        s.step().unwrap();
        let rec = &s.records()[1];
        assert_eq!((rec.primary.clone(), rec.partner.clone(), rec.level), (r(1, 4), r(1, 8), 1));
        assert_eq!(rec.interval, OpenInterval::new(ExtendedPoint::NegInf, fin(1, 3)).unwrap());
        assert_eq!(rec.evidence, Evidence::TopLevel);
        assert!(s.history().contains(&fin(2, 3)));
        assert_eq!(s.history().len_at(1) - s.history().len_at(0), 3);
    }

    #[test]
    fn empty_q_seeds_five_points() {
        let cfg = BuilderConfig::new(SetSpec::finite_list(vec![]), SetSpec::dyadics(r(0, 1), r(1, 1)).unwrap());
        let mut s = BuilderState::init(cfg).unwrap();
        assert_eq!(s.history().len(), 5);
        s.step().unwrap();
        assert_eq!(s.history().len(), 7);
    }

    #[test]
    fn identical_sets_rejected() {
        let d = SetSpec::dyadics(r(0, 1), r(1, 1)).unwrap();
        let err = BuilderState::init(BuilderConfig::new(d.clone(), d)).unwrap_err();
        match err {
            BuilderError::Validation(report) => assert!(!report.disjoint),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn exhausted_level_falls_back() {
        // F enumerates 5/2, 1, 2, 3, 4, …
        let f = SetSpec::union(vec![
            SetSpec::finite_list(vec![r(5, 2)]),
            SetSpec::progression(r(1, 1), r(1, 1), None).unwrap(),
        ])
        .unwrap();
        let cfg = BuilderConfig::new(SetSpec::finite_list(vec![]), f).relaxed();
        let mut s = BuilderState::init(cfg).unwrap();
        assert_eq!(s.partner(&r(5, 2)), Some(&r(1, 1)));
        s.step().unwrap();
        let rec = &s.records()[1];
        assert_eq!(rec.primary, r(2, 1));
        assert_eq!(rec.level, 0);
        assert_eq!(rec.partner, r(3, 1));
        assert_eq!(rec.evidence, Evidence::NextLevelExhausted { members: vec![r(2, 1)] });
    }

    #[test]
    fn finite_f_runs_out() {
        let f = SetSpec::finite_list(vec![r(1, 7), r(1, 5), r(1, 3), r(1, 2)]);
        let cfg = BuilderConfig::new(SetSpec::finite_list(vec![]), f).relaxed();
        let mut s = BuilderState::init(cfg).unwrap();
        s.step().unwrap();
        assert!(matches!(s.step(), Err(BuilderError::FExhausted { steps: 1 })));
    }

    #[test]
    fn step_is_deterministic() {
        let s = BuilderState::init(walkthrough()).unwrap();
        let (mut a, mut b) = (s.clone(), s);
        a.step().unwrap();
        b.step().unwrap();
        assert_eq!(a.records(), b.records());
    }

    #[test]
    fn run_is_prefix_stable() {
        let mut s = BuilderState::init(walkthrough()).unwrap();
        s.run(0).unwrap();
        assert_eq!(s.records().len(), 1);
        s.run(10).unwrap();
        let first: Vec<_> = s.records().to_vec();
        s.run(30).unwrap();
        assert_eq!(&s.records()[..11], &first[..]);
        s.run(5).unwrap();
        assert_eq!(s.step_count(), 30);
    }

    #[test]
    fn evaluation() {
        let cfg = walkthrough();
        assert_eq!(evaluate(&cfg, &r(1, 3), 0).unwrap(), r(1, 3));
        assert_eq!(evaluate(&cfg, &r(3, 4), 1).unwrap(), r(1, 2));
        assert_eq!(evaluate(&cfg, &r(1, 8), 5).unwrap(), r(1, 4));
        assert!(matches!(evaluate(&cfg, &r(3, 2), 5), Err(BuilderError::NotInDomain(_))));
        assert!(matches!(evaluate(&cfg, &r(1, 64), 0), Err(BuilderError::WorkCapExceeded { .. })));
    }
}
