//! Envelope checks at Q-points: along a witness sequence `a_i → y`, every
//! term in a window `[M, M + w]` maps within `|a_N − y|` of `y`.
//!
//! Terms deep in the sequence have enumeration indices far beyond any
//! runnable prefix, so they are resolved in one of two ways. A term that is
//! already paired is checked exactly. An unpaired F-term `a_i` whose
//! predecessor `a_{i−1}` is also an F-term is bracketed: `a_{i−1}` has the
//! smaller index, `y` is already a ladder point, and every pairing happens at
//! the top level when F is locally infinite, so `f(a_i)` lands strictly
//! between `a_{i−1}` and `y`.

use serde::Serialize;

use super::witness::{approach_sequence, Side, Source, WitnessSequence};
use super::{AnalysisError, Explorer};
use crate::numerics::{ExtendedPoint, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContinuityParams {
    pub ns: Vec<usize>,
    pub cap: usize,
    pub window: usize,
}

impl Default for ContinuityParams {
    fn default() -> Self {
        ContinuityParams { ns: vec![5, 10, 15], cap: 400, window: 20 }
    }
}

impl ContinuityParams {
    /// Sequence length that leaves room for the latest possible start.
    pub fn terms_needed(&self) -> usize {
        self.ns.iter().max().copied().unwrap_or(0) + self.window + 2
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TermEvidence {
    Exact { image: Rational },
    /// `f(a_i)` lies strictly between `beyond` and `y`.
    Bracket { beyond: Rational },
    Unresolved,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TermCheck {
    pub i: usize,
    pub term: Rational,
    pub evidence: TermEvidence,
}

impl TermCheck {
    /// Whether `|f(a_i) − y| ≤ bound` follows from the evidence.
    fn within(&self, y: &Rational, bound: &Rational) -> bool {
        match &self.evidence {
            TermEvidence::Exact { image } => (image - y).abs() <= *bound,
            TermEvidence::Bracket { beyond } => (beyond - y).abs() <= *bound,
            TermEvidence::Unresolved => false,
        }
    }
}

/// `∀ i ∈ [m, m + window]: |f(a_i) − y| ≤ bound`, with `bound = |a_n − y|`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EnvelopeTriple {
    pub n: usize,
    pub m: usize,
    pub bound: Rational,
    pub checks: Vec<TermCheck>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Verified,
    VacuouslyContinuous,
    Failed,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ContinuityReport {
    pub y: Rational,
    pub side: Side,
    pub sequence: Option<WitnessSequence>,
    pub envelope: Vec<EnvelopeTriple>,
    pub verdict: Verdict,
}

fn check_domain(explorer: &Explorer, y: &Rational) -> Result<(), AnalysisError> {
    let cfg = explorer.state().config();
    if cfg.f.contains(y) {
        return Err(AnalysisError::NotContinuityPoint(y.clone()));
    }
    if !cfg.q.contains(y) {
        return Err(AnalysisError::NotInDomain(y.clone()));
    }
    Ok(())
}

/// Generate the witness sequence on `side` and report on it; an isolated
/// `y` is vacuously continuous.
pub fn continuity_check(
    explorer: &mut Explorer,
    y: &Rational,
    side: Side,
    params: &ContinuityParams,
) -> Result<ContinuityReport, AnalysisError> {
    check_domain(explorer, y)?;
    let cfg = explorer.state().config();
    match approach_sequence(&cfg.q, &cfg.f, y, side, params.terms_needed()) {
        Ok(seq) => continuity_report(explorer, y, &seq, params),
        Err(AnalysisError::IsolatedTarget { .. }) => Ok(ContinuityReport {
            y: y.clone(),
            side,
            sequence: None,
            envelope: Vec::new(),
            verdict: Verdict::VacuouslyContinuous,
        }),
        Err(e) => Err(e),
    }
}

pub fn continuity_report(
    explorer: &mut Explorer,
    y: &Rational,
    seq: &WitnessSequence,
    params: &ContinuityParams,
) -> Result<ContinuityReport, AnalysisError> {
    check_domain(explorer, y)?;
    let yp = ExtendedPoint::Fin(y.clone());
    let absorbed = explorer.advance_until(|s| s.history().contains(&yp))?;
    let state = explorer.state();
    let locally_infinite = state.config().f.is_locally_infinite();

    let checks: Vec<TermCheck> = seq
        .terms
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let evidence = if let Some(image) = state.image(&t.value) {
                TermEvidence::Exact { image }
            } else if absorbed
                && locally_infinite
                && i > 0
                && t.source == Source::F
                && seq.terms[i - 1].source == Source::F
            {
                TermEvidence::Bracket { beyond: seq.terms[i - 1].value.clone() }
            } else {
                TermEvidence::Unresolved
            };
            TermCheck { i, term: t.value.clone(), evidence }
        })
        .collect();

    let mut envelope = Vec::new();
    let mut complete = true;
    for &n in &params.ns {
        let Some(a_n) = seq.terms.get(n) else {
            complete = false;
            continue;
        };
        let bound = (&a_n.value - y).abs();
        let last_start = params.cap.min(checks.len().saturating_sub(params.window + 1));
        let start = (0..=last_start).find(|&m| {
            m + params.window < checks.len() && checks[m..=m + params.window].iter().all(|c| c.within(y, &bound))
        });
        match start {
            Some(m) => envelope.push(EnvelopeTriple {
                n,
                m,
                bound,
                checks: checks[m..=m + params.window].to_vec(),
            }),
            None => complete = false,
        }
    }
    let report = ContinuityReport {
        y: y.clone(),
        side: seq.side,
        sequence: Some(seq.clone()),
        envelope,
        verdict: if complete { Verdict::Verified } else { Verdict::Failed },
    };
    if complete {
        Ok(report)
    } else {
        Err(AnalysisError::CapExceeded { y: y.clone(), cap: params.cap, partial: Box::new(report) })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builder::{BuilderConfig, BuilderState};
    use crate::sets::SetSpec;

    fn r(p: i64, q: i64) -> Rational {
        Rational::frac(p, q)
    }

    fn explorer(steps: usize) -> Explorer {
        let cfg = BuilderConfig::new(
            SetSpec::odd_denominator(r(0, 1), r(1, 1)).unwrap(),
            SetSpec::dyadics(r(0, 1), r(1, 1)).unwrap(),
        );
        let mut s = BuilderState::init(cfg).unwrap();
        s.run(steps).unwrap();
        Explorer::new(&s, steps + 100)
    }

    #[test]
    fn one_third_from_below() {
        let mut ex = explorer(100);
        let rep = continuity_check(&mut ex, &r(1, 3), Side::Below, &ContinuityParams::default()).unwrap();
        assert_eq!(rep.verdict, Verdict::Verified);
        assert_eq!(rep.envelope.len(), 3);
        for t in &rep.envelope {
            assert!(t.m <= 400);
            assert_eq!(t.checks.len(), 21);
        }
    }

    #[test]
    fn gates() {
        let mut ex = explorer(5);
        assert!(matches!(
            continuity_check(&mut ex, &r(1, 2), Side::Below, &ContinuityParams::default()),
            Err(AnalysisError::NotContinuityPoint(_))
        ));
        assert!(matches!(
            continuity_check(&mut ex, &r(3, 2), Side::Below, &ContinuityParams::default()),
            Err(AnalysisError::NotInDomain(_))
        ));
    }

    #[test]
    fn isolated_point_is_vacuous() {
        let f = SetSpec::dyadics(r(0, 1), r(1, 1)).unwrap();
        let q = SetSpec::finite_list(vec![r(5, 1)]);
        let s = BuilderState::init(BuilderConfig::new(q, f)).unwrap();
        let mut ex = Explorer::new(&s, 10);
        let rep = continuity_check(&mut ex, &r(5, 1), Side::Above, &ContinuityParams::default()).unwrap();
        assert_eq!(rep.verdict, Verdict::VacuouslyContinuous);
    }
}
