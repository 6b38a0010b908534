//! Verification of built prefixes: discontinuity certificates at F-points,
//! continuity envelopes at Q-points, whole-state property suites, an
//! independent naive oracle, and the sigma-baseline suite.
//!
//! Everything here reads builder snapshots. When a check needs points the
//! snapshot has not processed yet it runs a private clone further, which
//! never alters earlier records.

mod certificate;
mod continuity;
mod naive;
mod sigma_suite;
mod suite;
mod witness;

use thiserror::Error;

use crate::builder::{BuilderError, BuilderState};
use crate::numerics::Rational;
use crate::sets::SetError;
use crate::sigma::SigmaError;

pub use certificate::{discontinuity_certificate, DEFAULT_SAMPLES, discontinuity_certificate_with, DiscontinuityCertificate, SamplePoint};
pub use continuity::{
    continuity_check, continuity_report, ContinuityParams, ContinuityReport, EnvelopeTriple, TermCheck, TermEvidence,
    Verdict,
};
pub use naive::{naive_reference, NAIVE_SCAN_CAP};
pub use sigma_suite::{sigma_suite, SigmaSuiteParams};
pub use suite::{naive_equivalence, property_suite, CheckResult, SuiteReport};
pub use witness::{approach_sequence, Side, Source, WitnessSequence, WitnessTerm};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("no point of Q or F lies in window {term} around {target}")]
    IsolatedTarget { target: Rational, term: usize },
    #[error("{0} is not paired yet")]
    NotYetPaired(Rational),
    #[error("{0} is a Q-point, where f is continuous")]
    NotDiscontinuityPoint(Rational),
    #[error("{0} is an F-point, where f is discontinuous")]
    NotContinuityPoint(Rational),
    #[error("{0} belongs to neither Q nor F")]
    NotInDomain(Rational),
    #[error("no envelope start M up to {cap} for {y}")]
    CapExceeded { y: Rational, cap: usize, partial: Box<ContinuityReport> },
    #[error("the naive oracle needs built-in sets; external lists are opaque to it")]
    InfeasibleForOpaqueSets,
    #[error(transparent)]
    Builder(#[from] BuilderError),
    #[error(transparent)]
    Set(#[from] SetError),
    #[error(transparent)]
    Sigma(#[from] SigmaError),
}

/// A private builder clone that is only ever run forward.
#[derive(Clone, Debug)]
pub struct Explorer {
    state: BuilderState,
    max_steps: usize,
}

impl Explorer {
    /// Explore from `state` for at most `max_steps` steps in total.
    pub fn new(state: &BuilderState, max_steps: usize) -> Self {
        Explorer { state: state.clone(), max_steps }
    }

    pub fn state(&self) -> &BuilderState {
        &self.state
    }

    /// Step until `done` holds or the step budget runs out; reports whether `done` holds.
    pub fn advance_until(&mut self, mut done: impl FnMut(&BuilderState) -> bool) -> Result<bool, BuilderError> {
        while !done(&self.state) {
            if self.state.step_count() >= self.max_steps {
                return Ok(false);
            }
            self.state.step()?;
        }
        Ok(true)
    }

    /// `f(p)`, running forward if `p` is not paired yet.
    pub fn image(&mut self, p: &Rational) -> Result<Option<Rational>, BuilderError> {
        self.advance_until(|s| s.image(p).is_some())?;
        Ok(self.state.image(p))
    }
}
