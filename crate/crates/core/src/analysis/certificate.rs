use std::fmt;

use serde::Serialize;

use super::{AnalysisError, Explorer, Source};
use crate::builder::BuilderState;
use crate::numerics::{ExtendedPoint, OpenInterval, Rational};

/// Samples requested per certificate.
pub const DEFAULT_SAMPLES: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SamplePoint {
    pub point: Rational,
    pub image: Rational,
    pub source: Source,
    /// Ladder level at which the point was absorbed.
    pub entered: usize,
    pub inside: bool,
}

/// `x` is an endpoint of `interval`, `f(x)` lies outside its closure at
/// distance `gap`, and points of the interval absorbed later map back into it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiscontinuityCertificate {
    pub x: Rational,
    pub fx: Rational,
    pub level: usize,
    pub interval: OpenInterval,
    pub gap: Rational,
    pub samples: Vec<SamplePoint>,
}

impl DiscontinuityCertificate {
    pub fn x_is_endpoint(&self) -> bool {
        let x = ExtendedPoint::Fin(self.x.clone());
        *self.interval.lo() == x || *self.interval.hi() == x
    }

    pub fn samples_inside(&self) -> usize {
        self.samples.iter().filter(|s| s.inside).count()
    }

    /// All fields re-checked, with at least `wanted` samples.
    pub fn holds(&self, wanted: usize) -> bool {
        self.x_is_endpoint()
            && !self.interval.closure_contains(&self.fx)
            && self.gap.is_positive()
            && self.samples.len() >= wanted
            && self.samples_inside() == self.samples.len()
    }
}

impl fmt::Display for DiscontinuityCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "discontinuity certificate at x = {}", self.x)?;
        writeln!(f, "  f(x)     = {}", self.fx)?;
        writeln!(f, "  level    = {}", self.level)?;
        writeln!(f, "  interval = {}", self.interval)?;
        writeln!(f, "  gap      = {} (~{})", self.gap, self.gap.to_decimal(8))?;
        writeln!(f, "  samples  = {}/{} images inside", self.samples_inside(), self.samples.len())?;
        for s in &self.samples {
            let mark = if s.inside { "ok" } else { "OUTSIDE" };
            writeln!(f, "    {:?} {} -> {} (level {}) {mark}", s.source, s.point, s.image, s.entered)?;
        }
        Ok(())
    }
}

/// Steps past the snapshot a certificate may explore for samples.
pub const DEFAULT_EXPLORE: usize = 20_000;

/// Certificate for a paired F-point, exploring up to [`DEFAULT_EXPLORE`]
/// further steps for samples.
pub fn discontinuity_certificate(state: &BuilderState, x: &Rational) -> Result<DiscontinuityCertificate, AnalysisError> {
    check_domain(state, x)?;
    if state.partner(x).is_none() {
        return Err(AnalysisError::NotYetPaired(x.clone()));
    }
    let mut explorer = Explorer::new(state, state.step_count() + DEFAULT_EXPLORE);
    discontinuity_certificate_with(&mut explorer, x, DEFAULT_SAMPLES)
}

fn check_domain(state: &BuilderState, x: &Rational) -> Result<(), AnalysisError> {
    let cfg = state.config();
    if cfg.q.contains(x) {
        return Err(AnalysisError::NotDiscontinuityPoint(x.clone()));
    }
    if !cfg.f.contains(x) {
        return Err(AnalysisError::NotInDomain(x.clone()));
    }
    Ok(())
}

/// Later-absorbed finite ladder points inside `interval`, by entry level then value.
fn later_points(state: &BuilderState, interval: &OpenInterval, after: usize) -> Vec<(usize, Rational)> {
    let history = state.history();
    let mut found: Vec<(usize, Rational)> = history
        .points_inside(interval)
        .filter_map(|p| {
            let birth = history.birth_level(p).expect("ladder point");
            match p {
                ExtendedPoint::Fin(q) if birth > after => Some((birth, q.clone())),
                _ => None,
            }
        })
        .collect();
    found.sort();
    found
}

/// Certificate using a shared explorer, which may be advanced to find samples.
pub fn discontinuity_certificate_with(
    explorer: &mut Explorer,
    x: &Rational,
    wanted: usize,
) -> Result<DiscontinuityCertificate, AnalysisError> {
    check_domain(explorer.state(), x)?;
    let state = explorer.state();
    let fx = state.partner(x).cloned().ok_or_else(|| AnalysisError::NotYetPaired(x.clone()))?;
    let xp = ExtendedPoint::Fin(x.clone());
    let level = state.history().birth_level(&xp).expect("paired points are ladder points");
    let (lo, hi) = state.history().neighbors_at(level, &xp).map_err(crate::builder::BuilderError::from)?;
    // The side of x away from f(x) keeps f(x) out of the closure.
    let interval = if fx > *x {
        OpenInterval::new(lo, xp)
    } else {
        OpenInterval::new(xp, hi)
    }
    .map_err(crate::builder::BuilderError::from)?;
    let gap = (&fx - x).abs();

    explorer.advance_until(|s| later_points(s, &interval, level).len() >= wanted)?;
    let state = explorer.state();
    let samples = later_points(state, &interval, level)
        .into_iter()
        .take(wanted)
        .map(|(entered, point)| {
            let image = state.image(&point).expect("ladder points are paired or in Q");
            let source = if state.config().q.contains(&point) { Source::Q } else { Source::F };
            let inside = interval.contains_rational(&image);
            SamplePoint { point, image, source, entered, inside }
        })
        .collect();
    Ok(DiscontinuityCertificate { x: x.clone(), fx, level, interval, gap, samples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builder::BuilderConfig;
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
    fn seed_point_certificate() {
        let cert = discontinuity_certificate(&state(50), &r(1, 2)).unwrap();
        assert_eq!(cert.fx, r(3, 4));
        assert_eq!(cert.level, 0);
        // f(1/2) = 3/4 lies above, so the interval is the one below 1/2
        assert_eq!(*cert.interval.hi(), ExtendedPoint::Fin(r(1, 2)));
        assert_eq!(cert.gap, r(1, 4));
        assert!(cert.holds(DEFAULT_SAMPLES), "{cert}");
        assert!(cert.to_string().contains("20/20 images inside"));
    }

    #[test]
    fn gates() {
        assert!(matches!(
            discontinuity_certificate(&state(5), &r(1, 3)),
            Err(AnalysisError::NotDiscontinuityPoint(_))
        ));
        assert!(matches!(discontinuity_certificate(&state(0), &r(1, 8)), Err(AnalysisError::NotYetPaired(_))));
    }
}
