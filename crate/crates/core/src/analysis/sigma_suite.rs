use std::cell::RefCell;
use std::time::Instant;

use serde_json::json;

use super::suite::{CheckResult, SuiteReport, Tally};
use super::witness::{approach_sequence, Side};
use super::AnalysisError;
use crate::numerics::{OpenInterval, Rational};
use crate::sets::SetSpec;
use crate::sigma::{validate_chain, ChainRecipe, DenseSplit, Level, SigmaConfig, SplitClass};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SigmaSuiteParams {
    /// X-points sampled from the front of the enumeration.
    pub samples: usize,
    pub c_points: usize,
    pub off_points: usize,
    /// Opposite-class terms per discontinuity witness.
    pub witness_terms: usize,
    /// Continuity is checked for every `n ≤ max_n`.
    pub max_n: u32,
    /// X-points probed inside each continuity radius.
    pub radius_probes: usize,
}

impl Default for SigmaSuiteParams {
    fn default() -> Self {
        SigmaSuiteParams { samples: 200, c_points: 20, off_points: 20, witness_terms: 8, max_n: 20, radius_probes: 8 }
    }
}

/// Candidates rejected per search before giving up.
const SEARCH_CAP: u64 = 4096;

fn window(center: &Rational, radius: &Rational) -> OpenInterval {
    OpenInterval::rational(center - radius, center + radius).expect("positive radius")
}

pub fn sigma_suite(config: &SigmaConfig, params: &SigmaSuiteParams) -> SuiteReport {
    let started = Instant::now();
    let samples: Vec<Rational> = config.x.iter().take(params.samples).map(|(_, q)| q).collect();
    let in_c: Vec<&Rational> = samples
        .iter()
        .filter(|p| !config.chain.level_unchecked(p).is_infinite())
        .take(params.c_points)
        .collect();
    let off_c: Vec<&Rational> = samples
        .iter()
        .filter(|p| config.chain.level_unchecked(p).is_infinite())
        .take(params.off_points)
        .collect();
    let checks = vec![
        value_invariants(config, &samples),
        chain_rendering(config, &samples),
        recipe_soundness(config, &samples),
        split_density(config, &samples),
        discontinuity_witnesses(config, &in_c, params),
        continuity_radius(config, &off_c, params),
    ];
    SuiteReport { suite: "sigma".into(), checks, runtime_ms: started.elapsed().as_millis() }
}

fn value_invariants(config: &SigmaConfig, samples: &[Rational]) -> CheckResult {
    let mut t = Tally::new("value-invariants");
    for p in samples {
        let (level, value) = match (config.level(p), config.value(p)) {
            (Ok(l), Ok(v)) => (l, v),
            (l, v) => {
                t.record(false, || json!({ "x": p, "error": format!("{l:?} {v:?}") }));
                continue;
            }
        };
        let class = config.split.classify(p);
        let ok = match &level {
            Level::Infinite => value.is_zero(),
            Level::Finite(n) => {
                let n = Rational::integer(num_bigint::BigInt::from(n.clone()));
                let sign_ok = match class {
                    SplitClass::A => value.is_positive(),
                    SplitClass::B => value.is_negative(),
                };
                sign_ok && &value.abs() * &n == Rational::one()
            }
        };
        t.record(ok, || json!({ "x": p, "class": class, "level": level, "value": value }));
    }
    t.finish()
}

fn chain_rendering(config: &SigmaConfig, samples: &[Rational]) -> CheckResult {
    let mut t = Tally::new("chain-rendering");
    match validate_chain(&config.chain, samples) {
        Ok(violations) => {
            for p in samples {
                let v = violations.iter().find(|v| v.point == *p);
                t.record(v.is_none(), || json!(v));
            }
        }
        Err(e) => t.record(false, || json!({ "error": e.to_string() })),
    }
    t.finish()
}

fn recipe_soundness(config: &SigmaConfig, samples: &[Rational]) -> CheckResult {
    let mut t = Tally::new("recipe-soundness");
    for p in samples {
        let finite = !config.chain.level_unchecked(p).is_infinite();
        let expected = match config.chain.recipe() {
            ChainRecipe::OpenIntervalTarget { u, w } => u < p && p < w,
            ChainRecipe::FiniteTarget(points) => points.contains(p),
            ChainRecipe::UserLevel(_) => finite,
        };
        t.record(finite == expected, || json!({ "x": p, "level_finite": finite, "expected": expected }));
    }
    t.finish()
}

fn split_density(config: &SigmaConfig, samples: &[Rational]) -> CheckResult {
    let mut t = Tally::new("split-density");
    let radius = Rational::frac(1, 64);
    let probes: Vec<OpenInterval> = samples.iter().take(20).map(|p| window(p, &radius)).collect();
    let failures = config.split.density_failures(&config.x, &probes);
    for p in &probes {
        t.record(!failures.contains(p), || json!({ "interval": p.to_string() }));
    }
    t.finish()
}

/// Each `c ∈ C` has nonzero value, while opposite-class points converge to it
/// with values of the other sign, so the oscillation is at least `|σ(c)|`.
fn discontinuity_witnesses(
    config: &SigmaConfig,
    points: &[&Rational],
    params: &SigmaSuiteParams,
) -> CheckResult {
    let mut t = Tally::new("discontinuity-witnesses");
    for &c in points {
        let Ok(vc) = config.value(c) else {
            t.record(false, || json!({ "c": c, "error": "not in X" }));
            continue;
        };
        let opposite = config.split.classify(c).opposite();
        let mut terms = Vec::new();
        let mut ok = !vc.is_zero();
        match class_witnesses(config, c, opposite, params.witness_terms) {
            Ok(witnesses) => {
                for a in witnesses {
                    let va = config.value(&a).ok();
                    // σ(a) sits on the other side of zero from σ(c), or is zero.
                    ok &= config.split.classify(&a) == opposite
                        && va.as_ref().is_some_and(|va| (va - &vc).abs() >= vc.abs() && va * &vc <= Rational::zero());
                    terms.push(json!({ "a": a, "value": va }));
                }
                ok &= terms.len() == params.witness_terms;
            }
            Err(e) => {
                ok = false;
                terms.push(json!({ "error": e.to_string() }));
            }
        }
        t.record(ok, || json!({ "c": c, "value": vc, "terms": terms }));
    }
    t.finish()
}

/// The split class as a structured set on the support of X, when there is one.
fn class_set(config: &SigmaConfig, class: SplitClass) -> Option<SetSpec> {
    let (lo, hi) = config.x.declared_support()?;
    match (&config.split, class) {
        (DenseSplit::Dyadic, SplitClass::A) => SetSpec::dyadics(lo, hi).ok(),
        (DenseSplit::Dyadic, SplitClass::B) => SetSpec::odd_denominator(lo, hi).ok(),
        (DenseSplit::Custom { .. }, _) => None,
    }
}

/// Terms of `class` converging to `c` inside the geometric windows.
fn class_witnesses(config: &SigmaConfig, c: &Rational, class: SplitClass, count: usize) -> Result<Vec<Rational>, AnalysisError> {
    if let Some(set) = class_set(config, class) {
        let seq = approach_sequence(&SetSpec::finite_list(Vec::new()), &set, c, Side::Below, count)
            .or_else(|_| approach_sequence(&SetSpec::finite_list(Vec::new()), &set, c, Side::Above, count))?;
        return Ok(seq.terms.into_iter().map(|t| t.value).filter(|a| config.x.contains(a)).collect());
    }
    let mut terms: Vec<Rational> = Vec::new();
    for i in 0..count {
        let mut radius = Rational::inv_pow2(i as u32 + 2);
        if let Some(prev) = terms.last() {
            radius = radius.min((prev - c).abs());
        }
        let skip = |q: &Rational| q == c || config.split.classify(q) != class;
        match config.x.first_value_where(&window(c, &radius), &skip, SEARCH_CAP)? {
            Some(a) => terms.push(a),
            None => break,
        }
    }
    Ok(terms)
}

/// Around `x ∉ C`, every X-point closer than the distance to the set removed
/// at stage `n` has `|σ| ≤ 1/n`.
fn continuity_radius(config: &SigmaConfig, points: &[&Rational], params: &SigmaSuiteParams) -> CheckResult {
    let mut t = Tally::new("continuity-radius");
    for &x in points {
        for n in 1..=params.max_n {
            let radius = match config.chain.removed(n) {
                Ok(removed) => removed.distance(x).unwrap_or_else(Rational::one),
                Err(e) => {
                    t.record(false, || json!({ "x": x, "n": n, "error": e.to_string() }));
                    continue;
                }
            };
            let bound = Rational::frac(1, n.into());
            let seen = RefCell::new(vec![x.clone()]);
            let mut bad = None;
            for k in 0..params.radius_probes {
                let r = &radius / &Rational::integer(num_bigint::BigInt::from(1u64 << k));
                let skip = |q: &Rational| seen.borrow().contains(q);
                let Ok(Some(p)) = config.x.first_value_where(&window(x, &r), &skip, SEARCH_CAP) else {
                    continue;
                };
                let vp = config.value(&p).unwrap_or_else(|_| Rational::one());
                if vp.abs() > bound && bad.is_none() {
                    bad = Some(json!({ "p": p, "value": vp }));
                }
                seen.borrow_mut().push(p);
            }
            let probed = seen.borrow().len() - 1;
            t.record(bad.is_none() && probed > 0, || {
                json!({ "x": x, "n": n, "radius": radius, "probed": probed, "violation": bad })
            });
        }
    }
    t.finish()
}
