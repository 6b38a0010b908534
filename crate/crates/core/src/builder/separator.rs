//! Choosing the irrational split point `g`.

use serde::{Deserialize, Serialize};

use super::BuilderError;
use crate::numerics::{ExtendedPoint, OpenInterval, Rational, Separator};
use crate::sets::{Census, SetSpec};

/// Points inspected when a set has no declared support.
const HULL_PREFIX: u64 = 16;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeparatorPolicy {
    /// `u + (v − u)(√2 − 1)` over the support `(u, v)`, with one-sided fallbacks.
    #[default]
    Affine,
    /// A caller-supplied separator, still subject to the census check.
    Fixed(Separator),
}

pub(crate) fn sides(g: &Separator) -> (OpenInterval, OpenInterval) {
    let g = ExtendedPoint::Sep(g.clone());
    (
        OpenInterval::new(ExtendedPoint::NegInf, g.clone()).expect("-inf < g"),
        OpenInterval::new(g, ExtendedPoint::PosInf).expect("g < +inf"),
    )
}

/// Census of `f` on both sides of `g`, when each is empty or infinite.
pub fn certify(f: &SetSpec, g: &Separator) -> Option<(Census, Census)> {
    let (left, right) = sides(g);
    let (l, r) = (f.census(&left), f.census(&right));
    (l.is_empty_or_infinite() && r.is_empty_or_infinite()).then_some((l, r))
}

/// Candidates in preference order.
fn candidates(f: &SetSpec, policy: &SeparatorPolicy) -> Result<Vec<Separator>, BuilderError> {
    if let SeparatorPolicy::Fixed(g) = policy {
        return Ok(vec![g.clone()]);
    }
    let one = Rational::one();
    let (raw_lo, raw_hi) = match f.declared_support() {
        Some(support) => support,
        None => f
            .prefix_hull(HULL_PREFIX)
            .ok_or_else(|| BuilderError::SeparatorUnverifiable("the F-set is empty".into()))?,
    };
    let (u, v) = if f.declared_support().is_some() {
        (raw_lo.clone(), raw_hi.clone())
    } else {
        (&raw_lo - &one, &raw_hi + &one)
    };
    let width = &v - &u;
    let affine = Separator::new(&(&u + &u) - &v, width).expect("nonempty hull");
    // u' − (√2 − 1) puts every point of F above g; v' + (√2 − 1) puts every point below.
    let below_all = Separator::new(&raw_lo + &one, -Rational::one()).expect("nonzero");
    let above_all = Separator::new(&raw_hi - &one, Rational::one()).expect("nonzero");
    Ok(vec![affine, below_all, above_all])
}

/// Pick `g = a + b√2` with each side of `g` holding an empty or infinite part of `f`.
pub fn choose_separator(f: &SetSpec, policy: &SeparatorPolicy) -> Result<Separator, BuilderError> {
    if f.is_opaque() {
        return Err(BuilderError::SeparatorUnverifiable(
            "census of an externally listed infinite set cannot be certified".into(),
        ));
    }
    let candidates = candidates(f, policy)?;
    candidates.iter().find(|g| certify(f, g).is_some()).cloned().ok_or_else(|| {
        BuilderError::SeparatorUnverifiable(format!(
            "no candidate among {} splits F into empty or infinite sides",
            candidates.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
        ))
    })
}

/// The preferred candidate without certification, for relaxed runs.
pub(crate) fn uncertified_separator(f: &SetSpec, policy: &SeparatorPolicy) -> Result<Separator, BuilderError> {
    let mut candidates = candidates(f, policy)?;
    if let Some(g) = candidates.iter().find(|g| certify(f, g).is_some()) {
        return Ok(g.clone());
    }
    // Below every point of F when affine, else the fixed choice.
    let fallback = if candidates.len() > 1 { 1 } else { 0 };
    Ok(candidates.swap_remove(fallback))
}
