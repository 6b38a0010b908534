//! Exact ordered arithmetic: rationals, the `a + b·√2` separator, extended
//! points, open intervals, and endpoint ladders.
//!
//! Nothing here touches floating point. Decimal renderings exist for
//! human-readable reports only.

mod ladder;
mod point;
mod rational;
mod separator;

pub use ladder::{EndpointLadder, LadderHistory};
pub use point::{compare, ExtendedPoint, OpenInterval};
pub use rational::Rational;
pub use separator::Separator;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumericsError {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("separator must have a nonzero sqrt2 coefficient")]
    RationalSeparator,
    #[error("cannot parse {0:?} as an exact number")]
    Parse(String),
    #[error("empty interval ({lo}, {hi})")]
    EmptyInterval { lo: String, hi: String },
    #[error("query point must be finite")]
    InfiniteQueryPoint,
    #[error("{0} is a ladder point and has no enclosing open interval")]
    LadderMember(String),
    #[error("point lies outside the ladder's span")]
    OutsideLadder,
    #[error("ladder level {requested} not computed (latest is {available})")]
    LevelNotComputed { requested: usize, available: usize },
}
