//! The value-assignment baseline: given `X = A ∪ B` with both classes dense
//! and a decreasing chain of open sets `F_1 = X ⊇ F_2 ⊇ …`, put `f(x) = 0`
//! on `∩ F_n` and `f(x) = ±1/n` on `F_n \ F_{n+1}`, with `+` on `A`.
//!
//! Chains are given by exact level functions. Built-in recipes also render
//! each `F_n` as `X` minus finitely many closed pieces, which is what the
//! validation and continuity-radius checks use.

use std::cell::Cell;
use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::numerics::{OpenInterval, Rational};
use crate::sets::SetSpec;

/// Rendering depth used by validation when none is given.
pub const DEFAULT_DEPTH: u32 = 32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SigmaError {
    #[error("invalid target: {0}")]
    InvalidTarget(String),
    #[error("{0} is not a member of X")]
    NotInX(Rational),
    #[error("a user-supplied level function has no rendering")]
    Unrenderable,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum SplitClass {
    A,
    B,
}

impl SplitClass {
    pub fn opposite(self) -> SplitClass {
        match self {
            SplitClass::A => SplitClass::B,
            SplitClass::B => SplitClass::A,
        }
    }
}

impl fmt::Display for SplitClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SplitClass::A => "A",
            SplitClass::B => "B",
        })
    }
}

type Classifier = Arc<dyn Fn(&Rational) -> SplitClass + Send + Sync>;

/// Partition of the rationals into two dense classes.
#[derive(Clone)]
pub enum DenseSplit {
    /// `A` = rationals whose reduced denominator is a power of two, integers included.
    Dyadic,
    Custom { name: String, classify: Classifier },
}

impl DenseSplit {
    pub fn custom(name: impl Into<String>, classify: impl Fn(&Rational) -> SplitClass + Send + Sync + 'static) -> Self {
        DenseSplit::Custom { name: name.into(), classify: Arc::new(classify) }
    }

    pub fn classify(&self, x: &Rational) -> SplitClass {
        match self {
            DenseSplit::Dyadic => {
                let d = x.denom();
                if (d & (d - BigInt::one())).is_zero() {
                    SplitClass::A
                } else {
                    SplitClass::B
                }
            }
            DenseSplit::Custom { classify, .. } => classify(x),
        }
    }

    pub fn name(&self) -> &str {
        match self {
            DenseSplit::Dyadic => "dyadic",
            DenseSplit::Custom { name, .. } => name,
        }
    }

    /// Intervals among `probes` in which the first 64 members of `x` fail to
    /// show both classes.
    pub fn density_failures(&self, x: &SetSpec, probes: &[OpenInterval]) -> Vec<OpenInterval> {
        probes
            .iter()
            .filter(|iv| {
                let seen = Cell::new([false, false]);
                let skip = |q: &Rational| {
                    let mut now = seen.get();
                    now[self.classify(q) as usize] = true;
                    seen.set(now);
                    !(now[0] && now[1])
                };
                let _ = x.first_value_where(iv, &skip, 64);
                let now = seen.get();
                !(now[0] && now[1])
            })
            .cloned()
            .collect()
    }
}

impl fmt::Debug for DenseSplit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DenseSplit({})", self.name())
    }
}

/// `max{k : x ∈ F_k}`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Level {
    Finite(BigUint),
    Infinite,
}

impl Level {
    pub fn finite(n: u64) -> Level {
        Level::Finite(BigUint::from(n))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Level::Infinite)
    }

    pub fn as_u64(&self) -> Option<u64> {
        match self {
            Level::Finite(n) => n.to_u64(),
            Level::Infinite => None,
        }
    }

    /// Whether `x ∈ F_n` for a point at this level.
    pub fn reaches(&self, n: u64) -> bool {
        match self {
            Level::Finite(k) => *k >= BigUint::from(n),
            Level::Infinite => true,
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Level::Finite(n) => write!(f, "{n}"),
            Level::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Level {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

type UserLevel = Arc<dyn Fn(&Rational) -> Level + Send + Sync>;

#[derive(Clone)]
pub enum ChainRecipe {
    /// `F_n = X \ points` for `n ≥ 2`.
    FiniteTarget(Vec<Rational>),
    /// `F_n = X \ [u + d/2n, w − d/2n]` for `n ≥ 2`, `d = w − u`.
    OpenIntervalTarget { u: Rational, w: Rational },
    /// Arbitrary level function; nothing about it can be validated.
    UserLevel(UserLevel),
}

impl fmt::Debug for ChainRecipe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChainRecipe::FiniteTarget(points) => f.debug_tuple("FiniteTarget").field(points).finish(),
            ChainRecipe::OpenIntervalTarget { u, w } => write!(f, "OpenIntervalTarget({u}, {w})"),
            ChainRecipe::UserLevel(_) => f.write_str("UserLevel(..)"),
        }
    }
}

/// The finitely many closed pieces removed from `X` to form one `F_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Removed {
    /// Closed intervals `[a, b]`, possibly degenerate.
    pub pieces: Vec<(Rational, Rational)>,
}

impl Removed {
    pub fn contains(&self, x: &Rational) -> bool {
        self.pieces.iter().any(|(a, b)| a <= x && x <= b)
    }

    /// Distance from `x` to the removed pieces; `None` when nothing is removed.
    pub fn distance(&self, x: &Rational) -> Option<Rational> {
        self.pieces
            .iter()
            .map(|(a, b)| {
                if x < a {
                    a - x
                } else if x > b {
                    x - b
                } else {
                    Rational::zero()
                }
            })
            .min()
    }
}

/// Decreasing chain of open subsets of `X`, presented by its level function.
#[derive(Clone, Debug)]
pub struct OpenChain {
    recipe: ChainRecipe,
    depth: u32,
}

impl OpenChain {
    pub fn recipe(&self) -> &ChainRecipe {
        &self.recipe
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn with_depth(mut self, depth: u32) -> Self {
        self.depth = depth;
        self
    }

    pub fn is_validatable(&self) -> bool {
        !matches!(self.recipe, ChainRecipe::UserLevel(_))
    }

    /// Level of `x`, without checking membership in `X`.
    pub fn level_unchecked(&self, x: &Rational) -> Level {
        match &self.recipe {
            ChainRecipe::FiniteTarget(points) => {
                if points.contains(x) {
                    Level::finite(1)
                } else {
                    Level::Infinite
                }
            }
            ChainRecipe::OpenIntervalTarget { u, w } => {
                if x <= u || x >= w {
                    return Level::Infinite;
                }
                let d = w - u;
                let m = (x - u).min(w - x);
                // x ∈ F_n  ⟺  m < d/(2n)  ⟺  n < d/(2m)
                let bound = &d / &(&m + &m);
                let below = bound.ceil() - BigInt::one();
                let n = below.max(BigInt::one());
                Level::Finite(n.abs().to_biguint().expect("positive"))
            }
            ChainRecipe::UserLevel(f) => f(x),
        }
    }

    /// `X \ F_n` for `n ≥ 1`.
    pub fn removed(&self, n: u32) -> Result<Removed, SigmaError> {
        assert!(n >= 1, "chain levels start at 1");
        if n == 1 {
            return Ok(Removed { pieces: Vec::new() });
        }
        match &self.recipe {
            ChainRecipe::FiniteTarget(points) => {
                Ok(Removed { pieces: points.iter().map(|p| (p.clone(), p.clone())).collect() })
            }
            ChainRecipe::OpenIntervalTarget { u, w } => {
                let margin = &(w - u) / &Rational::integer(2 * n);
                Ok(Removed { pieces: vec![(u + &margin, w - &margin)] })
            }
            ChainRecipe::UserLevel(_) => Err(SigmaError::Unrenderable),
        }
    }
}

/// Build the chain for a recipe, checking its parameters against `x`.
pub fn chain_from_target(recipe: ChainRecipe, x: &SetSpec) -> Result<OpenChain, SigmaError> {
    match &recipe {
        ChainRecipe::FiniteTarget(points) => {
            if let Some(p) = points.iter().find(|p| !x.contains(p)) {
                return Err(SigmaError::InvalidTarget(format!("{p} is not a member of X")));
            }
        }
        ChainRecipe::OpenIntervalTarget { u, w } => {
            if u >= w {
                return Err(SigmaError::InvalidTarget(format!("need u < w, got ({u}, {w})")));
            }
        }
        ChainRecipe::UserLevel(_) => {}
    }
    Ok(OpenChain { recipe, depth: DEFAULT_DEPTH })
}

#[derive(Clone, Debug)]
pub struct SigmaConfig {
    pub x: SetSpec,
    pub split: DenseSplit,
    pub chain: OpenChain,
}

impl SigmaConfig {
    pub fn level(&self, p: &Rational) -> Result<Level, SigmaError> {
        if !self.x.contains(p) {
            return Err(SigmaError::NotInX(p.clone()));
        }
        Ok(self.chain.level_unchecked(p))
    }

    pub fn value(&self, p: &Rational) -> Result<Rational, SigmaError> {
        let level = self.level(p)?;
        Ok(value_at(&level, self.split.classify(p)))
    }

    /// One row per point: `x,class,level,value`.
    pub fn value_table(&self, points: &[Rational]) -> Result<String, SigmaError> {
        let mut out = String::from("x,class,level,value\n");
        for p in points {
            let level = self.level(p)?;
            let class = self.split.classify(p);
            out.push_str(&format!("{p},{class},{level},{}\n", value_at(&level, class)));
        }
        Ok(out)
    }
}

pub fn sigma_value(config: &SigmaConfig, x: &Rational) -> Result<Rational, SigmaError> {
    config.value(x)
}

pub fn value_at(level: &Level, class: SplitClass) -> Rational {
    match level {
        Level::Infinite => Rational::zero(),
        Level::Finite(n) => {
            let inv = Rational::new(BigInt::one(), BigInt::from(n.clone())).expect("level ≥ 1");
            match class {
                SplitClass::A => inv,
                SplitClass::B => -inv,
            }
        }
    }
}

/// A sampled point where the rendered chain disagrees with itself or with
/// the level function.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChainViolation {
    pub point: Rational,
    pub n: u32,
    pub reason: String,
}

/// Check monotonicity of the rendered sets `F_1 … F_D` and their agreement
/// with the level function on each sample.
pub fn validate_chain(chain: &OpenChain, samples: &[Rational]) -> Result<Vec<ChainViolation>, SigmaError> {
    let depth = chain.depth.max(2);
    let rendered: Vec<Removed> = (1..=depth).map(|n| chain.removed(n)).collect::<Result<_, _>>()?;
    let mut violations = Vec::new();
    for x in samples {
        let level = chain.level_unchecked(x);
        if level == Level::finite(0) {
            violations.push(ChainViolation { point: x.clone(), n: 1, reason: "level 0".into() });
        }
        for n in 1..=depth {
            let inside = !rendered[n as usize - 1].contains(x);
            if n < depth && !rendered[n as usize].contains(x) && !inside {
                violations.push(ChainViolation { point: x.clone(), n, reason: "F_{n+1} not inside F_n".into() });
            }
            if inside != level.reaches(n.into()) {
                violations.push(ChainViolation {
                    point: x.clone(),
                    n,
                    reason: format!("membership in F_n disagrees with level {level}"),
                });
            }
        }
    }
    Ok(violations)
}
