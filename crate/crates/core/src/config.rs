//! JSON run configuration.
//!
//! Every rational is a string (`"1/3"`, `"-2"`), so floats are rejected at
//! any position. Unknown keys are rejected too. One file can carry both a
//! builder and a sigma section; the subcommand picks what to run.
//!
//! ```json
//! {
//!   "builder": {
//!     "q": { "kind": "odd-denominator", "lo": "0", "hi": "1" },
//!     "f": { "kind": "dyadics", "lo": "0", "hi": "1" }
//!   },
//!   "steps": 2000
//! }
//! ```

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::{ContinuityParams, SigmaSuiteParams};
use crate::builder::{BuilderConfig, InitMode, SeparatorPolicy};
use crate::numerics::Rational;
use crate::sets::{SetError, SetSpec};
use crate::sigma::{chain_from_target, ChainRecipe, DenseSplit, SigmaConfig, SigmaError};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}, column {column}, at `{path}`: {message}")]
    Parse { path: String, line: usize, column: usize, message: String },
    #[error("line {line}, column {column}, at `{path}`: floats are not allowed; write rationals as strings like \"1/2\"")]
    Float { path: String, line: usize, column: usize },
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error(transparent)]
    Set(#[from] SetError),
    #[error(transparent)]
    Sigma(#[from] SigmaError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Build,
    Eval,
    Verify,
    Witness,
    Sigma,
    Export,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("mode serializes");
        f.write_str(s.as_str().expect("string"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Jsonl,
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "jsonl" => Ok(OutputFormat::Jsonl),
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(format!("unknown format {other:?}; expected jsonl, csv or json")),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OutputSpec {
    pub path: Option<PathBuf>,
    pub format: Option<OutputFormat>,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    /// Optional; when present the subcommand must agree with it.
    pub mode: Option<Mode>,
    pub builder: Option<BuilderConfig>,
    pub sigma: Option<SigmaConfig>,
    pub steps: usize,
    pub points: Vec<Rational>,
    pub continuity: ContinuityParams,
    pub certificate_samples: usize,
    pub sigma_suite: SigmaSuiteParams,
    /// Steps an evaluation may run past `steps` to reach a point.
    pub eval_cap: u64,
    pub output: OutputSpec,
}

pub const DEFAULT_STEPS: usize = 2000;
pub const DEFAULT_EVAL_CAP: u64 = 100_000;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    mode: Option<Mode>,
    builder: Option<RawBuilder>,
    sigma: Option<RawSigma>,
    steps: Option<usize>,
    #[serde(default)]
    points: Vec<RawRational>,
    caps: Option<RawCaps>,
    output: Option<RawOutput>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBuilder {
    q: RawSet,
    f: RawSet,
    #[serde(default)]
    separator: SeparatorPolicy,
    #[serde(default)]
    init_mode: InitMode,
    validation_resolution: Option<RawRational>,
    isolation_prefix: Option<u64>,
    external_budget: Option<u64>,
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
enum RawSet {
    Dyadics { lo: RawRational, hi: RawRational },
    AllRationals { lo: RawRational, hi: RawRational },
    OddDenominator { lo: RawRational, hi: RawRational },
    Progression { start: RawRational, step: RawRational, count: Option<u64> },
    List { values: Vec<RawRational> },
    Union { members: Vec<RawSet> },
    External { path: PathBuf, #[serde(default)] infinite: bool },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSigma {
    x: RawSet,
    #[serde(default)]
    split: RawSplit,
    chain: RawChain,
    depth: Option<u32>,
}

#[derive(Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
enum RawSplit {
    #[default]
    Dyadic,
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
enum RawChain {
    OpenInterval { u: RawRational, w: RawRational },
    FiniteTarget { points: Vec<RawRational> },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCaps {
    continuity_ns: Option<Vec<usize>>,
    continuity_cap: Option<usize>,
    continuity_window: Option<usize>,
    certificate_samples: Option<usize>,
    sigma_samples: Option<usize>,
    eval_cap: Option<u64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    path: Option<PathBuf>,
    format: Option<OutputFormat>,
}

/// A rational written as a JSON string.
struct RawRational(Rational);

impl<'de> Deserialize<'de> for RawRational {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map(RawRational).map_err(serde::de::Error::custom)
    }
}

fn rat(r: RawRational) -> Rational {
    r.0
}

/// Parse a configuration. Relative external-list paths resolve against `base_dir`.
pub fn parse_config(text: &str, base_dir: Option<&Path>) -> Result<RunConfig, ConfigError> {
    reject_floats(text)?;
    let de = &mut serde_json::Deserializer::from_str(text);
    let raw: RawConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        let (line, column) = (inner.line(), inner.column());
        let message = inner.to_string();
        if message.contains("floating point") {
            ConfigError::Float { path, line, column }
        } else {
            ConfigError::Parse { path, line, column, message }
        }
    })?;
    build_config(raw, base_dir.unwrap_or(Path::new(".")))
}

/// Walks the document once, failing at the first float with its key path.
fn reject_floats(text: &str) -> Result<(), ConfigError> {
    use serde::de::{DeserializeSeed, Deserializer, Error, MapAccess, SeqAccess, Visitor};
    use std::cell::RefCell;

    struct Walk<'a>(&'a RefCell<Vec<String>>);

    impl<'de> DeserializeSeed<'de> for Walk<'_> {
        type Value = ();
        fn deserialize<D: Deserializer<'de>>(self, d: D) -> Result<(), D::Error> {
            d.deserialize_any(self)
        }
    }

    impl<'de> Visitor<'de> for Walk<'_> {
        type Value = ();
        fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            f.write_str("any JSON value")
        }
        fn visit_f64<E: Error>(self, _: f64) -> Result<(), E> {
            Err(E::custom(FLOAT_MARK))
        }
        fn visit_bool<E: Error>(self, _: bool) -> Result<(), E> {
            Ok(())
        }
        fn visit_i64<E: Error>(self, _: i64) -> Result<(), E> {
            Ok(())
        }
        fn visit_u64<E: Error>(self, _: u64) -> Result<(), E> {
            Ok(())
        }
        fn visit_str<E: Error>(self, _: &str) -> Result<(), E> {
            Ok(())
        }
        fn visit_unit<E: Error>(self) -> Result<(), E> {
            Ok(())
        }
        fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<(), A::Error> {
            let mut i = 0;
            loop {
                self.0.borrow_mut().push(format!("[{i}]"));
                if seq.next_element_seed(Walk(self.0))?.is_none() {
                    self.0.borrow_mut().pop();
                    return Ok(());
                }
                self.0.borrow_mut().pop();
                i += 1;
            }
        }
        fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<(), A::Error> {
            while let Some(key) = map.next_key::<String>()? {
                self.0.borrow_mut().push(key);
                map.next_value_seed(Walk(self.0))?;
                self.0.borrow_mut().pop();
            }
            Ok(())
        }
    }

    const FLOAT_MARK: &str = "float literal";
    let path = RefCell::new(Vec::new());
    let mut de = serde_json::Deserializer::from_str(text);
    match Walk(&path).deserialize(&mut de) {
        Err(e) if e.to_string().starts_with(FLOAT_MARK) => {
            let joined = path.borrow().iter().fold(String::new(), |mut acc, seg| {
                if !acc.is_empty() && !seg.starts_with('[') {
                    acc.push('.');
                }
                acc.push_str(seg);
                acc
            });
            Err(ConfigError::Float { path: joined, line: e.line(), column: e.column() })
        }
        // Syntax errors are reported by the typed pass.
        _ => Ok(()),
    }
}

fn build_config(raw: RawConfig, base: &Path) -> Result<RunConfig, ConfigError> {
    let builder = raw.builder.map(|b| build_builder(b, base)).transpose()?;
    let sigma = raw.sigma.map(|s| build_sigma(s, base)).transpose()?;
    let mut continuity = ContinuityParams::default();
    let mut certificate_samples = crate::analysis::DEFAULT_SAMPLES;
    let mut sigma_suite = SigmaSuiteParams::default();
    let mut eval_cap = DEFAULT_EVAL_CAP;
    if let Some(c) = raw.caps {
        if let Some(ns) = c.continuity_ns {
            if ns.is_empty() {
                return Err(ConfigError::Invalid("caps.continuity_ns must not be empty".into()));
            }
            continuity.ns = ns;
        }
        continuity.cap = c.continuity_cap.unwrap_or(continuity.cap);
        continuity.window = c.continuity_window.unwrap_or(continuity.window);
        certificate_samples = c.certificate_samples.unwrap_or(certificate_samples);
        sigma_suite.samples = c.sigma_samples.unwrap_or(sigma_suite.samples);
        eval_cap = c.eval_cap.unwrap_or(eval_cap);
    }
    let output = raw.output.map(|o| OutputSpec { path: o.path, format: o.format }).unwrap_or_default();
    Ok(RunConfig {
        mode: raw.mode,
        builder,
        sigma,
        steps: raw.steps.unwrap_or(DEFAULT_STEPS),
        points: raw.points.into_iter().map(rat).collect(),
        continuity,
        certificate_samples,
        sigma_suite,
        eval_cap,
        output,
    })
}

fn build_builder(b: RawBuilder, base: &Path) -> Result<BuilderConfig, ConfigError> {
    let mut cfg = BuilderConfig::new(build_set(b.q, base)?, build_set(b.f, base)?);
    cfg.separator_policy = b.separator;
    cfg.init_mode = b.init_mode;
    if let Some(r) = b.validation_resolution {
        if !r.0.is_positive() {
            return Err(ConfigError::Invalid("validation_resolution must be positive".into()));
        }
        cfg.validation_resolution = r.0;
    }
    cfg.isolation_prefix = b.isolation_prefix.unwrap_or(cfg.isolation_prefix);
    cfg.external_budget = b.external_budget.unwrap_or(cfg.external_budget);
    Ok(cfg)
}

fn build_set(s: RawSet, base: &Path) -> Result<SetSpec, ConfigError> {
    Ok(match s {
        RawSet::Dyadics { lo, hi } => SetSpec::dyadics(rat(lo), rat(hi))?,
        RawSet::AllRationals { lo, hi } => SetSpec::all_rationals(rat(lo), rat(hi))?,
        RawSet::OddDenominator { lo, hi } => SetSpec::odd_denominator(rat(lo), rat(hi))?,
        RawSet::Progression { start, step, count } => SetSpec::progression(rat(start), rat(step), count)?,
        RawSet::List { values } => SetSpec::finite_list(values.into_iter().map(rat).collect()),
        RawSet::Union { members } => {
            SetSpec::union(members.into_iter().map(|m| build_set(m, base)).collect::<Result<_, _>>()?)?
        }
        RawSet::External { path, infinite } => SetSpec::external_list(&base.join(path), infinite)?,
    })
}

fn build_sigma(s: RawSigma, base: &Path) -> Result<SigmaConfig, ConfigError> {
    let x = build_set(s.x, base)?;
    let recipe = match s.chain {
        RawChain::OpenInterval { u, w } => ChainRecipe::OpenIntervalTarget { u: rat(u), w: rat(w) },
        RawChain::FiniteTarget { points } => ChainRecipe::FiniteTarget(points.into_iter().map(rat).collect()),
    };
    let mut chain = chain_from_target(recipe, &x)?;
    if let Some(d) = s.depth {
        if d < 2 {
            return Err(ConfigError::Invalid("sigma.depth must be at least 2".into()));
        }
        chain = chain.with_depth(d);
    }
    let split = match s.split {
        RawSplit::Dyadic => DenseSplit::Dyadic,
    };
    Ok(SigmaConfig { x, split, chain })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "builder": {
            "q": { "kind": "odd-denominator", "lo": "0", "hi": "1" },
            "f": { "kind": "dyadics", "lo": "0", "hi": "1" }
        },
        "steps": 2000
    }"#;

    #[test]
    fn minimal_build_config() {
        let cfg = parse_config(MINIMAL, None).unwrap();
        assert_eq!(cfg.steps, 2000);
        let b = cfg.builder.unwrap();
        assert_eq!(b.f, SetSpec::dyadics(Rational::zero(), Rational::one()).unwrap());
        assert_eq!(b.init_mode, InitMode::Strict);
    }

    #[test]
    fn floats_are_rejected_with_location() {
        let text = MINIMAL.replace(r#""lo": "0", "hi": "1" },
            "f""#, r#""lo": 0.5, "hi": "1" },
            "f""#);
        match parse_config(&text, None) {
            Err(ConfigError::Float { path, line, .. }) => {
                assert_eq!(path, "builder.q.lo");
                assert_eq!(line, 3);
            }
            other => panic!("{other:?}"),
        }
        let steps = MINIMAL.replace("2000", "2000.0");
        assert!(matches!(parse_config(&steps, None), Err(ConfigError::Float { .. })));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = MINIMAL.replace(r#""steps""#, r#""budgett": 3, "steps""#);
        let err = parse_config(&text, None).unwrap_err();
        assert!(matches!(&err, ConfigError::Parse { .. }));
        assert!(err.to_string().contains("budgett"), "{err}");
    }

    #[test]
    fn decimal_strings_are_rejected() {
        let text = MINIMAL.replace(r#""hi": "1" },
            "f""#, r#""hi": "1.0" },
            "f""#);
        assert!(matches!(parse_config(&text, None), Err(ConfigError::Parse { .. })));
    }

    #[test]
    fn sigma_section() {
        let text = r#"{
            "sigma": {
                "x": { "kind": "all-rationals", "lo": "0", "hi": "1" },
                "chain": { "kind": "open-interval", "u": "1/4", "w": "3/4" }
            },
            "caps": { "sigma_samples": 50 }
        }"#;
        let cfg = parse_config(text, None).unwrap();
        let s = cfg.sigma.unwrap();
        assert_eq!(s.value(&Rational::frac(13, 50)).unwrap(), Rational::frac(-1, 24));
        assert_eq!(cfg.sigma_suite.samples, 50);
        let bad = text.replace(r#""u": "1/4", "w": "3/4""#, r#""u": "3/4", "w": "1/4""#);
        assert!(matches!(parse_config(&bad, None), Err(ConfigError::Sigma(SigmaError::InvalidTarget(_)))));
    }

    #[test]
    fn external_paths_resolve_against_base() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("q.txt"), "3\n5\n").unwrap();
        let text = r#"{
            "builder": {
                "q": { "kind": "external", "path": "q.txt" },
                "f": { "kind": "dyadics", "lo": "0", "hi": "1" },
                "separator": { "fixed": "2/1+-1/1*sqrt2" }
            }
        }"#;
        let cfg = parse_config(text, Some(dir.path())).unwrap();
        let b = cfg.builder.unwrap();
        assert_eq!(b.q.cardinality(), Some(2));
        assert!(matches!(b.separator_policy, SeparatorPolicy::Fixed(_)));
        assert!(matches!(parse_config(text, None), Err(ConfigError::Set(SetError::External { .. }))));
    }
}
