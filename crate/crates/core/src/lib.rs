//! Exact construction of fixed-point-free involutions on countable sets of
//! rationals with a prescribed discontinuity set, together with the
//! baseline value-assignment algorithm for decreasing open chains and a
//! witness-based verification harness.
//!
//! Module map:
//!
//! - [`numerics`]: rationals, the `a + b·√2` separator, extended points, ladders.
//! - [`sets`]: enumerable descriptions of the countable input sets and their census oracles.
//! - [`builder`]: the pairing construction as a deterministic state machine.
//! - [`sigma`]: the value-assignment baseline driven by a decreasing open chain.
//! - [`analysis`]: certificates, continuity envelopes, property suites, naive oracle.
//! - [`config`]: the JSON run configuration shared by every CLI subcommand.

pub mod analysis;
pub mod builder;
pub mod config;
pub mod numerics;
pub mod sets;
pub mod sigma;

pub use numerics::{EndpointLadder, ExtendedPoint, LadderHistory, OpenInterval, Rational, Separator};
pub use sets::{Census, SetError, SetSpec, ValidationReport};
pub use builder::{BuilderConfig, BuilderError, BuilderState, Evidence, ExportFormat, InitMode, PairRecord, SeparatorPolicy};
pub use config::{parse_config, ConfigError, Mode, OutputFormat, RunConfig};
