//! Model checking of point and interval CTMCs.
//!
//! Supported queries are unbounded reachability (optionally guarded),
//! time-bounded until and expected reward until reaching a target. Interval
//! chains are checked by evaluating every corner of the rate box, with an
//! optional random audit of interior points.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::SingularSystem;

mod graph;
pub mod interval;
pub mod point;
pub mod property;

pub use interval::{check_interval, evaluate_threshold, IntervalMethod, ValueInterval, Verdict};
pub use point::{bounded_until_prob, check_point, reach_prob, reach_reward, until_prob};
pub use property::{parse_property, Comparison, Property, PropertyParseError, QueryKind, Threshold};

/// Truncation error allowed in transient analysis.
pub const TRANSIENT_EPSILON: f64 = 1e-10;

/// How expected rewards treat paths that never reach the target.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RewardSemantics {
    /// Infinite whenever the target is missed with positive probability.
    #[default]
    Strict,
    /// Accumulate until the target or any absorbing state is reached.
    UntilAbsorption,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CheckError {
    #[error("no state carries label {0:?}")]
    UnknownLabel(String),
    #[error("model has no reward structure {0:?}")]
    UnknownReward(String),
    #[error("reward query without a reward structure name")]
    MissingRewardName,
    #[error("time bound {0} must be finite and non-negative")]
    InvalidTimeBound(f64),
    #[error("state {state} does not reach the target or an absorbing state with probability 1")]
    NoAbsorption { state: usize },
    #[error(transparent)]
    Singular(#[from] SingularSystem),
    #[error("{count} interval-valued transitions exceed the corner limit of {max}")]
    TooManyIntervals { count: usize, max: usize },
}
