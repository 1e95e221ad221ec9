//! JSON model files.
//!
//! ```text
//! {"states":[{"id":0,"labels":["init"]}, ...],
//!  "initial":0,
//!  "transitions":[{"from":0,"to":1,"rate":2.0,"rewards":{"energy":1.0}},
//!                 {"from":0,"to":2,"rate":{"lo":1.0,"hi":3.0}}],
//!  "state_rewards":{"time":{"0":1.0}}}
//! ```
//!
//! Unknown fields are rejected. Numbers are written in shortest round-trip
//! form, so `load(save(m)) == m` bit for bit.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{IntervalCtmc, RewardStructure, StateId};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub struct ParseError {
    pub message: String,
    /// Position in the input for syntax errors.
    pub line: Option<usize>,
    pub column: Option<usize>,
    /// Offending field for semantic errors, e.g. `transitions[3].rate`.
    pub field: Option<String>,
}

impl ParseError {
    fn at_field(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self { message: message.into(), line: None, column: None, field: Some(field.into()) }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.field, self.line, self.column) {
            (Some(field), _, _) => write!(f, "{field}: {}", self.message),
            (None, Some(line), Some(col)) => write!(f, "line {line}, column {col}: {}", self.message),
            _ => f.write_str(&self.message),
        }
    }
}

impl From<serde_json::Error> for ParseError {
    fn from(e: serde_json::Error) -> Self {
        Self {
            message: e.to_string(),
            line: Some(e.line()),
            column: Some(e.column()),
            field: None,
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    states: Vec<StateEntry>,
    initial: usize,
    transitions: Vec<TransitionEntry>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    state_rewards: BTreeMap<String, BTreeMap<String, f64>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateEntry {
    id: usize,
    #[serde(default)]
    labels: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TransitionEntry {
    from: usize,
    to: usize,
    rate: RateEntry,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    rewards: BTreeMap<String, f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RateEntry {
    Point(f64),
    Range(RangeEntry),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RangeEntry {
    lo: f64,
    hi: f64,
}

/// Parses a model file.
pub fn load_model<T: Scalar>(text: &str) -> Result<IntervalCtmc<T>, ParseError> {
    let file: ModelFile = serde_json::from_str(text)?;
    let n = file.states.len();
    if n == 0 {
        return Err(ParseError::at_field("states", "at least one state is required"));
    }
    let mut seen = vec![false; n];
    for (k, state) in file.states.iter().enumerate() {
        if state.id >= n || seen[state.id] {
            return Err(ParseError::at_field(
                format!("states[{k}].id"),
                format!("ids must be a permutation of 0..{n}, got {}", state.id),
            ));
        }
        seen[state.id] = true;
    }
    if file.initial >= n {
        return Err(ParseError::at_field("initial", format!("state {} does not exist", file.initial)));
    }

    let reward_names: BTreeSet<&String> = file
        .state_rewards
        .keys()
        .chain(file.transitions.iter().flat_map(|t| t.rewards.keys()))
        .collect();
    let mut rewards: BTreeMap<String, RewardStructure<T>> = reward_names
        .into_iter()
        .map(|name| (name.clone(), RewardStructure::new(name.clone(), n)))
        .collect();

    let check_value = |field: String, v: f64| -> Result<T, ParseError> {
        if v.is_finite() && v >= 0.0 {
            Ok(T::lit(v))
        } else {
            Err(ParseError::at_field(field, format!("{v} must be finite and non-negative")))
        }
    };

    let mut builder = IntervalCtmc::<T>::builder(n).initial(file.initial);
    for state in &file.states {
        for label in &state.labels {
            builder = builder.label(state.id, label.clone());
        }
    }

    let mut defined = BTreeSet::new();
    for (k, t) in file.transitions.iter().enumerate() {
        for (field, v) in [("from", t.from), ("to", t.to)] {
            if v >= n {
                return Err(ParseError::at_field(
                    format!("transitions[{k}].{field}"),
                    format!("state {v} does not exist"),
                ));
            }
        }
        if t.from == t.to {
            continue;
        }
        if !defined.insert((t.from, t.to)) {
            return Err(ParseError::at_field(
                format!("transitions[{k}]"),
                format!("duplicate transition {}->{}", t.from, t.to),
            ));
        }
        let field = format!("transitions[{k}].rate");
        let (lo, hi) = match t.rate {
            RateEntry::Point(r) => (r, r),
            RateEntry::Range(RangeEntry { lo, hi }) => (lo, hi),
        };
        let (lo, hi) = (check_value(field.clone(), lo)?, check_value(field.clone(), hi)?);
        if lo > hi {
            return Err(ParseError::at_field(field, "interval must satisfy lo <= hi"));
        }
        builder = builder.interval(t.from, t.to, lo, hi);
        for (name, v) in &t.rewards {
            let v = check_value(format!("transitions[{k}].rewards.{name}"), *v)?;
            let r = rewards.remove(name).expect("reward name collected above");
            let r = r.with_transition_reward(StateId(t.from), StateId(t.to), v);
            rewards.insert(name.clone(), r);
        }
    }

    for (name, entries) in &file.state_rewards {
        for (key, v) in entries {
            let field = format!("state_rewards.{name}.{key}");
            let s: usize = key
                .parse()
                .ok()
                .filter(|s| *s < n)
                .ok_or_else(|| ParseError::at_field(field.clone(), "key must be an existing state id"))?;
            let v = check_value(field, *v)?;
            let r = rewards.remove(name).expect("reward name collected above");
            rewards.insert(name.clone(), r.with_state_reward(StateId(s), v));
        }
    }

    for r in rewards.into_values() {
        builder = builder.reward(r);
    }
    builder
        .build()
        .map_err(|e| ParseError { message: e.to_string(), line: None, column: None, field: None })
}

/// Writes a model file (pretty-printed).
pub fn save_model<T: Scalar>(model: &IntervalCtmc<T>) -> String {
    let n = model.state_count();
    let states = (0..n)
        .map(|s| StateEntry { id: s, labels: model.labels(StateId(s)).iter().cloned().collect() })
        .collect();
    let transitions = model
        .transitions()
        .map(|(from, to, range)| TransitionEntry {
            from: from.0,
            to: to.0,
            rate: if range.is_point() {
                RateEntry::Point(range.lo.as_f64())
            } else {
                RateEntry::Range(RangeEntry { lo: range.lo.as_f64(), hi: range.hi.as_f64() })
            },
            rewards: model
                .rewards()
                .filter(|r| r.transition_reward(from, to) != T::zero())
                .map(|r| (r.name().to_string(), r.transition_reward(from, to).as_f64()))
                .collect(),
        })
        .collect();
    // Every structure is listed here, even if all its state rewards are zero,
    // so that reward names survive a round trip.
    let state_rewards = model
        .rewards()
        .map(|r| {
            let entries = (0..n)
                .filter(|s| r.state_reward(StateId(*s)) != T::zero())
                .map(|s| (s.to_string(), r.state_reward(StateId(s)).as_f64()))
                .collect();
            (r.name().to_string(), entries)
        })
        .collect();
    let file = ModelFile { states, initial: model.initial().0, transitions, state_rewards };
    serde_json::to_string_pretty(&file).expect("model serializes")
}
