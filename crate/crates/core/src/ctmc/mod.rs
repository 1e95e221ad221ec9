//! Labelled continuous-time Markov chains with reward structures.
//!
//! Rates are stored densely (row-major `n × n`); the diagonal is always zero
//! and exit rates are derived from the off-diagonal row sums. A state whose
//! row is all zero is absorbing. Interval-valued chains live in [`interval`],
//! JSON (de)serialization in [`json`].

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;

pub mod interval;
pub mod json;

pub use interval::{Interval, IntervalCtmc, IntervalCtmcBuilder};
pub use json::{load_model, save_model, ParseError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct StateId(pub usize);

impl StateId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s{}", self.0)
    }
}

impl From<usize> for StateId {
    fn from(index: usize) -> Self {
        StateId(index)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("model must have at least one state")]
    Empty,
    #[error("state index {index} out of range for a model with {count} states")]
    StateOutOfRange { index: usize, count: usize },
    #[error("transition {from}->{to}: rate {rate} must be finite and non-negative")]
    InvalidRate { from: usize, to: usize, rate: f64 },
    #[error("transition {from}->{to}: interval [{lo}, {hi}] must satisfy 0 <= lo <= hi < inf")]
    InvalidInterval { from: usize, to: usize, lo: f64, hi: f64 },
    #[error("reward structure {name:?}: {reason}")]
    InvalidReward { name: String, reason: String },
    #[error("state {0} is absorbing")]
    AbsorbingState(StateId),
    #[error("transition {from}->{to}: value {value} lies outside [{lo}, {hi}]")]
    OutOfInterval { from: usize, to: usize, value: f64, lo: f64, hi: f64 },
    #[error("transition {from}->{to} is interval-valued but no value was supplied")]
    MissingValue { from: usize, to: usize },
}

/// Observed behaviour of one transition: `events` occurrences within a
/// combined `exposure` time spent in its source state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateObservation<T> {
    pub events: u64,
    pub exposure: T,
}

impl<T: Scalar> RateObservation<T> {
    pub fn new(events: u64, exposure: T) -> Self {
        assert!(exposure >= T::zero(), "exposure must be non-negative");
        Self { events, exposure }
    }

    pub fn empty() -> Self {
        Self { events: 0, exposure: T::zero() }
    }
}

impl<T: Scalar> Default for RateObservation<T> {
    fn default() -> Self {
        Self::empty()
    }
}

/// State rewards (accrued per time unit) and transition rewards (accrued
/// per transition taken).
#[derive(Clone, Debug, PartialEq)]
pub struct RewardStructure<T> {
    name: String,
    state_rewards: Vec<T>,
    transition_rewards: Vec<T>,
}

impl<T: Scalar> RewardStructure<T> {
    /// All-zero structure over `state_count` states.
    pub fn new(name: impl Into<String>, state_count: usize) -> Self {
        Self {
            name: name.into(),
            state_rewards: vec![T::zero(); state_count],
            transition_rewards: vec![T::zero(); state_count * state_count],
        }
    }

    pub fn with_state_reward(mut self, state: StateId, reward: T) -> Self {
        self.state_rewards[state.0] = reward;
        self
    }

    pub fn with_transition_reward(mut self, from: StateId, to: StateId, reward: T) -> Self {
        let n = self.state_rewards.len();
        self.transition_rewards[from.0 * n + to.0] = reward;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn state_count(&self) -> usize {
        self.state_rewards.len()
    }

    pub fn state_reward(&self, state: StateId) -> T {
        self.state_rewards[state.0]
    }

    pub fn transition_reward(&self, from: StateId, to: StateId) -> T {
        self.transition_rewards[from.0 * self.state_count() + to.0]
    }

    fn validate(&self, state_count: usize) -> Result<(), ModelError> {
        let invalid = |reason: String| ModelError::InvalidReward {
            name: self.name.clone(),
            reason,
        };
        if self.state_rewards.len() != state_count {
            return Err(invalid(format!(
                "sized for {} states, model has {state_count}",
                self.state_rewards.len()
            )));
        }
        let bad = self
            .state_rewards
            .iter()
            .chain(self.transition_rewards.iter())
            .find(|r| !r.is_finite() || **r < T::zero());
        match bad {
            Some(r) => Err(invalid(format!("entry {r} must be finite and non-negative"))),
            None => Ok(()),
        }
    }
}

/// Atomic propositions and reward structures attached to a state space.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Decorations<T> {
    pub(crate) labels: Vec<BTreeSet<String>>,
    pub(crate) rewards: BTreeMap<String, RewardStructure<T>>,
}

impl<T: Scalar> Decorations<T> {
    fn new(state_count: usize) -> Self {
        Self {
            labels: vec![BTreeSet::new(); state_count],
            rewards: BTreeMap::new(),
        }
    }

    fn validate(&self) -> Result<(), ModelError> {
        self.rewards.values().try_for_each(|r| r.validate(self.labels.len()))
    }
}

/// Point-rate CTMC. Immutable once built.
#[derive(Clone, Debug, PartialEq)]
pub struct Ctmc<T> {
    n: usize,
    initial: StateId,
    rates: Vec<T>,
    deco: Decorations<T>,
}

impl<T: Scalar> Ctmc<T> {
    pub fn builder(state_count: usize) -> CtmcBuilder<T> {
        CtmcBuilder::new(state_count)
    }

    /// Assembles a chain from a dense rate matrix without re-validating it.
    /// Callers guarantee finite non-negative rates (the interval
    /// instantiation paths check bounds before calling this).
    pub(crate) fn from_parts_unchecked(
        initial: StateId,
        mut rates: Vec<T>,
        deco: Decorations<T>,
    ) -> Self {
        let n = deco.labels.len();
        for s in 0..n {
            rates[s * n + s] = T::zero();
        }
        Self { n, initial, rates, deco }
    }

    pub fn state_count(&self) -> usize {
        self.n
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> {
        (0..self.n).map(StateId)
    }

    pub fn rate(&self, from: StateId, to: StateId) -> T {
        self.rates[from.0 * self.n + to.0]
    }

    /// Dense row-major rate matrix.
    pub(crate) fn rates(&self) -> &[T] {
        &self.rates
    }

    pub(crate) fn row(&self, s: StateId) -> &[T] {
        &self.rates[s.0 * self.n..(s.0 + 1) * self.n]
    }

    /// Successors with strictly positive rate.
    pub fn successors(&self, s: StateId) -> impl Iterator<Item = (StateId, T)> + '_ {
        self.row(s)
            .iter()
            .enumerate()
            .filter(|(_, r)| **r > T::zero())
            .map(|(j, r)| (StateId(j), *r))
    }

    pub fn exit_rate(&self, s: StateId) -> T {
        self.row(s).iter().fold(T::zero(), |acc, r| acc + *r)
    }

    pub fn is_absorbing(&self, s: StateId) -> bool {
        self.exit_rate(s) == T::zero()
    }

    /// Jump-chain distribution out of `s`.
    pub fn embedded_probs(&self, s: StateId) -> Result<Vec<T>, ModelError> {
        let exit = self.exit_rate(s);
        if exit == T::zero() {
            return Err(ModelError::AbsorbingState(s));
        }
        Ok(self.row(s).iter().map(|r| *r / exit).collect())
    }

    /// Probability of having left `s` within `t` time units.
    pub fn sojourn_cdf(&self, s: StateId, t: T) -> T {
        T::one() - (-t * self.exit_rate(s)).exp()
    }

    pub fn labels(&self, s: StateId) -> &BTreeSet<String> {
        &self.deco.labels[s.0]
    }

    pub fn has_label(&self, s: StateId, label: &str) -> bool {
        self.deco.labels[s.0].contains(label)
    }

    /// Membership mask of the states carrying `label`.
    pub fn label_mask(&self, label: &str) -> Vec<bool> {
        self.deco.labels.iter().map(|l| l.contains(label)).collect()
    }

    pub fn reward(&self, name: &str) -> Option<&RewardStructure<T>> {
        self.deco.rewards.get(name)
    }

    pub fn rewards(&self) -> impl Iterator<Item = &RewardStructure<T>> {
        self.deco.rewards.values()
    }
}

fn check_state(index: usize, count: usize) -> Result<(), ModelError> {
    if index < count {
        Ok(())
    } else {
        Err(ModelError::StateOutOfRange { index, count })
    }
}

pub struct CtmcBuilder<T> {
    initial: usize,
    rates: Vec<T>,
    deco: Decorations<T>,
    error: Option<ModelError>,
}

impl<T: Scalar> CtmcBuilder<T> {
    pub fn new(state_count: usize) -> Self {
        Self {
            initial: 0,
            rates: vec![T::zero(); state_count * state_count],
            deco: Decorations::new(state_count),
            error: None,
        }
    }

    fn n(&self) -> usize {
        self.deco.labels.len()
    }

    fn record(&mut self, result: Result<(), ModelError>) {
        if let (None, Err(e)) = (&self.error, result) {
            self.error = Some(e);
        }
    }

    pub fn initial(mut self, s: usize) -> Self {
        self.initial = s;
        self
    }

    /// Sets the rate `from -> to`. Self-loops are ignored.
    pub fn rate(mut self, from: usize, to: usize, rate: T) -> Self {
        let n = self.n();
        let checked = check_state(from, n).and(check_state(to, n)).and_then(|_| {
            if rate.is_finite() && rate >= T::zero() {
                Ok(())
            } else {
                Err(ModelError::InvalidRate { from, to, rate: rate.as_f64() })
            }
        });
        if checked.is_ok() && from != to {
            self.rates[from * n + to] = rate;
        }
        self.record(checked);
        self
    }

    pub fn label(mut self, s: usize, label: impl Into<String>) -> Self {
        let checked = check_state(s, self.n());
        if checked.is_ok() {
            self.deco.labels[s].insert(label.into());
        }
        self.record(checked);
        self
    }

    pub fn reward(mut self, rewards: RewardStructure<T>) -> Self {
        self.deco.rewards.insert(rewards.name.clone(), rewards);
        self
    }

    pub fn build(self) -> Result<Ctmc<T>, ModelError> {
        if let Some(e) = self.error {
            return Err(e);
        }
        let n = self.n();
        if n == 0 {
            return Err(ModelError::Empty);
        }
        check_state(self.initial, n)?;
        self.deco.validate()?;
        Ok(Ctmc::from_parts_unchecked(StateId(self.initial), self.rates, self.deco))
    }
}
