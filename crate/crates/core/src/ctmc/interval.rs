//! CTMCs whose transition rates are closed intervals.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{check_state, Ctmc, Decorations, ModelError, RewardStructure, StateId};
use crate::scalar::Scalar;

/// Closed interval `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval<T> {
    pub lo: T,
    pub hi: T,
}

impl<T: Scalar> Interval<T> {
    /// Returns `None` unless `lo <= hi` and neither is NaN.
    pub fn new(lo: T, hi: T) -> Option<Self> {
        (lo <= hi).then_some(Self { lo, hi })
    }

    pub fn point(value: T) -> Self {
        Self { lo: value, hi: value }
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, value: T) -> bool {
        self.lo <= value && value <= self.hi
    }

    pub fn width(&self) -> T {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> T {
        self.lo + (self.hi - self.lo) / T::lit(2.0)
    }

    /// Point at fraction `u ∈ [0, 1]` of the way from `lo` to `hi`.
    pub fn lerp(&self, u: T) -> T {
        if self.is_point() {
            self.lo
        } else {
            (self.lo + u * (self.hi - self.lo)).min(self.hi)
        }
    }

    /// Smallest interval containing both.
    pub fn hull(&self, other: &Self) -> Self {
        Self { lo: self.lo.min(other.lo), hi: self.hi.max(other.hi) }
    }

    /// Rate intervals must be non-negative and bounded.
    pub(crate) fn is_rate(&self) -> bool {
        self.lo >= T::zero() && self.hi.is_finite() && self.lo <= self.hi
    }
}

impl<T: fmt::Display> fmt::Display for Interval<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// CTMC with interval-valued rates. A point rate is the degenerate interval
/// `[r, r]`; a missing transition is `[0, 0]`.
#[derive(Clone, Debug, PartialEq)]
pub struct IntervalCtmc<T> {
    n: usize,
    initial: StateId,
    rates: Vec<Interval<T>>,
    deco: Decorations<T>,
}

impl<T: Scalar> IntervalCtmc<T> {
    pub fn builder(state_count: usize) -> IntervalCtmcBuilder<T> {
        IntervalCtmcBuilder::new(state_count)
    }

    pub fn state_count(&self) -> usize {
        self.n
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn rate(&self, from: StateId, to: StateId) -> Interval<T> {
        self.rates[from.0 * self.n + to.0]
    }

    /// Transitions with a non-zero upper rate, in row-major order.
    pub fn transitions(&self) -> impl Iterator<Item = (StateId, StateId, Interval<T>)> + '_ {
        self.rates.iter().enumerate().filter(|(_, r)| r.hi > T::zero()).map(|(k, r)| {
            (StateId(k / self.n), StateId(k % self.n), *r)
        })
    }

    /// Entries whose interval is not a single point.
    pub fn interval_entries(&self) -> Vec<(StateId, StateId)> {
        self.transitions()
            .filter(|(_, _, r)| !r.is_point())
            .map(|(from, to, _)| (from, to))
            .collect()
    }

    pub fn labels(&self, s: StateId) -> &std::collections::BTreeSet<String> {
        &self.deco.labels[s.0]
    }

    pub fn reward(&self, name: &str) -> Option<&RewardStructure<T>> {
        self.deco.rewards.get(name)
    }

    pub fn rewards(&self) -> impl Iterator<Item = &RewardStructure<T>> {
        self.deco.rewards.values()
    }

    /// Chooses a rate inside every interval. Point entries may be omitted
    /// from `point`; every genuine interval must be assigned.
    pub fn instantiate(&self, point: &BTreeMap<(StateId, StateId), T>) -> Result<Ctmc<T>, ModelError> {
        for (&(from, to), &value) in point {
            check_state(from.0, self.n)?;
            check_state(to.0, self.n)?;
            let range = self.rate(from, to);
            if !range.contains(value) {
                return Err(ModelError::OutOfInterval {
                    from: from.0,
                    to: to.0,
                    value: value.as_f64(),
                    lo: range.lo.as_f64(),
                    hi: range.hi.as_f64(),
                });
            }
        }
        let mut rates = Vec::with_capacity(self.rates.len());
        for (k, range) in self.rates.iter().enumerate() {
            let key = (StateId(k / self.n), StateId(k % self.n));
            let value = match point.get(&key) {
                Some(v) => *v,
                None if range.is_point() => range.lo,
                None => return Err(ModelError::MissingValue { from: key.0 .0, to: key.1 .0 }),
            };
            rates.push(value);
        }
        Ok(Ctmc::from_parts_unchecked(self.initial, rates, self.deco.clone()))
    }

    /// Instantiates every interval at the fraction `u` of its width.
    pub fn instantiate_at(&self, u: T) -> Ctmc<T> {
        let rates = self.rates.iter().map(|r| r.lerp(u)).collect();
        Ctmc::from_parts_unchecked(self.initial, rates, self.deco.clone())
    }

    /// Dense matrix of lower endpoints.
    pub(crate) fn lower_rates(&self) -> Vec<T> {
        self.rates.iter().map(|r| r.lo).collect()
    }

    /// Dense matrix of upper endpoints.
    pub(crate) fn upper_rates(&self) -> Vec<T> {
        self.rates.iter().map(|r| r.hi).collect()
    }

    /// Same chain with a different initial state.
    pub fn with_initial(mut self, initial: StateId) -> Result<Self, ModelError> {
        check_state(initial.0, self.n)?;
        self.initial = initial;
        Ok(self)
    }
}

impl<T: Scalar> From<&Ctmc<T>> for IntervalCtmc<T> {
    fn from(model: &Ctmc<T>) -> Self {
        Self {
            n: model.n,
            initial: model.initial,
            rates: model.rates.iter().map(|r| Interval::point(*r)).collect(),
            deco: model.deco.clone(),
        }
    }
}

pub struct IntervalCtmcBuilder<T> {
    initial: usize,
    rates: Vec<Interval<T>>,
    deco: Decorations<T>,
    error: Option<ModelError>,
}

impl<T: Scalar> IntervalCtmcBuilder<T> {
    pub fn new(state_count: usize) -> Self {
        Self {
            initial: 0,
            rates: vec![Interval::point(T::zero()); state_count * state_count],
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

    pub fn rate(self, from: usize, to: usize, rate: T) -> Self {
        self.interval(from, to, rate, rate)
    }

    /// Sets the rate interval `from -> to`. Self-loops are ignored.
    pub fn interval(mut self, from: usize, to: usize, lo: T, hi: T) -> Self {
        let n = self.n();
        let range = Interval { lo, hi };
        let checked = check_state(from, n).and(check_state(to, n)).and_then(|_| {
            if range.is_rate() {
                Ok(())
            } else {
                Err(ModelError::InvalidInterval { from, to, lo: lo.as_f64(), hi: hi.as_f64() })
            }
        });
        if checked.is_ok() && from != to {
            self.rates[from * n + to] = range;
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
        self.deco.rewards.insert(rewards.name().to_string(), rewards);
        self
    }

    pub fn build(self) -> Result<IntervalCtmc<T>, ModelError> {
        if let Some(e) = self.error {
            return Err(e);
        }
        let n = self.n();
        if n == 0 {
            return Err(ModelError::Empty);
        }
        check_state(self.initial, n)?;
        self.deco.validate()?;
        Ok(IntervalCtmc {
            n,
            initial: StateId(self.initial),
            rates: self.rates,
            deco: self.deco,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn interval_race() -> IntervalCtmc<f64> {
        IntervalCtmc::builder(3)
            .interval(0, 1, 1.0, 2.0)
            .rate(0, 2, 3.0)
            .label(1, "a")
            .build()
            .unwrap()
    }

    #[test]
    fn degenerate_intervals_instantiate_to_the_same_chain() {
        let point = Ctmc::<f64>::builder(3).rate(0, 1, 2.0).rate(0, 2, 3.0).label(1, "a").build().unwrap();
        let lifted = IntervalCtmc::from(&point);
        assert!(lifted.interval_entries().is_empty());
        assert_eq!(lifted.instantiate(&BTreeMap::new()).unwrap(), point);
    }

    #[test]
    fn chosen_value_lands_in_the_chain() {
        let m = interval_race();
        let point = BTreeMap::from([((StateId(0), StateId(1)), 1.5)]);
        let c = m.instantiate(&point).unwrap();
        assert_eq!(c.rate(StateId(0), StateId(1)), 1.5);
        assert_eq!(c.rate(StateId(0), StateId(2)), 3.0);
        assert!(c.has_label(StateId(1), "a"));
    }

    #[test]
    fn value_outside_interval_is_rejected() {
        let m = interval_race();
        let point = BTreeMap::from([((StateId(0), StateId(1)), 2.5)]);
        assert!(matches!(m.instantiate(&point), Err(ModelError::OutOfInterval { .. })));
    }

    #[test]
    fn unassigned_interval_is_rejected() {
        assert!(matches!(
            interval_race().instantiate(&BTreeMap::new()),
            Err(ModelError::MissingValue { from: 0, to: 1 })
        ));
    }

    #[test]
    fn builder_rejects_inverted_or_unbounded_intervals() {
        let inverted = IntervalCtmc::<f64>::builder(2).interval(0, 1, 2.0, 1.0).build();
        assert!(matches!(inverted, Err(ModelError::InvalidInterval { .. })));
        let unbounded = IntervalCtmc::<f64>::builder(2).interval(0, 1, 0.0, f64::INFINITY).build();
        assert!(matches!(unbounded, Err(ModelError::InvalidInterval { .. })));
    }

    #[test]
    fn midpoint_instantiation() {
        let c = interval_race().instantiate_at(0.5);
        assert_eq!(c.rate(StateId(0), StateId(1)), 1.5);
    }
}
