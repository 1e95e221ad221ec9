//! Queries on CTMCs with point rates.
//!
//! Linear systems are written in rate form, `E(s)·x_s − Σ_j R(s,j)·x_j = b_s`,
//! which avoids normalizing every row into jump probabilities.

use super::graph::{forward, prob01};
use super::property::{Property, QueryKind};
use super::{CheckError, RewardSemantics, TRANSIENT_EPSILON};
use crate::ctmc::{Ctmc, RewardStructure, StateId};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// A property resolved against a model's labels and rewards, ready to be
/// evaluated on any rate matrix with the same state space.
#[derive(Clone, Debug)]
pub(crate) struct CompiledQuery<T> {
    kind: QueryKind,
    guard: Vec<bool>,
    target: Vec<bool>,
    time_bound: T,
    state_rewards: Vec<T>,
    transition_rewards: Vec<T>,
    semantics: RewardSemantics,
}

fn mask_for(labels: &[&std::collections::BTreeSet<String>], label: &str) -> Result<Vec<bool>, CheckError> {
    let mask: Vec<bool> = labels.iter().map(|l| l.contains(label)).collect();
    if mask.iter().any(|m| *m) {
        Ok(mask)
    } else {
        Err(CheckError::UnknownLabel(label.to_string()))
    }
}

impl<T: Scalar> CompiledQuery<T> {
    pub(crate) fn new<'a>(
        property: &Property,
        labels: &[&std::collections::BTreeSet<String>],
        reward: impl FnOnce(&str) -> Option<&'a RewardStructure<T>>,
        semantics: RewardSemantics,
    ) -> Result<Self, CheckError> {
        let n = labels.len();
        let target = mask_for(labels, &property.target)?;
        let guard = match &property.guard {
            Some(g) => mask_for(labels, g)?,
            None => vec![true; n],
        };
        let time_bound = match property.time_bound {
            Some(t) if t.is_finite() && t >= 0.0 => T::lit(t),
            Some(t) => return Err(CheckError::InvalidTimeBound(t)),
            None => T::zero(),
        };
        let (state_rewards, transition_rewards) = if property.kind == QueryKind::RewardReach {
            let name = property.reward.as_deref().ok_or(CheckError::MissingRewardName)?;
            let r = reward(name).ok_or_else(|| CheckError::UnknownReward(name.to_string()))?;
            let states = (0..n).map(|s| r.state_reward(StateId(s))).collect();
            let transitions = (0..n * n).map(|k| r.transition_reward(StateId(k / n), StateId(k % n))).collect();
            (states, transitions)
        } else {
            (Vec::new(), Vec::new())
        };
        Ok(Self {
            kind: property.kind,
            guard,
            target,
            time_bound,
            state_rewards,
            transition_rewards,
            semantics,
        })
    }

    fn for_model(model: &Ctmc<T>, property: &Property, semantics: RewardSemantics) -> Result<Self, CheckError> {
        let labels: Vec<_> = model.states().map(|s| model.labels(s)).collect();
        Self::new(property, &labels, |name| model.reward(name), semantics)
    }

    /// Per-state values; only states flagged in `relevant` are computed,
    /// and `relevant` must be closed under successors.
    pub(crate) fn values(&self, n: usize, rates: &[T], relevant: &[bool]) -> Result<Vec<T>, CheckError> {
        match self.kind {
            QueryKind::ProbReach => until_values(n, rates, &self.guard, &self.target, relevant),
            QueryKind::ProbBoundedUntil => Ok(bounded_values(n, rates, &self.guard, &self.target, self.time_bound)),
            QueryKind::RewardReach => reward_values(
                n,
                rates,
                &self.state_rewards,
                &self.transition_rewards,
                &self.target,
                self.semantics,
                relevant,
            ),
        }
    }

    /// Value in `initial`, solving only over the states it can reach.
    pub(crate) fn value_at(&self, n: usize, rates: &[T], initial: usize) -> Result<T, CheckError> {
        let relevant = forward(n, rates, initial);
        Ok(self.values(n, rates, &relevant)?[initial])
    }
}

fn exit<T: Scalar>(n: usize, rates: &[T], s: usize) -> T {
    rates[s * n..(s + 1) * n].iter().fold(T::zero(), |a, b| a + *b)
}

/// Solves `E(s)x_s − Σ_{j∈unknown} R(s,j)x_j = rhs(s)` over the unknown states.
fn solve_unknowns<T: Scalar>(
    n: usize,
    rates: &[T],
    unknown: &[bool],
    rhs: impl Fn(usize) -> T,
) -> Result<Vec<(usize, T)>, CheckError> {
    let idx: Vec<usize> = (0..n).filter(|&s| unknown[s]).collect();
    if idx.is_empty() {
        return Ok(Vec::new());
    }
    let mut pos = vec![usize::MAX; n];
    for (k, &s) in idx.iter().enumerate() {
        pos[s] = k;
    }
    let m = idx.len();
    let mut a = Matrix::zeros(m);
    let mut b = Vec::with_capacity(m);
    for (k, &s) in idx.iter().enumerate() {
        a[(k, k)] = exit(n, rates, s);
        for (j, r) in rates[s * n..(s + 1) * n].iter().enumerate() {
            if *r > T::zero() && pos[j] != usize::MAX {
                a[(k, pos[j])] = a[(k, pos[j])] - *r;
            }
        }
        b.push(rhs(s));
    }
    let x = a.solve(b)?;
    Ok(idx.into_iter().zip(x).collect())
}

fn until_values<T: Scalar>(
    n: usize,
    rates: &[T],
    guard: &[bool],
    target: &[bool],
    relevant: &[bool],
) -> Result<Vec<T>, CheckError> {
    let (no, yes) = prob01(n, rates, guard, target);
    let mut x: Vec<T> = yes.iter().map(|y| if *y { T::one() } else { T::zero() }).collect();
    let unknown: Vec<bool> = (0..n).map(|s| relevant[s] && !yes[s] && !no[s]).collect();
    let solved = solve_unknowns(n, rates, &unknown, |s| {
        (0..n).filter(|&j| yes[j]).fold(T::zero(), |acc, j| acc + rates[s * n + j])
    })?;
    for (s, v) in solved {
        x[s] = v.max(T::zero()).min(T::one());
    }
    Ok(x)
}

fn reward_values<T: Scalar>(
    n: usize,
    rates: &[T],
    state_rewards: &[T],
    transition_rewards: &[T],
    target: &[bool],
    semantics: RewardSemantics,
    relevant: &[bool],
) -> Result<Vec<T>, CheckError> {
    let stop: Vec<bool> = match semantics {
        RewardSemantics::Strict => target.to_vec(),
        RewardSemantics::UntilAbsorption => {
            (0..n).map(|s| target[s] || exit(n, rates, s) == T::zero()).collect()
        }
    };
    let all = vec![true; n];
    let (_, sure) = prob01(n, rates, &all, &stop);
    if semantics == RewardSemantics::UntilAbsorption {
        if let Some(state) = (0..n).find(|&s| relevant[s] && !sure[s]) {
            return Err(CheckError::NoAbsorption { state });
        }
    }
    let mut x: Vec<T> = (0..n).map(|s| if sure[s] { T::zero() } else { T::infinity() }).collect();
    let unknown: Vec<bool> = (0..n).map(|s| relevant[s] && sure[s] && !stop[s]).collect();
    let solved = solve_unknowns(n, rates, &unknown, |s| {
        let row = &rates[s * n..(s + 1) * n];
        let per_transition = row
            .iter()
            .zip(&transition_rewards[s * n..(s + 1) * n])
            .fold(T::zero(), |acc, (r, i)| if *r > T::zero() { acc + *r * *i } else { acc });
        state_rewards[s] + per_transition
    })?;
    for (s, v) in solved {
        x[s] = v.max(T::zero());
    }
    Ok(x)
}

/// Poisson(λ) weights on `[left, left + w.len())`, normalized over that
/// window, with total truncated mass at most `eps`.
pub(crate) fn poisson_weights(lambda: f64, eps: f64) -> (usize, Vec<f64>) {
    if lambda <= 0.0 {
        return (0, vec![1.0]);
    }
    let mode = lambda.floor() as usize;
    let quarter = eps / 4.0;

    let mut left = vec![1.0];
    let mut k = mode;
    while k > 0 {
        let r = k as f64 / lambda;
        let w = *left.last().expect("non-empty");
        if r < 1.0 && w * r / (1.0 - r) <= quarter {
            break;
        }
        left.push(w * r);
        k -= 1;
    }
    let start = k;

    let mut right = Vec::new();
    let mut w = 1.0;
    let mut k = mode;
    loop {
        let r = lambda / (k + 1) as f64;
        if w * r / (1.0 - r) <= quarter {
            break;
        }
        w *= r;
        right.push(w);
        k += 1;
    }

    left.reverse();
    left.extend(right);
    let total: f64 = left.iter().sum();
    for w in &mut left {
        *w /= total;
    }
    (start, left)
}

fn bounded_values<T: Scalar>(n: usize, rates: &[T], guard: &[bool], target: &[bool], t: T) -> Vec<T> {
    let stopped: Vec<bool> = (0..n).map(|s| target[s] || !guard[s]).collect();
    let mut v: Vec<T> = target.iter().map(|x| if *x { T::one() } else { T::zero() }).collect();
    let exits: Vec<T> = (0..n).map(|s| if stopped[s] { T::zero() } else { exit(n, rates, s) }).collect();
    let max_exit = exits.iter().fold(T::zero(), |a, b| a.max(*b));
    if max_exit == T::zero() || t == T::zero() {
        return v;
    }
    let q = T::lit(1.02) * max_exit;
    let (left, weights) = poisson_weights((q * t).as_f64(), TRANSIENT_EPSILON);
    let mut acc = vec![T::zero(); n];
    let mut next = vec![T::zero(); n];
    for step in 0..left + weights.len() {
        if step >= left {
            let w = T::lit(weights[step - left]);
            for (a, x) in acc.iter_mut().zip(&v) {
                *a = *a + w * *x;
            }
        }
        for s in 0..n {
            next[s] = if stopped[s] {
                v[s]
            } else {
                let row = &rates[s * n..(s + 1) * n];
                let moved = row
                    .iter()
                    .zip(&v)
                    .fold(T::zero(), |a, (r, x)| if *r > T::zero() { a + *r * *x } else { a });
                v[s] + (moved - exits[s] * v[s]) / q
            };
        }
        std::mem::swap(&mut v, &mut next);
    }
    acc.into_iter().map(|p| p.max(T::zero()).min(T::one())).collect()
}

/// Probability of eventually reaching a `target` state, per state.
pub fn reach_prob<T: Scalar>(model: &Ctmc<T>, target: &str) -> Result<Vec<T>, CheckError> {
    until_prob(model, None, target)
}

/// Probability of reaching `target` while staying in `guard` states
/// (`None` = anywhere), per state.
pub fn until_prob<T: Scalar>(model: &Ctmc<T>, guard: Option<&str>, target: &str) -> Result<Vec<T>, CheckError> {
    let mut p = Property::prob_reach(target);
    p.guard = guard.map(str::to_string);
    per_state(model, &p, RewardSemantics::Strict)
}

/// Probability of reaching `target` within time `t` through `guard` states.
pub fn bounded_until_prob<T: Scalar>(
    model: &Ctmc<T>,
    guard: Option<&str>,
    target: &str,
    t: f64,
) -> Result<Vec<T>, CheckError> {
    let p = Property::bounded_until(guard.map(str::to_string), target, t);
    per_state(model, &p, RewardSemantics::Strict)
}

/// Expected reward accumulated until reaching `target`, per state.
pub fn reach_reward<T: Scalar>(
    model: &Ctmc<T>,
    rewards: &RewardStructure<T>,
    target: &str,
    semantics: RewardSemantics,
) -> Result<Vec<T>, CheckError> {
    let labels: Vec<_> = model.states().map(|s| model.labels(s)).collect();
    let p = Property::reward_reach(rewards.name(), target);
    let q = CompiledQuery::new(&p, &labels, |_| Some(rewards), semantics)?;
    let relevant = vec![true; model.state_count()];
    q.values(model.state_count(), model.rates(), &relevant)
}

fn per_state<T: Scalar>(model: &Ctmc<T>, p: &Property, semantics: RewardSemantics) -> Result<Vec<T>, CheckError> {
    let q = CompiledQuery::for_model(model, p, semantics)?;
    let relevant = vec![true; model.state_count()];
    q.values(model.state_count(), model.rates(), &relevant)
}

/// Value of `property` in the initial state.
pub fn check_point<T: Scalar>(model: &Ctmc<T>, property: &Property, semantics: RewardSemantics) -> Result<T, CheckError> {
    let q = CompiledQuery::for_model(model, property, semantics)?;
    q.value_at(model.state_count(), model.rates(), model.initial().0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn race() -> Ctmc<f64> {
        Ctmc::builder(3).rate(0, 1, 2.0).rate(0, 2, 3.0).label(1, "a").label(2, "b").build().unwrap()
    }

    #[test]
    fn race_reachability() {
        let p = reach_prob(&race(), "a").unwrap();
        assert!((p[0] - 0.4).abs() < 1e-12);
        assert_eq!((p[1], p[2]), (1.0, 0.0));
    }

    #[test]
    fn initial_state_in_target() {
        let m = Ctmc::<f64>::builder(2).rate(0, 1, 1.0).label(0, "start").build().unwrap();
        assert_eq!(reach_prob(&m, "start").unwrap()[0], 1.0);
    }

    #[test]
    fn unknown_label_is_reported() {
        assert_eq!(reach_prob(&race(), "zzz"), Err(CheckError::UnknownLabel("zzz".into())));
    }

    #[test]
    fn guarded_until_blocks_paths() {
        // 0 -> 1 -> 2(goal), 0 -> 2 directly; guard excludes 1.
        let m = Ctmc::<f64>::builder(3)
            .rate(0, 1, 1.0)
            .rate(0, 2, 1.0)
            .rate(1, 2, 1.0)
            .label(0, "safe")
            .label(2, "goal")
            .build()
            .unwrap();
        assert!((until_prob(&m, Some("safe"), "goal").unwrap()[0] - 0.5).abs() < 1e-12);
        assert!((reach_prob(&m, "goal").unwrap()[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bounded_single_transition() {
        let m = Ctmc::<f64>::builder(2).rate(0, 1, 1.0).label(1, "a").build().unwrap();
        let p = bounded_until_prob(&m, None, "a", 1.0).unwrap();
        assert!((p[0] - (1.0 - (-1.0f64).exp())).abs() < 1e-10);
        assert_eq!(bounded_until_prob(&m, None, "a", 0.0).unwrap()[0], 0.0);
    }

    #[test]
    fn bounded_converges_to_unbounded() {
        let p = bounded_until_prob(&race(), None, "a", 50.0).unwrap();
        assert!((p[0] - 0.4).abs() < 1e-8);
    }

    #[test]
    fn poisson_window_mass() {
        for lambda in [0.3, 1.0, 7.0, 250.0, 1e5] {
            let (left, w) = poisson_weights(lambda, 1e-10);
            let sum: f64 = w.iter().sum();
            assert!((sum - 1.0).abs() < 1e-12);
            // Compare a central weight with the exact pmf.
            let k = lambda.floor() as usize;
            let ln_pmf = k as f64 * lambda.ln() - lambda - ln_factorial(k);
            assert!((w[k - left] - ln_pmf.exp()).abs() < 1e-9, "{lambda}");
        }
    }

    fn ln_factorial(k: usize) -> f64 {
        (1..=k).map(|i| (i as f64).ln()).sum()
    }

    #[test]
    fn expected_time_and_transition_reward() {
        let time = RewardStructure::new("time", 2).with_state_reward(StateId(0), 1.0);
        let m = Ctmc::<f64>::builder(2).rate(0, 1, 0.5).label(1, "a").reward(time.clone()).build().unwrap();
        let r = reach_reward(&m, &time, "a", RewardSemantics::Strict).unwrap();
        assert!((r[0] - 2.0).abs() < 1e-12);

        let e = RewardStructure::new("energy", 2).with_transition_reward(StateId(0), StateId(1), 3.0);
        let r = reach_reward(&m, &e, "a", RewardSemantics::Strict).unwrap();
        assert!((r[0] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn strict_reward_is_infinite_when_target_may_be_missed() {
        let time = RewardStructure::new("time", 3).with_state_reward(StateId(0), 1.0);
        let m = race();
        assert!(reach_reward(&m, &time, "a", RewardSemantics::Strict).unwrap()[0].is_infinite());
        let r = reach_reward(&m, &time, "a", RewardSemantics::UntilAbsorption).unwrap();
        assert!((r[0] - 0.2).abs() < 1e-12);
    }

    #[test]
    fn recurrent_component_has_no_absorption() {
        let time = RewardStructure::new("time", 3).with_state_reward(StateId(0), 1.0);
        let m = Ctmc::<f64>::builder(3)
            .rate(0, 1, 1.0)
            .rate(1, 0, 1.0)
            .rate(0, 2, 0.0)
            .label(2, "goal")
            .build()
            .unwrap();
        assert_eq!(
            reach_reward(&m, &time, "goal", RewardSemantics::UntilAbsorption),
            Err(CheckError::NoAbsorption { state: 0 })
        );
    }
}
