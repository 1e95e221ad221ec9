//! Interval CTMC of the remaining mission.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::{MissionError, MissionSpec, RateIntervals};
use crate::ctmc::{Ctmc, IntervalCtmc, RewardStructure, StateId};

/// Where the vehicle is within the work on one chain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Inspect,
    Cleaning,
    Prepare,
    Travel,
}

impl Phase {
    const ALL: [Phase; 4] = [Phase::Inspect, Phase::Cleaning, Phase::Prepare, Phase::Travel];

    fn offset(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Phase::Inspect => "inspect",
            Phase::Cleaning => "cleaning",
            Phase::Prepare => "prepare",
            Phase::Travel => "travel",
        }
    }
}

/// Clean-or-skip bits `x_j` for chains `first..=k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Configuration {
    first: usize,
    bits: Vec<bool>,
}

impl Configuration {
    pub fn new(first: usize, bits: Vec<bool>) -> Self {
        assert!(first >= 1 && !bits.is_empty(), "configuration needs at least one chain");
        Self { first, bits }
    }

    pub fn all(first: usize, k: usize, value: bool) -> Self {
        Self::new(first, vec![value; k + 1 - first])
    }

    /// The `2^(k-first)` configurations that clean chain `first`, numbered
    /// from 1. Number `c` skips chain `j > first` when bit `k-j` of `c-1`
    /// is set, so configuration 1 cleans everything and the last one cleans
    /// only the current chain.
    pub fn enumerate(first: usize, k: usize) -> Vec<Configuration> {
        let rest = k - first;
        (0..1usize << rest)
            .map(|c| {
                let mut bits = vec![true];
                bits.extend((first + 1..=k).map(|j| c >> (k - j) & 1 == 0));
                Self::new(first, bits)
            })
            .collect()
    }

    /// 1-based position in [`Configuration::enumerate`] order.
    pub fn number(&self) -> usize {
        let k = self.last();
        1 + (self.first + 1..=k).filter(|&j| !self.x(j)).map(|j| 1usize << (k - j)).sum::<usize>()
    }

    pub fn first(&self) -> usize {
        self.first
    }

    pub fn last(&self) -> usize {
        self.first + self.bits.len() - 1
    }

    pub fn x(&self, chain: usize) -> bool {
        self.bits[chain - self.first]
    }

    pub fn set(&mut self, chain: usize, value: bool) {
        self.bits[chain - self.first] = value;
    }

    /// Number of chains this configuration cleans.
    pub fn cleaned(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.bits.iter().try_for_each(|b| f.write_str(if *b { "1" } else { "0" }))
    }
}

/// State numbering of a mission model over chains `first..=last`: four
/// states per chain, then `finish` and `damage`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Layout {
    pub first: usize,
    pub last: usize,
}

impl Layout {
    pub fn state_count(&self) -> usize {
        4 * (self.last + 1 - self.first) + 2
    }

    pub fn state(&self, chain: usize, phase: Phase) -> StateId {
        assert!((self.first..=self.last).contains(&chain), "chain {chain} is not in the model");
        StateId(4 * (chain - self.first) + phase.offset())
    }

    pub fn finish(&self) -> StateId {
        StateId(self.state_count() - 2)
    }

    pub fn damage(&self) -> StateId {
        StateId(self.state_count() - 1)
    }

    /// Chain and phase of a transient state; `None` for finish and damage.
    pub fn locate(&self, s: StateId) -> Option<(usize, Phase)> {
        (s.0 < self.finish().0).then(|| (self.first + s.0 / 4, Phase::ALL[s.0 % 4]))
    }

    pub fn state_name(&self, s: StateId) -> String {
        match self.locate(s) {
            Some((chain, phase)) => format!("{}_{chain}", phase.name()),
            None if s == self.finish() => "finish".to_string(),
            None => "damage".to_string(),
        }
    }
}

/// Mission CTMC together with its state layout.
#[derive(Clone, Debug, PartialEq)]
pub struct MissionModel {
    pub ctmc: IntervalCtmc<f64>,
    pub layout: Layout,
}

/// Builds the mission model for chains `config.first()..=last`, starting in
/// `phase` of the first chain. Reaching the end of chain `last` leads to the
/// absorbing `finish` state; `tail_energy` is added to that final travel
/// and stands for the energy of whatever follows.
pub(crate) fn build_range(
    spec: &MissionSpec,
    rates: &RateIntervals,
    config: &Configuration,
    last: usize,
    phase: Phase,
    tail_energy: f64,
) -> Result<MissionModel, MissionError> {
    let layout = Layout { first: config.first(), last };
    let n = layout.state_count();
    let at = |chain: usize, p: Phase| layout.state(chain, p).0;
    let (finish, damage) = (layout.finish().0, layout.damage().0);

    // (from, to, lo, hi, energy)
    let mut edges: Vec<(usize, usize, f64, f64, f64)> = Vec::new();
    for j in layout.first..=last {
        let (inspect, cleaning, prepare, travel) =
            (at(j, Phase::Inspect), at(j, Phase::Cleaning), at(j, Phase::Prepare), at(j, Phase::Travel));
        let work = if config.x(j) { cleaning } else { travel };
        let r = spec.r_inspect;
        if config.x(j) {
            edges.push((inspect, travel, spec.p_c * r, spec.p_c * r, spec.e_ins));
            edges.push((inspect, cleaning, (1.0 - spec.p_c) * r, (1.0 - spec.p_c) * r, spec.e_ins));
        } else {
            edges.push((inspect, travel, r, r, spec.e_ins));
        }
        let (rc, rf, rd) = (rates.clean(j), rates.fail(j), rates.damage);
        edges.push((cleaning, travel, rc.lo, rc.hi, spec.e_clean(j)));
        edges.push((cleaning, damage, rd.lo, rd.hi, 0.0));
        edges.push((cleaning, prepare, rf.lo, rf.hi, 0.0));
        edges.push((prepare, work, spec.r_prepare, spec.r_prepare, spec.e_p));
        let (next, e) = if j == last { (finish, spec.e_t + tail_energy) } else { (at(j + 1, Phase::Inspect), spec.e_t) };
        edges.push((travel, next, spec.r_travel, spec.r_travel, e));
    }

    let mut b = IntervalCtmc::builder(n).initial(at(layout.first, phase));
    let mut energy = RewardStructure::new("energy", n);
    let mut time = RewardStructure::new("time", n);
    for s in 0..n {
        time = time.with_state_reward(StateId(s), 1.0);
        b = b.label(s, layout.state_name(StateId(s)));
    }
    for (from, to, lo, hi, e) in edges {
        b = b.interval(from, to, lo, hi);
        if hi > 0.0 {
            energy = energy.with_transition_reward(StateId(from), StateId(to), e);
        }
    }
    let ctmc = b.reward(energy).reward(time).build()?;
    Ok(MissionModel { ctmc, layout })
}

/// Interval CTMC of the mission from `phase` of chain `config.first()` to
/// the end, with `energy` transition rewards and a unit `time` state reward.
pub fn build_mission_ctmc(
    spec: &MissionSpec,
    rates: &RateIntervals,
    config: &Configuration,
    phase: Phase,
) -> Result<MissionModel, MissionError> {
    build_range(spec, rates, config, config.last(), phase, 0.0)
}

/// Point CTMC at the lower ends of `rates`, e.g. for ground-truth simulation
/// with degenerate intervals.
pub fn build_point_ctmc(
    spec: &MissionSpec,
    rates: &RateIntervals,
    config: &Configuration,
    phase: Phase,
) -> Result<(MissionModel, Ctmc<f64>), MissionError> {
    let model = build_mission_ctmc(spec, rates, config, phase)?;
    let point = model.ctmc.instantiate_at(0.0);
    Ok((model, point))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checker::{check_interval, check_point, IntervalMethod, Property, RewardSemantics};
    use crate::ctmc::Interval;

    fn rates(k: usize) -> RateIntervals {
        RateIntervals {
            clean: vec![Interval { lo: 0.15, hi: 0.4 }; k],
            damage: Interval { lo: 1e-6, hi: 1e-3 },
            fail: vec![Interval { lo: 0.05, hi: 0.2 }; k],
        }
    }

    #[test]
    fn enumeration_order() {
        let configs = Configuration::enumerate(3, 6);
        assert_eq!(configs.len(), 8);
        let shown: Vec<String> = configs.iter().map(|c| c.to_string()).collect();
        assert_eq!(shown, ["1111", "1110", "1101", "1100", "1011", "1010", "1001", "1000"]);
        for (i, c) in configs.iter().enumerate() {
            assert_eq!(c.number(), i + 1);
        }
        assert_eq!(Configuration::enumerate(6, 6).len(), 1);
        assert_eq!(Configuration::enumerate(1, 6).len(), 32);
    }

    #[test]
    fn state_count_and_layout() {
        let spec = MissionSpec::default();
        let m = build_mission_ctmc(&spec, &rates(6), &Configuration::all(1, 6, true), Phase::Inspect).unwrap();
        assert_eq!(m.ctmc.state_count(), 26);
        assert_eq!(m.layout.state_name(m.layout.state(3, Phase::Prepare)), "prepare_3");
        assert_eq!(m.layout.locate(m.layout.state(6, Phase::Travel)), Some((6, Phase::Travel)));
        assert_eq!(m.layout.locate(m.layout.finish()), None);
        assert_eq!(m.ctmc.interval_entries().len(), 18);
    }

    #[test]
    fn skipping_everything_removes_damage() {
        let spec = MissionSpec { k: 1, ..MissionSpec::default() };
        let m = build_mission_ctmc(&spec, &rates(1), &Configuration::all(1, 1, false), Phase::Inspect).unwrap();
        assert_eq!(m.ctmc.state_count(), 6);
        let v = check_interval(&m.ctmc, &Property::prob_reach("damage"), RewardSemantics::Strict, IntervalMethod::Corners)
            .unwrap();
        assert_eq!((v.lo, v.hi), (0.0, 0.0));

        let spec = MissionSpec::default();
        let m = build_mission_ctmc(&spec, &rates(6), &Configuration::all(4, 6, false), Phase::Inspect).unwrap();
        let v = check_interval(&m.ctmc, &Property::prob_reach("damage"), RewardSemantics::Strict, IntervalMethod::Corners)
            .unwrap();
        assert_eq!((v.lo, v.hi), (0.0, 0.0));
    }

    #[test]
    fn degenerate_rates_match_point_checker() {
        let spec = MissionSpec { k: 3, ..MissionSpec::default() };
        let truth = RateIntervals::points(&[0.2, 0.3, 0.25], 1e-4, &[0.1, 0.05, 0.2]);
        let config = Configuration::new(1, vec![true, false, true]);
        let (m, point) = build_point_ctmc(&spec, &truth, &config, Phase::Cleaning).unwrap();
        let props = [
            Property::prob_reach("damage"),
            Property::reward_reach("energy", "finish"),
            Property::reward_reach("time", "finish"),
        ];
        for p in &props {
            let v = check_interval(&m.ctmc, p, RewardSemantics::UntilAbsorption, IntervalMethod::Corners).unwrap();
            let x = check_point(&point, p, RewardSemantics::UntilAbsorption).unwrap();
            assert_eq!(v.corners, 1);
            assert!((v.lo - x).abs() <= 1e-12 * x.abs().max(1.0) && v.lo == v.hi, "{p}: {v:?} vs {x}");
        }
    }

    #[test]
    fn strict_energy_to_finish_is_infinite_when_damage_is_possible() {
        let spec = MissionSpec { k: 2, ..MissionSpec::default() };
        let m = build_mission_ctmc(&spec, &rates(2), &Configuration::all(1, 2, true), Phase::Inspect).unwrap();
        let p = Property::reward_reach("energy", "finish");
        let strict = check_interval(&m.ctmc, &p, RewardSemantics::Strict, IntervalMethod::Corners).unwrap();
        assert!(strict.lo.is_infinite());
        let lenient = check_interval(&m.ctmc, &p, RewardSemantics::UntilAbsorption, IntervalMethod::Corners).unwrap();
        assert!(lenient.hi.is_finite() && lenient.lo > 0.0);
    }

    #[test]
    fn single_clean_chain_energy() {
        // p_c = 1: inspect and travel only.
        let spec = MissionSpec { k: 1, p_c: 1.0, ..MissionSpec::default() };
        let m = build_mission_ctmc(&spec, &rates(1), &Configuration::all(1, 1, true), Phase::Inspect).unwrap();
        let p = Property::reward_reach("energy", "finish");
        let v = check_interval(&m.ctmc, &p, RewardSemantics::UntilAbsorption, IntervalMethod::Corners).unwrap();
        assert!((v.lo - 3.0).abs() < 1e-12 && (v.hi - 3.0).abs() < 1e-12);
        let t = check_interval(&m.ctmc, &Property::reward_reach("time", "finish"), RewardSemantics::Strict, IntervalMethod::Corners)
            .unwrap();
        assert!((t.hi - 1.5).abs() < 1e-12);
    }
}
