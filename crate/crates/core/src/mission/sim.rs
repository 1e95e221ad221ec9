//! Seeded simulation of a mission against ground-truth rates.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

use super::controller::evaluate_config;
use super::model::{build_mission_ctmc, Layout};
use super::{
    controller_decide, sample_case_study_priors, Configuration, Decision, DecisionRecord, MissionError, MissionSpec,
    Phase, RateBeliefs, RateIntervals,
};
use crate::ctmc::{Ctmc, RewardStructure, StateId};

const PRIOR_STREAM: u64 = 0;
const SIM_STREAM: u64 = 1;
const TIE_STREAM: u64 = 2;

/// One jump of the simulated chain.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Step {
    pub to: StateId,
    pub dwell: f64,
    /// Transition reward of the jump plus state reward over the dwell.
    pub energy: f64,
}

/// Samples the sojourn in `state` and the next state; `None` if absorbing.
pub fn simulate_step<R: Rng>(
    model: &Ctmc<f64>,
    energy: &RewardStructure<f64>,
    state: StateId,
    rng: &mut R,
) -> Option<Step> {
    let exit = model.exit_rate(state);
    if !(exit > 0.0) {
        return None;
    }
    let dwell = Exp::new(exit).expect("positive exit rate").sample(rng);
    let mut pick = rng.gen::<f64>() * exit;
    let mut to = None;
    for (succ, rate) in model.successors(state) {
        to = Some(succ);
        if pick < rate {
            break;
        }
        pick -= rate;
    }
    let to = to.expect("non-absorbing state has a successor");
    let energy = energy.transition_reward(state, to) + energy.state_reward(state) * dwell;
    Some(Step { to, dwell, energy })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChainResult {
    Cleaned,
    Skipped,
    NotNeeded,
    /// Not completed because the mission ended in damage.
    Unfinished,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Terminal {
    Finish,
    Damage,
}

/// Log entry: `event` happened at `time` on leaving `state` and cost `energy`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub time: f64,
    pub state: String,
    pub event: String,
    pub energy: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MissionOutcome {
    pub seed: u64,
    pub k: usize,
    pub e0: f64,
    pub energy_consumed: f64,
    pub duration: f64,
    pub terminal: Terminal,
    pub chains: Vec<ChainResult>,
    pub cleaning_attempts: Vec<usize>,
    #[serde(skip)]
    pub events: Vec<Event>,
    #[serde(skip)]
    pub decisions: Vec<DecisionRecord>,
}

impl MissionOutcome {
    pub fn count(&self, result: ChainResult) -> usize {
        self.chains.iter().filter(|c| **c == result).count()
    }
}

/// `e0_factor` times the upper expected energy of cleaning every chain,
/// from the start of the mission at the given beliefs.
pub fn calibrate_e0(spec: &MissionSpec, beliefs: &RateBeliefs) -> Result<f64, MissionError> {
    let rates = beliefs.intervals()?;
    let (_, energy) = evaluate_config(spec, &rates, &Configuration::all(1, spec.k, true), Phase::Inspect)?;
    Ok(spec.e0_factor * energy.hi)
}

fn ground_truth(spec: &MissionSpec) -> RateIntervals {
    let gt = &spec.ground_truth;
    let clean: Vec<f64> = (1..=spec.k).map(|j| gt.r_clean.get(j)).collect();
    let fail: Vec<f64> = (1..=spec.k).map(|j| gt.r_fail.get(j)).collect();
    RateIntervals::points(&clean, gt.r_damage, &fail)
}

/// Name of a jump out of `from`; `to` is the phase reached on the same chain.
fn event_name(from: Phase, to: Option<Phase>) -> &'static str {
    match (from, to) {
        (Phase::Inspect, Some(Phase::Travel)) => "found_clean",
        (Phase::Inspect, _) => "found_dirty",
        (Phase::Cleaning, Some(Phase::Travel)) => "cleaned",
        (Phase::Cleaning, Some(Phase::Prepare)) => "clean_failed",
        (Phase::Cleaning, _) => "damage",
        (Phase::Prepare, Some(Phase::Cleaning)) => "retry",
        (Phase::Prepare, _) => "give_up",
        (Phase::Travel, _) => "travel",
    }
}

struct Truth {
    model: Ctmc<f64>,
    energy: RewardStructure<f64>,
    layout: Layout,
}

fn truth_model(spec: &MissionSpec, rates: &RateIntervals, skip: &[bool]) -> Result<Truth, MissionError> {
    let config = Configuration::new(1, skip.iter().map(|s| !s).collect());
    let m = build_mission_ctmc(spec, rates, &config, Phase::Inspect)?;
    let model = m.ctmc.instantiate_at(0.0);
    let energy = model.reward("energy").expect("mission model has energy rewards").clone();
    Ok(Truth { model, energy, layout: m.layout })
}

/// Runs the whole mission with beliefs drawn from the case-study priors.
pub fn run_mission(spec: &MissionSpec) -> Result<MissionOutcome, MissionError> {
    spec.validate()?;
    let mut prior_rng = ChaCha8Rng::seed_from_u64(spec.seed);
    prior_rng.set_stream(PRIOR_STREAM);
    let beliefs = sample_case_study_priors(&mut prior_rng, spec)?;
    run_mission_with(spec, beliefs)
}

/// Runs the mission from the given initial beliefs.
pub fn run_mission_with(spec: &MissionSpec, mut beliefs: RateBeliefs) -> Result<MissionOutcome, MissionError> {
    spec.validate()?;
    let mut sim_rng = ChaCha8Rng::seed_from_u64(spec.seed);
    sim_rng.set_stream(SIM_STREAM);
    let mut tie_rng = ChaCha8Rng::seed_from_u64(spec.seed);
    tie_rng.set_stream(TIE_STREAM);

    let e0 = match spec.e0 {
        Some(e) => e,
        None => calibrate_e0(spec, &beliefs)?,
    };
    let k = spec.k;
    let truth_rates = ground_truth(spec);
    let mut skip = vec![false; k];
    let mut truth = truth_model(spec, &truth_rates, &skip)?;

    let mut chains = vec![ChainResult::Unfinished; k];
    let mut attempts = vec![0usize; k];
    let mut events = Vec::new();
    let mut decisions = Vec::new();
    let mut consumed = 0.0;
    let mut time = 0.0;
    let mut state = truth.layout.state(1, Phase::Inspect);

    let terminal = loop {
        let Some((chain, phase)) = truth.layout.locate(state) else {
            break if state == truth.layout.finish() { Terminal::Finish } else { Terminal::Damage };
        };

        let first_attempt = phase == Phase::Cleaning && attempts[chain - 1] == 0;
        if first_attempt || phase == Phase::Prepare {
            let attempt = attempts[chain - 1] + 1;
            let mut rec = controller_decide(spec, &beliefs, chain, phase, attempt, e0 - consumed, &mut tie_rng)?;
            rec.time = time;
            let skipping = rec.decision == Decision::Skip;
            decisions.push(rec);
            if skipping {
                chains[chain - 1] = ChainResult::Skipped;
                skip[chain - 1] = true;
                truth = truth_model(spec, &truth_rates, &skip)?;
                if phase == Phase::Cleaning {
                    events.push(Event { time, state: truth.layout.state_name(state), event: "skip".into(), energy: 0.0 });
                    state = truth.layout.state(chain, Phase::Travel);
                    continue;
                }
            }
        }

        let step = simulate_step(&truth.model, &truth.energy, state, &mut sim_rng)
            .expect("transient states have successors");
        time += step.dwell;
        consumed += step.energy;
        let next = truth.layout.locate(step.to);
        let within = next.filter(|(c, _)| *c == chain).map(|(_, p)| p);
        let name = event_name(phase, within);
        events.push(Event { time, state: truth.layout.state_name(state), event: name.into(), energy: step.energy });

        match (phase, within) {
            (Phase::Inspect, Some(Phase::Travel)) => chains[chain - 1] = ChainResult::NotNeeded,
            (Phase::Cleaning, next_phase) => {
                attempts[chain - 1] += 1;
                beliefs.observe_cleaning(chain, step.dwell, next_phase == Some(Phase::Prepare));
                if next_phase == Some(Phase::Travel) {
                    chains[chain - 1] = ChainResult::Cleaned;
                }
            }
            _ => {}
        }
        state = step.to;
    };
    if terminal == Terminal::Finish {
        events.push(Event { time, state: "finish".into(), event: "finish".into(), energy: 0.0 });
    }

    Ok(MissionOutcome {
        seed: spec.seed,
        k,
        e0,
        energy_consumed: consumed,
        duration: time,
        terminal,
        chains,
        cleaning_attempts: attempts,
        events,
        decisions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mission::GroundTruth;
    use crate::mission::PerChain;

    #[test]
    fn absorbing_state_has_no_step() {
        let m = Ctmc::<f64>::builder(2).rate(0, 1, 1.0).build().unwrap();
        let e = RewardStructure::new("energy", 2);
        assert_eq!(simulate_step(&m, &e, StateId(1), &mut ChaCha8Rng::seed_from_u64(0)), None);
    }

    #[test]
    fn step_frequencies_follow_embedded_probabilities() {
        let m = Ctmc::<f64>::builder(4).rate(0, 1, 1.0).rate(0, 2, 2.5).rate(0, 3, 0.5).build().unwrap();
        let e = RewardStructure::new("energy", 4).with_transition_reward(StateId(0), StateId(2), 3.0);
        let probs = m.embedded_probs(StateId(0)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let n = 100_000;
        let mut counts = [0usize; 4];
        let mut dwell = 0.0;
        for _ in 0..n {
            let s = simulate_step(&m, &e, StateId(0), &mut rng).unwrap();
            counts[s.to.0] += 1;
            dwell += s.dwell;
            assert_eq!(s.energy, if s.to == StateId(2) { 3.0 } else { 0.0 });
        }
        for j in 1..4 {
            let p = probs[j];
            let sigma = (p * (1.0 - p) / n as f64).sqrt();
            assert!((counts[j] as f64 / n as f64 - p).abs() <= 3.0 * sigma, "{j}: {counts:?}");
        }
        let mean = dwell / n as f64;
        assert!((mean - 0.25).abs() <= 3.0 * 0.25 / (n as f64).sqrt());
    }

    #[test]
    fn seeded_runs_replay_exactly() {
        let spec = MissionSpec { seed: 42, ..MissionSpec::default() };
        let a = run_mission(&spec).unwrap();
        let b = run_mission(&spec).unwrap();
        assert_eq!(a.events, b.events);
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }

    #[test]
    fn no_damage_and_plenty_of_energy_always_finish() {
        for seed in 0..5 {
            let spec = MissionSpec {
                seed,
                e0: Some(1e9),
                ground_truth: GroundTruth { r_damage: 0.0, ..GroundTruth::default() },
                ..MissionSpec::default()
            };
            let out = run_mission(&spec).unwrap();
            assert_eq!(out.terminal, Terminal::Finish);
            assert_eq!(out.count(ChainResult::Unfinished), 0);
        }
    }

    #[test]
    fn energy_ledger_balances() {
        let spec = MissionSpec { seed: 7, ..MissionSpec::default() };
        let out = run_mission(&spec).unwrap();
        let total = out.events.iter().fold(0.0, |acc, e| acc + e.energy);
        assert_eq!(total, out.energy_consumed);
        assert!(!out.decisions.is_empty());
        for d in &out.decisions {
            let spent = out.events.iter().take_while(|e| e.time <= d.time).fold(0.0, |acc, e| acc + e.energy);
            assert_eq!(d.e_left, out.e0 - spent);
        }
    }

    #[test]
    fn per_chain_values_are_used() {
        let spec = MissionSpec {
            k: 2,
            seed: 3,
            p_c: 0.0,
            e0: Some(1e9),
            ground_truth: GroundTruth {
                r_clean: PerChain::Each(vec![50.0, 50.0]),
                r_fail: PerChain::Uniform(0.0),
                r_damage: 0.0,
            },
            ..MissionSpec::default()
        };
        let out = run_mission(&spec).unwrap();
        assert_eq!(out.chains, vec![ChainResult::Cleaned, ChainResult::Cleaned]);
        // inspect, clean and travel for each chain
        assert_eq!(out.energy_consumed, 2.0 * (1.0 + 5.0 + 2.0));
    }
}
