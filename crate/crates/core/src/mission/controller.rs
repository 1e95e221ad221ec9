//! Per-attempt reconfiguration.
//!
//! The mission model is a series of per-chain blocks joined by the travel
//! transitions, and every interval-valued transition belongs to exactly one
//! block. The corner extremes of the whole model therefore follow from the corner
//! extremes of each block, evaluated from the last chain backwards:
//!
//! * `P[F damage] = 1 - Π (1 - p_j)` is increasing in every `p_j`;
//! * the expected energy satisfies `V_j = E_j + s_j·V_{j+1}` with
//!   `s_j = 1 - p_j`, so its extremes come from checking block `j` with the
//!   extreme of `V_{j+1}` attached to the final travel.
//!
//! Each block has at most three interval rates, so a decision costs a few
//! thousand small solves instead of `8^(k-i+1)` corner evaluations.

use std::time::Instant;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::model::build_range;
use super::{Configuration, MissionError, MissionSpec, Phase, RateBeliefs, RateIntervals};
use crate::checker::{
    check_interval, evaluate_threshold, Comparison, IntervalMethod, Property, RewardSemantics, Threshold, ValueInterval, Verdict,
};
use crate::ctmc::Interval;

/// Requirement values of one configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigCheck {
    pub config: Configuration,
    /// Probability of catastrophic damage before the mission ends.
    pub r1: Interval<f64>,
    /// Expected energy until the mission ends.
    pub r2: Interval<f64>,
    pub r1_verdict: Verdict,
    pub r2_verdict: Verdict,
}

impl ConfigCheck {
    pub fn feasible(&self) -> bool {
        self.r1_verdict.robust() == Verdict::Satisfied && self.r2_verdict.robust() == Verdict::Satisfied
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    Clean(Configuration),
    Skip,
}

/// Everything the controller saw and decided before one cleaning attempt.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecisionRecord {
    pub chain: usize,
    pub attempt: usize,
    pub phase: Phase,
    pub e_left: f64,
    pub rates: RateIntervals,
    /// Every configuration in enumeration order.
    pub checks: Vec<ConfigCheck>,
    /// Feasible configurations cleaning the most chains, as indices into `checks`.
    pub candidates: Vec<usize>,
    pub decision: Decision,
    /// Mission time of the decision, set by the simulator.
    pub time: f64,
    pub wall_ms: f64,
}

impl DecisionRecord {
    pub fn feasible_count(&self) -> usize {
        self.checks.iter().filter(|c| c.feasible()).count()
    }

    /// Check of the chosen configuration, or of configuration 1 on a skip.
    pub fn reported(&self) -> &ConfigCheck {
        match &self.decision {
            Decision::Clean(c) => &self.checks[c.number() - 1],
            Decision::Skip => &self.checks[0],
        }
    }
}

/// Interval of `P[F damage]` and of the until-absorption expected energy to
/// `finish` over the corners of the rate box, from `phase` of `config.first()`.
pub fn evaluate_config(
    spec: &MissionSpec,
    rates: &RateIntervals,
    config: &Configuration,
    phase: Phase,
) -> Result<(Interval<f64>, Interval<f64>), MissionError> {
    let damage = Property::prob_reach("damage");
    let energy = Property::reward_reach("energy", "finish");
    let semantics = RewardSemantics::UntilAbsorption;
    let corners = IntervalMethod::Corners;
    let (mut safe_lo, mut safe_hi) = (1.0, 1.0);
    let (mut v_lo, mut v_hi) = (0.0, 0.0);
    for j in (config.first()..=config.last()).rev() {
        let block = Configuration::new(j, vec![config.x(j)]);
        let start = if j == config.first() { phase } else { Phase::Inspect };
        let hi_model = build_range(spec, rates, &block, j, start, v_hi)?;
        let lo_model = build_range(spec, rates, &block, j, start, v_lo)?;
        if config.x(j) {
            let p = check_interval(&hi_model.ctmc, &damage, semantics, corners)?;
            safe_lo *= 1.0 - p.hi;
            safe_hi *= 1.0 - p.lo;
        }
        v_hi = check_interval(&hi_model.ctmc, &energy, semantics, corners)?.hi;
        v_lo = check_interval(&lo_model.ctmc, &energy, semantics, corners)?.lo;
    }
    Ok((Interval { lo: 1.0 - safe_hi, hi: 1.0 - safe_lo }, Interval { lo: v_lo, hi: v_hi }))
}

/// Picks the configuration for the next cleaning attempt at `chain`.
///
/// Every configuration with `x_chain = 1` is checked against the damage bound
/// and the remaining energy. Only configurations whose whole interval meets
/// both requirements are feasible; among those the ones cleaning the most
/// chains are kept and one is drawn from `rng` if several remain.
pub fn controller_decide<R: Rng>(
    spec: &MissionSpec,
    beliefs: &RateBeliefs,
    chain: usize,
    phase: Phase,
    attempt: usize,
    e_left: f64,
    rng: &mut R,
) -> Result<DecisionRecord, MissionError> {
    let started = Instant::now();
    let rates = beliefs.intervals()?;
    let r1_max = Threshold { cmp: Comparison::Le, bound: spec.p_fail_max };
    let r2_max = Threshold { cmp: Comparison::Le, bound: e_left };
    let checks = Configuration::enumerate(chain, spec.k)
        .into_iter()
        .map(|config| {
            let (r1, r2) = evaluate_config(spec, &rates, &config, phase)?;
            let verdict = |v: Interval<f64>, t| {
                evaluate_threshold(&ValueInterval { lo: v.lo, hi: v.hi, corners: 0, samples: 0, escapes: 0 }, t)
            };
            Ok(ConfigCheck { r1_verdict: verdict(r1, r1_max), r2_verdict: verdict(r2, r2_max), config, r1, r2 })
        })
        .collect::<Result<Vec<_>, MissionError>>()?;

    let best = checks.iter().filter(|c| c.feasible()).map(|c| c.config.cleaned()).max();
    let candidates: Vec<usize> = match best {
        Some(most) => (0..checks.len()).filter(|&i| checks[i].feasible() && checks[i].config.cleaned() == most).collect(),
        None => Vec::new(),
    };
    let decision = match candidates.len() {
        0 => Decision::Skip,
        1 => Decision::Clean(checks[candidates[0]].config.clone()),
        n => Decision::Clean(checks[candidates[rng.gen_range(0..n)]].config.clone()),
    };
    Ok(DecisionRecord {
        chain,
        attempt,
        phase,
        e_left,
        rates,
        checks,
        candidates,
        decision,
        time: 0.0,
        wall_ms: started.elapsed().as_secs_f64() * 1e3,
    })
}
