//! Floating-chain inspection and cleaning mission.
//!
//! An underwater vehicle visits `k` chains in order. Each chain is inspected,
//! found clean with probability `p_c`, and otherwise cleaned, possibly over
//! several attempts. Cleaning succeeds, fails (the vehicle prepares and may
//! retry) or causes catastrophic damage. Before every attempt the controller
//! rebuilds the interval CTMC of the remaining mission from the current rate
//! beliefs and picks the configuration that cleans the most chains while
//! keeping the damage probability and the expected energy within limits.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bipp::BippError;
use crate::checker::CheckError;
use crate::ctmc::ModelError;

mod beliefs;
mod controller;
mod model;
mod output;
mod sim;

pub use beliefs::{sample_case_study_priors, BeliefsFile, RateBeliefs, RateIntervals, RegularBelief, SingularBelief};
pub use controller::{controller_decide, evaluate_config, ConfigCheck, Decision, DecisionRecord};
pub use model::{build_mission_ctmc, build_point_ctmc, Configuration, Layout, MissionModel, Phase};
pub use output::{write_decisions_csv, write_events_csv};
pub use sim::{calibrate_e0, run_mission, run_mission_with, simulate_step, ChainResult, Event, MissionOutcome, Step, Terminal};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MissionError {
    #[error("invalid mission spec: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Check(#[from] CheckError),
    #[error(transparent)]
    Bipp(#[from] BippError),
}

/// A value given either once for every chain or per chain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PerChain {
    Uniform(f64),
    Each(Vec<f64>),
}

impl PerChain {
    /// Value for chain `i` (1-based).
    pub fn get(&self, i: usize) -> f64 {
        match self {
            PerChain::Uniform(v) => *v,
            PerChain::Each(vs) => vs[i - 1],
        }
    }

    fn check(&self, name: &str, k: usize, ok: impl Fn(f64) -> bool) -> Result<(), MissionError> {
        if let PerChain::Each(vs) = self {
            if vs.len() != k {
                return Err(MissionError::InvalidSpec(format!("{name} lists {} values for {k} chains", vs.len())));
            }
        }
        match (1..=k).map(|i| self.get(i)).find(|v| !ok(*v)) {
            Some(v) => Err(MissionError::InvalidSpec(format!("{name} value {v} is out of range"))),
            None => Ok(()),
        }
    }
}

/// Rates used to simulate the real world.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GroundTruth {
    pub r_clean: PerChain,
    pub r_fail: PerChain,
    pub r_damage: f64,
}

impl Default for GroundTruth {
    fn default() -> Self {
        Self { r_clean: PerChain::Uniform(0.2), r_fail: PerChain::Uniform(0.1), r_damage: 1e-9 }
    }
}

/// Mission parameters. Every field has a default, so `{}` is a valid config.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MissionSpec {
    pub k: usize,
    pub r_inspect: f64,
    pub r_travel: f64,
    pub r_prepare: f64,
    pub p_c: f64,
    pub e_ins: f64,
    pub e_t: f64,
    pub e_p: f64,
    /// Cleaning energy per chain.
    pub e_clean: PerChain,
    /// Initial energy; calibrated from the prior beliefs when absent.
    pub e0: Option<f64>,
    /// Calibrated `e0` is this multiple of the prior expected-energy upper bound.
    pub e0_factor: f64,
    pub p_fail_max: f64,
    pub ground_truth: GroundTruth,
    /// Event-free time credited to the damage-rate prior before the mission.
    pub damage_prior_exposure: f64,
    /// Event-free time credited to each cleaning-rate prior before the mission.
    pub clean_prior_exposure: f64,
    pub seed: u64,
}

impl Default for MissionSpec {
    fn default() -> Self {
        Self {
            k: 6,
            r_inspect: 1.0,
            r_travel: 2.0,
            r_prepare: 4.0,
            p_c: 0.5,
            e_ins: 1.0,
            e_t: 2.0,
            e_p: 1.0,
            e_clean: PerChain::Uniform(5.0),
            e0: None,
            e0_factor: 1.5,
            p_fail_max: 0.05,
            ground_truth: GroundTruth::default(),
            damage_prior_exposure: 1000.0,
            clean_prior_exposure: 1.0,
            seed: 0,
        }
    }
}

impl MissionSpec {
    pub fn validate(&self) -> Result<(), MissionError> {
        let bad = |msg: &str| Err(MissionError::InvalidSpec(msg.to_string()));
        let positive = |v: f64| v.is_finite() && v > 0.0;
        let non_negative = |v: f64| v.is_finite() && v >= 0.0;
        if self.k == 0 || self.k > 16 {
            return bad("k must be between 1 and 16");
        }
        if ![self.r_inspect, self.r_travel, self.r_prepare].into_iter().all(positive) {
            return bad("fixed rates must be positive");
        }
        if !(0.0..=1.0).contains(&self.p_c) {
            return bad("p_c must lie in [0, 1]");
        }
        if ![self.e_ins, self.e_t, self.e_p].into_iter().all(non_negative) {
            return bad("energies must be non-negative");
        }
        self.e_clean.check("e_clean", self.k, non_negative)?;
        if let Some(e0) = self.e0 {
            if !(e0 > 0.0) {
                return bad("e0 must be positive");
            }
        }
        if !positive(self.e0_factor) {
            return bad("e0_factor must be positive");
        }
        if !(0.0..=1.0).contains(&self.p_fail_max) {
            return bad("p_fail_max must lie in [0, 1]");
        }
        self.ground_truth.r_clean.check("ground_truth.r_clean", self.k, positive)?;
        self.ground_truth.r_fail.check("ground_truth.r_fail", self.k, non_negative)?;
        if !non_negative(self.ground_truth.r_damage) {
            return bad("ground_truth.r_damage must be non-negative");
        }
        if !positive(self.damage_prior_exposure) || !positive(self.clean_prior_exposure) {
            return bad("prior exposures must be positive");
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self, MissionError> {
        let spec: Self = serde_json::from_str(text).map_err(|e| MissionError::InvalidSpec(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn e_clean(&self, chain: usize) -> f64 {
        self.e_clean.get(chain)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_uses_defaults() {
        let spec = MissionSpec::from_json("{}").unwrap();
        assert_eq!(spec, MissionSpec::default());
        assert_eq!(spec.e_clean(3), 5.0);
    }

    #[test]
    fn unknown_fields_and_bad_values_are_rejected() {
        assert!(MissionSpec::from_json(r#"{"kk": 3}"#).is_err());
        assert!(MissionSpec::from_json(r#"{"p_c": 1.5}"#).is_err());
        assert!(MissionSpec::from_json(r#"{"k": 2, "e_clean": [1, 2, 3]}"#).is_err());
        assert!(MissionSpec::from_json(r#"{"ground_truth": {"r_clean": 0}}"#).is_err());
        let spec = MissionSpec::from_json(r#"{"k": 2, "e_clean": [1, 2], "ground_truth": {"r_damage": 0}}"#).unwrap();
        assert_eq!((spec.e_clean(1), spec.e_clean(2)), (1.0, 2.0));
        assert_eq!(spec.ground_truth.r_fail, PerChain::Uniform(0.1));
    }
}
