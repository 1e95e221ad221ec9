//! Rate beliefs held by the vehicle and their posterior intervals.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{MissionError, MissionSpec};
use crate::bipp::{bipp_bounds, PartialPrior, PriorFile, Strategy};
use crate::ctmc::{Interval, RateObservation};
use crate::ipsp::{ipsp_bounds, GammaPriorFile, GammaPriorSet};

/// Partial prior on a singular event rate plus the event-free exposure seen so far.
#[derive(Clone, Debug, PartialEq)]
pub struct SingularBelief {
    pub prior: PartialPrior<f64>,
    /// Event-free time credited before the mission started.
    pub prior_exposure: f64,
    /// Event-free time observed during the mission.
    pub exposure: f64,
}

impl SingularBelief {
    pub fn new(prior: PartialPrior<f64>, prior_exposure: f64) -> Self {
        Self { prior, prior_exposure, exposure: 0.0 }
    }

    pub fn bounds(&self) -> Result<Interval<f64>, MissionError> {
        let b = bipp_bounds(&self.prior, self.prior_exposure + self.exposure, Strategy::Auto)?;
        Ok(Interval { lo: b.lower, hi: b.upper })
    }
}

/// Set of Gamma priors on a regular event rate plus its observations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RegularBelief {
    pub prior: GammaPriorSet<f64>,
    pub obs: RateObservation<f64>,
}

impl RegularBelief {
    pub fn new(prior: GammaPriorSet<f64>) -> Self {
        Self { prior, obs: RateObservation::empty() }
    }

    pub fn bounds(&self) -> Interval<f64> {
        let b = ipsp_bounds(&self.prior, self.obs);
        Interval { lo: b.lower, hi: b.upper }
    }
}

/// Everything the vehicle believes about the uncertain rates.
#[derive(Clone, Debug, PartialEq)]
pub struct RateBeliefs {
    /// Cleaning success rate of each chain.
    pub clean: Vec<SingularBelief>,
    /// Catastrophic damage rate while cleaning, shared by all chains.
    pub damage: SingularBelief,
    /// Cleaning failure rate of each chain.
    pub fail: Vec<RegularBelief>,
}

/// Posterior rate intervals, indexed by chain (1-based accessors).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateIntervals {
    pub clean: Vec<Interval<f64>>,
    pub damage: Interval<f64>,
    pub fail: Vec<Interval<f64>>,
}

impl RateIntervals {
    pub fn clean(&self, chain: usize) -> Interval<f64> {
        self.clean[chain - 1]
    }

    pub fn fail(&self, chain: usize) -> Interval<f64> {
        self.fail[chain - 1]
    }

    /// Degenerate intervals at the given rates.
    pub fn points(clean: &[f64], damage: f64, fail: &[f64]) -> Self {
        Self {
            clean: clean.iter().map(|r| Interval::point(*r)).collect(),
            damage: Interval::point(damage),
            fail: fail.iter().map(|r| Interval::point(*r)).collect(),
        }
    }
}

impl RateBeliefs {
    pub fn chains(&self) -> usize {
        self.clean.len()
    }

    pub fn intervals(&self) -> Result<RateIntervals, MissionError> {
        Ok(RateIntervals {
            clean: self.clean.iter().map(SingularBelief::bounds).collect::<Result<_, _>>()?,
            damage: self.damage.bounds()?,
            fail: self.fail.iter().map(RegularBelief::bounds).collect(),
        })
    }

    /// Credits `dwell` time spent cleaning chain `chain`, which ended in a
    /// failure when `failed` is set.
    pub fn observe_cleaning(&mut self, chain: usize, dwell: f64, failed: bool) {
        self.clean[chain - 1].exposure += dwell;
        self.damage.exposure += dwell;
        let fail = &mut self.fail[chain - 1].obs;
        fail.exposure += dwell;
        if failed {
            fail.events += 1;
        }
    }
}

fn three_point(eps1: f64, theta1: f64, eps2: f64, theta2: f64) -> Result<PartialPrior<f64>, MissionError> {
    Ok(PartialPrior::new(vec![0.0, eps1, eps2, f64::INFINITY], vec![theta1, theta2, 1.0 - theta1 - theta2])?)
}

/// Draws the randomized case-study priors for `spec.k` chains.
///
/// Cleaning rate: `ε1 = 0.12+U(0,0.12)`, `θ1 = 0.10+U(0,0.001)`,
/// `ε2 = 0.90+U(0,0.90)`, `θ2 = 0.85+U(0,0.0085)`. Damage rate:
/// `ε1 = 1e-8+U(0,1e-8)`, `θ1 = 0.88+U(0,0.0088)`, `ε2 = 1e-7+U(0,1e-7)`,
/// `θ2 = 0.10+U(0,0.001)`. Failure rate: `t0 ∈ [10, 10+U(0,10)]`,
/// `λ0 ∈ [0.0163, 0.0163+U(0,0.00163)]`.
pub fn sample_case_study_priors<R: Rng>(rng: &mut R, spec: &MissionSpec) -> Result<RateBeliefs, MissionError> {
    let mut u = |base: f64, spread: f64| base + rng.gen::<f64>() * spread;
    let mut clean = Vec::with_capacity(spec.k);
    let mut fail = Vec::with_capacity(spec.k);
    for _ in 0..spec.k {
        let (e1, t1, e2, t2) = (u(0.12, 0.12), u(0.10, 0.001), u(0.90, 0.90), u(0.85, 0.0085));
        clean.push(SingularBelief::new(three_point(e1, t1, e2, t2)?, spec.clean_prior_exposure));
        let (t0, l0) = (u(10.0, 10.0), u(0.0163, 0.00163));
        let prior = GammaPriorSet::new((10.0, t0), (0.0163, l0))
            .map_err(|e| MissionError::InvalidSpec(e.to_string()))?;
        fail.push(RegularBelief::new(prior));
    }
    let (e1, t1, e2, t2) = (u(1e-8, 1e-8), u(0.88, 0.0088), u(1e-7, 1e-7), u(0.10, 0.001));
    let damage = SingularBelief::new(three_point(e1, t1, e2, t2)?, spec.damage_prior_exposure);
    Ok(RateBeliefs { clean, damage, fail })
}

/// Beliefs written out as prior files, for inspection and replay.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BeliefsFile {
    pub clean: Vec<PriorFile>,
    pub damage: PriorFile,
    pub fail: Vec<GammaPriorFile>,
}

impl From<&RateBeliefs> for BeliefsFile {
    fn from(b: &RateBeliefs) -> Self {
        let gamma = |r: &RegularBelief| GammaPriorFile {
            t0: [r.prior.t0().lo, r.prior.t0().hi],
            lambda0: [r.prior.lambda0().lo, r.prior.lambda0().hi],
        };
        Self {
            clean: b.clean.iter().map(|c| PriorFile::from_prior(&c.prior)).collect(),
            damage: PriorFile::from_prior(&b.damage.prior),
            fail: b.fail.iter().map(gamma).collect(),
        }
    }
}
