//! Posterior rate intervals for recurring events from a set of Gamma priors.
//!
//! A Gamma prior on the rate is parameterized by its pseudo-exposure `t0`
//! and mean rate `λ0`. After `n` events in exposure `t` the posterior mean is
//! `(t0·λ0 + n) / (t0 + t)`. When `t0` and `λ0` are only known to lie in
//! intervals, the posterior mean ranges over an interval whose ends are
//! attained at corners of the prior box.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ctmc::{Interval, RateObservation};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IpspError {
    #[error("invalid prior set: {0}")]
    InvalidPrior(String),
}

/// Intervals on the prior pseudo-exposure `t0` and prior mean rate `λ0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GammaPriorSet<T> {
    t0: Interval<T>,
    lambda0: Interval<T>,
}

impl<T: Scalar> GammaPriorSet<T> {
    pub fn new(t0: (T, T), lambda0: (T, T)) -> Result<Self, IpspError> {
        let check = |name: &str, (lo, hi): (T, T)| {
            if lo > T::zero() && lo <= hi && hi.is_finite() {
                Ok(Interval { lo, hi })
            } else {
                Err(IpspError::InvalidPrior(format!("{name} must satisfy 0 < lo <= hi < inf, got [{lo}, {hi}]")))
            }
        };
        Ok(Self { t0: check("t0", t0)?, lambda0: check("lambda0", lambda0)? })
    }

    /// A single Gamma prior.
    pub fn point(t0: T, lambda0: T) -> Result<Self, IpspError> {
        Self::new((t0, t0), (lambda0, lambda0))
    }

    pub fn t0(&self) -> Interval<T> {
        self.t0
    }

    pub fn lambda0(&self) -> Interval<T> {
        self.lambda0
    }
}

/// Posterior mean rate interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IpspBounds<T> {
    pub lower: T,
    pub upper: T,
}

impl<T: Scalar> IpspBounds<T> {
    pub fn width(&self) -> T {
        self.upper - self.lower
    }

    pub fn contains(&self, rate: T) -> bool {
        self.lower <= rate && rate <= self.upper
    }
}

/// Posterior mean rate for a single Gamma prior.
pub fn posterior_point<T: Scalar>(t0: T, lambda0: T, obs: RateObservation<T>) -> T {
    (t0 * lambda0 + T::lit(obs.events as f64)) / (t0 + obs.exposure)
}

/// Extremes of the posterior mean over the prior box.
///
/// The posterior mean increases in `λ0`; in `t0` it moves towards `λ0` and
/// away from `n/t`, so the lower end uses the largest `t0` when `n/t ≥ λ̲0`
/// and the smallest otherwise (and symmetrically for the upper end). The
/// branch tests are written as `n ≥ λ̲0·t` so that `t = 0` needs no special case.
pub fn ipsp_bounds<T: Scalar>(prior: &GammaPriorSet<T>, obs: RateObservation<T>) -> IpspBounds<T> {
    let n = T::lit(obs.events as f64);
    let t = obs.exposure;
    let (t0, l0) = (prior.t0, prior.lambda0);
    let lower_t0 = if n >= l0.lo * t { t0.hi } else { t0.lo };
    let upper_t0 = if n <= l0.hi * t { t0.hi } else { t0.lo };
    IpspBounds {
        lower: posterior_point(lower_t0, l0.lo, obs),
        upper: posterior_point(upper_t0, l0.hi, obs),
    }
}

/// Brute-force extremes over a `resolution × resolution` grid of the prior
/// box, endpoints included.
pub fn ipsp_grid_oracle<T: Scalar>(
    prior: &GammaPriorSet<T>,
    obs: RateObservation<T>,
    resolution: usize,
) -> IpspBounds<T> {
    assert!(resolution >= 2, "grid resolution must be at least 2");
    let steps = T::lit((resolution - 1) as f64);
    let at = |range: Interval<T>, k: usize| {
        if k + 1 == resolution {
            range.hi
        } else {
            range.lo + range.width() * T::lit(k as f64) / steps
        }
    };
    let mut lower = T::infinity();
    let mut upper = T::neg_infinity();
    for a in 0..resolution {
        let t0 = at(prior.t0, a);
        for b in 0..resolution {
            let v = posterior_point(t0, at(prior.lambda0, b), obs);
            lower = lower.min(v);
            upper = upper.max(v);
        }
    }
    IpspBounds { lower, upper }
}

/// Adds `delta_n` events and `delta_t` exposure.
pub fn accumulate<T: Scalar>(obs: RateObservation<T>, delta_n: u64, delta_t: T) -> RateObservation<T> {
    assert!(delta_t >= T::zero(), "exposure increments must be non-negative");
    RateObservation { events: obs.events + delta_n, exposure: obs.exposure + delta_t }
}

/// Clears the accumulator, e.g. after a detected change in the underlying rate.
pub fn reset<T: Scalar>(_obs: RateObservation<T>) -> RateObservation<T> {
    RateObservation::empty()
}

/// JSON prior file: `{"t0":[10,20],"lambda0":[1,3]}`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GammaPriorFile {
    pub t0: [f64; 2],
    pub lambda0: [f64; 2],
}

impl GammaPriorFile {
    pub fn into_prior<T: Scalar>(self) -> Result<GammaPriorSet<T>, IpspError> {
        GammaPriorSet::new(
            (T::lit(self.t0[0]), T::lit(self.t0[1])),
            (T::lit(self.lambda0[0]), T::lit(self.lambda0[1])),
        )
    }
}

impl<T: Scalar> std::str::FromStr for GammaPriorSet<T> {
    type Err = IpspError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let file: GammaPriorFile =
            serde_json::from_str(text).map_err(|e| IpspError::InvalidPrior(e.to_string()))?;
        file.into_prior()
    }
}
