//! Posterior rate bounds for singular events from partial priors.
//!
//! A singular event (catastrophic damage, a one-off task success) is never
//! observed during the exposure time `t`, so its likelihood is `e^{-λt}`.
//! Instead of a full prior density the caller supplies `m` confidence bounds
//! `Pr(ε_{i-1} < λ ≤ ε_i) = θ_i`. Every prior consistent with those bounds
//! yields a posterior mean; this module computes the infimum and supremum
//! of that set.
//!
//! * [`numeric`] optimizes the extremal discrete-prior objectives directly
//!   for any `m`.
//! * [`closed_form`] gives enclosing bounds in closed form for `m ∈ {2, 3}`
//!   with `ε_0 = 0` and `ε_m = ∞`.
//! * [`oracle`] is a brute-force grid reference used to validate both.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;

pub mod closed_form;
pub mod numeric;
pub mod oracle;

pub use closed_form::{closed_form_m2, closed_form_m3};
pub use numeric::{lower_numeric, upper_numeric};
pub use oracle::grid_oracle;

/// Largest supported number of confidence bounds.
pub const MAX_BOUNDS: usize = 10;

/// Deviation of `Σθ` from one that is silently renormalized.
const THETA_RENORMALIZE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BippError {
    #[error("invalid partial prior: {0}")]
    InvalidPrior(String),
    #[error("closed form needs m in {{2, 3}}, prior has m = {m}")]
    InvalidArity { m: usize },
    #[error("closed form needs epsilon_0 = 0 and epsilon_m = inf")]
    UnsupportedSupport,
}

/// Confidence bounds `Pr(ε_{i-1} < λ ≤ ε_i) = θ_i`, `i = 1..m`.
#[derive(Clone, Debug, PartialEq)]
pub struct PartialPrior<T> {
    epsilons: Vec<T>,
    thetas: Vec<T>,
}

impl<T: Scalar> PartialPrior<T> {
    /// `epsilons` holds `ε_0 < … < ε_m` (`ε_m` may be infinite), `thetas`
    /// holds `θ_1..θ_m`. Thetas within 1e-9 of summing to one are renormalized.
    pub fn new(epsilons: Vec<T>, thetas: Vec<T>) -> Result<Self, BippError> {
        let invalid = |msg: String| Err(BippError::InvalidPrior(msg));
        let m = thetas.len();
        if m < 2 || m > MAX_BOUNDS {
            return invalid(format!("need 2..={MAX_BOUNDS} bounds, got {m}"));
        }
        if epsilons.len() != m + 1 {
            return invalid(format!("{m} thetas need {} epsilons, got {}", m + 1, epsilons.len()));
        }
        if !(epsilons[0] >= T::zero()) || !epsilons[0].is_finite() {
            return invalid("epsilon_0 must be finite and non-negative".into());
        }
        if epsilons[..m].iter().any(|e| !e.is_finite()) {
            return invalid("only epsilon_m may be infinite".into());
        }
        if epsilons.windows(2).any(|w| !(w[0] < w[1])) {
            return invalid("epsilons must be strictly increasing".into());
        }
        if thetas.iter().any(|th| !(*th > T::zero()) || !th.is_finite()) {
            return invalid("every theta must be positive".into());
        }
        let sum = thetas.iter().fold(T::zero(), |a, b| a + *b);
        if (sum - T::one()).abs() > T::lit(THETA_RENORMALIZE_TOL) {
            return invalid(format!("thetas sum to {sum}, expected 1"));
        }
        let thetas = thetas.into_iter().map(|th| th / sum).collect();
        Ok(Self { epsilons, thetas })
    }

    /// Number of confidence bounds `m`.
    pub fn m(&self) -> usize {
        self.thetas.len()
    }

    pub fn epsilons(&self) -> &[T] {
        &self.epsilons
    }

    pub fn thetas(&self) -> &[T] {
        &self.thetas
    }

    pub fn epsilon(&self, i: usize) -> T {
        self.epsilons[i]
    }

    /// `θ_i` for `i = 1..=m`.
    pub fn theta(&self, i: usize) -> T {
        self.thetas[i - 1]
    }

    /// `ε_0 = 0` and `ε_m = ∞`, the support the closed forms assume.
    pub fn has_default_support(&self) -> bool {
        self.epsilons[0] == T::zero() && self.epsilons[self.m()].is_infinite()
    }

    /// Bounds on the prior mean alone (no observation).
    pub fn prior_only_bounds(&self) -> (T, T) {
        let lower = (1..=self.m()).fold(T::zero(), |acc, i| acc + self.theta(i) * self.epsilon(i - 1));
        let upper = (1..=self.m()).fold(T::zero(), |acc, i| acc + self.theta(i) * self.epsilon(i));
        (lower, upper)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BippMethod {
    ClosedForm,
    Numeric,
    Grid,
}

impl fmt::Display for BippMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BippMethod::ClosedForm => "closed_form",
            BippMethod::Numeric => "numeric",
            BippMethod::Grid => "grid",
        })
    }
}

/// Posterior rate bounds `[λ_l, λ_u]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BippBounds<T> {
    pub lower: T,
    pub upper: T,
    pub method: BippMethod,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Closed form when it applies, numeric otherwise.
    #[default]
    Auto,
    Numeric,
    ClosedForm,
}

/// Likelihood of observing no event during exposure `t` at rate `lambda`.
pub fn singular_likelihood<T: Scalar>(lambda: T, t: T) -> T {
    if t == T::zero() {
        T::one()
    } else {
        (-lambda * t).exp()
    }
}

/// Posterior mean of a discrete prior `(support point, mass)` after an
/// event-free exposure `t`.
///
/// Weights are shifted by the smallest support point so that large `λt`
/// does not underflow every term at once. Points at `+∞` carry zero
/// posterior weight when `t > 0`.
pub fn discrete_posterior_mean<T: Scalar>(points: &[(T, T)], t: T) -> T {
    let live = points.iter().filter(|(_, mass)| *mass > T::zero());
    if t == T::zero() {
        return live.fold(T::zero(), |acc, (x, w)| acc + *x * *w)
            / points.iter().fold(T::zero(), |acc, (_, w)| acc + *w);
    }
    let shift = points
        .iter()
        .filter(|(_, mass)| *mass > T::zero())
        .map(|(x, _)| *x)
        .fold(T::infinity(), T::min);
    let (mut num, mut den) = (T::zero(), T::zero());
    for (x, mass) in live {
        if x.is_infinite() {
            continue;
        }
        let w = *mass * (-(*x - shift) * t).exp();
        num = num + *x * w;
        den = den + w;
    }
    num / den
}

/// Posterior rate bounds with the requested strategy.
///
/// At `t = 0` the bounds are the prior-only bounds (likelihood ≡ 1).
pub fn bipp_bounds<T: Scalar>(
    prior: &PartialPrior<T>,
    t: T,
    strategy: Strategy,
) -> Result<BippBounds<T>, BippError> {
    let closed = || match prior.m() {
        2 => closed_form_m2(prior, t),
        3 => closed_form_m3(prior, t),
        m => Err(BippError::InvalidArity { m }),
    };
    match strategy {
        Strategy::ClosedForm => closed(),
        Strategy::Numeric => Ok(numeric_bounds(prior, t)),
        Strategy::Auto if prior.m() <= 3 && prior.has_default_support() => closed(),
        Strategy::Auto => Ok(numeric_bounds(prior, t)),
    }
}

pub fn numeric_bounds<T: Scalar>(prior: &PartialPrior<T>, t: T) -> BippBounds<T> {
    BippBounds {
        lower: lower_numeric(prior, t),
        upper: upper_numeric(prior, t),
        method: BippMethod::Numeric,
    }
}

/// JSON prior file: `{"epsilons":[0, 0.001, "inf"], "thetas":[0.3, 0.7]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PriorFile {
    pub epsilons: Vec<Epsilon>,
    pub thetas: Vec<f64>,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Epsilon {
    Finite(f64),
    Named(InfinityLiteral),
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub enum InfinityLiteral {
    #[serde(rename = "inf")]
    Inf,
}

impl PriorFile {
    pub fn from_prior(prior: &PartialPrior<f64>) -> Self {
        Self {
            epsilons: prior
                .epsilons()
                .iter()
                .map(|e| if e.is_infinite() { Epsilon::Named(InfinityLiteral::Inf) } else { Epsilon::Finite(*e) })
                .collect(),
            thetas: prior.thetas().to_vec(),
        }
    }

    pub fn into_prior<T: Scalar>(self) -> Result<PartialPrior<T>, BippError> {
        let epsilons = self
            .epsilons
            .into_iter()
            .map(|e| match e {
                Epsilon::Finite(v) => T::lit(v),
                Epsilon::Named(InfinityLiteral::Inf) => T::infinity(),
            })
            .collect();
        PartialPrior::new(epsilons, self.thetas.into_iter().map(T::lit).collect())
    }
}

impl<T: Scalar> std::str::FromStr for PartialPrior<T> {
    type Err = BippError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let file: PriorFile =
            serde_json::from_str(text).map_err(|e| BippError::InvalidPrior(e.to_string()))?;
        file.into_prior()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn prior(eps: &[f64], thetas: &[f64]) -> PartialPrior<f64> {
        PartialPrior::new(eps.to_vec(), thetas.to_vec()).unwrap()
    }

    #[test]
    fn singular_likelihood_values() {
        assert_eq!(singular_likelihood(0.0, 100.0), 1.0);
        assert_eq!(singular_likelihood(0.5, 0.0), 1.0);
        assert!((singular_likelihood(0.001f64, 1000.0) - 0.367_879_441_171_442_3).abs() < 1e-15);
        assert_eq!(singular_likelihood(f64::INFINITY, 0.0), 1.0);
        assert_eq!(singular_likelihood(f64::INFINITY, 1.0), 0.0);
    }

    #[test]
    fn prior_validation() {
        let inf = f64::INFINITY;
        assert!(PartialPrior::new(vec![0.0, 1.0], vec![1.0]).is_err());
        assert!(PartialPrior::new(vec![0.0, 2.0, 1.0], vec![0.5, 0.5]).is_err());
        assert!(PartialPrior::new(vec![0.0, 1.0, inf], vec![0.5, 0.6]).is_err());
        assert!(PartialPrior::new(vec![0.0, 1.0, inf], vec![0.0, 1.0]).is_err());
        assert!(PartialPrior::new(vec![0.0, inf, inf], vec![0.5, 0.5]).is_err());
        assert!(PartialPrior::new(vec![-1.0, 1.0, inf], vec![0.5, 0.5]).is_err());
        let eps: Vec<f64> = (0..=11).map(f64::from).collect();
        assert!(PartialPrior::new(eps, vec![1.0 / 11.0; 11]).is_err());
    }

    #[test]
    fn small_theta_rounding_is_renormalized() {
        let p = prior(&[0.0, 1.0, f64::INFINITY], &[0.3, 0.7 + 5e-10]);
        let sum: f64 = p.thetas().iter().sum();
        assert!((sum - 1.0).abs() < 1e-15);
    }

    #[test]
    fn prior_file_accepts_inf() {
        let p: PartialPrior<f64> = r#"{"epsilons":[0, 0.002, "inf"], "thetas":[0.3, 0.7]}"#.parse().unwrap();
        assert!(p.epsilon(2).is_infinite());
        assert!(r#"{"epsilons":[0, 0.002, "infinity"], "thetas":[0.3, 0.7]}"#.parse::<PartialPrior<f64>>().is_err());
        let text = serde_json::to_string(&PriorFile::from_prior(&p)).unwrap();
        assert_eq!(text.parse::<PartialPrior<f64>>().unwrap(), p);
    }

    #[test]
    fn discrete_posterior_mean_matches_direct_formula() {
        let pts: [(f64, f64); 3] = [(0.1, 0.2), (0.5, 0.5), (2.0, 0.3)];
        let t: f64 = 3.0;
        let num: f64 = pts.iter().map(|(x, w)| x * w * (-x * t).exp()).sum();
        let den: f64 = pts.iter().map(|(x, w)| w * (-x * t).exp()).sum();
        assert!((discrete_posterior_mean(&pts, t) - num / den).abs() < 1e-15);
        // Survives exponents that would underflow without the shift.
        let far = [(10.0f64, 0.5), (11.0, 0.5)];
        let v = discrete_posterior_mean(&far, 1000.0);
        assert!((v - 10.0).abs() < 1e-12);
    }

    #[test]
    fn dispatch_picks_method() {
        let m3 = prior(&[0.0, 0.001, 0.01, f64::INFINITY], &[0.3, 0.3, 0.4]);
        assert_eq!(bipp_bounds(&m3, 100.0, Strategy::Auto).unwrap().method, BippMethod::ClosedForm);
        let m5 = prior(&[0.0, 0.001, 0.002, 0.004, 0.01, f64::INFINITY], &[0.2; 5]);
        assert_eq!(bipp_bounds(&m5, 100.0, Strategy::Auto).unwrap().method, BippMethod::Numeric);
        assert_eq!(
            bipp_bounds(&m5, 100.0, Strategy::ClosedForm),
            Err(BippError::InvalidArity { m: 5 })
        );
        let bounded = prior(&[0.0, 0.001, 0.01, 1.0], &[0.3, 0.3, 0.4]);
        assert_eq!(bipp_bounds(&bounded, 100.0, Strategy::Auto).unwrap().method, BippMethod::Numeric);
    }

    #[test]
    fn zero_exposure_gives_prior_only_bounds() {
        let p = prior(&[0.0, 0.001, 0.01, f64::INFINITY], &[0.3, 0.3, 0.4]);
        for strategy in [Strategy::Auto, Strategy::Numeric] {
            let b = bipp_bounds(&p, 0.0, strategy).unwrap();
            assert!((b.lower - (0.3 * 0.001 + 0.4 * 0.01)).abs() < 1e-15);
            assert!(b.upper.is_infinite());
        }
    }
}
