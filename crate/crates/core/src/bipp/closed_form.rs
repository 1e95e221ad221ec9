//! Closed-form enclosing bounds for three and two confidence bounds.
//!
//! Both forms assume `ε_0 = 0` and `ε_m = ∞`. The upper bound has three
//! regimes separated by `t = 1/ε_2` and `t = 1/ε_1`; every term is divided
//! through by `l(ε_1)` so that large exposures do not underflow.

use super::{BippBounds, BippError, BippMethod, PartialPrior};
use crate::scalar::Scalar;

/// Bounds for `m = 3`.
pub fn closed_form_m3<T: Scalar>(prior: &PartialPrior<T>, t: T) -> Result<BippBounds<T>, BippError> {
    if prior.m() != 3 {
        return Err(BippError::InvalidArity { m: prior.m() });
    }
    if !prior.has_default_support() {
        return Err(BippError::UnsupportedSupport);
    }
    let (e1, e2) = (prior.epsilon(1), prior.epsilon(2));
    let (th1, th2, th3) = (prior.theta(1), prior.theta(2), prior.theta(3));
    Ok(three_point(e1, e2, th1, th2, th3, t))
}

/// Bounds for `m = 2`, obtained from the three-bound form with `ε_2 = ε_1`
/// and an empty middle band.
pub fn closed_form_m2<T: Scalar>(prior: &PartialPrior<T>, t: T) -> Result<BippBounds<T>, BippError> {
    if prior.m() != 2 {
        return Err(BippError::InvalidArity { m: prior.m() });
    }
    if !prior.has_default_support() {
        return Err(BippError::UnsupportedSupport);
    }
    let e1 = prior.epsilon(1);
    Ok(three_point(e1, e1, prior.theta(1), T::zero(), prior.theta(2), t))
}

fn three_point<T: Scalar>(e1: T, e2: T, th1: T, th2: T, th3: T, t: T) -> BippBounds<T> {
    let method = BippMethod::ClosedForm;
    if t == T::zero() {
        // Likelihood is flat: the prior mean ranges over the bands.
        return BippBounds { lower: th2 * e1 + th3 * e2, upper: T::infinity(), method };
    }
    let one = T::one();
    // l(x) / l(ε_1)
    let rel = |x: T| (-(x - e1) * t).exp();
    let l1 = (-e1 * t).exp();
    let l2 = (-e2 * t).exp();

    let numerator = if t * e2 < one {
        e1 * th1 + e2 * rel(e2) * th2 + (one / t) * (e1 * t - one).exp() * th3
    } else if t * e1 <= one {
        e1 * th1 + (one / t) * (e1 * t - one).exp() * th2 + e2 * rel(e2) * th3
    } else {
        e1 * (th1 + th2) + e2 * rel(e2) * th3
    };
    let upper = numerator / th1;

    let a = e1 * l1 * th2 / (th1 + l1 * th2);
    let b = e2 * l2 * th2 / (th1 + l2 * th2);
    BippBounds { lower: a.min(b), upper, method }
}

/// Exposures at which the upper bound changes regime, `(1/ε_2, 1/ε_1)`.
pub fn switch_points<T: Scalar>(prior: &PartialPrior<T>) -> Vec<T> {
    (1..prior.m())
        .rev()
        .map(|i| T::one() / prior.epsilon(i))
        .filter(|t| t.is_finite())
        .collect()
}
