//! Direct optimization of the extremal discrete-prior objectives.
//!
//! The supremum is attained by an `m`-point prior with mass `θ_i` at some
//! `λ_i ∈ (ε_{i-1}, ε_i]`; the infimum by an `(m+1)`-point prior on the
//! `ε_i` themselves whose masses are split by `x ∈ [0, 1]^m`. Both
//! objectives are unimodal along every coordinate, and a coordinate-wise
//! optimum of a ratio of this form is global, so cyclic golden-section
//! search converges to the true extremum.

use super::{discrete_posterior_mean, PartialPrior};
use crate::optim::{coordinate_ascent, Bounds, SearchOptions};
use crate::scalar::Scalar;

const MAX_SWEEPS: usize = 200;

/// Relative offset used to stay inside the open lower end of `(ε_{i-1}, ε_i]`.
pub(crate) const OPEN_END_OFFSET: f64 = 1e-12;

fn search_options() -> SearchOptions {
    SearchOptions { rel_tol: 1e-10, ..SearchOptions::default() }
}

/// Smallest admissible value of `λ_i` in `(ε_{i-1}, ε_i]`.
pub(crate) fn open_lower_end<T: Scalar>(prior: &PartialPrior<T>, i: usize) -> T {
    let (a, b) = (prior.epsilon(i - 1), prior.epsilon(i));
    if b.is_infinite() {
        let bump = if a > T::zero() { a } else { T::one() };
        a + T::lit(OPEN_END_OFFSET) * bump
    } else {
        a + T::lit(OPEN_END_OFFSET) * (b - a)
    }
}

/// Posterior mean of the `m`-point prior with mass `θ_i` at `lambdas[i-1]`.
pub fn upper_objective<T: Scalar>(prior: &PartialPrior<T>, lambdas: &[T], t: T) -> T {
    let points: Vec<(T, T)> = lambdas.iter().copied().zip(prior.thetas().iter().copied()).collect();
    discrete_posterior_mean(&points, t)
}

/// Support and masses of the `(m+1)`-point prior parameterized by `x`.
pub fn lower_points<T: Scalar>(prior: &PartialPrior<T>, x: &[T]) -> Vec<(T, T)> {
    let m = prior.m();
    let mut points = Vec::with_capacity(m + 1);
    points.push((prior.epsilon(0), x[0] * prior.theta(1)));
    for i in 1..m {
        let mass = (T::one() - x[i - 1]) * prior.theta(i) + x[i] * prior.theta(i + 1);
        points.push((prior.epsilon(i), mass));
    }
    points.push((prior.epsilon(m), (T::one() - x[m - 1]) * prior.theta(m)));
    points
}

pub fn lower_objective<T: Scalar>(prior: &PartialPrior<T>, x: &[T], t: T) -> T {
    discrete_posterior_mean(&lower_points(prior, x), t)
}

/// Supremum of the posterior mean over all priors consistent with `prior`.
pub fn upper_numeric<T: Scalar>(prior: &PartialPrior<T>, t: T) -> T {
    if t == T::zero() {
        return prior.prior_only_bounds().1;
    }
    let m = prior.m();
    let bounds: Vec<Bounds<T>> = (1..=m)
        .map(|i| {
            let hi = prior.epsilon(i);
            Bounds {
                lo: open_lower_end(prior, i),
                hi: hi.is_finite().then_some(hi),
                step: T::one() / t,
            }
        })
        .collect();
    let start = (1..=m)
        .map(|i| {
            let hi = prior.epsilon(i);
            if hi.is_finite() {
                hi
            } else {
                prior.epsilon(i - 1) + T::one() / t
            }
        })
        .collect();
    let (_, value) = coordinate_ascent(
        |lambdas: &[T]| upper_objective(prior, lambdas, t),
        &bounds,
        start,
        search_options(),
        MAX_SWEEPS,
    );
    value
}

/// Infimum of the posterior mean over all priors consistent with `prior`.
pub fn lower_numeric<T: Scalar>(prior: &PartialPrior<T>, t: T) -> T {
    if t == T::zero() {
        return prior.prior_only_bounds().0;
    }
    let m = prior.m();
    let bounds = vec![Bounds { lo: T::zero(), hi: Some(T::one()), step: T::zero() }; m];
    let (_, neg) = coordinate_ascent(
        |x: &[T]| -lower_objective(prior, x, t),
        &bounds,
        vec![T::one(); m],
        search_options(),
        MAX_SWEEPS,
    );
    -neg
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bipp::tests::prior;

    const INF: f64 = f64::INFINITY;

    #[test]
    fn m2_plateau_and_zero_lower() {
        let p = prior(&[0.0, 1.0 / 500.0, INF], &[0.3, 0.7]);
        // The plateau ε1/θ1 belongs to the enclosing closed form; the exact
        // supremum sits below it.
        let up = upper_numeric(&p, 1000.0);
        assert!(up > 1.0 / 500.0 && up <= 1.0 / 150.0, "{up}");
        for t in [1.0, 100.0, 1e4, 1e7] {
            assert_eq!(lower_numeric(&p, t), 0.0);
        }
    }

    #[test]
    fn top_interval_optimum_is_shifted_by_inverse_exposure() {
        // With λ_1 pinned near zero weight, the top point sits at r* + 1/t.
        let p = prior(&[0.0, 1e-6, INF], &[0.5, 0.5]);
        let t = 10.0;
        let up = upper_numeric(&p, t);
        let lambdas = [1e-6, up + 1.0 / t];
        assert!((upper_objective(&p, &lambdas, t) - up).abs() < 1e-9 * up);
    }

    #[test]
    fn numeric_sup_tends_to_first_bound() {
        let p = prior(&[0.0, 1.0 / 5000.0, 1.0 / 1000.0, INF], &[0.1, 0.1, 0.8]);
        let eps1 = 1.0 / 5000.0;
        let up = upper_numeric(&p, 1e8);
        assert!(up >= eps1 * (1.0 - 1e-9) && up < eps1 * 1.001, "{up}");
    }

    #[test]
    fn all_ones_vertex_bounds_the_infimum() {
        let p = prior(&[0.0, 0.01, 0.1, INF], &[0.2, 0.5, 0.3]);
        for t in [0.5, 10.0, 300.0] {
            let at_ones = lower_objective(&p, &[1.0, 1.0, 1.0], t);
            assert!(lower_numeric(&p, t) <= at_ones + 1e-15);
        }
    }

    #[test]
    fn finite_top_bound_is_respected() {
        let p = prior(&[0.1, 0.2, 0.5, 0.9], &[0.2, 0.3, 0.5]);
        for t in [0.01, 1.0, 100.0] {
            let (lo, hi) = (lower_numeric(&p, t), upper_numeric(&p, t));
            assert!(0.1 <= lo && lo <= hi && hi <= 0.9, "{lo} {hi}");
        }
    }
}
