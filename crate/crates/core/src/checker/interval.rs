//! Interval CTMC checking by corner enumeration.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::graph::forward;
use super::point::CompiledQuery;
use super::property::{Comparison, Property, Threshold};
use super::{CheckError, RewardSemantics};
use crate::ctmc::IntervalCtmc;
use crate::scalar::Scalar;

/// Largest number of interval-valued transitions enumerated as corners.
pub const MAX_CORNER_INTERVALS: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntervalMethod {
    Corners,
    /// Corners followed by `samples` uniformly drawn interior points.
    CornersPlusSampling { samples: usize, seed: u64 },
}

/// Range of a query over all rate instantiations evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValueInterval<T> {
    pub lo: T,
    pub hi: T,
    /// Corner instantiations evaluated.
    pub corners: usize,
    /// Interior samples evaluated.
    pub samples: usize,
    /// Samples whose value fell outside the corner range.
    pub escapes: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Satisfied,
    Violated,
    Indeterminate,
}

impl Verdict {
    /// Conservative reading: anything short of certain satisfaction fails.
    pub fn robust(self) -> Verdict {
        match self {
            Verdict::Indeterminate => Verdict::Violated,
            v => v,
        }
    }
}

/// Relative slack below which a sampled value is not counted as an escape.
const ESCAPE_SLACK: f64 = 1e-12;

/// Evaluates `property` over every corner of the rate box restricted to the
/// transitions reachable from the initial state.
pub fn check_interval<T: Scalar>(
    model: &IntervalCtmc<T>,
    property: &Property,
    semantics: RewardSemantics,
    method: IntervalMethod,
) -> Result<ValueInterval<T>, CheckError> {
    let n = model.state_count();
    let labels: Vec<_> = (0..n).map(|s| model.labels(crate::ctmc::StateId(s))).collect();
    let query = CompiledQuery::new(property, &labels, |name| model.reward(name), semantics)?;
    let init = model.initial().0;

    let upper = model.upper_rates();
    let reachable = forward(n, &upper, init);
    let entries: Vec<(usize, T, T)> = model
        .interval_entries()
        .into_iter()
        .filter(|(from, _)| reachable[from.0])
        .map(|(from, to)| {
            let r = model.rate(from, to);
            (from.0 * n + to.0, r.lo, r.hi)
        })
        .collect();
    let d = entries.len();
    if d > MAX_CORNER_INTERVALS {
        return Err(CheckError::TooManyIntervals { count: d, max: MAX_CORNER_INTERVALS });
    }

    let mut rates = model.lower_rates();
    let mut lo = T::infinity();
    let mut hi = T::neg_infinity();
    let corners = 1usize << d;
    for mask in 0..corners {
        for (k, &(idx, l, h)) in entries.iter().enumerate() {
            rates[idx] = if mask >> k & 1 == 1 { h } else { l };
        }
        let v = query.value_at(n, &rates, init)?;
        lo = lo.min(v);
        hi = hi.max(v);
    }

    let mut out = ValueInterval { lo, hi, corners, samples: 0, escapes: 0 };
    if let IntervalMethod::CornersPlusSampling { samples, seed } = method {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let slack = |x: T| T::lit(ESCAPE_SLACK) * x.abs().max(T::one());
        for _ in 0..samples {
            for &(idx, l, h) in &entries {
                let u = T::lit(rng.gen::<f64>());
                rates[idx] = (l + u * (h - l)).min(h);
            }
            let v = query.value_at(n, &rates, init)?;
            if v < out.lo - slack(out.lo) || v > out.hi + slack(out.hi) {
                out.escapes += 1;
            }
            out.lo = out.lo.min(v);
            out.hi = out.hi.max(v);
        }
        out.samples = samples;
    }
    Ok(out)
}

/// Whether every, none, or only some of the interval satisfies the threshold.
pub fn evaluate_threshold<T: Scalar>(interval: &ValueInterval<T>, threshold: Threshold) -> Verdict {
    let (lo, hi) = (interval.lo.as_f64(), interval.hi.as_f64());
    let all = |v: f64| threshold.cmp.holds(v, threshold.bound);
    let (best, worst) = match threshold.cmp {
        Comparison::Le | Comparison::Lt => (lo, hi),
        Comparison::Ge | Comparison::Gt => (hi, lo),
    };
    if all(worst) {
        Verdict::Satisfied
    } else if !all(best) {
        Verdict::Violated
    } else {
        Verdict::Indeterminate
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checker::check_point;
    use crate::ctmc::Ctmc;

    fn interval_race() -> IntervalCtmc<f64> {
        IntervalCtmc::builder(3).interval(0, 1, 1.0, 2.0).rate(0, 2, 3.0).label(1, "a").build().unwrap()
    }

    fn value(lo: f64, hi: f64) -> ValueInterval<f64> {
        ValueInterval { lo, hi, corners: 1, samples: 0, escapes: 0 }
    }

    #[test]
    fn race_interval() {
        let p = Property::prob_reach("a");
        let v = check_interval(&interval_race(), &p, RewardSemantics::Strict, IntervalMethod::Corners).unwrap();
        assert!((v.lo - 0.25).abs() < 1e-12 && (v.hi - 0.4).abs() < 1e-12);
        assert_eq!(v.corners, 2);
    }

    #[test]
    fn degenerate_intervals_match_point_model() {
        let point = Ctmc::<f64>::builder(3).rate(0, 1, 2.0).rate(0, 2, 3.0).label(1, "a").build().unwrap();
        let p = Property::prob_reach("a");
        let v = check_interval(&IntervalCtmc::from(&point), &p, RewardSemantics::Strict, IntervalMethod::Corners)
            .unwrap();
        let x = check_point(&point, &p, RewardSemantics::Strict).unwrap();
        assert_eq!((v.lo, v.hi, v.corners), (x, x, 1));
    }

    #[test]
    fn sampling_stays_inside_monotone_range() {
        let p = Property::prob_reach("a");
        let m = IntervalMethod::CornersPlusSampling { samples: 200, seed: 3 };
        let v = check_interval(&interval_race(), &p, RewardSemantics::Strict, m).unwrap();
        assert_eq!((v.samples, v.escapes), (200, 0));
    }

    #[test]
    fn unreachable_intervals_are_not_enumerated() {
        let m = IntervalCtmc::<f64>::builder(4)
            .rate(0, 1, 1.0)
            .interval(2, 3, 1.0, 2.0)
            .label(1, "a")
            .build()
            .unwrap();
        let v = check_interval(&m, &Property::prob_reach("a"), RewardSemantics::Strict, IntervalMethod::Corners)
            .unwrap();
        assert_eq!(v.corners, 1);
    }

    #[test]
    fn too_many_intervals() {
        let mut b = IntervalCtmc::<f64>::builder(23);
        for j in 1..23 {
            b = b.interval(0, j, 1.0, 2.0);
        }
        let m = b.label(1, "a").build().unwrap();
        let err = check_interval(&m, &Property::prob_reach("a"), RewardSemantics::Strict, IntervalMethod::Corners);
        assert_eq!(err, Err(CheckError::TooManyIntervals { count: 22, max: 20 }));
    }

    #[test]
    fn threshold_verdicts() {
        let le = Threshold { cmp: Comparison::Le, bound: 0.05 };
        assert_eq!(evaluate_threshold(&value(0.01, 0.03), le), Verdict::Satisfied);
        assert_eq!(evaluate_threshold(&value(0.04, 0.06), le), Verdict::Indeterminate);
        assert_eq!(evaluate_threshold(&value(0.06, 0.09), le), Verdict::Violated);
        assert_eq!(evaluate_threshold(&value(0.04, 0.06), le).robust(), Verdict::Violated);
        let gt = Threshold { cmp: Comparison::Gt, bound: 0.5 };
        assert_eq!(evaluate_threshold(&value(0.6, 0.7), gt), Verdict::Satisfied);
        assert_eq!(evaluate_threshold(&value(0.5, 0.7), gt), Verdict::Indeterminate);
        assert_eq!(evaluate_threshold(&value(0.1, 0.5), gt), Verdict::Violated);
    }
}
