//! Bounded one-dimensional search and coordinate-wise optimization.

use crate::scalar::Scalar;

const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Clone, Copy, Debug)]
pub struct SearchOptions {
    /// Stop when the bracket is narrower than `tol · max(|a|, |b|)`.
    pub rel_tol: f64,
    /// Absolute floor on the bracket width.
    pub abs_tol: f64,
    pub max_iter: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self { rel_tol: 1e-10, abs_tol: 1e-300, max_iter: 400 }
    }
}

/// Maximizes a unimodal `f` on `[lo, hi]` by golden-section search.
///
/// Both endpoints are evaluated as well, so monotone objectives return the
/// exact boundary. Returns `(argmax, max)`.
pub fn golden_max<T, F>(mut f: F, lo: T, hi: T, opts: SearchOptions) -> (T, T)
where
    T: Scalar,
    F: FnMut(T) -> T,
{
    debug_assert!(lo <= hi);
    let mut best = (lo, f(lo));
    let consider = |best: &mut (T, T), x: T, v: T| {
        if v > best.1 || best.1.is_nan() {
            *best = (x, v);
        }
    };
    if hi == lo {
        return best;
    }
    let fhi = f(hi);
    consider(&mut best, hi, fhi);

    let ratio = T::lit(INV_PHI);
    let (rel, abs) = (T::lit(opts.rel_tol), T::lit(opts.abs_tol));
    let (mut a, mut b) = (lo, hi);
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..opts.max_iter {
        if b - a <= (rel * a.abs().max(b.abs())).max(abs) {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d);
        }
    }
    consider(&mut best, c, fc);
    consider(&mut best, d, fd);
    best
}

/// Minimizing counterpart of [`golden_max`].
pub fn golden_min<T, F>(mut f: F, lo: T, hi: T, opts: SearchOptions) -> (T, T)
where
    T: Scalar,
    F: FnMut(T) -> T,
{
    let (x, v) = golden_max(|x| -f(x), lo, hi, opts);
    (x, -v)
}

/// Per-coordinate search box. `hi = None` marks a coordinate unbounded above.
/// With a positive `step` the search bracket is grown geometrically from `lo`
/// until the objective stops improving (capped at `hi`), so a narrow peak
/// near `lo` is not lost on a long, numerically flat tail.
#[derive(Clone, Copy, Debug)]
pub struct Bounds<T> {
    pub lo: T,
    pub hi: Option<T>,
    pub step: T,
}

/// Cyclic coordinate ascent with golden-section line searches.
///
/// Sweeps until a full cycle improves the objective by less than
/// `sweep_tol` (relative) or `max_sweeps` is reached. The objective must be
/// unimodal along every coordinate. Returns the final point and value.
pub fn coordinate_ascent<T, F>(
    mut f: F,
    bounds: &[Bounds<T>],
    start: Vec<T>,
    opts: SearchOptions,
    max_sweeps: usize,
) -> (Vec<T>, T)
where
    T: Scalar,
    F: FnMut(&[T]) -> T,
{
    let mut x = start;
    let mut value = f(&x);
    let sweep_tol = T::lit(1e-15);
    for _ in 0..max_sweeps {
        let before = value;
        for i in 0..x.len() {
            let mut along = |v: T| {
                let saved = x[i];
                x[i] = v;
                let out = f(&x);
                x[i] = saved;
                out
            };
            let b = bounds[i];
            let hi = if b.step > T::zero() || b.hi.is_none() {
                grow_bracket(&mut along, b.lo, b.step, b.hi)
            } else {
                b.hi.unwrap()
            };
            let (arg, v) = golden_max(&mut along, b.lo, hi, opts);
            if v >= value {
                x[i] = arg;
                value = v;
            }
        }
        if value - before <= sweep_tol * value.abs() {
            break;
        }
    }
    (x, value)
}

/// Upper end of a bracket `[lo, hi]` containing the maximum of a function
/// that is unimodal on `[lo, cap]`.
fn grow_bracket<T: Scalar, F: FnMut(T) -> T>(f: &mut F, lo: T, step: T, cap: Option<T>) -> T {
    let two = T::lit(2.0);
    let mut offset = step;
    let mut prev = f(lo);
    for _ in 0..2000 {
        let probe = lo + offset;
        if let Some(cap) = cap {
            if probe >= cap {
                return cap;
            }
        }
        let v = f(probe);
        if !(v > prev) || !probe.is_finite() {
            return probe;
        }
        prev = v;
        offset = offset * two;
    }
    cap.unwrap_or(lo + offset)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_interior_maximum() {
        let (x, v) = golden_max(|x: f64| -(x - 0.3).powi(2), 0.0, 1.0, SearchOptions::default());
        assert!((x - 0.3).abs() < 1e-8);
        assert!(v.abs() < 1e-15);
    }

    #[test]
    fn monotone_objective_returns_exact_endpoint() {
        let (x, _) = golden_max(|x: f64| x, 0.0, 1.0, SearchOptions::default());
        assert_eq!(x, 1.0);
        let (x, _) = golden_min(|x: f64| x, 0.0, 1.0, SearchOptions::default());
        assert_eq!(x, 0.0);
    }

    #[test]
    fn unbounded_coordinate_is_bracketed() {
        // x e^{-x} peaks at 1.
        let bounds = [Bounds { lo: 0.0, hi: None, step: 0.01 }];
        let (x, _) = coordinate_ascent(|p: &[f64]| p[0] * (-p[0]).exp(), &bounds, vec![0.0], SearchOptions::default(), 50);
        assert!((x[0] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn narrow_peak_before_a_flat_tail() {
        // Peak at 1e-3 on [0, 2], flat up to rounding beyond a few 1e-3.
        let f = |p: &[f64]| 1.0 + p[0] * (-p[0] * 1e3).exp();
        let bounds = [Bounds { lo: 0.0, hi: Some(2.0), step: 1e-4 }];
        let (x, v) = coordinate_ascent(f, &bounds, vec![2.0], SearchOptions::default(), 50);
        assert!((x[0] - 1e-3).abs() < 1e-7 && v > 1.00036, "{x:?} {v}");
    }

    #[test]
    fn coordinate_ascent_on_separable_concave() {
        let bounds = [
            Bounds { lo: -1.0, hi: Some(1.0), step: 0.0 },
            Bounds { lo: -1.0, hi: Some(1.0), step: 0.0 },
        ];
        let f = |p: &[f64]| -(p[0] - 0.2).powi(2) - (p[1] + 0.4).powi(2) - 0.1 * p[0] * p[1];
        let (x, _) = coordinate_ascent(f, &bounds, vec![0.0, 0.0], SearchOptions::default(), 200);
        // Stationary point: [2 0.1; 0.1 2] x = [0.4, -0.8].
        let (a, b, c, d) = (2.0, 0.1, 0.1, 2.0);
        let (r0, r1) = (0.4, -0.8);
        let s0 = (r0 * d - b * r1) / (a * d - b * c);
        let s1 = (a * r1 - c * r0) / (a * d - b * c);
        assert!((x[0] - s0).abs() < 1e-6 && (x[1] - s1).abs() < 1e-6, "{x:?}");
    }
}
