//! Graph precomputation on dense rate matrices.

use crate::scalar::Scalar;

/// States reachable from `from` along positive rates.
pub(crate) fn forward<T: Scalar>(n: usize, rates: &[T], from: usize) -> Vec<bool> {
    let mut seen = vec![false; n];
    let mut stack = vec![from];
    seen[from] = true;
    while let Some(s) = stack.pop() {
        for (j, r) in rates[s * n..(s + 1) * n].iter().enumerate() {
            if *r > T::zero() && !seen[j] {
                seen[j] = true;
                stack.push(j);
            }
        }
    }
    seen
}

/// Seed states plus every state in `through` with a path into the seeds
/// that stays inside `through`.
pub(crate) fn backward<T: Scalar>(n: usize, rates: &[T], seeds: &[bool], through: &[bool]) -> Vec<bool> {
    let mut hit = seeds.to_vec();
    let mut frontier: Vec<usize> = (0..n).filter(|&s| seeds[s]).collect();
    while let Some(j) = frontier.pop() {
        for s in 0..n {
            if !hit[s] && through[s] && rates[s * n + j] > T::zero() {
                hit[s] = true;
                frontier.push(s);
            }
        }
    }
    hit
}

/// Partition into states that reach `target` (moving only through
/// `guard`) with probability 0 and with probability 1.
pub(crate) fn prob01<T: Scalar>(n: usize, rates: &[T], guard: &[bool], target: &[bool]) -> (Vec<bool>, Vec<bool>) {
    let transient: Vec<bool> = (0..n).map(|s| guard[s] && !target[s]).collect();
    let reach = backward(n, rates, target, &transient);
    let no: Vec<bool> = reach.iter().map(|r| !r).collect();
    let escape = backward(n, rates, &no, &transient);
    let yes = escape.iter().map(|e| !e).collect();
    (no, yes)
}
