//! Posterior over parameter assignments by literal enumeration of all n!
//! permutations. The factorial wall makes this the ground-truth engine for
//! desk-scale cross-checks only.

use crate::error::{Error, Result};
use crate::families::{LogLikelihoodMatrix, ParameterMultiset};
use crate::oracles::EstimateVector;

/// Hard capacity wall for permutation enumeration (n! weights).
pub const MAX_ENUMERATION_N: usize = 8;

/// Posterior-mean parameter estimates under a uniform prior over assignments.
///
/// Each permutation π carries weight ∝ Π_i f_{μ_{π(i)}}(y_i); the estimate
/// for observation i is the weight-averaged μ_{π(i)}. Weights are normalized
/// by max-shifted exponentiation of their logs.
pub fn enumerate_posterior(
    loglik: &LogLikelihoodMatrix,
    mus: &ParameterMultiset,
) -> Result<EstimateVector> {
    let n = loglik.n();
    if mus.n() != n {
        return Err(Error::contract("multiset size must match matrix size"));
    }
    if n > MAX_ENUMERATION_N {
        return Err(Error::capacity(format!(
            "enumeration capacity is n ≤ {MAX_ENUMERATION_N}, got {n}"
        )));
    }
    if mus.all_equal() {
        // Point-mass posterior: every assignment gives the same labels.
        return Ok(EstimateVector::new(vec![mus.min(); n]));
    }

    let order = loglik.canonical_row_order();
    let ll = loglik.permuted_rows(&order);

    // Pass 1: the max log-weight for stable exponentiation.
    let mut max_lw = f64::NEG_INFINITY;
    for_each_permutation(n, |perm| {
        let mut lw = 0.0;
        for (i, &j) in perm.iter().enumerate() {
            lw += ll.at(i, j);
        }
        if lw > max_lw {
            max_lw = lw;
        }
    });

    // Pass 2: normalizer and per-coordinate numerators, visited in the same
    // deterministic permutation order.
    let mut z = 0.0;
    let mut numer = vec![0.0f64; n];
    let values = mus.values();
    for_each_permutation(n, |perm| {
        let mut lw = 0.0;
        for (i, &j) in perm.iter().enumerate() {
            lw += ll.at(i, j);
        }
        let w = (lw - max_lw).exp();
        z += w;
        for (i, &j) in perm.iter().enumerate() {
            numer[i] += w * values[j];
        }
    });

    let mut out = vec![0.0f64; n];
    for (sorted_pos, &orig) in order.iter().enumerate() {
        out[orig] = numer[sorted_pos] / z;
    }
    Ok(EstimateVector::new(out))
}

/// Heap's algorithm, iterative, visiting permutations of 0..n in a fixed
/// deterministic order.
fn for_each_permutation(n: usize, mut f: impl FnMut(&[usize])) {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    f(&perm);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            f(&perm);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}
