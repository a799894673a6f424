//! Elementary symmetric polynomials of positive weights, in log space and in
//! extended-range arithmetic.

use crate::error::{Error, Result};
use crate::numeric::{logsumexp2, ExtFloat};

/// Table of log e_k(ρ_1, …, ρ_n) for k = 0..=K.
///
/// `log_e[0] = 0` always (e_0 = 1); when built untruncated, `log_e[n]`
/// equals Σ_m log ρ_m.
#[derive(Clone, Debug, PartialEq)]
pub struct EspTable {
    pub log_e: Vec<f64>,
}

impl EspTable {
    /// Largest k stored.
    pub fn k_max(&self) -> usize {
        self.log_e.len() - 1
    }
}

/// All elementary symmetric polynomials of exp(log_rhos).
pub fn esp_log(log_rhos: &[f64]) -> Result<EspTable> {
    esp_log_truncated(log_rhos, log_rhos.len())
}

/// e_k for k ≤ k_max only, at O(n·k_max) cost.
///
/// Newton's recurrence e_k ← e_k + ρ_m e_{k−1} run in log space through
/// log-sum-exp; every term is positive, so there is no cancellation.
pub fn esp_log_truncated(log_rhos: &[f64], k_max: usize) -> Result<EspTable> {
    if log_rhos.iter().any(|x| x.is_nan() || *x == f64::INFINITY) {
        return Err(Error::contract("esp weights must be finite logs or -inf"));
    }
    let k_max = k_max.min(log_rhos.len());
    let mut log_e = vec![f64::NEG_INFINITY; k_max + 1];
    log_e[0] = 0.0;
    for (m, &lr) in log_rhos.iter().enumerate() {
        let hi = k_max.min(m + 1);
        for k in (1..=hi).rev() {
            log_e[k] = logsumexp2(log_e[k], lr + log_e[k - 1]);
        }
    }
    Ok(EspTable { log_e })
}

/// Same recurrence carried in extended-range floats; used on hot paths where
/// a transcendental call per cell would dominate. Cross-checked against
/// [`esp_log`] in tests.
pub(crate) fn esp_ext(rhos: &[ExtFloat], k_max: usize) -> Vec<ExtFloat> {
    let k_max = k_max.min(rhos.len());
    let mut e = vec![ExtFloat::ZERO; k_max + 1];
    e[0] = ExtFloat::ONE;
    for (m, &r) in rhos.iter().enumerate() {
        let hi = k_max.min(m + 1);
        for k in (1..=hi).rev() {
            e[k] = e[k].add(r.mul(e[k - 1]));
        }
    }
    e
}

/// [`esp_ext`] skipping one index; the fallback when downdating cancels.
pub(crate) fn esp_ext_skipping(rhos: &[ExtFloat], skip: usize, k_max: usize) -> Vec<ExtFloat> {
    let k_max = k_max.min(rhos.len().saturating_sub(1));
    let mut e = vec![ExtFloat::ZERO; k_max + 1];
    e[0] = ExtFloat::ONE;
    let mut seen = 0usize;
    for (m, &r) in rhos.iter().enumerate() {
        if m == skip {
            continue;
        }
        seen += 1;
        let hi = k_max.min(seen);
        for k in (1..=hi).rev() {
            e[k] = e[k].add(r.mul(e[k - 1]));
        }
    }
    e
}
