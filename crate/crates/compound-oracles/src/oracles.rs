//! The two oracle rules for a known parameter multiset.
//!
//! The simple symmetric rule estimates each coordinate from its own
//! observation alone; the permutation-invariant rule conditions on the whole
//! sample. Three interchangeable engines compute the latter: permutation
//! enumeration (ground truth, n ≤ 8), permanental minors (n ≤ 17), and an
//! elementary-symmetric-polynomial recursion for two-valued multisets (any n).
//!
//! All engines canonicalize observation order internally, so outputs are
//! exactly equivariant under permutation of the observations. Estimates are
//! clamped into [min μ, max μ]: the posterior mean lies there by
//! construction, and the clamp removes one-ulp rounding excursions.

use crate::error::{Error, Result};
use crate::exact::{
    enumerate_posterior, esp_ext, esp_ext_skipping, permanental_minors_log, MAX_MINORS_N,
};
use crate::families::{Family, LogLikelihoodMatrix, ParameterMultiset};
use crate::numeric::ExtFloat;

/// Estimates aligned with the observations: `values[i]` estimates the
/// parameter carried by observation i.
#[derive(Clone, Debug, PartialEq)]
pub struct EstimateVector {
    values: Vec<f64>,
}

impl EstimateVector {
    pub fn new(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Posterior weights p_j(y_i) = f_j(y_i) / Σ_k f_k(y_i); rows sum to one.
#[derive(Clone, Debug)]
pub struct WeightMatrix {
    n: usize,
    p: Vec<f64>,
}

impl WeightMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.p[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.p[i * self.n..(i + 1) * self.n]
    }
}

/// A two-valued multiset: K coordinates carry `mu1`, n−K carry `mu0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoValuedSpec {
    pub n: usize,
    pub k: usize,
    pub mu0: f64,
    pub mu1: f64,
}

impl TwoValuedSpec {
    pub fn new(n: usize, k: usize, mu0: f64, mu1: f64) -> Result<Self> {
        if n == 0 || k > n {
            return Err(Error::contract(format!(
                "two-valued spec needs 0 ≤ K ≤ n with n ≥ 1, got K={k}, n={n}"
            )));
        }
        if !mu0.is_finite() || !mu1.is_finite() {
            return Err(Error::domain("two-valued labels must be finite"));
        }
        Ok(Self { n, k, mu0, mu1 })
    }

    /// Reads K and the labels off a multiset with at most two distinct
    /// values (`mu0` = smaller, `mu1` = larger, K = multiplicity of `mu1`).
    pub fn from_multiset(mus: &ParameterMultiset) -> Result<Self> {
        let distinct = mus.distinct();
        match distinct.len() {
            1 => Self::new(mus.n(), mus.n(), distinct[0], distinct[0]),
            2 => {
                let k = mus.values().iter().filter(|&&v| v == distinct[1]).count();
                Self::new(mus.n(), k, distinct[0], distinct[1])
            }
            d => Err(Error::contract(format!(
                "two-valued engine needs at most 2 distinct parameter values, got {d}"
            ))),
        }
    }

    /// Expands back into the multiset this spec describes.
    pub fn to_multiset(&self) -> Result<ParameterMultiset> {
        let mut v = vec![self.mu0; self.n - self.k];
        v.extend(std::iter::repeat(self.mu1).take(self.k));
        ParameterMultiset::new(v)
    }
}

/// log f_{μ1}(y_m) − log f_{μ0}(y_m) for every observation.
pub fn two_valued_log_ratios(
    family: &Family,
    spec: &TwoValuedSpec,
    ys: &[f64],
) -> Result<Vec<f64>> {
    ys.iter()
        .map(|&y| Ok(family.log_density(spec.mu1, y)? - family.log_density(spec.mu0, y)?))
        .collect()
}

fn clamp_into(mut values: Vec<f64>, lo: f64, hi: f64) -> Vec<f64> {
    for v in &mut values {
        *v = v.clamp(lo, hi);
    }
    values
}

/// Row-wise softmax of the log-likelihood matrix.
pub fn weights(loglik: &LogLikelihoodMatrix) -> WeightMatrix {
    let n = loglik.n();
    let mut p = Vec::with_capacity(n * n);
    for i in 0..n {
        let row = loglik.row(i);
        let mx = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let start = p.len();
        let mut z = 0.0;
        for &l in row {
            let w = (l - mx).exp();
            z += w;
            p.push(w);
        }
        for w in &mut p[start..] {
            *w /= z;
        }
    }
    WeightMatrix { n, p }
}

/// The best simple symmetric rule: μ̂_i = Σ_j μ_j p_j(y_i).
///
/// Each coordinate depends on its own observation only.
pub fn simple_rule(
    loglik: &LogLikelihoodMatrix,
    mus: &ParameterMultiset,
) -> Result<EstimateVector> {
    let n = loglik.n();
    if mus.n() != n {
        return Err(Error::contract("multiset size must match matrix size"));
    }
    if mus.all_equal() {
        return Ok(EstimateVector::new(vec![mus.min(); n]));
    }
    let values = mus.values();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let row = loglik.row(i);
        let mx = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut z = 0.0;
        let mut numer = 0.0;
        for (j, &l) in row.iter().enumerate() {
            let w = (l - mx).exp();
            z += w;
            numer += w * values[j];
        }
        out.push(numer / z);
    }
    Ok(EstimateVector::new(clamp_into(out, mus.min(), mus.max())))
}

/// Permutation-invariant rule by full enumeration (ground truth, n ≤ 8).
pub fn pi_rule_enum(
    loglik: &LogLikelihoodMatrix,
    mus: &ParameterMultiset,
) -> Result<EstimateVector> {
    let est = enumerate_posterior(loglik, mus)?;
    Ok(EstimateVector::new(clamp_into(
        est.values().to_vec(),
        mus.min(),
        mus.max(),
    )))
}

/// Permutation-invariant rule through permanental minors.
///
/// μ̂_i ∝ Σ_j μ_j f_j(y_i) · perm(minor(i, j)); the (n−1)! normalizations of
/// the leave-one-out marginals cancel in the ratio and are never formed.
pub fn pi_rule_permanent(
    loglik: &LogLikelihoodMatrix,
    mus: &ParameterMultiset,
) -> Result<EstimateVector> {
    pi_rule_permanent_inner(loglik, mus, 0.0)
}

/// Backend of [`pi_rule_permanent`] with a test-only fault hook:
/// `fault_log_bump` is added to one minor so validation harnesses can prove
/// they detect a broken engine.
pub(crate) fn pi_rule_permanent_inner(
    loglik: &LogLikelihoodMatrix,
    mus: &ParameterMultiset,
    fault_log_bump: f64,
) -> Result<EstimateVector> {
    let n = loglik.n();
    if mus.n() != n {
        return Err(Error::contract("multiset size must match matrix size"));
    }
    if n < 2 || n > MAX_MINORS_N {
        return Err(Error::capacity(format!(
            "permanent engine handles 2 ≤ n ≤ {MAX_MINORS_N}, got {n}"
        )));
    }
    if mus.all_equal() {
        return Ok(EstimateVector::new(vec![mus.min(); n]));
    }

    let order = loglik.canonical_row_order();
    let ll = loglik.permuted_rows(&order);
    let minors = permanental_minors_log(&ll)?;
    let values = mus.values();

    let mut sorted_out = vec![0.0f64; n];
    for i in 0..n {
        let mut log_terms = Vec::with_capacity(n);
        for j in 0..n {
            let mut m = minors.at(i, j);
            if i == 0 && j == 0 {
                m.log_abs += fault_log_bump;
            }
            if m.sign < 0 {
                return Err(Error::Numeric(
                    "permanental minor lost all precision".into(),
                ));
            }
            let lt = if m.sign == 0 {
                f64::NEG_INFINITY
            } else {
                ll.at(i, j) + m.log_abs
            };
            log_terms.push(lt);
        }
        let mx = log_terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut z = 0.0;
        let mut numer = 0.0;
        for (j, &lt) in log_terms.iter().enumerate() {
            let w = (lt - mx).exp();
            z += w;
            numer += w * values[j];
        }
        sorted_out[i] = numer / z;
    }

    let mut out = vec![0.0f64; n];
    for (sorted_pos, &orig) in order.iter().enumerate() {
        out[orig] = sorted_out[sorted_pos];
    }
    Ok(EstimateVector::new(clamp_into(out, mus.min(), mus.max())))
}

/// Binary digits of cancellation tolerated in a single leave-one-out
/// downdating step before abandoning the direction
/// (20 bits ≈ 6 decimal digits).
const DOWNDATE_CANCEL_BITS: i64 = 20;

/// Error budget for the downdated values actually used, in bits above one
/// ulp: 2^22 · ε ≈ 1e−9. Cancellation compounds across steps, so the
/// single-step monitor alone is not enough.
const DOWNDATE_ERR_BITS: f64 = 22.0;

/// Headroom subtracted from the budget for the floor/ceiling approximations
/// in the exponent-only error bound.
const DOWNDATE_ERR_SLACK: f64 = 2.0;

/// Leave-one-out values e_{K−1}(ρ₋ᵢ), e_K(ρ₋ᵢ) by the upward downdating
/// recurrence e_t(ρ₋ᵢ) = e_t(ρ) − ρᵢ e_{t−1}(ρ₋ᵢ), t = 1..K. Stable when
/// ρᵢ is small against the table's marginal ratios; `None` when the error
/// bound says otherwise.
///
/// The forward error of e_K(ρ₋ᵢ) is Σ_t of per-step rounding amplified by
/// ρᵢ^{K−t} e_t(ρ₋ᵢ)/e_K(ρ₋ᵢ); the bound tracks the max of the numerator's
/// exponent over t (plus a term count), using floor exponents only, so the
/// hot loop stays free of divisions.
fn loo_upward(
    e: &[ExtFloat],
    rho_i: ExtFloat,
    log2_rho: f64,
    k: usize,
    buf: &mut [ExtFloat],
) -> Option<(ExtFloat, ExtFloat)> {
    buf[0] = ExtFloat::ONE;
    // max over t of log2(loo[t]) - t*log2(rho), floor-approximated.
    let mut max_g = 0.0f64;
    let mut max_g_km1 = 0.0f64;
    for t in 1..=k {
        let (res, lost) = e[t].sub_prod_monitored(rho_i, buf[t - 1]);
        if lost > DOWNDATE_CANCEL_BITS {
            return None;
        }
        buf[t] = res;
        if t < k {
            let g = res.exp2_floor() as f64 - t as f64 * log2_rho;
            if t == k - 1 {
                max_g_km1 = max_g;
            }
            if g > max_g {
                max_g = g;
            }
        }
    }
    let budget = DOWNDATE_ERR_BITS - DOWNDATE_ERR_SLACK - ((k + 1) as f64).log2();
    let bits_k = k as f64 * log2_rho + max_g - buf[k].exp2_floor() as f64;
    let bits_km1 = (k - 1) as f64 * log2_rho + max_g_km1 - buf[k - 1].exp2_floor() as f64;
    if bits_k > budget || bits_km1 > budget {
        return None;
    }
    Some((buf[k - 1], buf[k]))
}

/// The same pair by the downward form of the recurrence,
/// e_t(ρ₋ᵢ) = (e_{t+1}(ρ) − e_{t+1}(ρ₋ᵢ)) / ρᵢ, started exactly at
/// e_{n−1}(ρ₋ᵢ) = e_n(ρ)/ρᵢ. Stable exactly where the upward form is not
/// (the per-step error amplifications are reciprocal). Error bound mirrors
/// [`loo_upward`] with the sign of the ρ exponent flipped.
fn loo_downward(
    e_full: &[ExtFloat],
    rho_i: ExtFloat,
    log2_rho: f64,
    k: usize,
    n: usize,
) -> Option<(ExtFloat, ExtFloat)> {
    debug_assert!(!rho_i.is_zero() && k >= 1 && k <= n - 1);
    let inv_rho = ExtFloat::ONE.div(rho_i);
    // cur = e_t(rho_{-i}), starting at t = n-1.
    let mut cur = e_full[n].mul(inv_rho);
    // Noise injected at step t reaches step k amplified by
    // loo[t] / (ρ^{t−k} loo[k]); track max over t of
    // g(t) = log2(loo[t]) − t·log2(ρ), floor-approximated.
    let mut max_g = cur.exp2_floor() as f64 - (n - 1) as f64 * log2_rho;
    let mut at_k = ExtFloat::ZERO;
    let mut max_g_k = 0.0f64;
    if n - 1 == k {
        at_k = cur;
        max_g_k = max_g;
    }
    for t in (k..n - 1).rev() {
        let (pre, lost) = e_full[t + 1].sub_monitored(cur);
        if lost > DOWNDATE_CANCEL_BITS {
            return None;
        }
        cur = pre.mul(inv_rho);
        let g = cur.exp2_floor() as f64 - t as f64 * log2_rho;
        if g > max_g {
            max_g = g;
        }
        if t == k {
            at_k = cur;
            max_g_k = max_g;
        }
    }
    // One more step from k down to k-1.
    let (pre, lost) = e_full[k].sub_monitored(cur);
    if lost > DOWNDATE_CANCEL_BITS {
        return None;
    }
    let at_km1 = pre.mul(inv_rho);
    let g = at_km1.exp2_floor() as f64 - (k - 1) as f64 * log2_rho;
    if g > max_g {
        max_g = g;
    }
    let budget = DOWNDATE_ERR_BITS - DOWNDATE_ERR_SLACK - ((n - k + 1) as f64).log2();
    let bits_k = max_g_k + k as f64 * log2_rho - at_k.exp2_floor() as f64;
    let bits_km1 = max_g + (k - 1) as f64 * log2_rho - at_km1.exp2_floor() as f64;
    if bits_k > budget || bits_km1 > budget {
        return None;
    }
    Some((at_km1, at_k))
}

/// Permutation-invariant rule for a two-valued multiset.
///
/// With ρ_m = f₁(y_m)/f₀(y_m) and e_k the elementary symmetric polynomials,
/// P(label 1 at i | y) = ρ_i e_{K−1}(ρ₋ᵢ) / (ρ_i e_{K−1}(ρ₋ᵢ) + e_K(ρ₋ᵢ)).
/// Leave-one-out values come from the downdating recurrence
/// e_t(ρ₋ᵢ) = e_t(ρ) − ρ_i e_{t−1}(ρ₋ᵢ), run upward from t = 0 for small
/// ρ_i and downward from t = n−1 for large ρ_i (each direction is stable
/// exactly where the other is not). Both a per-step cancellation monitor
/// (six decimal digits) and a running forward-error estimate guard the
/// chains; a coordinate failing both directions is recomputed from scratch
/// without index i. Total cost O(n·max(K, n−K)), or O(n²K) in the
/// all-fallback worst case.
pub fn pi_rule_two_valued(log_rho: &[f64], spec: &TwoValuedSpec) -> Result<EstimateVector> {
    let n = spec.n;
    let k = spec.k;
    if log_rho.len() != n {
        return Err(Error::contract(format!(
            "{} ratios for n = {n}",
            log_rho.len()
        )));
    }
    if log_rho.iter().any(|x| x.is_nan() || *x == f64::INFINITY) {
        return Err(Error::contract("log ratios must not be NaN or +inf"));
    }
    if k == 0 || spec.mu0 == spec.mu1 {
        return Ok(EstimateVector::new(vec![spec.mu0; n]));
    }
    if k == n {
        return Ok(EstimateVector::new(vec![spec.mu1; n]));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| log_rho[a].total_cmp(&log_rho[b]));
    let sorted_log_rho: Vec<f64> = order.iter().map(|&i| log_rho[i]).collect();
    let rhos: Vec<ExtFloat> = sorted_log_rho
        .iter()
        .map(|&l| ExtFloat::from_ln(l))
        .collect();

    // The truncated table serves the upward chains; downward chains need the
    // table up to e_n. Build the full one straight away when K is a sizable
    // fraction of n (downward traffic all but certain), otherwise extend
    // lazily. The prefix k ≤ K is bit-identical either way, because updating
    // e_t touches e_t and e_{t−1} only.
    let mut table = if 4 * k >= n {
        esp_ext(&rhos, n)
    } else {
        esp_ext(&rhos, k)
    };
    let mut table_is_full = table.len() == n + 1;

    // Upward downdating is stable for ρ_i below the table's marginal ratio
    // at K, downward above it; route each coordinate to its stable
    // direction first and let the error monitors arbitrate the rest.
    let log_marginal = table[k].ln() - table[k - 1].ln();

    let mut sorted_p = vec![0.0f64; n];
    let mut buf = vec![ExtFloat::ZERO; k + 1];
    for i in 0..n {
        let rho_i = rhos[i];
        if rho_i.is_zero() {
            // A zero likelihood ratio pins the label-1 posterior to zero.
            sorted_p[i] = 0.0;
            continue;
        }
        let log2_rho = sorted_log_rho[i] * std::f64::consts::LOG2_E;
        let up_first = sorted_log_rho[i] <= log_marginal;
        let mut pair = if up_first {
            loo_upward(&table, rho_i, log2_rho, k, &mut buf)
        } else {
            None
        };
        if pair.is_none() {
            if !table_is_full {
                table = esp_ext(&rhos, n);
                table_is_full = true;
            }
            pair = loo_downward(&table, rho_i, log2_rho, k, n);
        }
        if pair.is_none() && !up_first {
            pair = loo_upward(&table, rho_i, log2_rho, k, &mut buf);
        }
        let (loo_km1, loo_k) = pair.unwrap_or_else(|| {
            // Both directions cancelled badly: recompute without index i.
            let loo = esp_ext_skipping(&rhos, i, k);
            (loo[k - 1], loo[k])
        });
        sorted_p[i] = rho_i.mul(loo_km1).fraction_of_sum(loo_k);
    }

    let span = spec.mu1 - spec.mu0;
    let mut out = vec![0.0f64; n];
    for (sorted_pos, &orig) in order.iter().enumerate() {
        out[orig] = spec.mu0 + span * sorted_p[sorted_pos];
    }
    Ok(EstimateVector::new(clamp_into(
        out,
        spec.mu0.min(spec.mu1),
        spec.mu0.max(spec.mu1),
    )))
}

/// Simple symmetric rule for a two-valued multiset:
/// P(label 1 | y_i) = K ρ_i / (K ρ_i + n − K).
pub fn simple_rule_two_valued(log_rho: &[f64], spec: &TwoValuedSpec) -> Result<EstimateVector> {
    let n = spec.n;
    let k = spec.k;
    if log_rho.len() != n {
        return Err(Error::contract(format!(
            "{} ratios for n = {n}",
            log_rho.len()
        )));
    }
    if k == 0 || spec.mu0 == spec.mu1 {
        return Ok(EstimateVector::new(vec![spec.mu0; n]));
    }
    if k == n {
        return Ok(EstimateVector::new(vec![spec.mu1; n]));
    }
    let log_odds_prior = (k as f64).ln() - ((n - k) as f64).ln();
    let span = spec.mu1 - spec.mu0;
    let out = log_rho
        .iter()
        .map(|&lr| {
            let p = 1.0 / (1.0 + (-(log_odds_prior + lr)).exp());
            spec.mu0 + span * p
        })
        .collect();
    Ok(EstimateVector::new(clamp_into(
        out,
        spec.mu0.min(spec.mu1),
        spec.mu0.max(spec.mu1),
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{loglik_matrix, Family};
    use crate::rng::RngStream;
    use approx::assert_relative_eq;

    fn gaussian_instance(mus: &[f64], ys: &[f64]) -> (LogLikelihoodMatrix, ParameterMultiset) {
        let mus = ParameterMultiset::new(mus.to_vec()).unwrap();
        let ll = loglik_matrix(&Family::GaussianLocation, &mus, ys).unwrap();
        (ll, mus)
    }

    #[test]
    fn weights_uniform_for_equal_parameters() {
        let (ll, _) = gaussian_instance(&[0.5; 4], &[0.1, -0.3, 2.0, 0.7]);
        let w = weights(&ll);
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(w.at(i, j), 0.25);
            }
        }
    }

    #[test]
    fn weights_hand_softmax() {
        let (ll, _) = gaussian_instance(&[0.0, 1.0], &[1.0, -5.0]);
        let w = weights(&ll);
        assert_relative_eq!(w.at(0, 0), 0.37754066879814546, max_relative = 1e-12);
        assert_relative_eq!(w.at(0, 1), 0.6224593312018546, max_relative = 1e-12);
    }

    #[test]
    fn weight_rows_sum_to_one() {
        let mut stream = RngStream::substream(41, 0);
        let mus: Vec<f64> = (0..6).map(|_| stream.uniform_in(-1.0, 1.0)).collect();
        let ys: Vec<f64> = (0..6).map(|_| stream.uniform_in(-2.0, 2.0)).collect();
        let (ll, _) = gaussian_instance(&mus, &ys);
        let w = weights(&ll);
        for i in 0..6 {
            let s: f64 = w.row(i).iter().sum();
            assert!((s - 1.0).abs() < 1e-12);
            assert!(w.row(i).iter().all(|&p| p > 0.0 && p <= 1.0));
        }
    }

    #[test]
    fn simple_rule_hand_value() {
        let (ll, mus) = gaussian_instance(&[0.0, 1.0], &[1.0, 0.35]);
        let est = simple_rule(&ll, &mus).unwrap();
        assert_relative_eq!(est.values()[0], 0.6224593312018546, max_relative = 1e-12);
    }

    #[test]
    fn simple_rule_symmetry_at_midpoint() {
        let (ll, mus) = gaussian_instance(&[-1.0, 1.0], &[0.0, 3.0]);
        let est = simple_rule(&ll, &mus).unwrap();
        assert_eq!(est.values()[0], 0.0);
    }

    #[test]
    fn simple_rule_constant_for_equal_parameters() {
        let (ll, mus) = gaussian_instance(&[0.7; 3], &[1.0, -2.0, 0.3]);
        let est = simple_rule(&ll, &mus).unwrap();
        assert_eq!(est.values(), &[0.7; 3]);
    }

    #[test]
    fn simple_rule_coordinate_depends_on_own_observation_only() {
        let mus = [0.0, 0.4, 1.1, -0.6];
        let ys0 = [0.2, -0.5, 0.9, 1.4];
        let mut ys1 = ys0;
        ys1[2] = -3.0; // change someone else's observation
        let (ll0, m0) = gaussian_instance(&mus, &ys0);
        let (ll1, _) = gaussian_instance(&mus, &ys1);
        let e0 = simple_rule(&ll0, &m0).unwrap();
        let e1 = simple_rule(&ll1, &m0).unwrap();
        assert_eq!(e0.values()[0], e1.values()[0]);
        assert_eq!(e0.values()[1], e1.values()[1]);
        assert_eq!(e0.values()[3], e1.values()[3]);
    }

    #[test]
    fn permanent_engine_matches_enumeration_hand_case() {
        let (ll, mus) = gaussian_instance(&[0.0, 1.0], &[0.0, 1.0]);
        let est = pi_rule_permanent(&ll, &mus).unwrap();
        assert_relative_eq!(est.values()[0], 0.2689414213699951, max_relative = 1e-12);
        assert_relative_eq!(est.values()[1], 0.7310585786300049, max_relative = 1e-12);
    }

    #[test]
    fn engines_agree_on_random_instances() {
        let mut stream = RngStream::substream(7, 0);
        for n in 2..=6usize {
            for _ in 0..20 {
                let mus: Vec<f64> = (0..n).map(|_| stream.uniform_in(-1.0, 1.0)).collect();
                let ys: Vec<f64> = (0..n).map(|_| stream.uniform_in(-2.5, 2.5)).collect();
                let (ll, m) = gaussian_instance(&mus, &ys);
                let a = pi_rule_enum(&ll, &m).unwrap();
                let b = pi_rule_permanent(&ll, &m).unwrap();
                for i in 0..n {
                    assert_relative_eq!(a.values()[i], b.values()[i], epsilon = 1e-9);
                }
            }
        }
    }

    #[test]
    fn two_valued_engine_agrees_with_enumeration() {
        let mut stream = RngStream::substream(8, 0);
        for n in 2..=7usize {
            for _ in 0..10 {
                let k = 1 + stream.below(n - 1);
                let spec = TwoValuedSpec::new(n, k, -0.4, 0.9).unwrap();
                let mus = spec.to_multiset().unwrap();
                let ys: Vec<f64> = (0..n).map(|_| stream.uniform_in(-2.0, 2.0)).collect();
                let ll = loglik_matrix(&Family::GaussianLocation, &mus, &ys).unwrap();
                let log_rho =
                    two_valued_log_ratios(&Family::GaussianLocation, &spec, &ys).unwrap();
                let a = pi_rule_enum(&ll, &mus).unwrap();
                let b = pi_rule_two_valued(&log_rho, &spec).unwrap();
                for i in 0..n {
                    assert_relative_eq!(a.values()[i], b.values()[i], epsilon = 1e-9);
                }
            }
        }
    }

    #[test]
    fn two_valued_degenerate_k() {
        let spec = TwoValuedSpec::new(4, 0, -1.0, 2.0).unwrap();
        let est = pi_rule_two_valued(&[0.0; 4], &spec).unwrap();
        assert_eq!(est.values(), &[-1.0; 4]);
        let spec = TwoValuedSpec::new(4, 4, -1.0, 2.0).unwrap();
        let est = pi_rule_two_valued(&[0.0; 4], &spec).unwrap();
        assert_eq!(est.values(), &[2.0; 4]);
    }

    #[test]
    fn simple_two_valued_hand_values() {
        // K = n/2 and ρ = 1 pools to the midpoint.
        let spec = TwoValuedSpec::new(4, 2, 0.0, 1.0).unwrap();
        let est = simple_rule_two_valued(&[0.0; 4], &spec).unwrap();
        for &v in est.values() {
            assert_relative_eq!(v, 0.5, max_relative = 1e-15);
        }
        // n = 4, K = 1, ρ₁ = e: P = e/(e+3).
        let spec = TwoValuedSpec::new(4, 1, 0.0, 1.0).unwrap();
        let est = simple_rule_two_valued(&[1.0, 0.0, 0.0, 0.0], &spec).unwrap();
        assert_relative_eq!(est.values()[0], 0.4753668864186717, max_relative = 1e-12);
    }

    #[test]
    fn simple_two_valued_matches_matrix_form() {
        let mut stream = RngStream::substream(21, 0);
        let spec = TwoValuedSpec::new(6, 2, -0.5, 1.2).unwrap();
        let mus = spec.to_multiset().unwrap();
        let ys: Vec<f64> = (0..6).map(|_| stream.uniform_in(-2.0, 2.0)).collect();
        let ll = loglik_matrix(&Family::GaussianLocation, &mus, &ys).unwrap();
        let log_rho = two_valued_log_ratios(&Family::GaussianLocation, &spec, &ys).unwrap();
        let a = simple_rule(&ll, &mus).unwrap();
        let b = simple_rule_two_valued(&log_rho, &spec).unwrap();
        for i in 0..6 {
            assert_relative_eq!(a.values()[i], b.values()[i], epsilon = 1e-12);
        }
    }

    #[test]
    fn all_pi_engines_exactly_covariant() {
        let mut stream = RngStream::substream(33, 0);
        let n = 5;
        let spec = TwoValuedSpec::new(n, 2, -0.3, 0.8).unwrap();
        let mus = spec.to_multiset().unwrap();
        let ys: Vec<f64> = (0..n).map(|_| stream.uniform_in(-2.0, 2.0)).collect();
        let perm = [4usize, 2, 0, 1, 3];
        let ys_p: Vec<f64> = perm.iter().map(|&p| ys[p]).collect();

        let ll = loglik_matrix(&Family::GaussianLocation, &mus, &ys).unwrap();
        let ll_p = loglik_matrix(&Family::GaussianLocation, &mus, &ys_p).unwrap();
        for rule in [pi_rule_enum, pi_rule_permanent] {
            let base = rule(&ll, &mus).unwrap();
            let permuted = rule(&ll_p, &mus).unwrap();
            for (i, &p) in perm.iter().enumerate() {
                assert_eq!(permuted.values()[i], base.values()[p]);
            }
        }

        let lr = two_valued_log_ratios(&Family::GaussianLocation, &spec, &ys).unwrap();
        let lr_p: Vec<f64> = perm.iter().map(|&p| lr[p]).collect();
        let base = pi_rule_two_valued(&lr, &spec).unwrap();
        let permuted = pi_rule_two_valued(&lr_p, &spec).unwrap();
        for (i, &p) in perm.iter().enumerate() {
            assert_eq!(permuted.values()[i], base.values()[p]);
        }
    }

    #[test]
    fn estimates_stay_in_parameter_range() {
        let mut stream = RngStream::substream(55, 0);
        for _ in 0..40 {
            let n = 2 + stream.below(5);
            let mus: Vec<f64> = (0..n).map(|_| stream.uniform_in(-1.0, 1.0)).collect();
            let ys: Vec<f64> = (0..n).map(|_| stream.uniform_in(-8.0, 8.0)).collect();
            let (ll, m) = gaussian_instance(&mus, &ys);
            for est in [
                simple_rule(&ll, &m).unwrap(),
                pi_rule_enum(&ll, &m).unwrap(),
                pi_rule_permanent(&ll, &m).unwrap(),
            ] {
                for &v in est.values() {
                    assert!(v >= m.min() && v <= m.max());
                }
            }
        }
    }

    #[test]
    fn separation_limit_recovers_the_matching() {
        // Far-separated labels: the posterior matches the top-K observations
        // to the high label almost surely.
        let n = 8;
        let k = 3;
        let spec = TwoValuedSpec::new(n, k, 0.0, 20.0).unwrap();
        let mut stream = RngStream::substream(70, 0);
        let mut ys = Vec::new();
        // Draw from the true model: K high, n-K low.
        for i in 0..n {
            let mu = if i < k { 20.0 } else { 0.0 };
            ys.push(
                Family::GaussianLocation
                    .sample_stream(mu, &mut stream)
                    .unwrap(),
            );
        }
        let log_rho = two_valued_log_ratios(&Family::GaussianLocation, &spec, &ys).unwrap();
        let est = pi_rule_two_valued(&log_rho, &spec).unwrap();
        let mut idx: Vec<usize> = (0..n).collect();
        idx.sort_by(|&a, &b| ys[b].total_cmp(&ys[a]));
        for (rank, &i) in idx.iter().enumerate() {
            let p = est.values()[i] / 20.0;
            if rank < k {
                assert!(p > 1.0 - 1e-6, "top-{rank} coordinate has P = {p}");
            } else {
                assert!(p < 1e-6, "bottom coordinate has P = {p}");
            }
        }
    }

    #[test]
    fn pooling_limit_collapses_to_weighted_label_mean() {
        let n = 6;
        let k = 2;
        let eps = 1e-8;
        let spec = TwoValuedSpec::new(n, k, 0.0, eps).unwrap();
        let mut stream = RngStream::substream(71, 0);
        let ys: Vec<f64> = (0..n).map(|_| stream.uniform_in(-2.0, 2.0)).collect();
        let log_rho = two_valued_log_ratios(&Family::GaussianLocation, &spec, &ys).unwrap();
        let target = (k as f64 / n as f64) * eps;
        for est in [
            pi_rule_two_valued(&log_rho, &spec).unwrap(),
            simple_rule_two_valued(&log_rho, &spec).unwrap(),
        ] {
            for &v in est.values() {
                assert!((v - target).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn repeated_values_need_no_special_handling() {
        let (ll, mus) = gaussian_instance(&[0.5, 0.5, 1.0], &[0.4, 0.6, 1.1]);
        let a = pi_rule_enum(&ll, &mus).unwrap();
        let b = pi_rule_permanent(&ll, &mus).unwrap();
        for i in 0..3 {
            assert_relative_eq!(a.values()[i], b.values()[i], epsilon = 1e-10);
        }
    }
}
