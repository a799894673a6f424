//! Distribution families, the parameter multiset, and the log-likelihood
//! matrix every rule consumes.
//!
//! All density work is done in log space end to end: the raw densities
//! underflow `f64` already around |y − μ| ≈ 40, while their logs stay exactly
//! representable.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngStream;

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_7;

/// One Gaussian member density, used as a labelled component of
/// [`Family::TwoPoint`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GaussianMember {
    /// N(mean, 1).
    Location { mean: f64 },
    /// N(0, variance).
    Scale { variance: f64 },
}

impl GaussianMember {
    fn log_density(&self, y: f64) -> Result<f64> {
        match *self {
            GaussianMember::Location { mean } => gaussian_location_log_density(mean, y),
            GaussianMember::Scale { variance } => gaussian_scale_log_density(variance, y),
        }
    }

    fn sample(&self, stream: &mut RngStream) -> Result<f64> {
        match *self {
            GaussianMember::Location { mean } => {
                check_finite_mu(mean)?;
                Ok(mean + stream.standard_normal())
            }
            GaussianMember::Scale { variance } => {
                check_positive_variance(variance)?;
                Ok(variance.sqrt() * stream.standard_normal())
            }
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            GaussianMember::Location { mean } => check_finite_mu(mean),
            GaussianMember::Scale { variance } => check_positive_variance(variance),
        }
    }
}

/// A parametrized family of observation distributions.
///
/// The parameter μ means: the location for `GaussianLocation`, the variance
/// for `GaussianScale`, and the component label (0 or 1) for `TwoPoint`.
/// Densities are with respect to Lebesgue measure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Family {
    /// N(μ, 1), μ ∈ ℝ.
    GaussianLocation,
    /// N(0, μ), μ > 0.
    GaussianScale,
    /// Two arbitrary Gaussian member densities indexed by labels 0 and 1.
    TwoPoint {
        zero: GaussianMember,
        one: GaussianMember,
    },
}

fn check_finite_mu(mu: f64) -> Result<()> {
    if !mu.is_finite() {
        return Err(Error::domain(format!("non-finite parameter {mu}")));
    }
    Ok(())
}

fn check_positive_variance(v: f64) -> Result<()> {
    if !v.is_finite() || v <= 0.0 {
        return Err(Error::domain(format!(
            "gaussian-scale parameter must be a positive variance, got {v}"
        )));
    }
    Ok(())
}

fn gaussian_location_log_density(mu: f64, y: f64) -> Result<f64> {
    check_finite_mu(mu)?;
    let d = y - mu;
    Ok(-HALF_LN_2PI - 0.5 * d * d)
}

fn gaussian_scale_log_density(variance: f64, y: f64) -> Result<f64> {
    check_positive_variance(variance)?;
    Ok(-HALF_LN_2PI - 0.5 * variance.ln() - y * y / (2.0 * variance))
}

impl Family {
    /// log f_μ(y) with respect to Lebesgue measure.
    pub fn log_density(&self, mu: f64, y: f64) -> Result<f64> {
        match self {
            Family::GaussianLocation => gaussian_location_log_density(mu, y),
            Family::GaussianScale => gaussian_scale_log_density(mu, y),
            Family::TwoPoint { .. } => self.member(mu)?.log_density(y),
        }
    }

    fn member(&self, mu: f64) -> Result<&GaussianMember> {
        match self {
            Family::TwoPoint { zero, one } => {
                if mu == 0.0 {
                    Ok(zero)
                } else if mu == 1.0 {
                    Ok(one)
                } else {
                    Err(Error::domain(format!(
                        "two-point family takes labels 0 and 1, got {mu}"
                    )))
                }
            }
            _ => unreachable!("member() is only called for TwoPoint"),
        }
    }

    /// One draw from F_μ off substream `stream`.
    pub fn sample_stream(&self, mu: f64, stream: &mut RngStream) -> Result<f64> {
        match self {
            Family::GaussianLocation => {
                check_finite_mu(mu)?;
                Ok(mu + stream.standard_normal())
            }
            Family::GaussianScale => {
                check_positive_variance(mu)?;
                Ok(mu.sqrt() * stream.standard_normal())
            }
            Family::TwoPoint { .. } => self.member(mu)?.sample(stream),
        }
    }

    /// One draw from F_μ keyed by `(seed, substream 0)`.
    pub fn sample(&self, mu: f64, seed: u64) -> Result<f64> {
        let mut stream = RngStream::substream(seed, 0);
        self.sample_stream(mu, &mut stream)
    }

    /// Checks that a parameter value is admissible without evaluating anything.
    pub fn check_admissible(&self, mu: f64) -> Result<()> {
        match self {
            Family::GaussianLocation => check_finite_mu(mu),
            Family::GaussianScale => check_positive_variance(mu),
            Family::TwoPoint { .. } => self.member(mu)?.validate(),
        }
    }
}

/// The known parameter multiset {μ_1, …, μ_n}, stored sorted ascending.
///
/// Two multisets are equal iff their sorted value vectors are equal; no order
/// information survives construction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParameterMultiset {
    values: Vec<f64>,
}

impl ParameterMultiset {
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::contract("parameter multiset must be non-empty"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("parameter multiset contains non-finite value"));
        }
        values.sort_by(f64::total_cmp);
        Ok(Self { values })
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        *self.values.last().unwrap()
    }

    /// max_{i,j} |μ_i − μ_j|.
    pub fn spread(&self) -> f64 {
        self.max() - self.min()
    }

    pub fn all_equal(&self) -> bool {
        self.min() == self.max()
    }

    /// The distinct values, ascending.
    pub fn distinct(&self) -> Vec<f64> {
        let mut out: Vec<f64> = Vec::new();
        for &v in &self.values {
            if out.last() != Some(&v) {
                out.push(v);
            }
        }
        out
    }
}

/// Dense n×n matrix of log-likelihoods.
///
/// Indexing contract across the whole crate: `at(i, j) = log f_{μ_j}(y_i)` —
/// first index the observation, second the parameter.
#[derive(Clone, Debug, PartialEq)]
pub struct LogLikelihoodMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl LogLikelihoodMatrix {
    /// Builds from explicit rows; rows must form a square matrix and contain
    /// no NaN or +∞ (−∞ is accepted and treated as a log of zero downstream).
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::contract("matrix must be non-empty"));
        }
        let mut entries = Vec::with_capacity(n * n);
        for row in &rows {
            if row.len() != n {
                return Err(Error::contract(format!(
                    "matrix must be square: {n} rows but a row of length {}",
                    row.len()
                )));
            }
            for &e in row {
                if e.is_nan() || e == f64::INFINITY {
                    return Err(Error::contract("matrix entries must not be NaN or +inf"));
                }
                entries.push(e);
            }
        }
        Ok(Self { n, entries })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    /// A copy with rows reordered as `perm` (row i of the result is row
    /// `perm[i]` of `self`).
    pub fn permuted_rows(&self, perm: &[usize]) -> Self {
        debug_assert_eq!(perm.len(), self.n);
        let mut entries = Vec::with_capacity(self.n * self.n);
        for &p in perm {
            entries.extend_from_slice(self.row(p));
        }
        Self { n: self.n, entries }
    }

    /// Row indices sorted by row content (lexicographic in total order).
    ///
    /// Used to canonicalize observation order before permutation-sensitive
    /// floating-point reductions: computing on the canonical order and
    /// scattering back makes rule outputs exactly equivariant under
    /// permutation of the observations. Equal rows are interchangeable, so
    /// ties need no care beyond stability.
    pub(crate) fn canonical_row_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.n).collect();
        order.sort_by(|&a, &b| {
            let (ra, rb) = (self.row(a), self.row(b));
            for (x, y) in ra.iter().zip(rb) {
                let c = x.total_cmp(y);
                if c != std::cmp::Ordering::Equal {
                    return c;
                }
            }
            std::cmp::Ordering::Equal
        });
        order
    }

    /// The (n−1)×(n−1) minor deleting row `i` and column `j`.
    pub fn minor(&self, i: usize, j: usize) -> Self {
        debug_assert!(self.n >= 2);
        let m = self.n - 1;
        let mut entries = Vec::with_capacity(m * m);
        for r in 0..self.n {
            if r == i {
                continue;
            }
            for c in 0..self.n {
                if c == j {
                    continue;
                }
                entries.push(self.at(r, c));
            }
        }
        Self { n: m, entries }
    }
}

/// entries[i][j] = log f_{μ_j}(y_i) for every observation/parameter pair.
pub fn loglik_matrix(
    family: &Family,
    mus: &ParameterMultiset,
    ys: &[f64],
) -> Result<LogLikelihoodMatrix> {
    let n = mus.n();
    if ys.len() != n {
        return Err(Error::contract(format!(
            "{} observations but {} parameters",
            ys.len(),
            n
        )));
    }
    let mut entries = Vec::with_capacity(n * n);
    for &y in ys {
        for &mu in mus.values() {
            entries.push(family.log_density(mu, y)?);
        }
    }
    Ok(LogLikelihoodMatrix { n, entries })
}
