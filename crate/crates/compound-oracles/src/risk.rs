//! Paired Monte Carlo estimation of the two oracle risks, their gap, and
//! numerical probes of the moment conditions that keep the gap bounded.
//!
//! Everything here is deterministic in (inputs, master seed): replication r
//! draws from RNG substream (seed, r), per-replication results are collected
//! in replication order, and reductions run as fixed pairwise trees, so
//! output bytes never depend on the worker count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::{loglik_matrix, Family, ParameterMultiset};
use crate::numeric::{mean_stderr, pairwise_sum};
use crate::oracles::{
    pi_rule_enum, pi_rule_permanent, pi_rule_two_valued, simple_rule, simple_rule_two_valued,
    two_valued_log_ratios, EstimateVector, TwoValuedSpec,
};
use crate::rng::RngStream;

/// Which permutation-invariant engine a Monte Carlo run uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Engine {
    /// Brute-force enumeration, n ≤ 8.
    Enum,
    /// Permanental minors, 2 ≤ n ≤ 17.
    Permanent,
    /// Two-valued multisets at any n.
    TwoValued,
}

impl Engine {
    /// Checks the documented capacity wall against a multiset.
    pub fn check_capacity(&self, mus: &ParameterMultiset) -> Result<()> {
        let n = mus.n();
        match self {
            Engine::Enum => {
                if n > crate::exact::MAX_ENUMERATION_N {
                    return Err(Error::capacity(format!(
                        "enum engine handles n ≤ {}, got {n}",
                        crate::exact::MAX_ENUMERATION_N
                    )));
                }
            }
            Engine::Permanent => {
                if n < 2 || n > crate::exact::MAX_MINORS_N {
                    return Err(Error::capacity(format!(
                        "permanent engine handles 2 ≤ n ≤ {}, got {n}",
                        crate::exact::MAX_MINORS_N
                    )));
                }
            }
            Engine::TwoValued => {
                TwoValuedSpec::from_multiset(mus)?;
            }
        }
        Ok(())
    }
}

/// A Monte Carlo estimate of a total (summed over coordinates) quantity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RiskEstimate {
    pub mean: f64,
    /// Sample standard deviation divided by √reps.
    pub stderr: f64,
    pub reps: u64,
    pub master_seed: u64,
}

/// Paired comparison of the simple and permutation-invariant rules on
/// common random numbers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    /// E‖Δ^S − Δ^PI‖².
    pub gap_sq: RiskEstimate,
    /// E‖Δ^S − M‖² (total squared-error risk of the simple rule).
    pub risk_s: RiskEstimate,
    /// E‖Δ^PI − M‖².
    pub risk_pi: RiskEstimate,
    /// Per-replication difference ‖Δ^S − M‖² − ‖Δ^PI − M‖²; its mean equals
    /// `risk_s.mean - risk_pi.mean` bit for bit by construction.
    pub risk_diff: RiskEstimate,
    /// |risk_s − risk_pi − gap_sq| over the same draws: the conditional-mean
    /// orthogonality identity at Monte Carlo resolution.
    pub pythagoras_residual: f64,
    /// Standard error of the per-replication cross term behind the residual.
    pub pythagoras_stderr: f64,
}

/// One draw of the exchangeable model: a uniform random assignment of the
/// multiset to coordinates, then independent observations.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    /// labels[i] is the parameter assigned to coordinate i.
    pub labels: Vec<f64>,
    pub ys: Vec<f64>,
}

/// Draws labels by a uniform random permutation of the multiset, then
/// y_i ~ F_{labels[i]} independently. Depends on the multiset only (the
/// canonical sorted order), never on the order parameters were supplied in.
pub fn draw_instance(
    family: &Family,
    mus: &ParameterMultiset,
    stream: &mut RngStream,
) -> Result<Instance> {
    let n = mus.n();
    let perm = stream.permutation(n);
    let labels: Vec<f64> = perm.iter().map(|&p| mus.values()[p]).collect();
    let ys = labels
        .iter()
        .map(|&m| family.sample_stream(m, stream))
        .collect::<Result<Vec<f64>>>()?;
    Ok(Instance { labels, ys })
}

/// [`draw_instance`] off substream `(master_seed, rep)`.
pub fn draw_instance_seeded(
    family: &Family,
    mus: &ParameterMultiset,
    master_seed: u64,
    rep: u64,
) -> Result<Instance> {
    let mut stream = RngStream::substream(master_seed, rep);
    draw_instance(family, mus, &mut stream)
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for (x, y) in a.iter().zip(b) {
        let d = x - y;
        s += d * d;
    }
    s
}

fn apply_rules(
    family: &Family,
    mus: &ParameterMultiset,
    engine: Engine,
    spec: Option<&TwoValuedSpec>,
    ys: &[f64],
) -> Result<(EstimateVector, EstimateVector)> {
    match engine {
        Engine::TwoValued => {
            let spec = spec.expect("two-valued spec prepared by caller");
            let log_rho = two_valued_log_ratios(family, spec, ys)?;
            Ok((
                simple_rule_two_valued(&log_rho, spec)?,
                pi_rule_two_valued(&log_rho, spec)?,
            ))
        }
        Engine::Enum => {
            let ll = loglik_matrix(family, mus, ys)?;
            Ok((simple_rule(&ll, mus)?, pi_rule_enum(&ll, mus)?))
        }
        Engine::Permanent => {
            let ll = loglik_matrix(family, mus, ys)?;
            Ok((simple_rule(&ll, mus)?, pi_rule_permanent(&ll, mus)?))
        }
    }
}

/// Paired Monte Carlo comparison of the two rules.
///
/// Every replication draws one instance, evaluates both rules on the same
/// observations, and accumulates ‖Δ^S−Δ^PI‖², ‖Δ^S−M‖² and ‖Δ^PI−M‖².
pub fn mc_gap(
    family: &Family,
    mus: &ParameterMultiset,
    engine: Engine,
    reps: u64,
    master_seed: u64,
) -> Result<GapReport> {
    if reps < 2 {
        return Err(Error::contract("mc_gap needs reps ≥ 2 for a stderr"));
    }
    engine.check_capacity(mus)?;
    let spec = match engine {
        Engine::TwoValued => Some(TwoValuedSpec::from_multiset(mus)?),
        _ => None,
    };

    let per: Vec<[f64; 3]> = (0..reps)
        .into_par_iter()
        .map(|rep| -> Result<[f64; 3]> {
            let inst = draw_instance_seeded(family, mus, master_seed, rep)?;
            let (ds, dpi) = apply_rules(family, mus, engine, spec.as_ref(), &inst.ys)?;
            Ok([
                sq_dist(ds.values(), dpi.values()),
                sq_dist(ds.values(), &inst.labels),
                sq_dist(dpi.values(), &inst.labels),
            ])
        })
        .collect::<Result<Vec<_>>>()?;

    let g: Vec<f64> = per.iter().map(|x| x[0]).collect();
    let a: Vec<f64> = per.iter().map(|x| x[1]).collect();
    let b: Vec<f64> = per.iter().map(|x| x[2]).collect();
    let d: Vec<f64> = per.iter().map(|x| x[1] - x[2]).collect();
    let cross: Vec<f64> = per.iter().map(|x| (x[1] - x[2]) - x[0]).collect();

    let (g_mean, g_se) = mean_stderr(&g);
    let (a_mean, a_se) = mean_stderr(&a);
    let (b_mean, b_se) = mean_stderr(&b);
    let (_, d_se) = mean_stderr(&d);
    let (_, cross_se) = mean_stderr(&cross);

    let est = |mean: f64, stderr: f64| RiskEstimate {
        mean,
        stderr,
        reps,
        master_seed,
    };
    Ok(GapReport {
        gap_sq: est(g_mean, g_se),
        risk_s: est(a_mean, a_se),
        risk_pi: est(b_mean, b_se),
        // Defined as the difference of the paired means so the identity
        // holds to the last bit; the spread still comes from the
        // per-replication differences.
        risk_diff: est(a_mean - b_mean, d_se),
        pythagoras_residual: (a_mean - b_mean - g_mean).abs(),
        pythagoras_stderr: cross_se,
    })
}

/// Deterministic generators of the parameter multiset per grid point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MuGenerator {
    /// A fixed list; only valid for n equal to its length.
    Explicit { values: Vec<f64> },
    /// n i.i.d. uniform draws on [−a, a] from substream (gen_seed, n).
    IidUniform { a: f64, gen_seed: u64 },
    /// ⌊γn⌋ coordinates at mu1, the rest at mu0.
    TwoValued { mu0: f64, mu1: f64, gamma: f64 },
}

impl MuGenerator {
    pub fn generate(&self, n: usize) -> Result<ParameterMultiset> {
        match self {
            MuGenerator::Explicit { values } => {
                if values.len() != n {
                    return Err(Error::contract(format!(
                        "explicit multiset has {} values but n = {n}",
                        values.len()
                    )));
                }
                ParameterMultiset::new(values.clone())
            }
            MuGenerator::IidUniform { a, gen_seed } => {
                if !a.is_finite() || *a < 0.0 {
                    return Err(Error::contract("iid-uniform needs a ≥ 0"));
                }
                let mut stream = RngStream::substream(*gen_seed, n as u64);
                ParameterMultiset::new((0..n).map(|_| stream.uniform_in(-a, *a)).collect())
            }
            MuGenerator::TwoValued { mu0, mu1, gamma } => {
                if !(0.0..=1.0).contains(gamma) {
                    return Err(Error::contract("two-valued generator needs γ in [0, 1]"));
                }
                let k = (gamma * n as f64).floor() as usize;
                TwoValuedSpec::new(n, k.min(n), *mu0, *mu1)?.to_multiset()
            }
        }
    }
}

/// One grid row of [`gap_curve`].
#[derive(Clone, Debug, Serialize)]
pub struct GapCurveRow {
    pub n: usize,
    pub report: GapReport,
}

/// Runs [`mc_gap`] across an n-grid with deterministically generated
/// multisets.
pub fn gap_curve(
    family: &Family,
    generator: &MuGenerator,
    n_grid: &[usize],
    engine: Engine,
    reps: u64,
    master_seed: u64,
) -> Result<Vec<GapCurveRow>> {
    n_grid
        .iter()
        .map(|&n| {
            let mus = generator.generate(n)?;
            Ok(GapCurveRow {
                n,
                report: mc_gap(family, &mus, engine, reps, master_seed)?,
            })
        })
        .collect()
}

/// A scalar Monte Carlo summary with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
}

/// Sample variance with the large-sample standard error of the variance
/// estimator, sqrt((m4 − s⁴)/reps).
fn variance_with_stderr(xs: &[f64]) -> Estimate {
    let n = xs.len();
    assert!(n >= 2);
    let mean = pairwise_sum(xs) / n as f64;
    let sq: Vec<f64> = xs.iter().map(|&x| (x - mean) * (x - mean)).collect();
    let var = pairwise_sum(&sq) / (n - 1) as f64;
    let m4 = pairwise_sum(&sq.iter().map(|&s| s * s).collect::<Vec<_>>()) / n as f64;
    let se_sq = (m4 - var * var).max(0.0) / n as f64;
    Estimate {
        value: var,
        stderr: se_sq.sqrt(),
    }
}

/// Moment-separation diagnostics: bounded parameters, bounded squared
/// likelihood ratios in mean square, and ratios not collapsing below γ too
/// often.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct G1Report {
    pub gamma: f64,
    /// max_i |μ_i| (exact).
    pub max_abs_mu: f64,
    /// max over ordered pairs (i, j) of E_{μ_i}(f_j/f_i)²(Y).
    pub max_sq_ratio_moment: Estimate,
    pub max_pair: (usize, usize),
    /// min over ordered pairs of P_{μ_i}(f_j/f_i(Y) > γ).
    pub min_prob_above_gamma: Estimate,
    pub min_pair: (usize, usize),
    /// Number of ordered pairs evaluated (all n² − n, or a seeded subsample
    /// above n = 50).
    pub pairs_evaluated: usize,
}

const G1_EXHAUSTIVE_N: usize = 50;
const G1_SUBSAMPLE_PAIRS: usize = 2500;

/// Monte Carlo estimates of the pairwise ratio moments.
///
/// Cost is O(pairs · reps); above n = 50 a seeded subsample of 2500 ordered
/// pairs is used, always including the two extreme pairs (min, max) and
/// (max, min).
pub fn check_g1(
    family: &Family,
    mus: &ParameterMultiset,
    gamma: f64,
    reps: u64,
    seed: u64,
) -> Result<G1Report> {
    if gamma <= 0.0 || !gamma.is_finite() {
        return Err(Error::contract("check_g1 needs γ > 0"));
    }
    if reps < 2 {
        return Err(Error::contract("check_g1 needs reps ≥ 2"));
    }
    let n = mus.n();
    let values = mus.values();

    let mut pairs: Vec<(usize, usize)> = Vec::new();
    if n <= G1_EXHAUSTIVE_N {
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    pairs.push((i, j));
                }
            }
        }
    } else {
        pairs.push((0, n - 1));
        pairs.push((n - 1, 0));
        let mut sampler = RngStream::substream(seed, n as u64);
        while pairs.len() < G1_SUBSAMPLE_PAIRS {
            let i = sampler.below(n);
            let j = sampler.below(n);
            if i != j {
                pairs.push((i, j));
            }
        }
    }
    if pairs.is_empty() {
        // Single-parameter multiset: the only ratio is identically one.
        return Ok(G1Report {
            gamma,
            max_abs_mu: mus.min().abs().max(mus.max().abs()),
            max_sq_ratio_moment: Estimate {
                value: 1.0,
                stderr: 0.0,
            },
            max_pair: (0, 0),
            min_prob_above_gamma: Estimate {
                value: if gamma < 1.0 { 1.0 } else { 0.0 },
                stderr: 0.0,
            },
            min_pair: (0, 0),
            pairs_evaluated: 0,
        });
    }

    // Group pairs by their first index so each i's draws are shared.
    let mut by_i: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(i, j) in &pairs {
        by_i[i].push(j);
    }

    let log_gamma = gamma.ln();
    let per_i: Vec<Vec<(usize, Estimate, Estimate)>> = (0..n)
        .into_par_iter()
        .map(|i| -> Result<Vec<(usize, Estimate, Estimate)>> {
            if by_i[i].is_empty() {
                return Ok(Vec::new());
            }
            let mut stream = RngStream::substream(seed, i as u64);
            let draws: Vec<f64> = (0..reps)
                .map(|_| family.sample_stream(values[i], &mut stream))
                .collect::<Result<Vec<f64>>>()?;
            let log_fi: Vec<f64> = draws
                .iter()
                .map(|&y| family.log_density(values[i], y))
                .collect::<Result<Vec<f64>>>()?;
            let mut out = Vec::with_capacity(by_i[i].len());
            for &j in &by_i[i] {
                let mut sq = Vec::with_capacity(draws.len());
                let mut above = Vec::with_capacity(draws.len());
                for (r, &y) in draws.iter().enumerate() {
                    let dl = family.log_density(values[j], y)? - log_fi[r];
                    sq.push((2.0 * dl).exp());
                    above.push(if dl > log_gamma { 1.0 } else { 0.0 });
                }
                let (m_sq, se_sq) = mean_stderr(&sq);
                let (m_ab, se_ab) = mean_stderr(&above);
                out.push((
                    j,
                    Estimate {
                        value: m_sq,
                        stderr: se_sq,
                    },
                    Estimate {
                        value: m_ab,
                        stderr: se_ab,
                    },
                ));
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut max_sq = Estimate {
        value: f64::NEG_INFINITY,
        stderr: 0.0,
    };
    let mut max_pair = (0, 0);
    let mut min_ab = Estimate {
        value: f64::INFINITY,
        stderr: 0.0,
    };
    let mut min_pair = (0, 0);
    for (i, items) in per_i.iter().enumerate() {
        for &(j, sq, ab) in items {
            if sq.value > max_sq.value {
                max_sq = sq;
                max_pair = (i, j);
            }
            if ab.value < min_ab.value {
                min_ab = ab;
                min_pair = (i, j);
            }
        }
    }

    Ok(G1Report {
        gamma,
        max_abs_mu: mus.min().abs().max(mus.max().abs()),
        max_sq_ratio_moment: max_sq,
        max_pair,
        min_prob_above_gamma: min_ab,
        min_pair,
        pairs_evaluated: pairs.len(),
    })
}

/// Weight-concentration diagnostics: summed squared posterior weights, the
/// inverse minimal weight, and their combination.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct G2Report {
    /// E Σ_i Σ_j p_j(Y_i)².
    pub sum_sq_weights: Estimate,
    /// Σ_i E 1/(n min_j p_j(Y_i)); compare against C·n.
    pub inv_min_weight: Estimate,
    /// E Σ_i Σ_j p_j(Y_i)² / (n min_j p_j(Y_i)).
    pub combined: Estimate,
    /// Single-observation diagnostic E Σ_j p_j(Y_1)².
    pub single_obs_sq_weights: Estimate,
    /// Closed-form ceiling e^{12 A²}/n for the single-observation
    /// diagnostic in the unit-variance location model, A = max_i |μ_i|.
    pub gaussian_bound: f64,
}

/// Monte Carlo estimates of the three weight-concentration quantities plus
/// the single-observation diagnostic.
pub fn check_g2(
    family: &Family,
    mus: &ParameterMultiset,
    reps: u64,
    seed: u64,
) -> Result<G2Report> {
    if reps < 2 {
        return Err(Error::contract("check_g2 needs reps ≥ 2"));
    }
    let n = mus.n();
    let values = mus.values();

    let per: Vec<[f64; 4]> = (0..reps)
        .into_par_iter()
        .map(|rep| -> Result<[f64; 4]> {
            let inst = draw_instance_seeded(family, mus, seed, rep)?;
            let mut q1 = 0.0;
            let mut q2 = 0.0;
            let mut q3 = 0.0;
            let mut single = 0.0;
            let mut row = vec![0.0f64; n];
            for (i, &y) in inst.ys.iter().enumerate() {
                let mut mx = f64::NEG_INFINITY;
                for (j, &mu) in values.iter().enumerate() {
                    let l = family.log_density(mu, y)?;
                    row[j] = l;
                    if l > mx {
                        mx = l;
                    }
                }
                let mut z = 0.0;
                for l in row.iter_mut() {
                    *l = (*l - mx).exp();
                    z += *l;
                }
                let mut sum_sq = 0.0;
                let mut min_p = f64::INFINITY;
                for &w in row.iter() {
                    let p = w / z;
                    sum_sq += p * p;
                    if p < min_p {
                        min_p = p;
                    }
                }
                q1 += sum_sq;
                q2 += 1.0 / (n as f64 * min_p);
                q3 += sum_sq / (n as f64 * min_p);
                if i == 0 {
                    single = sum_sq;
                }
            }
            Ok([q1, q2, q3, single])
        })
        .collect::<Result<Vec<_>>>()?;

    let column = |c: usize| -> Estimate {
        let xs: Vec<f64> = per.iter().map(|x| x[c]).collect();
        let (m, se) = mean_stderr(&xs);
        Estimate {
            value: m,
            stderr: se,
        }
    };
    let a = mus.min().abs().max(mus.max().abs());
    Ok(G2Report {
        sum_sq_weights: column(0),
        inv_min_weight: column(1),
        combined: column(2),
        single_obs_sq_weights: column(3),
        gaussian_bound: (12.0 * a * a).exp() / n as f64,
    })
}

/// Ordered-spacing diagnostics: the parameter spread and the worst variance
/// of consecutive ordered likelihood ratios.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct B1Report {
    /// max_{i,j} |μ_i − μ_j| (exact).
    pub spread: f64,
    /// max over consecutive ordered pairs of Var(f_{(j+1)}/f_{(j)}(Y_{(j)})).
    pub max_consecutive_ratio_variance: Estimate,
    /// Index j of the maximizing pair (j, j+1) in the sorted multiset.
    pub argmax_pair: usize,
    /// n² times the max variance.
    pub implied_vn: f64,
}

/// Monte Carlo variance of f_{(j+1)}/f_{(j)} under F_{(j)} for every
/// consecutive ordered pair. Pairs with equal parameters have ratio
/// identically one and are reported as exact zeros.
pub fn check_b1(
    family: &Family,
    mus: &ParameterMultiset,
    reps: u64,
    seed: u64,
) -> Result<B1Report> {
    let n = mus.n();
    if n < 2 {
        return Err(Error::contract("check_b1 needs n ≥ 2"));
    }
    if reps < 2 {
        return Err(Error::contract("check_b1 needs reps ≥ 2"));
    }
    let values = mus.values();

    let per_pair: Vec<Estimate> = (0..n - 1)
        .into_par_iter()
        .map(|j| -> Result<Estimate> {
            let (lo, hi) = (values[j], values[j + 1]);
            if lo == hi {
                return Ok(Estimate {
                    value: 0.0,
                    stderr: 0.0,
                });
            }
            let mut stream = RngStream::substream(seed, j as u64);
            let ratios: Vec<f64> = (0..reps)
                .map(|_| {
                    let y = family.sample_stream(lo, &mut stream)?;
                    Ok((family.log_density(hi, y)? - family.log_density(lo, y)?).exp())
                })
                .collect::<Result<Vec<f64>>>()?;
            Ok(variance_with_stderr(&ratios))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut argmax = 0;
    for (j, est) in per_pair.iter().enumerate() {
        if est.value > per_pair[argmax].value {
            argmax = j;
        }
    }
    let max_est = per_pair[argmax];
    Ok(B1Report {
        spread: mus.spread(),
        max_consecutive_ratio_variance: max_est,
        argmax_pair: argmax,
        implied_vn: (n as f64) * (n as f64) * max_est.value,
    })
}

/// Ratio-variance diagnostics for a two-valued parameter.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TwoValuedConditionReport {
    /// Var of f₁/f₀(Y) under F₀ at the full replication budget.
    pub var_under_zero: Estimate,
    /// Var of f₀/f₁(Y) under F₁.
    pub var_under_one: Estimate,
    /// Variance estimates at the doubling checkpoints reps/16, …, reps.
    pub rounds_zero: Vec<f64>,
    pub rounds_one: Vec<f64>,
    /// Set when a doubling changed the running estimate by more than 20% —
    /// the estimate failed to stabilize, suggesting an infinite variance.
    pub heavy_tail_zero: bool,
    pub heavy_tail_one: bool,
}

const DOUBLING_ROUNDS: usize = 4;
const DOUBLING_TOLERANCE: f64 = 0.2;

fn doubling_variance(ratios: &[f64]) -> (Estimate, Vec<f64>, bool) {
    let reps = ratios.len();
    let mut rounds = Vec::with_capacity(DOUBLING_ROUNDS + 1);
    for r in (0..=DOUBLING_ROUNDS).rev() {
        let len = reps >> r;
        rounds.push(variance_with_stderr(&ratios[..len]).value);
    }
    let mut unstable = false;
    for w in rounds.windows(2) {
        let (prev, next) = (w[0], w[1]);
        if !next.is_finite() || !prev.is_finite() {
            unstable = true;
        } else if next > 0.0 && (next - prev).abs() > DOUBLING_TOLERANCE * next {
            unstable = true;
        }
    }
    (variance_with_stderr(ratios), rounds, unstable)
}

/// Monte Carlo variances of the two-valued likelihood ratios in both
/// directions, with a doubling-stability heavy-tail heuristic: an infinite
/// variance cannot be confirmed by simulation, only discredited, so the flag
/// is conservative.
pub fn check_two_valued_condition(
    family: &Family,
    mu0: f64,
    mu1: f64,
    reps: u64,
    seed: u64,
) -> Result<TwoValuedConditionReport> {
    if reps < (1 << DOUBLING_ROUNDS) * 2 {
        return Err(Error::contract(format!(
            "check_two_valued_condition needs reps ≥ {}",
            (1 << DOUBLING_ROUNDS) * 2
        )));
    }
    if mu0 == mu1 {
        let exact = Estimate {
            value: 0.0,
            stderr: 0.0,
        };
        return Ok(TwoValuedConditionReport {
            var_under_zero: exact,
            var_under_one: exact,
            rounds_zero: vec![0.0; DOUBLING_ROUNDS + 1],
            rounds_one: vec![0.0; DOUBLING_ROUNDS + 1],
            heavy_tail_zero: false,
            heavy_tail_one: false,
        });
    }

    let direction = |under: f64, other: f64, stream_idx: u64| -> Result<Vec<f64>> {
        let mut stream = RngStream::substream(seed, stream_idx);
        (0..reps)
            .map(|_| {
                let y = family.sample_stream(under, &mut stream)?;
                Ok((family.log_density(other, y)? - family.log_density(under, y)?).exp())
            })
            .collect()
    };
    let (var0, rounds0, flag0) = doubling_variance(&direction(mu0, mu1, 0)?);
    let (var1, rounds1, flag1) = doubling_variance(&direction(mu1, mu0, 1)?);
    Ok(TwoValuedConditionReport {
        var_under_zero: var0,
        var_under_one: var1,
        rounds_zero: rounds0,
        rounds_one: rounds1,
        heavy_tail_zero: flag0,
        heavy_tail_one: flag1,
    })
}
