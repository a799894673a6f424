//! Cross-engine validation suites over random desk-scale instances.
//!
//! Each property prints one pass/fail line; any failure serializes the
//! offending instance to a replay file so it can be reproduced exactly.

use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{esp_log, permanent_log};
use crate::families::{loglik_matrix, Family, LogLikelihoodMatrix, ParameterMultiset};
use crate::oracles::{
    pi_rule_enum, pi_rule_permanent, pi_rule_permanent_inner, pi_rule_two_valued, simple_rule,
    two_valued_log_ratios, TwoValuedSpec,
};
use crate::risk::draw_instance;
use crate::rng::RngStream;

const ENGINE_AGREEMENT_TOL: f64 = 1e-9;
const PERMANENT_TOL: f64 = 1e-10;
const ESP_BRIDGE_TOL: f64 = 1e-10;

/// A failed trial, serialized for replay.
#[derive(Debug, Serialize)]
pub struct ReplayRecord {
    pub property: String,
    pub detail: String,
    pub n: usize,
    pub mus: Vec<f64>,
    pub ys: Vec<f64>,
    pub outputs: Vec<(String, Vec<f64>)>,
}

/// Outcome of one property suite.
pub struct PropertyOutcome {
    pub name: &'static str,
    pub trials: usize,
    pub failure: Option<ReplayRecord>,
}

impl PropertyOutcome {
    fn pass(name: &'static str, trials: usize) -> Self {
        Self {
            name,
            trials,
            failure: None,
        }
    }
}

fn max_coord_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Draws a random instance: even trials use i.i.d. uniform parameters on
/// [−1, 1], odd trials a random two-valued multiset (so the two-valued
/// engine gets exercised).
fn random_instance(
    trial: usize,
    max_n: usize,
    stream: &mut RngStream,
) -> Result<(ParameterMultiset, Vec<f64>)> {
    let n = 2 + stream.below(max_n - 1);
    let mus = if trial % 2 == 0 {
        ParameterMultiset::new((0..n).map(|_| stream.uniform_in(-1.0, 1.0)).collect())?
    } else {
        let k = 1 + stream.below(n - 1);
        TwoValuedSpec::new(n, k, stream.uniform_in(-1.0, 0.0), stream.uniform_in(0.0, 1.0))?
            .to_multiset()?
    };
    let inst = draw_instance(&Family::GaussianLocation, &mus, stream)?;
    Ok((mus, inst.ys))
}

/// Engine agreement: enumeration vs permanental minors vs (when the
/// multiset is two-valued) the symmetric-polynomial engine, coordinatewise
/// within 1e−9. `fault_log_bump` feeds the test-only fault hook of the
/// permanent engine.
pub fn check_engine_agreement(
    max_n: usize,
    trials: usize,
    seed: u64,
    fault_log_bump: f64,
) -> Result<PropertyOutcome> {
    let fam = Family::GaussianLocation;
    let mut stream = RngStream::substream(seed, 0);
    for trial in 0..trials {
        let (mus, ys) = random_instance(trial, max_n, &mut stream)?;
        let ll = loglik_matrix(&fam, &mus, &ys)?;
        let reference = pi_rule_enum(&ll, &mus)?;
        let permanent = pi_rule_permanent_inner(&ll, &mus, fault_log_bump)?;
        let mut outputs = vec![
            ("enum".to_string(), reference.values().to_vec()),
            ("permanent".to_string(), permanent.values().to_vec()),
        ];
        let mut worst = max_coord_diff(reference.values(), permanent.values());

        if mus.distinct().len() <= 2 {
            let spec = TwoValuedSpec::from_multiset(&mus)?;
            let lr = two_valued_log_ratios(&fam, &spec, &ys)?;
            let tv = pi_rule_two_valued(&lr, &spec)?;
            worst = worst.max(max_coord_diff(reference.values(), tv.values()));
            outputs.push(("two-valued".to_string(), tv.values().to_vec()));
        }

        if worst > ENGINE_AGREEMENT_TOL {
            return Ok(PropertyOutcome {
                name: "engine-agreement",
                trials,
                failure: Some(ReplayRecord {
                    property: "engine-agreement".into(),
                    detail: format!("max coordinate diff {worst:e} > {ENGINE_AGREEMENT_TOL:e}"),
                    n: mus.n(),
                    mus: mus.values().to_vec(),
                    ys,
                    outputs,
                }),
            });
        }
    }
    Ok(PropertyOutcome::pass("engine-agreement", trials))
}

/// Permutation covariance: permuting the observations permutes every
/// engine's output bit for bit, and a simple-rule coordinate never reacts to
/// another coordinate's observation.
pub fn check_covariance(max_n: usize, trials: usize, seed: u64) -> Result<PropertyOutcome> {
    let fam = Family::GaussianLocation;
    let mut stream = RngStream::substream(seed, 1);
    for trial in 0..trials {
        let (mus, ys) = random_instance(trial, max_n, &mut stream)?;
        let n = mus.n();
        let perm = stream.permutation(n);
        let ys_p: Vec<f64> = perm.iter().map(|&p| ys[p]).collect();
        let ll = loglik_matrix(&fam, &mus, &ys)?;
        let ll_p = loglik_matrix(&fam, &mus, &ys_p)?;

        let engines: [(&str, fn(&LogLikelihoodMatrix, &ParameterMultiset) -> Result<_>); 3] = [
            ("simple", simple_rule),
            ("enum", pi_rule_enum),
            ("permanent", pi_rule_permanent),
        ];
        for (name, rule) in engines {
            let base = rule(&ll, &mus)?;
            let moved = rule(&ll_p, &mus)?;
            let covariant = perm
                .iter()
                .enumerate()
                .all(|(i, &p)| moved.values()[i] == base.values()[p]);
            if !covariant {
                return Ok(PropertyOutcome {
                    name: "covariance",
                    trials,
                    failure: Some(ReplayRecord {
                        property: "covariance".into(),
                        detail: format!("{name} output is not exactly permutation-covariant"),
                        n,
                        mus: mus.values().to_vec(),
                        ys,
                        outputs: vec![
                            (format!("{name}-base"), base.values().to_vec()),
                            (format!("{name}-permuted"), moved.values().to_vec()),
                        ],
                    }),
                });
            }
        }

        // Locality of the simple rule: changing y_k leaves every other
        // coordinate untouched, exactly.
        let mut ys_mod = ys.clone();
        let k = stream.below(n);
        ys_mod[k] = stream.uniform_in(-4.0, 4.0);
        let ll_mod = loglik_matrix(&fam, &mus, &ys_mod)?;
        let base = simple_rule(&ll, &mus)?;
        let modified = simple_rule(&ll_mod, &mus)?;
        let local = (0..n).all(|i| i == k || modified.values()[i] == base.values()[i]);
        if !local {
            return Ok(PropertyOutcome {
                name: "covariance",
                trials,
                failure: Some(ReplayRecord {
                    property: "covariance".into(),
                    detail: "simple-rule coordinate depends on a foreign observation".into(),
                    n,
                    mus: mus.values().to_vec(),
                    ys,
                    outputs: vec![
                        ("simple-base".into(), base.values().to_vec()),
                        ("simple-modified".into(), modified.values().to_vec()),
                    ],
                }),
            });
        }
    }
    Ok(PropertyOutcome::pass("covariance", trials))
}

/// Ryser against the brute-force n!-sum on random positive matrices.
pub fn check_permanent_vs_naive(
    max_n: usize,
    trials: usize,
    seed: u64,
) -> Result<PropertyOutcome> {
    let mut stream = RngStream::substream(seed, 2);
    for _ in 0..trials {
        let n = 1 + stream.below(max_n);
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..n).map(|_| stream.uniform_in(0.05, 10.0)).collect())
            .collect();
        let log_rows: Vec<Vec<f64>> = rows
            .iter()
            .map(|r| r.iter().map(|v| v.ln()).collect())
            .collect();
        let ryser = permanent_log(&LogLikelihoodMatrix::from_rows(log_rows)?)?;
        let naive = naive_permanent(&rows);
        let diff = (ryser.log_abs - naive.ln()).abs();
        if ryser.sign != 1 || diff > PERMANENT_TOL {
            return Ok(PropertyOutcome {
                name: "permanent-vs-naive",
                trials,
                failure: Some(ReplayRecord {
                    property: "permanent-vs-naive".into(),
                    detail: format!("log-permanent diff {diff:e} > {PERMANENT_TOL:e}"),
                    n,
                    mus: Vec::new(),
                    ys: rows.into_iter().flatten().collect(),
                    outputs: vec![
                        ("ryser-log".into(), vec![ryser.log_abs]),
                        ("naive-log".into(), vec![naive.ln()]),
                    ],
                }),
            });
        }
    }
    Ok(PropertyOutcome::pass("permanent-vs-naive", trials))
}

/// Brute-force permanent over all permutations; the validation-side oracle.
fn naive_permanent(values: &[Vec<f64>]) -> f64 {
    fn recurse(values: &[Vec<f64>], used: &mut [bool], row: usize) -> f64 {
        let n = values.len();
        if row == n {
            return 1.0;
        }
        let mut total = 0.0;
        for j in 0..n {
            if !used[j] {
                used[j] = true;
                total += values[row][j] * recurse(values, used, row + 1);
                used[j] = false;
            }
        }
        total
    }
    let mut used = vec![false; values.len()];
    recurse(values, &mut used, 0)
}

/// Permanent of a two-distinct-column matrix against the symmetric
/// polynomial route: perm = K! (n−K)! (Π f₀(y_i)) e_K(ρ), ρ_i = f₁/f₀(y_i).
pub fn check_esp_bridge(trials: usize, seed: u64) -> Result<PropertyOutcome> {
    let mut stream = RngStream::substream(seed, 3);
    let mut count = 0usize;
    for _ in 0..trials {
        let n = 2 + stream.below(11); // up to 12
        let log_f0: Vec<f64> = (0..n).map(|_| stream.uniform_in(-3.0, 1.0)).collect();
        let log_f1: Vec<f64> = (0..n).map(|_| stream.uniform_in(-3.0, 1.0)).collect();
        let log_rho: Vec<f64> = log_f1.iter().zip(&log_f0).map(|(a, b)| a - b).collect();
        let esp = esp_log(&log_rho)?;
        for k in 0..=n {
            count += 1;
            // Matrix with K columns of f1 and n-K of f0.
            let rows: Vec<Vec<f64>> = (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| if j < k { log_f1[i] } else { log_f0[i] })
                        .collect()
                })
                .collect();
            let perm = permanent_log(&LogLikelihoodMatrix::from_rows(rows)?)?;
            let expect = log_factorial(k)
                + log_factorial(n - k)
                + log_f0.iter().sum::<f64>()
                + esp.log_e[k];
            let diff = (perm.log_abs - expect).abs();
            if diff > ESP_BRIDGE_TOL {
                return Ok(PropertyOutcome {
                    name: "esp-bridge",
                    trials: count,
                    failure: Some(ReplayRecord {
                        property: "esp-bridge".into(),
                        detail: format!("K={k}: log diff {diff:e} > {ESP_BRIDGE_TOL:e}"),
                        n,
                        mus: vec![k as f64],
                        ys: log_rho.clone(),
                        outputs: vec![
                            ("permanent-log".into(), vec![perm.log_abs]),
                            ("esp-route-log".into(), vec![expect]),
                        ],
                    }),
                });
            }
        }
    }
    Ok(PropertyOutcome {
        name: "esp-bridge",
        trials: count,
        failure: None,
    })
}

fn log_factorial(k: usize) -> f64 {
    (2..=k).map(|i| (i as f64).ln()).sum()
}

/// Posterior-mean range: every estimate lies inside [min μ, max μ].
pub fn check_estimate_range(max_n: usize, trials: usize, seed: u64) -> Result<PropertyOutcome> {
    let fam = Family::GaussianLocation;
    let mut stream = RngStream::substream(seed, 4);
    for trial in 0..trials {
        let (mus, ys) = random_instance(trial, max_n, &mut stream)?;
        let ll = loglik_matrix(&fam, &mus, &ys)?;
        for (name, est) in [
            ("simple", simple_rule(&ll, &mus)?),
            ("enum", pi_rule_enum(&ll, &mus)?),
            ("permanent", pi_rule_permanent(&ll, &mus)?),
        ] {
            if est
                .values()
                .iter()
                .any(|&v| v < mus.min() || v > mus.max())
            {
                return Ok(PropertyOutcome {
                    name: "estimate-range",
                    trials,
                    failure: Some(ReplayRecord {
                        property: "estimate-range".into(),
                        detail: format!("{name} estimate escapes the parameter range"),
                        n: mus.n(),
                        mus: mus.values().to_vec(),
                        ys,
                        outputs: vec![(name.into(), est.values().to_vec())],
                    }),
                });
            }
        }
    }
    Ok(PropertyOutcome::pass("estimate-range", trials))
}

/// Runs all property suites, printing one line per property. Returns the
/// failures (empty = everything passed).
pub fn run_all(
    max_n: usize,
    trials: usize,
    seed: u64,
    fault_log_bump: f64,
    replay_out: &Path,
) -> Result<bool> {
    if trials == 0 {
        return Err(Error::contract("validate needs trials ≥ 1"));
    }
    if !(2..=7).contains(&max_n) {
        return Err(Error::contract("validate needs 2 ≤ max_n ≤ 7"));
    }
    let outcomes = vec![
        check_engine_agreement(max_n, trials, seed, fault_log_bump)?,
        check_covariance(max_n, trials, seed)?,
        check_permanent_vs_naive(max_n, trials, seed)?,
        check_esp_bridge(trials, seed)?,
        check_estimate_range(max_n, trials, seed)?,
    ];
    let mut all_pass = true;
    for outcome in &outcomes {
        match &outcome.failure {
            None => println!("PROP {:<20} pass ({} trials)", outcome.name, outcome.trials),
            Some(replay) => {
                all_pass = false;
                println!("PROP {:<20} FAIL: {}", outcome.name, replay.detail);
            }
        }
    }
    if let Some(replay) = outcomes.into_iter().find_map(|o| o.failure) {
        let json = serde_json::to_string_pretty(&replay)
            .map_err(|e| Error::contract(format!("replay serialization failed: {e}")))?;
        std::fs::write(replay_out, json + "\n")
            .map_err(|e| Error::contract(format!("cannot write replay file: {e}")))?;
        eprintln!("replay instance written to {}", replay_out.display());
    }
    Ok(all_pass)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_properties_pass_on_healthy_engines() {
        for suite in [
            check_engine_agreement(6, 20, 99, 0.0).unwrap(),
            check_covariance(6, 10, 99).unwrap(),
            check_permanent_vs_naive(6, 20, 99).unwrap(),
            check_esp_bridge(6, 99).unwrap(),
            check_estimate_range(6, 10, 99).unwrap(),
        ] {
            assert!(suite.failure.is_none(), "{} failed", suite.name);
        }
    }

    #[test]
    fn injected_fault_is_detected() {
        let outcome = check_engine_agreement(6, 20, 99, 1e-6).unwrap();
        let replay = outcome.failure.expect("fault must be caught");
        assert_eq!(replay.property, "engine-agreement");
        assert!(!replay.ys.is_empty());
    }

    #[test]
    fn naive_permanent_small_identities() {
        assert_eq!(naive_permanent(&[vec![3.0]]), 3.0);
        assert_eq!(
            naive_permanent(&[vec![1.0, 2.0], vec![3.0, 4.0]]),
            1.0 * 4.0 + 2.0 * 3.0
        );
        // All-ones 3×3 has permanent 3! = 6.
        assert_eq!(naive_permanent(&vec![vec![1.0; 3]; 3]), 6.0);
    }
}
