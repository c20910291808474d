//! Monte-Carlo harness: the twelve standard scenarios, the average
//! square error criterion on a midpoint grid, and a deterministic
//! parallel runner that compares estimator kinds against the true curve.

use crate::dist::{dist_sample, Distribution};
use crate::error::{Error, Result};
use crate::numeric::sorted_quantile;
use crate::rng::derive_rng;
use crate::roc::{fit_roc, true_roc, RocCurve, RocKind};
use rayon::prelude::*;

// Stream namespace for simulation replications.
const SIM_TAG: u64 = 2;

/// One simulation scenario: control distribution F with sample size m,
/// case distribution G with sample size n.
#[derive(Debug, Clone)]
pub struct ScenarioSpec {
    /// 1 to 12 for the standard table, 0 for user-defined scenarios.
    pub id: usize,
    pub f: Distribution,
    pub m: usize,
    pub g: Distribution,
    pub n: usize,
}

impl ScenarioSpec {
    /// The twelve standard scenarios.
    pub fn standard(id: usize) -> Result<ScenarioSpec> {
        let normal = |m, v| Distribution::normal(m, v).unwrap();
        let gamma = |a, b| Distribution::gamma(a, b).unwrap();
        let logistic = |m, s| Distribution::logistic(m, s).unwrap();
        let lomax = |a, l| Distribution::lomax(a, l).unwrap();
        let t = |df, loc| Distribution::student_t(df, loc).unwrap();
        let mixture = || {
            Distribution::normal_mixture(vec![0.75, 0.25], vec![(2.5, 1.0), (2.5, 3.0)]).unwrap()
        };
        let (f, m, g, n) = match id {
            1 => (normal(0.0, 1.0), 20, normal(1.0, 1.0), 20),
            2 => (normal(0.0, 1.0), 100, normal(1.0, 1.0), 100),
            3 => (normal(0.0, 1.0), 100, normal(2.0, 1.2), 100),
            4 => (normal(2.0, 1.0), 100, gamma(2.0, 1.0), 100),
            5 => (gamma(2.0, 1.0), 100, gamma(4.0, 1.5), 100),
            6 => (logistic(0.0, 1.0), 100, logistic(2.0, 1.0), 100),
            7 => (lomax(3.0, 7.0), 20, lomax(5.0, 3.0), 20),
            8 => (lomax(3.0, 7.0), 100, lomax(5.0, 3.0), 100),
            9 => (t(5.0, 0.0), 20, t(5.0, 2.0), 20),
            10 => (t(5.0, 0.0), 100, t(5.0, 2.0), 100),
            11 => (normal(0.0, 1.0), 20, mixture(), 20),
            12 => (normal(0.0, 1.0), 100, mixture(), 100),
            _ => {
                return Err(Error::InvalidParam {
                    name: "scenario",
                    reason: format!("standard scenarios are numbered 1 to 12, got {id}"),
                })
            }
        };
        Ok(ScenarioSpec { id, f, m, g, n })
    }

    /// A user-defined scenario (id 0).
    pub fn custom(f: Distribution, m: usize, g: Distribution, n: usize) -> Result<ScenarioSpec> {
        if m < 2 || n < 2 {
            return Err(Error::InvalidParam {
                name: "sample size",
                reason: format!("need at least 2 per group, got m = {m}, n = {n}"),
            });
        }
        Ok(ScenarioSpec { id: 0, f, m, g, n })
    }
}

/// The evaluation grid: midpoints u_k = (k - 1/2) / 100.
pub fn sim_grid() -> Vec<f64> {
    (1..=100).map(|k| (k as f64 - 0.5) / 100.0).collect()
}

/// Average square error of an estimated curve against the truth over a
/// grid of false-positive fractions.
pub fn ase(estimate: &RocCurve, truth: &RocCurve, grid: &[f64]) -> f64 {
    let sum: f64 = grid
        .iter()
        .map(|&u| {
            let d = estimate.eval(u).expect("grid values lie in [0, 1]")
                - truth.eval(u).expect("grid values lie in [0, 1]");
            d * d
        })
        .sum();
    sum / grid.len() as f64
}

/// Five-number summary of a batch of values.
#[derive(Debug, Clone, Copy)]
pub struct Quantiles {
    pub min: f64,
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
    pub max: f64,
}

fn five_number(values: &[f64]) -> Quantiles {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Quantiles {
        min: sorted[0],
        q25: sorted_quantile(&sorted, 0.25),
        median: sorted_quantile(&sorted, 0.5),
        q75: sorted_quantile(&sorted, 0.75),
        max: *sorted.last().unwrap(),
    }
}

/// Per-estimator simulation output.
#[derive(Debug, Clone)]
pub struct EstimatorReport {
    pub kind: RocKind,
    /// ASE per replication, length M.
    pub ase: Vec<f64>,
    /// sqrt(ASE / ASE of the empirical estimator), per replication.
    pub ratio: Vec<f64>,
    pub ase_summary: Quantiles,
    pub ratio_summary: Quantiles,
}

/// Output of one scenario run.
#[derive(Debug, Clone)]
pub struct SimReport {
    pub scenario: usize,
    pub f_label: String,
    pub g_label: String,
    pub m: usize,
    pub n: usize,
    /// Replication count M.
    pub reps: usize,
    pub seed: u64,
    pub grid: Vec<f64>,
    pub estimators: Vec<EstimatorReport>,
    /// Replications that had to be redrawn after a fit failure.
    pub failures: usize,
}

/// Run M replications of a scenario and compare the requested estimator
/// kinds; the empirical estimator is always included because the ratios
/// are measured against it.
pub fn run_scenario(
    spec: &ScenarioSpec,
    reps: usize,
    seed: u64,
    estimators: &[RocKind],
) -> Result<SimReport> {
    if reps == 0 {
        return Err(Error::InvalidParam {
            name: "M",
            reason: "need at least one replication".into(),
        });
    }
    let mut kinds: Vec<RocKind> = vec![RocKind::Empirical];
    for &k in estimators {
        if k == RocKind::TrueParametric {
            return Err(Error::InvalidParam {
                name: "estimators",
                reason: "the true curve is the comparison target, not an estimator".into(),
            });
        }
        if !kinds.contains(&k) {
            kinds.push(k);
        }
    }

    let grid = sim_grid();
    let truth = true_roc(&spec.f, &spec.g);
    // a replication is redrawn when a fit fails; more than 5% of M
    // failures in total abort the run
    let budget = reps / 20;

    let outcomes: Vec<(Vec<f64>, usize)> = (0..reps)
        .into_par_iter()
        .map(|j| {
            let mut rng = derive_rng(seed, &[SIM_TAG, spec.id as u64, j as u64]);
            let mut local_failures = 0usize;
            loop {
                let x = dist_sample(&spec.f, spec.m, &mut rng);
                let y = dist_sample(&spec.g, spec.n, &mut rng);
                let fits: Result<Vec<RocCurve>> =
                    kinds.iter().map(|&k| fit_roc(&x, &y, k)).collect();
                match fits {
                    Ok(curves) => {
                        let ases = curves.iter().map(|c| ase(c, &truth, &grid)).collect();
                        return Ok((ases, local_failures));
                    }
                    Err(_) if local_failures <= budget => local_failures += 1,
                    Err(_) => {
                        return Err(Error::ExcessiveFailures {
                            failures: local_failures + 1,
                            max_allowed: budget,
                        })
                    }
                }
            }
        })
        .collect::<Result<_>>()?;

    let failures: usize = outcomes.iter().map(|(_, f)| f).sum();
    if failures > budget {
        return Err(Error::ExcessiveFailures {
            failures,
            max_allowed: budget,
        });
    }

    let estimators = kinds
        .iter()
        .enumerate()
        .map(|(i, &kind)| {
            let ase: Vec<f64> = outcomes.iter().map(|(a, _)| a[i]).collect();
            let ratio: Vec<f64> = if kind == RocKind::Empirical {
                vec![1.0; reps]
            } else {
                outcomes
                    .iter()
                    .map(|(a, _)| (a[i] / a[0]).sqrt())
                    .collect()
            };
            EstimatorReport {
                kind,
                ase_summary: five_number(&ase),
                ratio_summary: five_number(&ratio),
                ase,
                ratio,
            }
        })
        .collect();

    Ok(SimReport {
        scenario: spec.id,
        f_label: spec.f.to_string(),
        g_label: spec.g.to_string(),
        m: spec.m,
        n: spec.n,
        reps,
        seed,
        grid,
        estimators,
        failures,
    })
}
