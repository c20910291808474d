//! Percentile bootstrap confidence intervals for R(t). Each replicate
//! resamples both groups with replacement, refits the chosen estimator,
//! and evaluates it at every requested t; the interval at level 1 - alpha
//! is the pair of empirical alpha/2 and 1 - alpha/2 quantiles of the
//! replicate values.
//!
//! Replicate b draws from its own RNG stream derived from (seed, b), so
//! results are identical for any degree of parallelism.

use crate::error::{Error, Result};
use crate::numeric::sorted_quantile;
use crate::rng::{derive_rng, sample_index};
use crate::roc::{fit_roc, RocKind};
use rand::RngCore;
use rayon::prelude::*;

// Stream namespace separating bootstrap draws from other consumers of
// the same master seed.
const BOOT_TAG: u64 = 1;

// A resample with fewer than two distinct values is redrawn; this many
// consecutive rejections abort the replicate.
const MAX_REDRAWS: usize = 100;

/// Bootstrap configuration.
#[derive(Debug, Clone)]
pub struct BootSpec {
    /// Evaluation points, each strictly inside (0, 1).
    pub t_list: Vec<f64>,
    /// Number of bootstrap replicates.
    pub b: usize,
    /// Level complement: intervals have nominal coverage 1 - alpha.
    pub alpha: f64,
    /// Master seed; fixes the output exactly.
    pub seed: u64,
    /// Estimator refitted on every resample.
    pub method: RocKind,
}

impl Default for BootSpec {
    fn default() -> Self {
        BootSpec {
            t_list: vec![0.1, 0.3, 0.5, 0.7, 0.9],
            b: 500,
            alpha: 0.05,
            seed: 0,
            method: RocKind::LogConcave,
        }
    }
}

impl BootSpec {
    fn validate(&self) -> Result<()> {
        if self.b < 2 {
            return Err(Error::InvalidParam {
                name: "B",
                reason: format!("need at least 2 replicates, got {}", self.b),
            });
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::OutOfRange {
                name: "alpha",
                value: self.alpha,
                lo: 0.0,
                hi: 1.0,
            });
        }
        if self.t_list.is_empty() {
            return Err(Error::InvalidParam {
                name: "t",
                reason: "at least one evaluation point is required".into(),
            });
        }
        for &t in &self.t_list {
            if !(t > 0.0 && t < 1.0) {
                return Err(Error::OutOfRange {
                    name: "t",
                    value: t,
                    lo: 0.0,
                    hi: 1.0,
                });
            }
        }
        Ok(())
    }
}

/// Interval for one evaluation point.
#[derive(Debug, Clone)]
pub struct BootEntry {
    /// False-positive fraction the row refers to.
    pub t: f64,
    /// Estimate on the original data.
    pub estimate: f64,
    /// Lower percentile bound.
    pub lower: f64,
    /// Upper percentile bound.
    pub upper: f64,
    /// Replicates that entered the quantiles.
    pub replicates: usize,
    /// Total degenerate resamples that were redrawn.
    pub redraws: usize,
}

/// Bootstrap output: one entry per requested t.
#[derive(Debug, Clone)]
pub struct BootResult {
    pub entries: Vec<BootEntry>,
    pub method: RocKind,
    pub alpha: f64,
    pub seed: u64,
}

// One resample pair with replacement; all-equal draws in either group
// are rejected and redrawn from the same stream.
fn resample_pair<R: RngCore + ?Sized>(
    x: &[f64],
    y: &[f64],
    rng: &mut R,
) -> Result<(Vec<f64>, Vec<f64>, usize)> {
    for attempt in 0..MAX_REDRAWS {
        let xs: Vec<f64> = (0..x.len()).map(|_| x[sample_index(rng, x.len())]).collect();
        let ys: Vec<f64> = (0..y.len()).map(|_| y[sample_index(rng, y.len())]).collect();
        let degenerate = |v: &[f64]| v.iter().all(|&a| a == v[0]);
        if !degenerate(&xs) && !degenerate(&ys) {
            return Ok((xs, ys, attempt));
        }
    }
    Err(Error::ResampleStalled {
        attempts: MAX_REDRAWS,
    })
}

/// Percentile bootstrap intervals for R(t) at every t in the spec.
pub fn boot_ci(x: &[f64], y: &[f64], spec: &BootSpec) -> Result<BootResult> {
    spec.validate()?;
    let base = fit_roc(x, y, spec.method)?;
    let estimates: Vec<f64> = spec
        .t_list
        .iter()
        .map(|&t| base.eval(t))
        .collect::<Result<_>>()?;

    let replicates: Vec<(Vec<f64>, usize)> = (0..spec.b)
        .into_par_iter()
        .map(|b| {
            let mut rng = derive_rng(spec.seed, &[BOOT_TAG, b as u64]);
            let (xs, ys, redraws) = resample_pair(x, y, &mut rng)?;
            let curve = fit_roc(&xs, &ys, spec.method)?;
            let values = spec
                .t_list
                .iter()
                .map(|&t| curve.eval(t))
                .collect::<Result<Vec<f64>>>()?;
            Ok((values, redraws))
        })
        .collect::<Result<_>>()?;

    let redraws: usize = replicates.iter().map(|(_, r)| r).sum();
    let entries = spec
        .t_list
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let mut column: Vec<f64> = replicates.iter().map(|(v, _)| v[i]).collect();
            column.sort_by(|a, b| a.partial_cmp(b).unwrap());
            BootEntry {
                t,
                estimate: estimates[i],
                lower: sorted_quantile(&column, spec.alpha / 2.0),
                upper: sorted_quantile(&column, 1.0 - spec.alpha / 2.0),
                replicates: spec.b,
                redraws,
            }
        })
        .collect();

    Ok(BootResult {
        entries,
        method: spec.method,
        alpha: spec.alpha,
        seed: spec.seed,
    })
}
