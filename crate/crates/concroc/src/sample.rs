//! Canonical weighted-sample representation: sorted distinct values with
//! multiplicity weights. All estimators in this crate consume this form,
//! so tied observations are merged once, here, and nowhere else.

use crate::error::{Error, Result};

/// A sample reduced to strictly increasing distinct values plus the
/// fraction of raw observations at each value.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedSample {
    values: Vec<f64>,
    weights: Vec<f64>,
    n_raw: usize,
}

/// Canonicalize a raw observation vector.
///
/// Sorts, merges exact ties into weights proportional to multiplicity,
/// and validates that at least two distinct finite values remain.
pub fn preprocess(raw: &[f64]) -> Result<WeightedSample> {
    if raw.len() < 2 {
        return Err(Error::EmptyInput);
    }
    for (index, &value) in raw.iter().enumerate() {
        if !value.is_finite() {
            return Err(Error::NonFinite { index, value });
        }
    }
    let mut sorted = raw.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let n = sorted.len();
    let mut values = Vec::new();
    let mut counts: Vec<usize> = Vec::new();
    for &v in &sorted {
        match values.last() {
            Some(&last) if last == v => *counts.last_mut().unwrap() += 1,
            _ => {
                values.push(v);
                counts.push(1);
            }
        }
    }
    if values.len() < 2 {
        return Err(Error::DegenerateSample {
            n,
            value: values[0],
        });
    }
    let weights = counts.iter().map(|&c| c as f64 / n as f64).collect();
    Ok(WeightedSample {
        values,
        weights,
        n_raw: n,
    })
}

impl WeightedSample {
    /// Strictly increasing distinct values.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Positive weights summing to 1, aligned with `values`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Total raw observation count before merging ties.
    pub fn n_raw(&self) -> usize {
        self.n_raw
    }

    /// Number of distinct values.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        *self.values.last().unwrap()
    }

    /// Weighted mean, population variance (denominator n), and unbiased
    /// variance (denominator n - 1).
    pub fn moments(&self) -> (f64, f64, f64) {
        let mean: f64 = self
            .values
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * x)
            .sum();
        let var_pop: f64 = self
            .values
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| {
                let d = x - mean;
                w * d * d
            })
            .sum();
        let n = self.n_raw as f64;
        (mean, var_pop, var_pop * n / (n - 1.0))
    }

    /// Empirical CDF at x: fraction of raw observations <= x.
    pub fn ecdf(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for (v, w) in self.values.iter().zip(&self.weights) {
            if *v <= x {
                acc += w;
            } else {
                break;
            }
        }
        acc
    }
}
