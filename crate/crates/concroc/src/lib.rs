//! Smooth ROC curve and AUC estimation built on log-concave density
//! estimates, with bootstrap confidence intervals, classical comparison
//! estimators, and a Monte Carlo harness for the accompanying CLI.

pub mod boot;
pub mod dist;
pub mod error;
pub mod logcon;
mod numeric;
pub mod rng;
pub mod roc;
pub mod sample;
pub mod sim;
pub mod smooth;
pub mod special;

pub use boot::{boot_ci, BootEntry, BootResult, BootSpec};
pub use dist::{dist_cdf, dist_quantile, dist_sample, Distribution};
pub use error::{Error, Result};
pub use logcon::{
    fit_logconcave, j_fn, j_partials, objective, sample_from_fit, LogConcaveFit, SolverOptions,
};
pub use roc::{
    bias_diagnostic, binormal_auc, binormal_roc, empirical_quantile, empirical_roc, fit_roc,
    logcon_roc, logcon_roc_smoothed, true_roc, RocCurve, RocKind,
};
pub use sample::{preprocess, WeightedSample};
pub use sim::{ase, run_scenario, sim_grid, EstimatorReport, Quantiles, ScenarioSpec, SimReport};
pub use smooth::{smooth_fit, smooth_fit_with, SmoothedFit, VarianceConvention};
