//! ROC curve estimators. A curve maps the false-positive fraction t to
//! R(t) = 1 - G(F^{-1}(1 - t)), where F is the control and G the case
//! distribution; estimators differ in which CDF-quantile pair they plug
//! in: empirical step functions, log-concave fits, their smoothed
//! versions, a two-parameter binormal fit, or the true parametric forms.

use crate::dist::{dist_cdf, dist_quantile, Distribution};
use crate::error::{Error, Result};
use crate::logcon::{fit_logconcave, LogConcaveFit, SolverOptions};
use crate::numeric::simpson;
use crate::sample::preprocess;
use crate::smooth::{smooth_fit, SmoothedFit};
use crate::special::{norm_cdf, norm_quantile};

// 2^14 equal subintervals for AUC quadrature of the non-step kinds.
const AUC_PANELS: usize = 1 << 13;

/// Estimator family of a [`RocCurve`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RocKind {
    Empirical,
    LogConcave,
    SmoothedLogConcave,
    Binormal,
    TrueParametric,
}

impl RocKind {
    /// Short name used on the command line and in reports.
    pub fn label(&self) -> &'static str {
        match self {
            RocKind::Empirical => "empirical",
            RocKind::LogConcave => "logcon",
            RocKind::SmoothedLogConcave => "logcon-smooth",
            RocKind::Binormal => "binormal",
            RocKind::TrueParametric => "true",
        }
    }

    /// Parse a user-facing estimator name; the true parametric curve is
    /// not selectable, it requires known distributions.
    pub fn from_name(name: &str) -> Result<RocKind> {
        match name {
            "empirical" => Ok(RocKind::Empirical),
            "logcon" => Ok(RocKind::LogConcave),
            "logcon-smooth" => Ok(RocKind::SmoothedLogConcave),
            "binormal" => Ok(RocKind::Binormal),
            _ => Err(Error::Usage(format!(
                "unknown method {name}; expected empirical, logcon, logcon-smooth or binormal"
            ))),
        }
    }
}

impl std::fmt::Display for RocKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// An estimated (or true) ROC curve, evaluable on [0, 1].
#[derive(Debug, Clone)]
pub enum RocCurve {
    /// Step curve over the raw samples, kept sorted with ties.
    Empirical { controls: Vec<f64>, cases: Vec<f64> },
    /// Log-concave MLE plug-in.
    LogConcave {
        controls: LogConcaveFit,
        cases: LogConcaveFit,
    },
    /// Smoothed log-concave plug-in.
    SmoothedLogConcave {
        controls: SmoothedFit,
        cases: SmoothedFit,
    },
    /// R(t) = Phi(a + b Phi^{-1}(t)).
    Binormal { a: f64, b: f64 },
    /// True curve of a known pair of distributions.
    TrueParametric {
        controls: Distribution,
        cases: Distribution,
    },
}

/// Empirical quantile F^{-1}(p) of a sorted sample: the smallest value
/// whose ECDF reaches p; p = 0 yields a -inf sentinel.
pub fn empirical_quantile(sorted: &[f64], p: f64) -> f64 {
    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    let n = sorted.len();
    let idx = ((n as f64 * p.min(1.0)).ceil() as usize).clamp(1, n);
    sorted[idx - 1]
}

// Fraction of a sorted sample (ties kept) at or below x.
fn ecdf_sorted(sorted: &[f64], x: f64) -> f64 {
    let k = sorted.partition_point(|&v| v <= x);
    k as f64 / sorted.len() as f64
}

fn sorted_copy(raw: &[f64]) -> Result<Vec<f64>> {
    if raw.is_empty() {
        return Err(Error::EmptyInput);
    }
    for (index, &value) in raw.iter().enumerate() {
        if !value.is_finite() {
            return Err(Error::NonFinite { index, value });
        }
    }
    let mut v = raw.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(v)
}

/// Step-function ROC curve from raw control and case values.
pub fn empirical_roc(x: &[f64], y: &[f64]) -> Result<RocCurve> {
    Ok(RocCurve::Empirical {
        controls: sorted_copy(x)?,
        cases: sorted_copy(y)?,
    })
}

/// Plug-in curve from two log-concave fits.
pub fn logcon_roc(fx: &LogConcaveFit, gy: &LogConcaveFit) -> RocCurve {
    RocCurve::LogConcave {
        controls: fx.clone(),
        cases: gy.clone(),
    }
}

/// Plug-in curve from two smoothed log-concave fits.
pub fn logcon_roc_smoothed(fx: &SmoothedFit, gy: &SmoothedFit) -> RocCurve {
    RocCurve::SmoothedLogConcave {
        controls: fx.clone(),
        cases: gy.clone(),
    }
}

/// Binormal curve with moment parameters a = (mean_y - mean_x) / s_y and
/// b = s_x / s_y (unbiased standard deviations).
pub fn binormal_roc(x: &[f64], y: &[f64]) -> Result<RocCurve> {
    let sx = preprocess(x)?;
    let sy = preprocess(y)?;
    let (mx, _, vx) = sx.moments();
    let (my, _, vy) = sy.moments();
    Ok(RocCurve::Binormal {
        a: (my - mx) / vy.sqrt(),
        b: (vx / vy).sqrt(),
    })
}

/// True ROC curve of a known control/case distribution pair.
pub fn true_roc(f: &Distribution, g: &Distribution) -> RocCurve {
    RocCurve::TrueParametric {
        controls: f.clone(),
        cases: g.clone(),
    }
}

/// Closed-form AUC of the binormal curve, Phi(a / sqrt(1 + b^2)).
pub fn binormal_auc(a: f64, b: f64) -> f64 {
    norm_cdf(a / (1.0 + b * b).sqrt())
}

/// Build the requested estimator directly from raw samples.
pub fn fit_roc(x: &[f64], y: &[f64], kind: RocKind) -> Result<RocCurve> {
    match kind {
        RocKind::Empirical => empirical_roc(x, y),
        RocKind::Binormal => binormal_roc(x, y),
        RocKind::LogConcave | RocKind::SmoothedLogConcave => {
            let sx = preprocess(x)?;
            let sy = preprocess(y)?;
            let opts = SolverOptions::default();
            let fx = fit_logconcave(&sx, &opts)?;
            let gy = fit_logconcave(&sy, &opts)?;
            if kind == RocKind::LogConcave {
                Ok(logcon_roc(&fx, &gy))
            } else {
                Ok(logcon_roc_smoothed(
                    &smooth_fit(&fx, &sx)?,
                    &smooth_fit(&gy, &sy)?,
                ))
            }
        }
        RocKind::TrueParametric => Err(Error::InvalidParam {
            name: "kind",
            reason: "the true curve needs distributions, not samples".into(),
        }),
    }
}

impl RocCurve {
    /// Which estimator family this curve belongs to.
    pub fn kind(&self) -> RocKind {
        match self {
            RocCurve::Empirical { .. } => RocKind::Empirical,
            RocCurve::LogConcave { .. } => RocKind::LogConcave,
            RocCurve::SmoothedLogConcave { .. } => RocKind::SmoothedLogConcave,
            RocCurve::Binormal { .. } => RocKind::Binormal,
            RocCurve::TrueParametric { .. } => RocKind::TrueParametric,
        }
    }

    /// Binormal parameters (a, b), when applicable.
    pub fn binormal_params(&self) -> Option<(f64, f64)> {
        match self {
            RocCurve::Binormal { a, b } => Some((*a, *b)),
            _ => None,
        }
    }

    /// Evaluate R(t); t must lie in [0, 1].
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::OutOfRange {
                name: "t",
                value: t,
                lo: 0.0,
                hi: 1.0,
            });
        }
        Ok(self.value(t))
    }

    // R(t) for t in [0, 1]. Conventions: R(1) = 1 for every kind; at
    // t = 0 the kinds with unbounded control support take their limit 0,
    // the bounded ones their natural value.
    fn value(&self, t: f64) -> f64 {
        if t >= 1.0 {
            return 1.0;
        }
        let r = match self {
            RocCurve::Empirical { controls, cases } => {
                let q = empirical_quantile(controls, 1.0 - t);
                1.0 - ecdf_sorted(cases, q)
            }
            RocCurve::LogConcave { controls, cases } => {
                1.0 - cases.cdf(controls.quantile_clamped(1.0 - t))
            }
            RocCurve::SmoothedLogConcave { controls, cases } => {
                if t <= 0.0 {
                    return 0.0;
                }
                let q = controls
                    .quantile(1.0 - t)
                    .expect("1 - t lies strictly inside (0, 1)");
                1.0 - cases.cdf(q)
            }
            RocCurve::Binormal { a, b } => {
                if t <= 0.0 {
                    return 0.0;
                }
                norm_cdf(a + b * norm_quantile(t))
            }
            RocCurve::TrueParametric { controls, cases } => {
                if t <= 0.0 {
                    return 0.0;
                }
                let q = dist_quantile(controls, 1.0 - t)
                    .expect("1 - t lies strictly inside (0, 1)");
                1.0 - dist_cdf(cases, q)
            }
        };
        r.clamp(0.0, 1.0)
    }

    /// Area under the curve: exact Mann-Whitney counting for the
    /// empirical kind, Simpson quadrature on 2^14 subintervals otherwise.
    pub fn auc(&self) -> f64 {
        match self {
            RocCurve::Empirical { controls, cases } => {
                let mut gt: u64 = 0;
                let mut eq: u64 = 0;
                for &y in cases {
                    let below = controls.partition_point(|&x| x < y) as u64;
                    let at_or_below = controls.partition_point(|&x| x <= y) as u64;
                    gt += below;
                    eq += at_or_below - below;
                }
                let mn = (controls.len() * cases.len()) as f64;
                (2 * gt + eq) as f64 / (2.0 * mn)
            }
            _ => simpson(|t| self.value(t), 0.0, 1.0, AUC_PANELS),
        }
    }
}

/// Smallest grid point p = k / grid_n with R(p) < p, if any: flags the
/// region where an estimated curve dips below the diagonal.
pub fn bias_diagnostic(c: &RocCurve, grid_n: usize) -> Option<f64> {
    for k in 1..grid_n {
        let p = k as f64 / grid_n as f64;
        if c.value(p) < p {
            return Some(p);
        }
    }
    None
}
