//! Parametric distribution families used by the simulation scenarios:
//! CDFs, quantiles, and deterministic inverse-CDF sampling.

use crate::error::{Error, Result};
use crate::numeric::invert_cdf;
use crate::rng::uniform_open01;
use crate::special::{gamma_p, inc_beta, ln_gamma, norm_cdf, norm_pdf, norm_quantile};
use rand::RngCore;
use std::fmt;

// Quantile root-finding accuracy on the CDF scale.
const QUANTILE_TOL: f64 = 1e-12;

/// A scenario distribution. Construct through the checked constructors;
/// parameters follow the conventions documented on each variant.
#[derive(Debug, Clone, PartialEq)]
pub enum Distribution {
    /// Normal with the given mean and variance (not standard deviation).
    Normal { mean: f64, variance: f64 },
    /// Gamma with shape alpha and rate beta (density ~ x^(a-1) e^(-b x)).
    Gamma { shape: f64, rate: f64 },
    /// Logistic with location and scale.
    Logistic { location: f64, scale: f64 },
    /// Lomax (Pareto type II) with shape alpha and scale lambda:
    /// CDF 1 - (1 + x/lambda)^(-alpha) on x >= 0.
    Lomax { shape: f64, scale: f64 },
    /// Student t with the given degrees of freedom, shifted by location
    /// (unit scale).
    StudentT { df: f64, location: f64 },
    /// Finite normal mixture; components are (mean, variance) pairs.
    NormalMixture {
        weights: Vec<f64>,
        components: Vec<(f64, f64)>,
    },
}

fn require_positive(name: &'static str, v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::InvalidParam {
            name,
            reason: format!("must be a positive finite number, got {v}"),
        });
    }
    Ok(())
}

fn require_finite(name: &'static str, v: f64) -> Result<()> {
    if !v.is_finite() {
        return Err(Error::InvalidParam {
            name,
            reason: format!("must be finite, got {v}"),
        });
    }
    Ok(())
}

impl Distribution {
    pub fn normal(mean: f64, variance: f64) -> Result<Self> {
        require_finite("mean", mean)?;
        require_positive("variance", variance)?;
        Ok(Distribution::Normal { mean, variance })
    }

    pub fn gamma(shape: f64, rate: f64) -> Result<Self> {
        require_positive("shape", shape)?;
        require_positive("rate", rate)?;
        Ok(Distribution::Gamma { shape, rate })
    }

    pub fn logistic(location: f64, scale: f64) -> Result<Self> {
        require_finite("location", location)?;
        require_positive("scale", scale)?;
        Ok(Distribution::Logistic { location, scale })
    }

    pub fn lomax(shape: f64, scale: f64) -> Result<Self> {
        require_positive("shape", shape)?;
        require_positive("scale", scale)?;
        Ok(Distribution::Lomax { shape, scale })
    }

    pub fn student_t(df: f64, location: f64) -> Result<Self> {
        require_positive("df", df)?;
        require_finite("location", location)?;
        Ok(Distribution::StudentT { df, location })
    }

    pub fn normal_mixture(weights: Vec<f64>, components: Vec<(f64, f64)>) -> Result<Self> {
        if weights.is_empty() || weights.len() != components.len() {
            return Err(Error::InvalidParam {
                name: "weights",
                reason: format!(
                    "got {} weights for {} components",
                    weights.len(),
                    components.len()
                ),
            });
        }
        for &w in &weights {
            require_positive("weights", w)?;
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParam {
                name: "weights",
                reason: format!("must sum to 1, got {sum}"),
            });
        }
        for &(mean, variance) in &components {
            require_finite("components", mean)?;
            require_positive("components", variance)?;
        }
        Ok(Distribution::NormalMixture {
            weights,
            components,
        })
    }
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distribution::Normal { mean, variance } => write!(f, "N({mean}, {variance})"),
            Distribution::Gamma { shape, rate } => write!(f, "Ga({shape}, {rate})"),
            Distribution::Logistic { location, scale } => write!(f, "Log({location}, {scale})"),
            Distribution::Lomax { shape, scale } => write!(f, "Lomax({shape}, {scale})"),
            Distribution::StudentT { df, location } => write!(f, "t({df}, {location})"),
            Distribution::NormalMixture {
                weights,
                components,
            } => {
                for (i, (w, (m, v))) in weights.iter().zip(components).enumerate() {
                    if i > 0 {
                        write!(f, " + ")?;
                    }
                    write!(f, "{w}*N({m}, {v})")?;
                }
                Ok(())
            }
        }
    }
}

/// CDF of `d` at `x`; saturates to 0 and 1 outside the support, including
/// at infinite arguments.
pub fn dist_cdf(d: &Distribution, x: f64) -> f64 {
    if x == f64::NEG_INFINITY {
        return 0.0;
    }
    if x == f64::INFINITY {
        return 1.0;
    }
    match d {
        Distribution::Normal { mean, variance } => norm_cdf((x - mean) / variance.sqrt()),
        Distribution::Gamma { shape, rate } => {
            if x <= 0.0 {
                0.0
            } else {
                gamma_p(*shape, rate * x)
            }
        }
        Distribution::Logistic { location, scale } => {
            1.0 / (1.0 + (-(x - location) / scale).exp())
        }
        Distribution::Lomax { shape, scale } => {
            if x <= 0.0 {
                0.0
            } else {
                -(-shape * (x / scale).ln_1p()).exp_m1()
            }
        }
        Distribution::StudentT { df, location } => {
            let t = x - location;
            let w = df / (df + t * t);
            let half_tail = 0.5 * inc_beta(0.5 * df, 0.5, w);
            if t >= 0.0 {
                1.0 - half_tail
            } else {
                half_tail
            }
        }
        Distribution::NormalMixture {
            weights,
            components,
        } => weights
            .iter()
            .zip(components)
            .map(|(w, (m, v))| w * norm_cdf((x - m) / v.sqrt()))
            .sum(),
    }
}

// Density, used to polish quantile root finds and nowhere else.
fn dist_pdf(d: &Distribution, x: f64) -> f64 {
    match d {
        Distribution::Normal { mean, variance } => {
            let sd = variance.sqrt();
            norm_pdf((x - mean) / sd) / sd
        }
        Distribution::Gamma { shape, rate } => {
            if x <= 0.0 {
                0.0
            } else {
                (shape * rate.ln() + (shape - 1.0) * x.ln() - rate * x - ln_gamma(*shape)).exp()
            }
        }
        Distribution::Logistic { location, scale } => {
            let e = (-(x - location).abs() / scale).exp();
            e / (scale * (1.0 + e) * (1.0 + e))
        }
        Distribution::Lomax { shape, scale } => {
            if x < 0.0 {
                0.0
            } else {
                shape / scale * (-(shape + 1.0) * (x / scale).ln_1p()).exp()
            }
        }
        Distribution::StudentT { df, location } => {
            let t = x - location;
            (ln_gamma(0.5 * (df + 1.0)) - ln_gamma(0.5 * df)
                - 0.5 * (df * std::f64::consts::PI).ln()
                - 0.5 * (df + 1.0) * (t * t / df).ln_1p())
            .exp()
        }
        Distribution::NormalMixture {
            weights,
            components,
        } => weights
            .iter()
            .zip(components)
            .map(|(w, (m, v))| {
                let sd = v.sqrt();
                w * norm_pdf((x - m) / sd) / sd
            })
            .sum(),
    }
}

/// Quantile of `d` at probability `p`. The endpoints return the support
/// boundaries (infinite where the support is unbounded); p outside [0, 1]
/// is an error.
pub fn dist_quantile(d: &Distribution, p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::OutOfRange {
            name: "p",
            value: p,
            lo: 0.0,
            hi: 1.0,
        });
    }
    if p == 0.0 {
        return Ok(match d {
            Distribution::Gamma { .. } | Distribution::Lomax { .. } => 0.0,
            _ => f64::NEG_INFINITY,
        });
    }
    if p == 1.0 {
        return Ok(f64::INFINITY);
    }
    Ok(quantile_interior(d, p))
}

// Quantile for p strictly inside (0, 1).
fn quantile_interior(d: &Distribution, p: f64) -> f64 {
    match d {
        Distribution::Normal { mean, variance } => mean + variance.sqrt() * norm_quantile(p),
        Distribution::Logistic { location, scale } => {
            location + scale * (p.ln() - (-p).ln_1p())
        }
        Distribution::Lomax { shape, scale } => {
            // (1-p)^(-1/alpha) - 1, written to stay accurate for small p
            scale * ((-(-p).ln_1p() / shape).exp_m1())
        }
        Distribution::Gamma { shape, rate } => {
            let mut hi = (shape + 10.0 * shape.sqrt() + 10.0) / rate;
            for _ in 0..300 {
                if dist_cdf(d, hi) >= p {
                    break;
                }
                hi *= 2.0;
            }
            invert_cdf(
                |x| dist_cdf(d, x),
                |x| dist_pdf(d, x),
                0.0,
                hi,
                p,
                QUANTILE_TOL,
            )
        }
        Distribution::StudentT { df: _, location } => {
            let mut span = 10.0;
            for _ in 0..300 {
                if dist_cdf(d, location - span) <= p && dist_cdf(d, location + span) >= p {
                    break;
                }
                span *= 2.0;
            }
            invert_cdf(
                |x| dist_cdf(d, x),
                |x| dist_pdf(d, x),
                location - span,
                location + span,
                p,
                QUANTILE_TOL,
            )
        }
        Distribution::NormalMixture { components, .. } => {
            // the mixture quantile lies between the extreme component
            // quantiles at the same p
            let z = norm_quantile(p);
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for &(m, v) in components {
                let q = m + v.sqrt() * z;
                lo = lo.min(q);
                hi = hi.max(q);
            }
            if lo == hi {
                return lo;
            }
            invert_cdf(
                |x| dist_cdf(d, x),
                |x| dist_pdf(d, x),
                lo,
                hi,
                p,
                QUANTILE_TOL,
            )
        }
    }
}

/// Draw `count` values by inverse-CDF sampling; deterministic given the
/// stream state.
pub fn dist_sample<R: RngCore + ?Sized>(d: &Distribution, count: usize, rng: &mut R) -> Vec<f64> {
    (0..count)
        .map(|_| quantile_interior(d, uniform_open01(rng)))
        .collect()
}
