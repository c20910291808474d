//! Gaussian smoothing of a fitted log-concave density. The smoothed
//! estimate is the convolution of the fit with N(0, gamma^2), where
//! gamma^2 = max(0, sigma-hat^2 - var(fit)) restores the sample variance;
//! convolving a log-concave density with a Gaussian keeps it log-concave.
//!
//! Both the density and the CDF of the convolution have closed forms:
//! each log-linear segment contributes terms of the shape
//! e^expo (Phi(hi) - Phi(lo)).

use crate::error::{Error, Result};
use crate::logcon::{j_fn, LogConcaveFit, SERIES_THRESHOLD};
use crate::numeric::invert_cdf;
use crate::sample::WeightedSample;
use crate::special::{log_norm_cdf, norm_cdf, norm_pdf};

/// Which sample variance the smoothing bandwidth restores.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum VarianceConvention {
    /// Denominator n.
    #[default]
    Population,
    /// Denominator n - 1.
    Unbiased,
}

/// A log-concave fit convolved with a N(0, gamma^2) kernel.
#[derive(Debug, Clone)]
pub struct SmoothedFit {
    base: LogConcaveFit,
    gamma: f64,
    sample_var: f64,
}

/// Smooth `fit` so that its variance matches the population variance of
/// the sample it was estimated from.
pub fn smooth_fit(fit: &LogConcaveFit, s: &WeightedSample) -> Result<SmoothedFit> {
    smooth_fit_with(fit, s, VarianceConvention::Population)
}

/// Smooth `fit` with an explicit choice of sample variance convention.
///
/// The fit must come from `s`: every knot has to be one of the sample
/// values, otherwise the bandwidth formula is meaningless.
pub fn smooth_fit_with(
    fit: &LogConcaveFit,
    s: &WeightedSample,
    convention: VarianceConvention,
) -> Result<SmoothedFit> {
    for &k in fit.knots() {
        let found = s
            .values()
            .binary_search_by(|v| v.partial_cmp(&k).unwrap())
            .is_ok();
        if !found {
            return Err(Error::MismatchedInputs {
                reason: format!("fit knot {k} is not a value of the sample"),
            });
        }
    }
    let (_, var_pop, var_unbiased) = s.moments();
    let sample_var = match convention {
        VarianceConvention::Population => var_pop,
        VarianceConvention::Unbiased => var_unbiased,
    };
    let (_, fit_var) = fit.fit_moments();
    let gamma = (sample_var - fit_var).max(0.0).sqrt();
    Ok(SmoothedFit {
        base: fit.clone(),
        gamma,
        sample_var,
    })
}

// e^expo (Phi(hi) - Phi(lo)) for hi >= lo, stable when expo alone would
// overflow; the Phi difference then shrinks faster than e^expo grows.
fn exp_phi_diff(expo: f64, hi: f64, lo: f64) -> f64 {
    if expo <= 690.0 {
        return expo.exp() * (norm_cdf(hi) - norm_cdf(lo));
    }
    let lh = log_norm_cdf(hi);
    let ll = log_norm_cdf(lo);
    let log_diff = lh + (-(ll - lh).exp()).ln_1p();
    (expo + log_diff).exp()
}

// u^i phi(u) antiderivatives N_i(u); all stay bounded, so the tail
// contributions of far-away segments vanish instead of cancelling.
fn gauss_moment(i: usize, u: f64, cdf: f64, pdf: f64) -> f64 {
    match i {
        0 => cdf,
        1 => -pdf,
        2 => {
            if pdf == 0.0 {
                cdf
            } else {
                cdf - u * pdf
            }
        }
        _ => {
            if pdf == 0.0 {
                0.0
            } else {
                -(u * u + 2.0) * pdf
            }
        }
    }
}

impl SmoothedFit {
    /// The underlying unsmoothed fit.
    pub fn base(&self) -> &LogConcaveFit {
        &self.base
    }

    /// Kernel standard deviation.
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// The sample variance the bandwidth was chosen to restore.
    pub fn sample_var(&self) -> f64 {
        self.sample_var
    }

    /// Mean and variance of the smoothed density: the mean is unchanged
    /// and the variance is var(base) + gamma^2.
    pub fn moments(&self) -> (f64, f64) {
        let (mean, var) = self.base.fit_moments();
        (mean, var + self.gamma * self.gamma)
    }

    /// Density of the convolution at x (positive on the whole line).
    pub fn pdf(&self, x: f64) -> f64 {
        if self.gamma == 0.0 {
            return self.base.pdf(x);
        }
        let g = self.gamma;
        let knots = self.base.knots();
        let phi = self.base.phi();
        let slopes = self.base.slopes();
        let mut acc = 0.0;
        for j in 0..slopes.len() {
            let (l, r) = (knots[j], knots[j + 1]);
            let s = slopes[j];
            // int_l^r e^{a + s(y-l)} phi((x-y)/g) dy / g, completed square
            let expo = phi[j] + s * (x - l) + 0.5 * s * s * g * g;
            let hi = (r - x - s * g * g) / g;
            let lo = (l - x - s * g * g) / g;
            acc += exp_phi_diff(expo, hi, lo);
        }
        acc
    }

    /// CDF of the convolution at x.
    pub fn cdf(&self, x: f64) -> f64 {
        if self.gamma == 0.0 {
            return self.base.cdf(x);
        }
        let g = self.gamma;
        let knots = self.base.knots();
        let phi = self.base.phi();
        let slopes = self.base.slopes();
        let mut acc = 0.0;
        for j in 0..slopes.len() {
            let (l, r) = (knots[j], knots[j + 1]);
            let (a, b) = (phi[j], phi[j + 1]);
            let s = slopes[j];
            acc += if (b - a).abs() >= SERIES_THRESHOLD {
                // antiderivative of e^{a+s(y-l)} Phi((x-y)/g) in y
                let conv = exp_phi_diff(
                    a + s * (x - l) + 0.5 * s * s * g * g,
                    (x - l + s * g * g) / g,
                    (x - r + s * g * g) / g,
                );
                (b.exp() * norm_cdf((x - r) / g) - a.exp() * norm_cdf((x - l) / g) + conv) / s
            } else {
                // expand e^{s(y-l)} in s; remaining integrals are Gaussian
                // moments with bounded antiderivatives
                let ul = (x - l) / g;
                let ur = (x - r) / g;
                let (cl, cr) = (norm_cdf(ul), norm_cdf(ur));
                let (fl, fr) = (norm_pdf(ul), norm_pdf(ur));
                let n: Vec<f64> = (0..4)
                    .map(|i| gauss_moment(i, ul, cl, fl) - gauss_moment(i, ur, cr, fr))
                    .collect();
                let xl = x - l;
                let v1 = xl * n[0] - g * n[1];
                let v2 = xl * xl * n[0] - 2.0 * xl * g * n[1] + g * g * n[2];
                let v3 = xl * xl * xl * n[0] - 3.0 * xl * xl * g * n[1]
                    + 3.0 * xl * g * g * n[2]
                    - g * g * g * n[3];
                let mass = (r - l) * j_fn(a, b);
                mass * cr + a.exp() * (v1 + 0.5 * s * v2 + s * s / 6.0 * v3)
            };
        }
        acc.clamp(0.0, 1.0)
    }

    /// Quantile; the smoothed distribution has unbounded support, so p
    /// must lie strictly inside (0, 1).
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::OutOfRange {
                name: "p",
                value: p,
                lo: 0.0,
                hi: 1.0,
            });
        }
        if self.gamma == 0.0 {
            return Ok(self.base.quantile_clamped(p));
        }
        let seed = self.base.quantile_clamped(p);
        let base_step = self.gamma.max(1e-6 * (1.0 + seed.abs()));
        let mut step = base_step;
        let mut lo = seed;
        for _ in 0..300 {
            if self.cdf(lo) <= p {
                break;
            }
            lo -= step;
            step *= 2.0;
        }
        step = base_step;
        let mut hi = seed;
        for _ in 0..300 {
            if self.cdf(hi) >= p {
                break;
            }
            hi += step;
            step *= 2.0;
        }
        Ok(invert_cdf(
            |x| self.cdf(x),
            |x| self.pdf(x),
            lo,
            hi,
            p,
            1e-10,
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logcon::{fit_logconcave, SolverOptions};
    use crate::numeric::simpson;
    use crate::sample::preprocess;

    fn fixture() -> (WeightedSample, LogConcaveFit, SmoothedFit) {
        let raw = [
            0.1, 0.25, 0.4, 0.4, 0.55, 0.8, 1.1, 1.1, 1.5, 1.9, 2.3, 3.0,
        ];
        let s = preprocess(&raw).unwrap();
        let fit = fit_logconcave(&s, &SolverOptions::default()).unwrap();
        let sm = smooth_fit(&fit, &s).unwrap();
        (s, fit, sm)
    }

    #[test]
    fn bandwidth_restores_sample_variance() {
        let (s, fit, sm) = fixture();
        assert!(sm.gamma() > 0.0);
        let (_, var_pop, var_unbiased) = s.moments();
        let (_, fit_var) = fit.fit_moments();
        let g2 = sm.gamma() * sm.gamma();
        assert!((g2 - (var_pop - fit_var)).abs() <= 1e-12);
        assert!((sm.sample_var() - var_pop).abs() <= 1e-15);
        let (_, sm_var) = sm.moments();
        assert!((sm_var - var_pop).abs() <= 1e-12);

        let unb = smooth_fit_with(&fit, &s, VarianceConvention::Unbiased).unwrap();
        let g2u = unb.gamma() * unb.gamma();
        assert!((g2u - (var_unbiased - fit_var)).abs() <= 1e-12);
        assert!(unb.gamma() > sm.gamma());
    }

    #[test]
    fn two_point_bandwidth_is_exact() {
        // uniform fit on {0, 1}: sample variance 1/4, fit variance 1/12
        let s = preprocess(&[0.0, 1.0]).unwrap();
        let fit = LogConcaveFit::from_parts(vec![0.0, 1.0], vec![0.0, 0.0], -1.0).unwrap();
        let sm = smooth_fit(&fit, &s).unwrap();
        let g2 = sm.gamma() * sm.gamma();
        assert!((g2 - (0.25 - 1.0 / 12.0)).abs() <= 1e-14);
    }

    #[test]
    fn mismatched_sample_is_rejected() {
        let (_, fit, _) = fixture();
        let other = preprocess(&[0.2, 0.9, 1.4, 2.1]).unwrap();
        let err = smooth_fit(&fit, &other).unwrap_err();
        assert!(matches!(err, Error::MismatchedInputs { .. }));
    }

    #[test]
    fn pdf_matches_convolution_quadrature() {
        let (_, fit, sm) = fixture();
        let g = sm.gamma();
        let (k0, k1) = (fit.knots()[0], *fit.knots().last().unwrap());
        for i in 0..=12 {
            let x = (k0 - 2.0 * g) + i as f64 / 12.0 * (k1 - k0 + 4.0 * g);
            let conv = simpson(|y| fit.pdf(y) * norm_pdf((x - y) / g) / g, k0, k1, 4000);
            assert!(
                (sm.pdf(x) - conv).abs() <= 1e-8,
                "x = {x}: {} vs {conv}",
                sm.pdf(x)
            );
        }
    }

    #[test]
    fn cdf_matches_density_quadrature() {
        let (_, fit, sm) = fixture();
        let g = sm.gamma();
        let lo = fit.knots()[0] - 10.0 * g;
        let hi = *fit.knots().last().unwrap() + 2.0 * g;
        for i in 1..=10 {
            let x = lo + i as f64 / 10.0 * (hi - lo);
            let quad = simpson(|y| sm.pdf(y), lo, x, 6000);
            assert!(
                (sm.cdf(x) - quad).abs() <= 1e-8,
                "x = {x}: {} vs {quad}",
                sm.cdf(x)
            );
        }
    }

    #[test]
    fn cdf_small_slope_branch_matches_quadrature() {
        // a flat log-density keeps every segment in the series branch
        let fit = LogConcaveFit::from_parts(vec![0.0, 1.0], vec![0.0, 0.0], -1.0).unwrap();
        let s = preprocess(&[0.0, 1.0]).unwrap();
        let sm = smooth_fit(&fit, &s).unwrap();
        let g = sm.gamma();
        let lo = -10.0 * g;
        for i in 0..=10 {
            let x = -2.0 * g + i as f64 / 10.0 * (1.0 + 4.0 * g);
            let quad = simpson(|y| sm.pdf(y), lo, x, 6000);
            assert!((sm.cdf(x) - quad).abs() <= 1e-8);
        }
        // symmetric around 1/2, so the median is exact
        assert!((sm.cdf(0.5) - 0.5).abs() <= 1e-12);
    }

    #[test]
    fn cdf_saturates_in_the_tails() {
        let (_, fit, sm) = fixture();
        let g = sm.gamma();
        let (k0, k1) = (fit.knots()[0], *fit.knots().last().unwrap());
        assert!(sm.cdf(k0 - 9.0 * g) <= 1e-12);
        assert!(sm.cdf(k1 + 9.0 * g) >= 1.0 - 1e-12);
        let mut prev = 0.0;
        for i in 0..=200 {
            let x = (k0 - 3.0 * g) + i as f64 / 200.0 * (k1 - k0 + 6.0 * g);
            let c = sm.cdf(x);
            assert!(c >= prev - 1e-13);
            prev = c;
        }
    }

    #[test]
    fn quantile_round_trips() {
        let (_, _, sm) = fixture();
        for &p in &[0.001, 0.01, 0.1, 0.25, 0.5, 0.75, 0.9, 0.99, 0.999] {
            let q = sm.quantile(p).unwrap();
            assert!((sm.cdf(q) - p).abs() <= 1e-9, "p = {p}");
        }
        assert!(sm.quantile(0.0).is_err());
        assert!(sm.quantile(1.0).is_err());
        assert!(sm.quantile(-0.5).is_err());
    }

    #[test]
    fn zero_bandwidth_falls_back_to_base() {
        let (_, fit, _) = fixture();
        let sm = SmoothedFit {
            base: fit.clone(),
            gamma: 0.0,
            sample_var: fit.fit_moments().1,
        };
        for i in 0..=20 {
            let x = -0.5 + i as f64 * 0.2;
            assert_eq!(sm.pdf(x), fit.pdf(x));
            assert_eq!(sm.cdf(x), fit.cdf(x));
        }
        assert_eq!(sm.quantile(0.3).unwrap(), fit.quantile(0.3).unwrap());
    }

    #[test]
    fn smoothed_moments_match_quadrature() {
        let (_, fit, sm) = fixture();
        let g = sm.gamma();
        let lo = fit.knots()[0] - 10.0 * g;
        let hi = *fit.knots().last().unwrap() + 10.0 * g;
        let (mean, var) = sm.moments();
        let q_mean = simpson(|y| y * sm.pdf(y), lo, hi, 8000);
        let q_var = simpson(
            |y| {
                let d = y - mean;
                d * d * sm.pdf(y)
            },
            lo,
            hi,
            8000,
        );
        assert!((mean - fit.fit_moments().0).abs() <= 1e-15);
        assert!((q_mean - mean).abs() <= 1e-8);
        assert!((q_var - var).abs() <= 1e-7);
    }

    #[test]
    fn log_density_stays_concave() {
        let (_, fit, sm) = fixture();
        let g = sm.gamma();
        let lo = fit.knots()[0] - 4.0 * g;
        let hi = *fit.knots().last().unwrap() + 4.0 * g;
        let n = 400;
        let h = (hi - lo) / n as f64;
        let logs: Vec<f64> = (0..=n).map(|i| sm.pdf(lo + i as f64 * h).ln()).collect();
        for w in logs.windows(3) {
            assert!(w[2] - 2.0 * w[1] + w[0] <= 1e-8);
        }
    }

    mod proptests {
        use super::super::*;
        use crate::logcon::{fit_logconcave, SolverOptions};
        use crate::sample::preprocess;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(24))]

            #[test]
            fn cdf_is_a_distribution_function(
                raw in proptest::collection::vec(-3.0f64..3.0, 4..16),
                ps in proptest::collection::vec(0.02f64..0.98, 3),
            ) {
                if let Ok(s) = preprocess(&raw) {
                    let fit = fit_logconcave(&s, &SolverOptions::default()).unwrap();
                    let sm = smooth_fit(&fit, &s).unwrap();
                    let g2 = sm.gamma() * sm.gamma();
                    let (_, var_pop, _) = s.moments();
                    let (_, fit_var) = fit.fit_moments();
                    prop_assert!((g2 - (var_pop - fit_var).max(0.0)).abs() <= 1e-10);
                    let mut prev = -1.0;
                    for i in 0..=40 {
                        let x = s.min() - 2.0 + i as f64 / 40.0 * (s.max() - s.min() + 4.0);
                        let c = sm.cdf(x);
                        prop_assert!((0.0..=1.0).contains(&c));
                        prop_assert!(c >= prev - 1e-12);
                        prop_assert!(sm.pdf(x) >= 0.0);
                        prev = c;
                    }
                    for &p in &ps {
                        let q = sm.quantile(p).unwrap();
                        prop_assert!((sm.cdf(q) - p).abs() <= 1e-6);
                    }
                }
            }
        }
    }
}
