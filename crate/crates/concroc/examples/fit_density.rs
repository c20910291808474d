//! Fit a log-concave density to a skewed sample and tabulate the result
//! against the distribution the sample came from.
//!
//! Run with: cargo run --example fit_density

use concroc::rng::derive_rng;
use concroc::{dist_cdf, dist_sample, fit_logconcave, preprocess, Distribution, SolverOptions};

fn main() -> concroc::Result<()> {
    let truth = Distribution::gamma(3.0, 1.0)?;
    let mut rng = derive_rng(7, &[1]);
    let values = dist_sample(&truth, 120, &mut rng);

    let sample = preprocess(&values)?;
    let fit = fit_logconcave(&sample, &SolverOptions::default())?;

    println!("n = {}   log-likelihood = {:.6}", values.len(), fit.objective());
    println!("the maximizer keeps {} of {} support points as knots\n", fit.knots().len(), sample.len());

    println!("{:>8} {:>10} {:>10} {:>10}", "x", "pdf(x)", "cdf(x)", "true cdf");
    for i in 0..=8 {
        let x = 0.5 + i as f64;
        println!(
            "{:>8.2} {:>10.5} {:>10.5} {:>10.5}",
            x,
            fit.pdf(x),
            fit.cdf(x),
            dist_cdf(&truth, x)
        );
    }

    let (mean, var) = fit.fit_moments();
    println!("\nfitted mean {mean:.4}, fitted variance {var:.4} (truth: 3, 3)");
    Ok(())
}
