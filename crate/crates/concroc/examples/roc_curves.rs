//! Estimate one ROC curve four ways and print the estimates next to the
//! true curve of the generating distributions.
//!
//! Run with: cargo run --example roc_curves

use concroc::rng::derive_rng;
use concroc::{dist_sample, fit_roc, true_roc, Distribution, RocKind};

fn main() -> concroc::Result<()> {
    let f = Distribution::normal(0.0, 1.0)?;
    let g = Distribution::normal(1.0, 1.0)?;
    let mut rng = derive_rng(23, &[1]);
    let controls = dist_sample(&f, 60, &mut rng);
    let cases = dist_sample(&g, 60, &mut rng);

    let kinds = [
        RocKind::Empirical,
        RocKind::LogConcave,
        RocKind::SmoothedLogConcave,
        RocKind::Binormal,
    ];
    let curves: Vec<_> = kinds
        .iter()
        .map(|&k| fit_roc(&controls, &cases, k))
        .collect::<concroc::Result<_>>()?;
    let truth = true_roc(&f, &g);

    print!("{:>5}", "t");
    for k in kinds {
        print!(" {:>13}", k.label());
    }
    println!(" {:>13}", "true");
    for i in 1..=9 {
        let t = i as f64 / 10.0;
        print!("{t:>5.2}");
        for c in &curves {
            print!(" {:>13.5}", c.eval(t)?);
        }
        println!(" {:>13.5}", truth.eval(t)?);
    }
    Ok(())
}
