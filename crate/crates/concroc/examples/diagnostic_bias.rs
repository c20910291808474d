//! Scan ROC curves for stretches below the chance line. A marker fed in
//! with its groups swapped produces a curve under the diagonal, which the
//! diagnostic locates immediately.
//!
//! Run with: cargo run --example diagnostic_bias

use concroc::rng::derive_rng;
use concroc::{bias_diagnostic, dist_sample, fit_roc, Distribution, RocKind};

fn main() -> concroc::Result<()> {
    let f = Distribution::normal(0.0, 1.0)?;
    let g = Distribution::normal(2.0, 1.0)?;
    let mut rng = derive_rng(5, &[1]);
    let lower = dist_sample(&f, 40, &mut rng);
    let higher = dist_sample(&g, 40, &mut rng);

    for (name, controls, cases) in [
        ("oriented", &lower, &higher),
        ("reversed", &higher, &lower),
    ] {
        println!("{name} marker:");
        for kind in [RocKind::Empirical, RocKind::LogConcave] {
            let curve = fit_roc(controls, cases, kind)?;
            match bias_diagnostic(&curve, 1000) {
                Some(t) => println!(
                    "  {:<10} drops below the diagonal at t = {t}",
                    kind.label()
                ),
                None => println!("  {:<10} stays above the diagonal", kind.label()),
            }
        }
    }
    Ok(())
}
