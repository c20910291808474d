//! Compare the area under the ROC curve across estimators, including the
//! closed-form value available for the binormal curve.
//!
//! Run with: cargo run --example auc_comparison

use concroc::rng::derive_rng;
use concroc::{binormal_auc, dist_sample, fit_roc, true_roc, Distribution, RocKind};

fn main() -> concroc::Result<()> {
    let f = Distribution::logistic(0.0, 1.0)?;
    let g = Distribution::logistic(2.0, 1.0)?;
    let mut rng = derive_rng(41, &[1]);
    let controls = dist_sample(&f, 100, &mut rng);
    let cases = dist_sample(&g, 100, &mut rng);

    println!("{:<14} {:>10}", "method", "AUC");
    for kind in [
        RocKind::Empirical,
        RocKind::LogConcave,
        RocKind::SmoothedLogConcave,
        RocKind::Binormal,
    ] {
        let curve = fit_roc(&controls, &cases, kind)?;
        print!("{:<14} {:>10.6}", kind.label(), curve.auc());
        if let Some((a, b)) = curve.binormal_params() {
            print!("   closed form {:.6}", binormal_auc(a, b));
        }
        println!();
    }
    println!("{:<14} {:>10.6}", "true", true_roc(&f, &g).auc());
    Ok(())
}
