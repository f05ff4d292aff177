//! Sample the cross-world model and compare the closed-form counterfactual
//! posterior with a brute-force rejection estimate.

use cfdp::causal_models::{counterfactual_posterior, sample_cross_world, BinaryTreatmentGaussianModel};

fn main() -> cfdp::Result<()> {
    let (x, window) = (2.0, 0.02);
    for rho in [-0.9, 0.0, 0.5, 0.9] {
        let m = BinaryTreatmentGaussianModel::new(1.0, 1.0, 1.0, 1.0, rho, 0.5)?;
        let post = counterfactual_posterior(&m, 0, x)?;
        let draws = sample_cross_world(&m, 2_000_000, 17)?;
        let kept: Vec<f64> = draws.iter().filter(|d| (d.x0 - x).abs() <= window).map(|d| d.x1).collect();
        let below = kept.iter().filter(|&&v| v <= 2.0).count() as f64 / kept.len() as f64;
        println!(
            "rho {rho:>5}: X1 | X0=2 ~ N({:.3}, {:.3})  P(X1<=2) closed {:.4}  rejection {:.4} ({} kept)",
            post.mean,
            post.variance,
            post.cdf(2.0),
            below,
            kept.len()
        );
    }

    let matched = BinaryTreatmentGaussianModel::new(1.0, 1.0, 1.0, 1.0, 1.0, 0.5)?;
    let atom = counterfactual_posterior(&matched, 0, x)?;
    println!("rho     1: point mass at {} (degenerate: {})", atom.mean, atom.is_degenerate());

    // the observed (A, X) stream is shared across rho for a fixed seed
    let base = BinaryTreatmentGaussianModel::default();
    let a = sample_cross_world(&base.with_rho(-0.8)?, 5, 1)?;
    let b = sample_cross_world(&base.with_rho(0.8)?, 5, 1)?;
    for (u, v) in a.iter().zip(&b) {
        println!("A={} X={:+.4}   X0,X1 = ({:+.3}, {:+.3}) vs ({:+.3}, {:+.3})", u.a, u.x, u.x0, u.x1, v.x0, v.x1);
    }
    Ok(())
}
