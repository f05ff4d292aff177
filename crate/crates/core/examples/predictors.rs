//! Scores from each predictor family on the same few units.

use cfdp::causal_models::{sample_cross_world, BinaryTreatmentGaussianModel};
use cfdp::predictors::{coin_flip_score, linear_cancellation_coefficients, Predictor};
use cfdp::rng::seeded;
use cfdp::stats::covariance;

fn main() -> cfdp::Result<()> {
    let m = BinaryTreatmentGaussianModel::new(0.0, 2.0, 1.0, 1.5, 0.3, 0.4)?;
    let (l1, l2) = linear_cancellation_coefficients(m.p1 * (1.0 - m.p1), (m.mu1 - m.mu0) * m.p1 * (1.0 - m.p1))?;
    let zoo = [
        ("standardized", Predictor::standardized(&m)),
        ("rosenblatt", Predictor::from_kv_str("predictor=rosenblatt h=probit", &m)?),
        ("cancel", Predictor::LinearAx { lambda1: l1, lambda2: l2, lambda3: 0.0 }),
        ("po_linear", Predictor::PoLinear { lambda1: 0.5, lambda2: 0.5 }),
        ("coin", Predictor::CoinFlip { p: 0.5 }),
    ];

    let draws = sample_cross_world(&m, 100_000, 9)?;
    let mut rng = seeded(10);
    for (name, p) in &zoo {
        let scores: Vec<f64> = draws.iter().map(|d| p.score(d, &mut rng)).collect::<cfdp::Result<_>>()?;
        let a: Vec<f64> = draws.iter().map(|d| d.a as f64).collect();
        println!("{name:>12}: first scores {:+.3} {:+.3} {:+.3}   cov(A, score) {:+.4}", scores[0], scores[1], scores[2], covariance(&a, &scores));
    }
    println!("coin flips: {:?}", coin_flip_score(0.5, 12, 1)?);
    Ok(())
}
