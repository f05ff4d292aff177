//! Sweep the unidentified cross-world correlation and let an adversary pick
//! the world where the predictor looks least fair.

use cfdp::causal_models::BinaryTreatmentGaussianModel;
use cfdp::fairness::{adversary_rho, DistanceKind, GapEvaluation};
use cfdp::predictors::Predictor;

fn main() -> cfdp::Result<()> {
    let base = BinaryTreatmentGaussianModel::new(1.0, 1.0, 1.0, 1.0, 0.0, 0.5)?;
    let grid: Vec<f64> = (0..=18).map(|k| -0.99 + 0.11 * k as f64).collect();
    let pred = Predictor::standardized(&base);

    for kind in [DistanceKind::KolmogorovSmirnov, DistanceKind::Wasserstein1] {
        let res = adversary_rho(&pred, &base, 2.0, 0, &grid, kind, GapEvaluation::ClosedForm)?;
        println!("{kind:?}: rho* = {:+.2}, gap* = {:.4}", res.rho_star, res.gap_star);
        for p in res.profile.iter().step_by(3) {
            println!("  rho {:+.2}  gap {:.4}", p.rho, p.gap);
        }
    }

    // a function of the potential outcomes alone is unaffected
    let po = Predictor::PoLinear { lambda1: 0.5, lambda2: 0.5 };
    let res = adversary_rho(&po, &base, 2.0, 0, &grid, DistanceKind::KolmogorovSmirnov, GapEvaluation::ClosedForm)?;
    println!("po_linear: rho* = {:+.2}, gap* = {}", res.rho_star, res.gap_star);

    let mc = GapEvaluation::MonteCarlo { n: 400_000, seed: 5, window: 0.05 };
    let res = adversary_rho(&pred, &base, 2.0, 0, &[-0.9, 0.0, 0.9], DistanceKind::KolmogorovSmirnov, mc)?;
    for p in &res.profile {
        println!("Monte Carlo rho {:+.1}: {:.4}", p.rho, p.gap);
    }
    Ok(())
}
