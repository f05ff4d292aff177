//! The standardized score satisfies demographic parity in every world but is
//! counterfactually fair only when the potential outcomes are rank-coupled.

use cfdp::causal_models::BinaryTreatmentGaussianModel;
use cfdp::fairness::{cf_gap, cf_gap_monte_carlo, dp_gap, DistanceKind};
use cfdp::predictors::Predictor;

fn main() -> cfdp::Result<()> {
    for rho in [0.0, 0.5, 1.0] {
        let m = BinaryTreatmentGaussianModel::new(1.0, 3.0, 1.0, 2.0, rho, 0.4)?;
        let pred = Predictor::standardized(&m);
        let dp = dp_gap(&pred, &m, 200_000, 1)?;
        let cf = cf_gap(&pred, &m, 1.0, 0)?;
        println!("rho {rho}: dp gap {:.4}, cf gap at (x=1, a=0) {:.4}", dp.value, cf.value);
    }

    let m = BinaryTreatmentGaussianModel::new(1.0, 1.0, 1.0, 1.0, 0.0, 0.5)?;
    let pred = Predictor::standardized(&m);
    let mc = cf_gap_monte_carlo(&pred, &m, 1.0, 0, 2_000_000, 2, 0.01, DistanceKind::KolmogorovSmirnov)?;
    println!(
        "independent arms, x = mu: closed form {:.4}, Monte Carlo {:.4} from {} accepted draws",
        cf_gap(&pred, &m, 1.0, 0)?.value,
        mc.distance.value,
        mc.n_accepted
    );

    let raw = Predictor::identity();
    let shifted = BinaryTreatmentGaussianModel::new(0.0, 1.0, 1.0, 1.0, 0.0, 0.5)?;
    println!("raw outcome on shifted arms: dp gap {:.4}", dp_gap(&raw, &shifted, 200_000, 3)?.value);
    Ok(())
}
