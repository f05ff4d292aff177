//! Quantile repair: map each score to the pooled training score at its
//! within-group quantile.

use cfdp::repair::{fit_repair, RepairMode};
use cfdp::stats::ks_two_sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn scores(n: usize, seed: u64) -> Vec<(&'static str, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let z: f64 = rng.sample(StandardNormal);
            if i % 3 == 0 { ("minority", 0.4 + 0.8 * z) } else { ("majority", 1.0 + z) }
        })
        .collect()
}

fn split(rows: &[(&str, f64)], vals: &[f64], arm: &str) -> Vec<f64> {
    rows.iter().zip(vals).filter(|(r, _)| r.0 == arm).map(|(_, &v)| v).collect()
}

fn main() -> cfdp::Result<()> {
    let train = scores(6_000, 1);
    let test = scores(6_000, 2);
    let raw: Vec<f64> = test.iter().map(|r| r.1).collect();
    println!("KS between groups before repair: {:.4}", ks_two_sample(&split(&test, &raw, "minority"), &split(&test, &raw, "majority")));

    for mode in [RepairMode::Empirical, RepairMode::Gaussian] {
        let model = fit_repair(&train, mode)?;
        let fixed = model.repair_batch(&test)?;
        println!(
            "{mode:?} repair: KS between groups {:.4}",
            ks_two_sample(&split(&test, &fixed, "minority"), &split(&test, &fixed, "majority"))
        );
        for y in [-1.0, 0.4, 2.0] {
            println!(
                "  y_bar {y:+.1}: minority -> {:+.3} (q {:.3}), majority -> {:+.3} (q {:.3})",
                model.repair_score(&"minority", y)?,
                model.quantile_in_arm(&"minority", y)?,
                model.repair_score(&"majority", y)?,
                model.quantile_in_arm(&"majority", y)?
            );
        }
    }
    Ok(())
}
