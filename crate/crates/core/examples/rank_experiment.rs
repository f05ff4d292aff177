//! Law-school style rank experiment on synthetic data.
//!
//! `cargo run --example rank_experiment -- [out_dir] [law_data.csv]`

use cfdp::experiments::{load_csv, ols_fit, rank_experiment, synth_lawschool, write_rank_outputs, SYNTH_DEFAULT_NOISE_SD};

fn main() -> cfdp::Result<()> {
    let mut args = std::env::args().skip(1);
    let out_dir = args.next().unwrap_or_else(|| "rank_experiment_out".into());
    let data = match args.next() {
        Some(path) => load_csv(path)?,
        None => synth_lawschool(20_000, 1, SYNTH_DEFAULT_NOISE_SD)?,
    };

    let fit = ols_fit(&data)?;
    println!("full-data OLS, R^2 = {:.3}", fit.r_squared);
    for (c, (b, se)) in fit.columns.iter().zip(fit.coefficients.iter().zip(&fit.standard_errors)) {
        println!("  {c:<14} {b:+.4} ({se:.4})");
    }

    let res = rank_experiment(&data, ("race", "Black"), 40, 20240917)?;
    let s = res.spearman;
    println!("train rows {}, subgroup test rows {}", res.n_train, res.n_test_subgroup);
    println!("spearman  Full~True {:.3}  Listing2F~True {:.3}  Listing2T~True {:.3}  Listing2F~Full {:.3}",
        s.full_vs_true, s.listing2f_vs_true, s.listing2t_vs_true, s.listing2f_vs_full);
    write_rank_outputs(&res, &out_dir)?;
    println!("wrote ranks.csv, spearman.json, rankplot.svg to {out_dir}/");
    Ok(())
}
