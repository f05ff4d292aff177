//! `A = U_a`, `X = -A + U_x`, `Y = A + X + U_y`: the `A` terms cancel, so both
//! potential outcomes of `Y` are `U_x + U_y` for every unit, even though `X`
//! depends on `A`.

use cfdp::causal_models::{cancellation_abduct_u_x, cancellation_cross_world, CancellationScm};

fn main() -> cfdp::Result<()> {
    let draws = CancellationScm::default().sample(100_000, 4)?;
    let equal = draws.iter().filter(|d| d.outcome.y0 == d.outcome.y1).count();
    println!("y0 == y1 on {equal} of {} draws", draws.len());

    for d in draws.iter().take(4) {
        let o = d.outcome;
        println!("a={} u_x={:+.3} u_y={:+.3}  x={:+.3} y={:+.3} y0={:+.3} y1={:+.3}", d.a, d.u_x, d.u_y, o.x, o.y, o.y0, o.y1);
    }

    // a predictor built from the abducted U_x is counterfactually fair: the
    // same unit gets the same score in the other world
    let d = draws[0];
    let other = 1 - d.a;
    let x_cf = cancellation_cross_world(other, d.u_x, d.u_y).x;
    println!(
        "abducted U_x: factual {:+.4}, counterfactual {:+.4}",
        cancellation_abduct_u_x(d.a, d.outcome.x),
        cancellation_abduct_u_x(other, x_cf)
    );
    Ok(())
}
