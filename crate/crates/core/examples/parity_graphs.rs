//! Which predictor graphs force demographic parity, read off by d-separation.

use cfdp::graphs::{implies_dp, parity_graphs, Admg};

fn main() -> cfdp::Result<()> {
    for (name, text) in [
        ("a", parity_graphs::GRAPH_A),
        ("b", parity_graphs::GRAPH_B),
        ("c", parity_graphs::GRAPH_C),
    ] {
        let g = Admg::parse(text)?;
        println!("graph ({name}): {}", text.trim().replace('\n', ", "));
        println!("  A _||_ Yhat            : {}", implies_dp(&g, "A", "Yhat")?);
        println!("  A _||_ Yhat | X        : {}", g.d_separated("A", "Yhat", &["X"])?);
    }

    // conditioning on a collider opens the path, conditioning on its other
    // parent closes it again
    let g = Admg::parse("A -> M\nM -> C\nU -> C\nU -> Y")?;
    for z in [&[][..], &["C"], &["C", "U"], &["M", "C"]] {
        println!("A _||_ Y | {z:?}: {}", g.d_separated("A", "Y", z)?);
    }
    let confounded = Admg::parse("A -> M\nM -> C\nU -> C\nU -> Y\nM <-> Y")?;
    println!("with M <-> Y, A _||_ Y | [\"M\"]: {}", confounded.d_separated("A", "Y", &["M"])?);
    Ok(())
}
