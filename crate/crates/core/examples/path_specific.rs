//! Cut the direct edge `A -> Z` but keep `A -> X -> Z`.

use cfdp::predictors::{path_specific_factual_z, path_specific_score, PathSpecificSpec};

fn main() {
    let spec = PathSpecificSpec::additive(0.0);
    let (u_x, u_z) = (0.4, -0.3);
    for a in [0.0, 1.0] {
        let s = path_specific_score(&spec, a, u_x, u_z);
        println!(
            "a={a}: x={:+.2} z*={:+.2} (factual z {:+.2}) score {:+.2}",
            s.x,
            s.z_star,
            path_specific_factual_z(&spec, a, u_x, u_z),
            s.score
        );
    }

    // with a baseline of 1 the direct effect is frozen at the other arm
    let spec = PathSpecificSpec::additive(1.0);
    let s = path_specific_score(&spec, 0.0, u_x, u_z);
    println!("baseline 1, a=0: z*={:+.2}", s.z_star);
}
