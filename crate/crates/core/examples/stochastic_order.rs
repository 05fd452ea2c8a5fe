//! Usual stochastic order between discrete random variables, the monotone
//! coupling that realizes it, and order among paths of one distribution.
//!
//!     cargo run --example stochastic_order

use pathorder::ensemble::PathDistribution;
use pathorder::stochorder::{build_coupling, compare_paths, convolve, greatest_path, usual_order, DiscreteRV};

fn main() -> pathorder::Result<()> {
    let x = DiscreteRV::new(vec![0.0, 1.0, 2.0], vec![0.5, 0.3, 0.2])?;
    let y = DiscreteRV::new(vec![0.0, 1.0, 3.0], vec![0.2, 0.4, 0.4])?;
    println!("X vs Y: {:?}", usual_order(&x, &y));

    let c = build_coupling(&x, &y)?;
    println!("coupling (P(Z), X, Y):");
    for m in 0..c.levels.len() {
        println!("  {:.3}  {}  {}", c.z_probs[m], c.psi1[m], c.psi2[m]);
    }

    let b = DiscreteRV::bernoulli(0.5)?;
    println!("X + B vs Y + B: {:?}", usual_order(&convolve(&x, &b)?, &convolve(&y, &b)?));

    let z = DiscreteRV::new(vec![0.0, 3.0], vec![0.5, 0.5])?;
    let w = DiscreteRV::point_mass(1.0)?;
    println!("{{0, 3}} vs point mass at 1: {:?}", usual_order(&z, &w));
    if let Err(e) = build_coupling(&z, &w) {
        println!("  no monotone coupling: {e}");
    }

    let dist = PathDistribution::from_probabilities(vec![0.1, 0.45, 0.45])?;
    let r = compare_paths(&dist, 0, 1)?;
    println!("path 0 vs path 1: {:?} (gradients {:+.4}, {:+.4})", r.relation, r.g_i, r.g_j);
    println!("greatest paths: {:?}", greatest_path(&dist));
    Ok(())
}
