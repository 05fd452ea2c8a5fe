//! Entropy generation from a macroscopic energy account and from a path
//! distribution, with the gradient and its inverse.
//!
//!     cargo run --example entropy_balance

use pathorder::ensemble::PathDistribution;
use pathorder::entropy::{
    entropy_generation_macroscopic, entropy_generation_statistical, entropy_gradient, entropy_variation,
    probability_from_gradient, ThermoAccount,
};

fn main() -> pathorder::Result<()> {
    // 100 J from a 400 K reservoir, rejected to 300 K surroundings
    let acct = ThermoAccount { q_r: 100.0, ..ThermoAccount::at_temperatures(400.0, 300.0) };
    println!("heat engine account: dS = {:.6} J/K", entropy_generation_macroscopic(&acct)?);

    let acct = ThermoAccount { q_r: 100.0, w: 25.0, ..ThermoAccount::at_temperatures(400.0, 300.0) };
    println!("reversible engine (W = 25 J): dS = {:.3e} J/K", entropy_generation_macroscopic(&acct)?);

    let dist = PathDistribution::from_probabilities(vec![0.5, 0.25, 0.125, 0.125])?;
    println!("path entropy (kB = 1): {:.6}", entropy_generation_statistical(&dist, 1.0)?);
    for k in 0..dist.len() {
        let g = entropy_gradient(&dist, 1.0, k)?;
        println!(
            "  path {k}: p = {:.3}  dS/dp = {g:+.6}  back to p = {:.3}",
            dist.probability(k)?,
            probability_from_gradient(g, 1.0)?
        );
    }

    let dp = [-0.01, 0.0, 0.005, 0.005];
    println!("first variation for dp = {dp:?}: {:+.6e}", entropy_variation(&dist, &dp, 1.0)?);
    Ok(())
}
