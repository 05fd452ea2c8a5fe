//! Maximum-entropy path probabilities for a set of actions and a prescribed
//! mean action, and the multiplier recovered from the entropy gradient.
//!
//!     cargo run --example maxent_paths

use pathorder::maxent::{eta_from_gradient, partition_identity_check, solve_maxent};

fn main() -> pathorder::Result<()> {
    let actions = [0.4, 0.9, 1.3, 2.0, 3.1];
    for target in [0.8, 1.54, 2.5] {
        let sol = solve_maxent(&actions, target)?;
        println!(
            "target <A> = {target}: eta = {:+.6}, Q = {:.6}, iterations {}",
            sol.eta, sol.partition_sum, sol.iterations
        );
        let dist = sol.to_distribution(&actions)?;
        // Shifting every action by c makes Q = e, after which the gradient
        // gives back eta path by path.
        let shift = sol.unit_gauge_shift();
        for (k, (a, p)) in actions.iter().zip(&sol.probabilities).enumerate() {
            let recovered = match shift {
                Some(c) => format!("{:+.6}", eta_from_gradient(a + c, &dist, k, 1.0)?),
                None => "-".into(),
            };
            println!("  A = {a:.2}  p = {p:.6}  eta from gradient {recovered}");
        }
        println!("  most probable path(s): {:?}", sol.argmax());
        println!("  sum exp(1 + ln p) = {:.15}", partition_identity_check(&dist, 1.0)?);
    }
    Ok(())
}
