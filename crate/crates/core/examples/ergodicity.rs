//! Time averages along one orbit against phase-space averages for the cat
//! and doubling maps, plus a steady-state check on running averages.
//!
//!     cargo run --release --example ergodicity

use std::f64::consts::PI;

use pathorder::dynamics::{
    integrate_trajectory, space_average, steady_state_check, time_average, MapSystem, PhaseState,
};

type Observable = (&'static str, fn(&PhaseState) -> f64);

fn main() -> pathorder::Result<()> {
    let n = 1_000_000;
    let bound = 5.0 / (n as f64).sqrt();
    let observables: [Observable; 3] = [
        ("x", |s| s.position(0)),
        ("x^2", |s| s.position(0).powi(2)),
        ("sin 2pi x", |s| (2.0 * PI * s.position(0)).sin()),
    ];

    for system in [MapSystem::cat(), MapSystem::doubling()] {
        let start = PhaseState::qp(0.123_456_789, 0.314_159_265)?;
        let traj = integrate_trajectory(&system, &start, n)?;
        println!("{} map, {n} steps (bound {bound:.2e})", system.kind().name());
        for (name, f) in observables {
            let t = time_average(&traj, f);
            let s = space_average(&system, f, n, 7)?;
            println!("  {name:>10}: time {t:+.6}  space {s:+.6}  |diff| {:.2e}", (t - s).abs());
        }

        let running: Vec<f64> =
            (5..=10).map(|c| time_average(&traj.clone().truncated(n * c / 10).unwrap(), observables[0].1)).collect();
        println!("  running <x> steady within 1e-2 of 1/2: {}", steady_state_check(&running, 0.5, 1e-2)?);
    }
    Ok(())
}
