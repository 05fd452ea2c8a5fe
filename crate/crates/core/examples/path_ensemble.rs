//! Samples transitions between two cells of the standard map and prints the
//! most frequent paths with their actions.
//!
//!     cargo run --release --example path_ensemble [K]

use pathorder::dynamics::{CellPartition, MapSystem};
use pathorder::ensemble::{estimate_distribution, simulate_paths, EnsembleRequest};

fn main() -> pathorder::Result<()> {
    let k: f64 = std::env::args().nth(1).map_or(6.0, |a| a.parse().expect("K must be a number"));
    let system = MapSystem::standard(k)?;
    let partition = CellPartition::unit_grid(&[16, 16])?;
    let source = partition.cell_id(&[0, 0])?;
    let target = partition.cell_id(&[8, 8])?;
    let request = EnsembleRequest::new(source, target, 20_000, 200, 42);

    let ensemble = simulate_paths(&system, &partition, &request)?;
    println!(
        "K = {k}: {} distinct paths, {} of {} replicas unresolved after {} steps",
        ensemble.path_count(),
        ensemble.unresolved(),
        ensemble.total(),
        request.horizon
    );
    let dist = estimate_distribution(&ensemble)?;
    for (path, p) in ensemble.paths().iter().zip(dist.probabilities()).take(10) {
        println!("  p = {p:.5}  A = {:+.5}  t = {:>4}  {}", path.action(), path.travel_time(), path.label());
    }
    Ok(())
}
