use pathorder::dynamics::{integrate_trajectory, CellPartition, MapSystem, PhaseState, Trajectory};
use pathorder::ensemble::{
    estimate_distribution, path_action, path_signature, simulate_paths, EnsembleRequest, PathDistribution,
    PathEnsemble, PathObservation, ReplicaInit, NORMALIZATION_TOL,
};
use pathorder::Error;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn standard_setup() -> (MapSystem, CellPartition, EnsembleRequest) {
    let system = MapSystem::standard(6.0).unwrap();
    let partition = CellPartition::unit_grid(&[8, 8]).unwrap();
    (system, partition, EnsembleRequest::new(0, 27, 2000, 60, 42))
}

/// One replica at a time, integrating the full horizon before looking for
/// the target.
fn sequential_oracle(system: &MapSystem, partition: &CellPartition, req: &EnsembleRequest) -> PathEnsemble {
    let outcomes = (0..req.replicas).map(|i| {
        let mut rng = ChaCha8Rng::seed_from_u64(req.seed);
        rng.set_stream(i);
        let s0 = partition.sample_in_cell(req.source, &mut rng).unwrap();
        let traj = integrate_trajectory(system, &s0, req.horizon).unwrap();
        let sig = path_signature(&traj, partition, req.source, req.target).unwrap()?;
        let traj = traj.truncated(sig.entry_step + 1).unwrap();
        Some(PathObservation { cells: sig.cells, action: path_action(&traj, system).unwrap() })
    });
    PathEnsemble::tally(outcomes, system.dt()).unwrap()
}

#[test]
fn simulation_matches_sequential_oracle() {
    let (system, partition, req) = standard_setup();
    let ens = simulate_paths(&system, &partition, &req).unwrap();
    let oracle = sequential_oracle(&system, &partition, &req);
    assert_eq!(ens.paths(), oracle.paths());
    assert_eq!(ens.counts(), oracle.counts());
    assert_eq!(ens.unresolved(), oracle.unresolved());
}

#[test]
fn simulation_is_independent_of_thread_count() {
    let (system, partition, req) = standard_setup();
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| simulate_paths(&system, &partition, &req).unwrap())
    };
    let one = run(1);
    assert_eq!(one, run(4));
    assert_eq!(one, run(7));
}

#[test]
fn seeds_change_the_sample() {
    let (system, partition, req) = standard_setup();
    let a = simulate_paths(&system, &partition, &req).unwrap();
    let b = simulate_paths(&system, &partition, &EnsembleRequest { seed: 43, ..req.clone() }).unwrap();
    assert_eq!(a, simulate_paths(&system, &partition, &req).unwrap());
    assert_ne!(a.counts(), b.counts());
}

#[test]
fn distribution_is_normalized_over_resolved_replicas() {
    let (system, partition, req) = standard_setup();
    let ens = simulate_paths(&system, &partition, &req).unwrap();
    assert!(ens.unresolved() > 0, "the check needs some unresolved replicas");
    let dist = estimate_distribution(&ens).unwrap();
    let sum: f64 = dist.probabilities().iter().sum();
    assert!((sum - 1.0).abs() <= NORMALIZATION_TOL);
    for (k, &c) in ens.counts().iter().enumerate() {
        assert_eq!(dist.probabilities()[k], c as f64 / ens.resolved() as f64);
        assert_eq!(dist.actions()[k], ens.paths()[k].action());
    }
}

#[test]
fn single_replica_from_a_point() {
    let system = MapSystem::doubling();
    let partition = CellPartition::unit_grid(&[4, 1]).unwrap();
    let req = EnsembleRequest::new(0, 3, 1, 10, 0).with_init(ReplicaInit::Point(PhaseState::qp(0.1, 0.5).unwrap()));
    let ens = simulate_paths(&system, &partition, &req).unwrap();
    assert_eq!(ens.path_count(), 1);
    assert_eq!(ens.paths()[0].signature(), &[0, 1, 3]);
    assert_eq!(ens.paths()[0].travel_time(), 2.0);
    // doubling map has no potential: action = sum of p^2/2 over the 3 steps
    assert!((ens.paths()[0].action() - 3.0 * 0.125).abs() < 1e-15);
    assert_eq!(estimate_distribution(&ens).unwrap().probabilities(), &[1.0]);
}

#[test]
fn no_arrivals_is_an_error() {
    let system = MapSystem::cat();
    let partition = CellPartition::unit_grid(&[4, 4]).unwrap();
    let req = EnsembleRequest::new(0, 5, 3, 5, 0).with_init(ReplicaInit::Point(PhaseState::qp(0.0, 0.0).unwrap()));
    let ens = simulate_paths(&system, &partition, &req).unwrap();
    assert_eq!(ens.unresolved(), 3);
    assert_eq!(estimate_distribution(&ens), Err(Error::NoResolvedPaths { unresolved: 3 }));
}

#[test]
fn bad_requests_are_rejected() {
    let system = MapSystem::cat();
    let partition = CellPartition::unit_grid(&[4, 4]).unwrap();
    let bad = [
        EnsembleRequest::new(0, 0, 10, 5, 0),
        EnsembleRequest::new(0, 16, 10, 5, 0),
        EnsembleRequest::new(0, 1, 0, 5, 0),
        EnsembleRequest::new(0, 1, 10, 0, 0),
        EnsembleRequest::new(0, 1, 10, 5, 0).with_init(ReplicaInit::Point(PhaseState::qp(0.9, 0.9).unwrap())),
    ];
    for req in bad {
        assert!(simulate_paths(&system, &partition, &req).is_err(), "{req:?}");
    }
}

#[test]
fn path_action_uses_departure_states() {
    let system = MapSystem::standard(1.0).unwrap();
    let states: Vec<PhaseState> =
        [(0.1, 0.2), (0.3, 0.4), (0.5, 0.6)].iter().map(|&(q, p)| PhaseState::qp(q, p).unwrap()).collect();
    let traj = Trajectory::new(states.clone(), 0.5).unwrap();
    let lag = |s: &PhaseState| {
        let (q, p) = (s.position(0), s.momentum(0));
        p * p / 2.0 - (2.0 * std::f64::consts::PI * q).cos() / (4.0 * std::f64::consts::PI.powi(2))
    };
    let want = 0.5 * (lag(&states[0]) + lag(&states[1]));
    assert!((path_action(&traj, &system).unwrap() - want).abs() < 1e-15);
}

#[test]
fn tally_frequencies_track_bernoulli_probabilities() {
    let l = 100_000u64;
    for (seed, q) in [(1u64, 0.5), (2, 0.1), (3, 0.93)] {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let obs = (0..l).map(|_| {
            let cells = if rng.random::<f64>() < q { vec![0, 1] } else { vec![0, 2, 1] };
            Some(PathObservation { cells, action: 0.0 })
        });
        let ens = PathEnsemble::tally(obs, 1.0).unwrap();
        let dist = estimate_distribution(&ens).unwrap();
        let k = dist.labels().iter().position(|s| s == "0-1").unwrap();
        let bound = 5.0 * (q * (1.0 - q) / l as f64).sqrt();
        assert!((dist.probabilities()[k] - q).abs() < bound, "q = {q}");
    }
}

proptest! {
    #[test]
    fn tally_conserves_replicas(outcomes in prop::collection::vec(prop::option::of(0usize..5), 1..200)) {
        let obs = outcomes.iter().map(|o| o.map(|c| PathObservation { cells: vec![9, c, 10], action: c as f64 }));
        let ens = PathEnsemble::tally(obs, 1.0).unwrap();
        prop_assert_eq!(ens.total(), outcomes.len() as u64);
        prop_assert_eq!(ens.resolved() + ens.unresolved(), ens.total());
        prop_assert_eq!(ens.counts().iter().sum::<u64>(), ens.resolved());
        prop_assert!(ens.counts().windows(2).all(|w| w[0] >= w[1]));
        for path in ens.paths() {
            // each class here has one action value
            prop_assert_eq!(path.action(), path.signature()[1] as f64);
        }
    }

    #[test]
    fn weights_normalize(weights in prop::collection::vec(0.001f64..1000.0, 1..50)) {
        let d = PathDistribution::from_weights(&weights).unwrap();
        let sum: f64 = d.probabilities().iter().sum();
        prop_assert!((sum - 1.0).abs() <= NORMALIZATION_TOL);
        prop_assert!(d.probabilities().iter().all(|&p| p > 0.0));
    }
}
