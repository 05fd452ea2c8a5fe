use std::f64::consts::PI;

use num_rational::Ratio;
use pathorder::dynamics::{
    integrate_trajectory, space_average, time_average, CellPartition, DomainBox, MapSystem, PhaseState,
};
use pathorder::ensemble::path_signature;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

fn qp(q: f64, p: f64) -> PhaseState {
    PhaseState::qp(q, p).unwrap()
}

/// Pearson statistic of images of uniform points against a uniform grid.
fn image_chi_square(system: &MapSystem, samples: usize, grid: usize, seed: u64) -> (f64, f64) {
    let partition = CellPartition::unit_grid(&[grid, grid]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let domain = DomainBox::unit(2);
    let mut counts = vec![0u64; grid * grid];
    for _ in 0..samples {
        let image = system.step(&domain.sample(&mut rng)).unwrap();
        counts[partition.cell_index(&image).unwrap()] += 1;
    }
    let expected = samples as f64 / counts.len() as f64;
    let stat = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    let critical = ChiSquared::new((counts.len() - 1) as f64).unwrap().inverse_cdf(0.99);
    (stat, critical)
}

#[test]
fn maps_preserve_lebesgue_measure() {
    for (i, system) in [MapSystem::cat(), MapSystem::doubling(), MapSystem::standard(6.0).unwrap()].iter().enumerate() {
        let (stat, critical) = image_chi_square(system, 100_000, 10, 100 + i as u64);
        assert!(stat < critical, "{:?}: chi2 {stat} >= {critical}", system.kind());
    }
}

#[test]
fn chi_square_detects_a_non_preserving_map() {
    // x -> x^2 squeezes mass towards 0; run the same statistic by hand
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut counts = [0u64; 10];
    for _ in 0..100_000 {
        let x: f64 = rng.random();
        counts[((x * x) * 10.0) as usize] += 1;
    }
    let stat: f64 = counts.iter().map(|&c| (c as f64 - 10_000.0).powi(2) / 10_000.0).sum();
    assert!(stat > ChiSquared::new(9.0).unwrap().inverse_cdf(0.99));
}

#[test]
fn doubling_orbit_of_one_seventh_matches_exact_arithmetic() {
    let sys = MapSystem::doubling();
    let mut exact = Ratio::new(1i64, 7);
    let mut s = qp(1.0 / 7.0, 0.25);
    // 1/7 is not on the lattice; its rounding error doubles each step
    for step in 1..=9 {
        s = sys.step(&s).unwrap();
        exact *= 2;
        if exact >= Ratio::from_integer(1) {
            exact -= 1;
        }
        let want = *exact.numer() as f64 / *exact.denom() as f64;
        assert!((s.position(0) - want).abs() < 1e-12, "step {step}: {} vs {want}", s.position(0));
        assert_eq!(s.momentum(0), 0.25);
    }
    assert!((s.position(0) - 1.0 / 7.0).abs() < 1e-12, "period 3");
}

#[test]
fn doubling_signature_on_four_cells() {
    let sys = MapSystem::doubling();
    let partition = CellPartition::unit_grid(&[4, 1]).unwrap();
    let traj = integrate_trajectory(&sys, &qp(0.1, 0.5), 10).unwrap();
    let sig = path_signature(&traj, &partition, 0, 3).unwrap().unwrap();
    assert_eq!(sig.cells, vec![0, 1, 3]);
    assert_eq!(sig.entry_step, 3);
}

#[test]
fn birkhoff_averages_agree() {
    let n = 200_000;
    let bound = 5.0 / (n as f64).sqrt();
    let observables: [fn(&PhaseState) -> f64; 3] =
        [|s| s.position(0), |s| s.position(0).powi(2), |s| (2.0 * PI * s.position(0)).sin()];
    for system in [MapSystem::cat(), MapSystem::doubling()] {
        let traj = integrate_trajectory(&system, &qp(0.2718281828, 0.1414213562), n).unwrap();
        for (i, f) in observables.iter().enumerate() {
            let t = time_average(&traj, f);
            let s = space_average(&system, f, n, 9 + i as u64).unwrap();
            assert!((t - s).abs() < bound, "{:?} observable {i}: {t} vs {s}", system.kind());
        }
    }
}

#[test]
fn cat_map_is_invertible_on_the_torus() {
    // inverse of [[2,1],[1,1]] is [[1,-1],[-1,2]]
    let sys = MapSystem::cat();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..1000 {
        let s = DomainBox::unit(2).sample(&mut rng);
        let t = sys.step(&s).unwrap();
        let (q, p) = (t.position(0), t.momentum(0));
        let back_q = (q - p).rem_euclid(1.0);
        let back_p = (2.0 * p - q).rem_euclid(1.0);
        let d = |a: f64, b: f64| ((a - b).abs()).min(1.0 - (a - b).abs());
        assert!(d(back_q, s.position(0)) < 1e-12 && d(back_p, s.momentum(0)) < 1e-12);
    }
}

proptest! {
    #[test]
    fn partition_is_total_and_consistent(
        q in 0.0f64..1.0,
        p in 0.0f64..1.0,
        nq in 1usize..40,
        np in 1usize..40,
    ) {
        let partition = CellPartition::unit_grid(&[nq, np]).unwrap();
        let s = qp(q, p);
        let cell = partition.cell_index(&s).unwrap();
        prop_assert!(cell < partition.cell_count());
        prop_assert!(partition.cell_bounds(cell).unwrap().contains(&s));
        let coords = partition.cell_coords(cell).unwrap();
        prop_assert_eq!(partition.cell_id(&coords).unwrap(), cell);
    }

    #[test]
    fn orbits_stay_in_domain(q in 0.0f64..1.0, p in 0.0f64..1.0, k in 0.0f64..10.0) {
        for sys in [MapSystem::cat(), MapSystem::doubling(), MapSystem::standard(k).unwrap()] {
            let traj = integrate_trajectory(&sys, &qp(q, p), 50).unwrap();
            prop_assert!(traj.states().iter().all(|s| sys.domain().contains(s)));
        }
    }

    #[test]
    fn standard_map_with_zero_kick_is_a_shear(q in 0.0f64..1.0, p in 0.0f64..1.0) {
        let s = MapSystem::standard(0.0).unwrap().step(&qp(q, p)).unwrap();
        prop_assert_eq!(s.momentum(0), p);
        prop_assert!((s.position(0) - (q + p).rem_euclid(1.0)).abs() < 1e-15
            || (s.position(0) - (q + p).rem_euclid(1.0)).abs() > 1.0 - 1e-15);
    }
}
