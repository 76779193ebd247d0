mod common;

use nested_dynamics::analysis::{check_nash_limit, strict_rate_smoke, validate_gess};
use nested_dynamics::choice::{
    new_integrate, nrl_integrate, scores_for_state, EntropyWeights, SolverConfig, TempProfile,
};
use nested_dynamics::dynamics::{integrate, nrd_field, rd_field, IntegratorConfig, RateProfile};
use nested_dynamics::games::presets;
use nested_dynamics::Error;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::*;

fn l1(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| (u - v).abs()).sum()
}

#[test]
fn commuting_nrd_terminal_state_matches_refined_run() {
    let g = presets::commuting();
    let tree = bus_tree();
    let rates = RateProfile::new(vec![0.25, 0.75]).unwrap();
    let x0 = [0.2, 0.3, 0.5];
    // Near the car vertex bus2 decays only like exp(-λ_0 t) = exp(-t/4), so
    // at t = 30 the run is still about 8e-3 away; t = 60 is well inside 1e-3.
    let run = |h: f64, t_end: f64| {
        let cfg = IntegratorConfig::new(h, t_end).with_stride(1000);
        integrate(|x| nrd_field(&g, &tree, &rates, x), &x0, &cfg).unwrap()
    };
    let coarse = run(1e-3, 30.0);
    let fine = run(1e-4, 30.0);
    let vertices = [[0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    let nearest = |x: &[f64]| {
        (0..2)
            .min_by(|&i, &j| l1(x, &vertices[i]).total_cmp(&l1(x, &vertices[j])))
            .unwrap()
    };
    let v = nearest(coarse.terminal());
    assert_eq!(v, nearest(fine.terminal()));
    assert!(l1(coarse.terminal(), fine.terminal()) < 1e-9);
    let long = run(1e-3, 60.0);
    assert!(
        l1(long.terminal(), &vertices[v]) < 1e-3,
        "{:?}",
        long.terminal()
    );
}

#[test]
fn replicator_good_rps_converges_to_centre() {
    let g = presets::good_rps();
    let cfg = IntegratorConfig::new(1e-3, 50.0);
    let traj = integrate(|x| rd_field(&g, x), &[0.5, 0.3, 0.2], &cfg).unwrap();
    let d = l1(traj.terminal(), &[1.0 / 3.0; 3]);
    assert!(d <= 1e-4, "terminal L1 {d}");
}

#[test]
fn good_rps_centre_passes_sampled_gess_check() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let cert = validate_gess(&presets::good_rps(), &[1.0 / 3.0; 3], 10_000, &mut rng).unwrap();
    assert!(cert.max_value < 0.0);
}

#[test]
fn commuting_mixed_equilibrium_is_not_gess() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let r = validate_gess(&presets::commuting(), &[0.0, 0.5, 0.5], 10_000, &mut rng);
    assert!(matches!(r, Err(Error::NotGess { .. })), "{r:?}");
}

#[test]
fn strict_equilibria_reach_expected_local_rate() {
    let g = presets::commuting();
    let tree = bus_tree();
    let rates = RateProfile::new(vec![0.25, 0.75]).unwrap();
    let cfg = IntegratorConfig::new(1e-3, 80.0).with_stride(100);
    for (x0, eq) in [([0.1, 0.1, 0.8], 2), ([0.05, 0.8, 0.15], 1)] {
        let traj = integrate(|x| nrd_field(&g, &tree, &rates, x), &x0, &cfg).unwrap();
        let r = strict_rate_smoke(&g, &tree, &rates, &traj, eq, None).unwrap();
        assert!((r.expected_exponent - 0.25).abs() < 1e-12, "{r:?}");
        assert!(!r.flagged, "{r:?}");
    }
}

#[test]
fn replicator_commuting_limit_is_a_strict_nash_equilibrium() {
    let g = presets::commuting();
    let cfg = IntegratorConfig::new(1e-3, 60.0);
    let traj = integrate(|x| rd_field(&g, x), &[0.3, 0.3, 0.4], &cfg).unwrap();
    let r = check_nash_limit(&g, &traj, 1e-6).unwrap();
    assert!(
        r.classification.is_nash && r.classification.is_strict,
        "{r:?}"
    );
}

#[test]
fn short_run_is_reported_as_not_converged() {
    let g = presets::good_rps();
    let cfg = IntegratorConfig::new(1e-2, 5.0);
    let traj = integrate(|x| rd_field(&g, x), &[0.5, 0.3, 0.2], &cfg).unwrap();
    assert!(matches!(
        check_nash_limit(&g, &traj, 1e-6),
        Err(Error::NotConverged { .. })
    ));
}

#[test]
fn regularized_learning_tracks_exponential_weights() {
    let g = presets::good_rps();
    let tree = rps_tree();
    let temps = TempProfile::new(vec![4.0, 1.0]).unwrap();
    let cfg = IntegratorConfig::new(1e-2, 5.0);
    let y0 = scores_for_state(&tree, &temps, &[0.5, 0.3, 0.2]).unwrap();
    let a = new_integrate(&g, &tree, &temps, &y0, &cfg).unwrap();
    let c = EntropyWeights::from_temps(&temps);
    let b = nrl_integrate(&g, &tree, &c, &y0, &cfg, &SolverConfig::default()).unwrap();
    let gap = a
        .path
        .states
        .iter()
        .zip(&b.path.states)
        .map(|(u, v)| linf(u, v))
        .fold(0.0, f64::max);
    assert!(gap < 1e-8, "gap {gap}");
}
