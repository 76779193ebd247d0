use rand::Rng;
use serde::Serialize;

use crate::dynamics::{RateProfile, Trajectory};
use crate::error::{Error, Result};
use crate::games::{classify_point, dot, sample_simplex, EquilibriumReport, Game, PopulationState};
use crate::hierarchy::SimilarityTree;

use super::divergence::DivergenceSpec;
use super::extinction::{linear_fit, MIN_FIT_POINTS};

/// Largest step-to-step drop in the potential tolerated as integration error.
pub const ASCENT_TOL: f64 = 1e-9;

/// Below this level the nested divergence is at the resolution of the
/// integrator and a non-decreasing step is not counted as a violation.
pub const DIVERGENCE_FLOOR: f64 = 1e-10;

fn l1(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| (u - v).abs()).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PotentialAscentReport {
    /// Smallest `Φ(x_{k+1}) − Φ(x_k)` over the stored grid.
    pub min_delta: f64,
    pub initial: f64,
    pub terminal: f64,
    pub passed: bool,
}

/// Checks that the potential never decreases along `trajectory`.
pub fn check_potential_ascent(
    game: &Game,
    trajectory: &Trajectory,
) -> Result<PotentialAscentReport> {
    if !game.has_potential() {
        return Err(Error::UnsupportedKind(game.kind().name()));
    }
    let values: Vec<f64> = trajectory
        .states
        .iter()
        .map(|s| game.potential_value(s).expect("potential present"))
        .collect();
    let min_delta = values
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min);
    let min_delta = if min_delta.is_finite() {
        min_delta
    } else {
        0.0
    };
    Ok(PotentialAscentReport {
        min_delta,
        initial: values[0],
        terminal: *values.last().unwrap(),
        passed: min_delta >= -ASCENT_TOL,
    })
}

/// Sampled evidence that `x_star` is globally evolutionarily stable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GessCertificate {
    pub samples: usize,
    /// Largest sampled `⟨F(x), x − x*⟩`; negative on success.
    pub max_value: f64,
}

/// Samples `⟨F(x), x − x*⟩ < 0` at uniformly drawn simplex points.
///
/// A passing sample is evidence, not proof; a failing one is a certificate
/// that `x_star` is not a GESS.
pub fn validate_gess<R: Rng + ?Sized>(
    game: &Game,
    x_star: &[f64],
    samples: usize,
    rng: &mut R,
) -> Result<GessCertificate> {
    PopulationState::new(x_star.to_vec())?;
    let mut max_value = f64::NEG_INFINITY;
    for _ in 0..samples {
        let x = sample_simplex(game.n(), rng);
        if l1(&x, x_star) == 0.0 {
            continue;
        }
        let f = game.payoff(&x)?;
        let d: Vec<f64> = x.iter().zip(x_star).map(|(a, b)| a - b).collect();
        let value = dot(&f, &d);
        if value >= 0.0 {
            return Err(Error::NotGess { value });
        }
        max_value = max_value.max(value);
    }
    Ok(GessCertificate { samples, max_value })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GessOptions {
    pub samples: usize,
    pub terminal_tol: f64,
}

impl Default for GessOptions {
    fn default() -> Self {
        Self {
            samples: 10_000,
            terminal_tol: 1e-4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GessReport {
    pub certificate: GessCertificate,
    pub initial_divergence: f64,
    pub terminal_divergence: f64,
    /// Largest `D_{k+1} − D_k` over steps above the resolution floor.
    pub worst_increase: f64,
    pub violations: usize,
    pub terminal_l1: f64,
    pub monotone: bool,
    pub passed: bool,
}

/// Validates `x_star` as a GESS by sampling, then checks that the nested
/// divergence `D_N(x*, x(t))` decreases at every stored step and that the
/// run ends within `terminal_tol` of `x_star` in L1.
pub fn check_gess_attraction<R: Rng + ?Sized>(
    game: &Game,
    tree: &SimilarityTree,
    rates: &RateProfile,
    x_star: &[f64],
    trajectory: &Trajectory,
    options: &GessOptions,
    rng: &mut R,
) -> Result<GessReport> {
    let certificate = validate_gess(game, x_star, options.samples, rng)?;
    let spec = DivergenceSpec::from_rates(tree, rates, x_star.to_vec())?;
    let values = trajectory
        .states
        .iter()
        .map(|s| spec.divergence(s))
        .collect::<Result<Vec<_>>>()?;
    let mut worst_increase = f64::NEG_INFINITY;
    let mut violations = 0;
    for w in values.windows(2) {
        if w[0].max(w[1]) <= DIVERGENCE_FLOOR {
            continue;
        }
        let delta = w[1] - w[0];
        worst_increase = worst_increase.max(delta);
        if delta >= 0.0 {
            violations += 1;
        }
    }
    let terminal_l1 = l1(trajectory.terminal(), x_star);
    let monotone = violations == 0;
    Ok(GessReport {
        certificate,
        initial_divergence: values[0],
        terminal_divergence: *values.last().unwrap(),
        worst_increase,
        violations,
        terminal_l1,
        monotone,
        passed: monotone && terminal_l1 <= options.terminal_tol,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NashLimitReport {
    /// Upper bound on the L1 diameter of the terminal window (sum of coordinate ranges).
    pub diameter: f64,
    pub limit: Vec<f64>,
    pub classification: EquilibriumReport,
}

/// Declares a run converged when the last 10% of its samples fit in an L1 box
/// of size `tol`, then classifies the limit at tolerance `10·tol`.
pub fn check_nash_limit(game: &Game, trajectory: &Trajectory, tol: f64) -> Result<NashLimitReport> {
    let len = trajectory.len();
    let count = (len / 10).max(2).min(len);
    let tail = &trajectory.states[len - count..];
    let n = trajectory.dim();
    let mut diameter = 0.0;
    for a in 0..n {
        let (lo, hi) = tail
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| {
                (lo.min(s[a]), hi.max(s[a]))
            });
        diameter += hi - lo;
    }
    if !(diameter < tol) {
        return Err(Error::NotConverged { diameter, tol });
    }
    let mut limit: Vec<f64> = (0..n)
        .map(|a| tail.iter().map(|s| s[a]).sum::<f64>() / count as f64)
        .collect();
    limit.iter_mut().for_each(|v| {
        if *v < 10.0 * tol {
            *v = 0.0
        }
    });
    let point = PopulationState::normalized(limit.clone())?;
    let classification = classify_point(game, &point, 10.0 * tol)?;
    Ok(NashLimitReport {
        diameter,
        limit: point.into_vec(),
        classification,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrictRateReport {
    pub equilibrium: usize,
    /// `δ = min_{b ≠ a*} [F_{a*} − F_b](e_{a*})`.
    pub margin: f64,
    pub realizer: usize,
    pub degree: usize,
    /// `Λ_deg · δ`.
    pub expected_exponent: f64,
    /// `−slope` of `log ‖x(t) − e_{a*}‖₁` over the window.
    pub fitted_exponent: f64,
    /// Set when the fitted exponent falls short of `0.9 · expected`.
    pub flagged: bool,
}

/// Local convergence exponent toward a strict pure equilibrium. The
/// neighbourhood in which the exponent applies is not constructive, so a
/// shortfall is reported through `flagged` rather than as an error.
pub fn strict_rate_smoke(
    game: &Game,
    tree: &SimilarityTree,
    rates: &RateProfile,
    trajectory: &Trajectory,
    equilibrium: usize,
    window: Option<f64>,
) -> Result<StrictRateReport> {
    let n = game.n();
    let vertex = PopulationState::vertex(n, equilibrium);
    let report = classify_point(game, &vertex, 0.0)?;
    if !report.is_strict {
        return Err(Error::InvalidState(format!(
            "action {equilibrium} is not a strict equilibrium"
        )));
    }
    let f = &report.payoffs;
    let (realizer, margin) = (0..n)
        .filter(|&b| b != equilibrium)
        .map(|b| (b, f[equilibrium] - f[b]))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("at least two actions");
    let degree = tree.degree(equilibrium, realizer)?;
    let expected = rates.cumulative(degree) * margin;

    let fraction = window.unwrap_or(0.5);
    let len = trajectory.len();
    let start = ((1.0 - fraction) * len as f64).floor() as usize;
    if len - start < MIN_FIT_POINTS {
        return Err(Error::WindowTooShort {
            points: len - start,
            required: MIN_FIT_POINTS,
        });
    }
    let e = vertex.as_slice();
    let logs: Vec<f64> = trajectory.states[start..]
        .iter()
        .map(|s| l1(s, e).ln())
        .collect();
    let (slope, _) = linear_fit(&trajectory.times[start..], &logs);
    let fitted = -slope;
    Ok(StrictRateReport {
        equilibrium,
        margin,
        realizer,
        degree,
        expected_exponent: expected,
        fitted_exponent: fitted,
        flagged: !(fitted >= 0.9 * expected),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{integrate, nrd_field, rd_field, IntegratorConfig};
    use crate::games::presets;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn bus_tree() -> SimilarityTree {
        SimilarityTree::build(3, &[vec![vec![0, 1], vec![2]]]).unwrap()
    }

    #[test]
    fn stationary_potential_run() {
        let g = Game::symmetric_potential(2, vec![1.0, 0.0, 0.0, 1.0], None).unwrap();
        let traj = integrate(
            |x| rd_field(&g, x),
            &[0.5, 0.5],
            &IntegratorConfig::new(0.1, 1.0),
        )
        .unwrap();
        let r = check_potential_ascent(&g, &traj).unwrap();
        assert_eq!(r.min_delta, 0.0);
        assert!(check_potential_ascent(&presets::good_rps(), &traj).is_err());
    }

    #[test]
    fn rps_centre_is_gess_and_mixed_commuting_point_is_not() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let c = validate_gess(&presets::good_rps(), &[1.0 / 3.0; 3], 2000, &mut rng).unwrap();
        assert!(c.max_value < 0.0);
        let err =
            validate_gess(&presets::commuting(), &[0.0, 0.5, 0.5], 10_000, &mut rng).unwrap_err();
        assert!(matches!(err, Error::NotGess { .. }));
    }

    #[test]
    fn start_at_gess_is_constant() {
        let g = presets::good_rps();
        let tree = SimilarityTree::build(3, &[vec![vec![0], vec![1, 2]]]).unwrap();
        let rates = RateProfile::new(vec![0.25, 0.75]).unwrap();
        let x = [1.0 / 3.0; 3];
        let traj = integrate(
            |s| nrd_field(&g, &tree, &rates, s),
            &x,
            &IntegratorConfig::new(0.1, 2.0),
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let r = check_gess_attraction(
            &g,
            &tree,
            &rates,
            &x,
            &traj,
            &GessOptions {
                samples: 500,
                terminal_tol: 1e-4,
            },
            &mut rng,
        )
        .unwrap();
        assert!(r.passed && r.terminal_divergence < 1e-15);
    }

    #[test]
    fn nash_limit_of_a_converged_run() {
        let g = presets::commuting();
        let tree = SimilarityTree::flat(3).unwrap();
        let rates = RateProfile::replicator(1);
        let traj = integrate(
            |x| nrd_field(&g, &tree, &rates, x),
            &[0.2, 0.3, 0.5],
            &IntegratorConfig::new(1e-2, 40.0),
        )
        .unwrap();
        let r = check_nash_limit(&g, &traj, 1e-6).unwrap();
        assert!(r.classification.is_nash);
        let short = integrate(
            |x| nrd_field(&g, &tree, &rates, x),
            &[0.2, 0.3, 0.5],
            &IntegratorConfig::new(1e-2, 2.0),
        )
        .unwrap();
        assert!(matches!(
            check_nash_limit(&g, &short, 1e-6),
            Err(Error::NotConverged { .. })
        ));
    }

    #[test]
    fn strict_rate_toward_car() {
        let g = presets::commuting();
        let tree = bus_tree();
        let rates = RateProfile::new(vec![0.25, 0.75]).unwrap();
        let traj = integrate(
            |x| nrd_field(&g, &tree, &rates, x),
            &[0.05, 0.05, 0.9],
            &IntegratorConfig::new(1e-2, 60.0),
        )
        .unwrap();
        let r = strict_rate_smoke(&g, &tree, &rates, &traj, 2, None).unwrap();
        assert_eq!(r.expected_exponent, 0.25);
        assert!((r.fitted_exponent - 0.25).abs() < 0.05, "{r:?}");
        assert!(strict_rate_smoke(&g, &tree, &rates, &traj, 0, None).is_err());
    }
}
