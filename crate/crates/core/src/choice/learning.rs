use crate::dynamics::{integrate_unconstrained, IntegratorConfig, Trajectory};
use crate::error::{Error, Result};
use crate::games::Game;
use crate::hierarchy::SimilarityTree;

use super::argmax::{regularized_argmax_in, SolverConfig};
use super::profiles::{EntropyWeights, TempProfile};
use super::scores::nlc;

/// A score-driven run: the induced states plus the score path on the same grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreTrajectory {
    /// `x(t)` with `times` and optional diagnostics.
    pub path: Trajectory,
    /// `y(t)` at the stored times.
    pub scores: Vec<Vec<f64>>,
}

fn check(game: &Game, tree: &SimilarityTree, y0: &[f64]) -> Result<()> {
    for len in [tree.n(), y0.len()] {
        if len != game.n() {
            return Err(Error::DimensionMismatch {
                expected: game.n(),
                actual: len,
            });
        }
    }
    if y0.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidState("initial scores must be finite".into()));
    }
    Ok(())
}

fn into_score_trajectory<M>(ys: Trajectory, mut choose: M) -> Result<ScoreTrajectory>
where
    M: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    let states = ys
        .states
        .iter()
        .map(|y| choose(y))
        .collect::<Result<Vec<_>>>()?;
    Ok(ScoreTrajectory {
        path: Trajectory {
            times: ys.times,
            states,
            diagnostics: Vec::new(),
        },
        scores: ys.states,
    })
}

/// Nested exponential weights: `ẏ = F(x)`, `x = NLC(y)`.
pub fn new_integrate(
    game: &Game,
    tree: &SimilarityTree,
    temps: &TempProfile,
    y0: &[f64],
    config: &IntegratorConfig,
) -> Result<ScoreTrajectory> {
    check(game, tree, y0)?;
    temps.check_tree(tree)?;
    let ys = integrate_unconstrained(|y| game.payoff(&nlc(tree, temps, y)?), y0, config)?;
    into_score_trajectory(ys, |y| nlc(tree, temps, y))
}

/// Nested regularized learning: `ẏ = F(x)`, `x = argmax ⟨y, x⟩ − h(x)`, with
/// the maximizer computed numerically and warm-started from the previous call.
pub fn nrl_integrate(
    game: &Game,
    tree: &SimilarityTree,
    weights: &EntropyWeights,
    y0: &[f64],
    config: &IntegratorConfig,
    solver: &SolverConfig,
) -> Result<ScoreTrajectory> {
    check(game, tree, y0)?;
    weights.check_tree(tree)?;
    let root = tree.root();
    let mut last: Option<Vec<f64>> = None;
    let mut choose = |y: &[f64]| -> Result<Vec<f64>> {
        let r = regularized_argmax_in(tree, weights, y, root, last.as_deref(), solver)?;
        last = Some(r.x.clone());
        Ok(r.x)
    };
    let ys = integrate_unconstrained(|y| game.payoff(&choose(y)?), y0, config)?;
    into_score_trajectory(ys, choose)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::choice::scores::scores_for_state;
    use crate::dynamics::{integrate, nrd_field, RateProfile};
    use crate::games::presets;

    fn bus_tree() -> SimilarityTree {
        SimilarityTree::build(3, &[vec![vec![0, 1], vec![2]]]).unwrap()
    }

    #[test]
    fn zero_game_keeps_choice_fixed() {
        let tree = bus_tree();
        let temps = TempProfile::new(vec![4.0, 1.0]).unwrap();
        let y0 = [0.3, -0.1, 0.2];
        let run = new_integrate(
            &presets::zero(3),
            &tree,
            &temps,
            &y0,
            &IntegratorConfig::new(0.1, 2.0),
        )
        .unwrap();
        let x0 = nlc(&tree, &temps, &y0).unwrap();
        assert!(run.path.states.iter().all(|x| x == &x0));
    }

    #[test]
    fn score_flow_tracks_nested_replicator() {
        let g = presets::commuting();
        let tree = bus_tree();
        let rates = RateProfile::new(vec![0.25, 0.75]).unwrap();
        let temps = TempProfile::from_rates(&rates);
        let x0 = [0.3, 0.3, 0.4];
        let cfg = IntegratorConfig::new(1e-3, 2.0).with_stride(100);
        let y0 = scores_for_state(&tree, &temps, &x0).unwrap();
        let a = new_integrate(&g, &tree, &temps, &y0, &cfg).unwrap();
        let b = integrate(|x| nrd_field(&g, &tree, &rates, x), &x0, &cfg).unwrap();
        for (u, v) in a.path.states.iter().zip(&b.states) {
            assert!(u.iter().zip(v).all(|(p, q)| (p - q).abs() < 1e-9));
        }
    }

    #[test]
    fn regularized_learning_matches_exponential_weights() {
        let g = presets::commuting();
        let tree = bus_tree();
        let temps = TempProfile::new(vec![4.0, 1.0]).unwrap();
        let c = EntropyWeights::from_temps(&temps);
        let cfg = IntegratorConfig::new(1e-2, 0.5).with_stride(10);
        let y0 = [0.0; 3];
        let a = new_integrate(&g, &tree, &temps, &y0, &cfg).unwrap();
        let b = nrl_integrate(&g, &tree, &c, &y0, &cfg, &SolverConfig::default()).unwrap();
        for (u, v) in a.path.states.iter().zip(&b.path.states) {
            assert!(u.iter().zip(v).all(|(p, q)| (p - q).abs() < 1e-8));
        }
    }
}
