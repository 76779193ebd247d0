use serde::Serialize;

use crate::error::{Error, Result};
use crate::hierarchy::{ClassId, SimilarityTree};

use super::entropy::xlogx;
use super::profiles::EntropyWeights;
use super::scores::soft_max;

/// Stopping rule for the entropic mirror-ascent solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverConfig {
    /// Bound on the KKT residual `max_a |g_a − ⟨g, x⟩|`, `g = y − ∇h(x)`.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 100_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArgmaxReport {
    pub x: Vec<f64>,
    /// Attained objective `⟨y, x⟩ − h_K(x)`.
    pub value: f64,
    pub residual: f64,
    pub iterations: usize,
}

/// Maximizer of `⟨y, x⟩ − h(x)` over the simplex, `h` the nested entropy.
pub fn regularized_argmax(
    tree: &SimilarityTree,
    weights: &EntropyWeights,
    y: &[f64],
    config: &SolverConfig,
) -> Result<ArgmaxReport> {
    regularized_argmax_in(tree, weights, y, tree.root(), None, config)
}

/// Maximizer of `⟨y, x⟩ − h_K(x)` over the face of the simplex spanned by `class`.
///
/// Runs multiplicative (mirror) ascent in log coordinates with step
/// `1/τ_{ℓ+1}`, `τ_{ℓ+1} = c_{ℓ+1} + … + c_N`. `warm` seeds the iterate and
/// must be positive on `class`.
pub fn regularized_argmax_in(
    tree: &SimilarityTree,
    weights: &EntropyWeights,
    y: &[f64],
    class: ClassId,
    warm: Option<&[f64]>,
    config: &SolverConfig,
) -> Result<ArgmaxReport> {
    weights.check_tree(tree)?;
    let n = tree.n();
    if y.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: y.len(),
        });
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidState("scores must be finite".into()));
    }
    let members = tree.members(class)?.to_vec();
    let level = class.level();
    let depth = tree.depth();
    let tail: f64 = weights.weights()[level + 1..].iter().sum();
    let step = 1.0 / tail;

    let mut u = vec![f64::NEG_INFINITY; n];
    match warm {
        Some(w) => {
            if w.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    actual: w.len(),
                });
            }
            for &a in &members {
                if !(w[a] > 0.0) {
                    return Err(Error::InvalidState(
                        "warm start must be positive on the class".into(),
                    ));
                }
                u[a] = w[a].ln();
            }
        }
        None => members.iter().for_each(|&a| u[a] = 0.0),
    }

    let mut iterations = 0;
    loop {
        let log_mass = log_masses(tree, &mut u, &members);
        let x: Vec<f64> = u.iter().map(|v| v.exp()).collect();
        let g: Vec<f64> = members
            .iter()
            .map(|&a| {
                let grad: f64 = (level + 1..=depth)
                    .map(|l| weights.weight(l) * log_mass[l][tree.ancestor_index(a, l)])
                    .sum();
                y[a] - grad
            })
            .collect();
        let avg: f64 = members.iter().zip(&g).map(|(&a, gi)| x[a] * gi).sum();
        let residual = g.iter().map(|gi| (gi - avg).abs()).fold(0.0, f64::max);
        if residual <= config.tol {
            let value = objective(tree, weights, y, &x, &log_mass, &members, level);
            return Ok(ArgmaxReport {
                x,
                value,
                residual,
                iterations,
            });
        }
        if iterations >= config.max_iter {
            return Err(Error::NoConvergence {
                iterations,
                residual,
            });
        }
        for (&a, gi) in members.iter().zip(&g) {
            u[a] += step * (gi - avg);
        }
        iterations += 1;
    }
}

/// Normalizes `u` to log-probabilities on `members` and returns
/// `log x_K` for every class (`−∞` off the support).
fn log_masses(tree: &SimilarityTree, u: &mut [f64], members: &[usize]) -> Vec<Vec<f64>> {
    let z = soft_max(members.iter().map(|&a| u[a]), 1.0);
    members.iter().for_each(|&a| u[a] -= z);
    let depth = tree.depth();
    let mut out = vec![Vec::new(); depth + 1];
    out[depth] = u.to_vec();
    for l in (0..depth).rev() {
        let count = tree.class_count(l).expect("level in range");
        out[l] = (0..count)
            .map(|k| {
                let below = &out[l + 1];
                soft_max(tree.children_indices(l, k).iter().map(|&c| below[c]), 1.0)
            })
            .collect();
    }
    out
}

fn objective(
    tree: &SimilarityTree,
    weights: &EntropyWeights,
    y: &[f64],
    x: &[f64],
    log_mass: &[Vec<f64>],
    members: &[usize],
    level: usize,
) -> f64 {
    let linear: f64 = members.iter().map(|&a| y[a] * x[a]).sum();
    let mut h = 0.0;
    for l in level..=tree.depth() {
        let s: f64 = log_mass[l]
            .iter()
            .map(|&lm| {
                if lm == f64::NEG_INFINITY {
                    0.0
                } else {
                    xlogx(lm.exp())
                }
            })
            .sum();
        h += weights.weight(l) * s;
    }
    linear - h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::choice::profiles::TempProfile;
    use crate::choice::scores::{class_scores, conditional_choice, nlc};

    fn bus_tree() -> SimilarityTree {
        SimilarityTree::build(3, &[vec![vec![0, 1], vec![2]]]).unwrap()
    }

    #[test]
    fn flat_case_is_softmax() {
        let tree = SimilarityTree::flat(4).unwrap();
        let temps = TempProfile::new(vec![2.0]).unwrap();
        let c = EntropyWeights::from_temps(&temps);
        let y = [0.5, -1.0, 2.0, 0.0];
        let r = regularized_argmax(&tree, &c, &y, &SolverConfig::default()).unwrap();
        let z: f64 = y.iter().map(|v| (v / 2.0).exp()).sum();
        for (xa, ya) in r.x.iter().zip(&y) {
            assert!((xa - (ya / 2.0).exp() / z).abs() < 1e-12);
        }
        assert!(r.iterations <= 2);
    }

    #[test]
    fn matches_nested_logit() {
        let tree = bus_tree();
        let temps = TempProfile::new(vec![4.0, 1.0]).unwrap();
        let c = EntropyWeights::from_temps(&temps);
        let y = [1.0, 0.0, 2.0];
        let r = regularized_argmax(&tree, &c, &y, &SolverConfig::default()).unwrap();
        let x = nlc(&tree, &temps, &y).unwrap();
        for (a, b) in r.x.iter().zip(&x) {
            assert!((a - b).abs() < 1e-9);
        }
        let root = class_scores(&tree, &temps, &y).unwrap().root();
        assert!((r.value - root).abs() < 1e-9);
    }

    #[test]
    fn class_restricted_problem() {
        let tree = SimilarityTree::build(
            6,
            &[
                vec![vec![0, 1, 2, 3], vec![4, 5]],
                vec![vec![0, 1], vec![2, 3], vec![4], vec![5]],
            ],
        )
        .unwrap();
        let temps = TempProfile::new(vec![3.0, 1.5, 0.5]).unwrap();
        let c = EntropyWeights::from_temps(&temps);
        let y = [0.3, -0.2, 1.0, 0.1, 2.0, -1.0];
        let scores = class_scores(&tree, &temps, &y).unwrap();
        for class in tree.classes().collect::<Vec<_>>() {
            let r = regularized_argmax_in(&tree, &c, &y, class, None, &SolverConfig::default())
                .unwrap();
            let cond = conditional_choice(&tree, &temps, &y, class).unwrap();
            assert!(
                r.x.iter().zip(&cond).all(|(a, b)| (a - b).abs() < 1e-9),
                "{class:?}"
            );
            assert!((r.value - scores.get(class)).abs() < 1e-9, "{class:?}");
        }
    }

    #[test]
    fn warm_start_and_failure() {
        let tree = bus_tree();
        let c = EntropyWeights::new(vec![0.0, 3.0, 1.0]).unwrap();
        let y = [1.0, 0.0, 2.0];
        let cold = regularized_argmax(&tree, &c, &y, &SolverConfig::default()).unwrap();
        let warm = regularized_argmax_in(
            &tree,
            &c,
            &y,
            tree.root(),
            Some(&cold.x),
            &SolverConfig::default(),
        )
        .unwrap();
        assert!(warm.iterations <= 1);
        let tight = SolverConfig {
            tol: 1e-14,
            max_iter: 3,
        };
        assert!(matches!(
            regularized_argmax(&tree, &c, &y, &tight),
            Err(Error::NoConvergence { iterations: 3, .. })
        ));
    }
}
