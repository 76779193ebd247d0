use crate::error::{Error, Result};
use crate::hierarchy::{ClassId, SimilarityTree};

use super::profiles::TempProfile;

/// Scores of every class, indexed `[level][class index]`; level `N` holds `y` itself.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassScores(Vec<Vec<f64>>);

impl ClassScores {
    pub fn get(&self, class: ClassId) -> f64 {
        self.0[class.level()][class.index()]
    }

    pub fn level(&self, level: usize) -> &[f64] {
        &self.0[level]
    }

    pub fn root(&self) -> f64 {
        self.0[0][0]
    }

    pub fn levels(&self) -> &[Vec<f64>] {
        &self.0
    }
}

/// `τ log Σ exp(v/τ)` with the maximum shifted out.
pub(crate) fn soft_max(values: impl Iterator<Item = f64> + Clone, tau: f64) -> f64 {
    let m = values.clone().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    let s: f64 = values.map(|v| ((v - m) / tau).exp()).sum();
    m + tau * s.ln()
}

fn check(tree: &SimilarityTree, temps: &TempProfile, y: &[f64]) -> Result<()> {
    temps.check_tree(tree)?;
    if y.len() != tree.n() {
        return Err(Error::DimensionMismatch {
            expected: tree.n(),
            actual: y.len(),
        });
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidState("scores must be finite".into()));
    }
    Ok(())
}

/// Class scores computed bottom-up: a parent at level `ℓ−1` scores
/// `τ_ℓ log Σ_children exp(y_child / τ_ℓ)`.
pub fn class_scores(tree: &SimilarityTree, temps: &TempProfile, y: &[f64]) -> Result<ClassScores> {
    check(tree, temps, y)?;
    Ok(scores_unchecked(tree, temps, y))
}

pub(crate) fn scores_unchecked(
    tree: &SimilarityTree,
    temps: &TempProfile,
    y: &[f64],
) -> ClassScores {
    let depth = tree.depth();
    let mut levels = vec![Vec::new(); depth + 1];
    // singletons are ordered by action
    levels[depth] = y.to_vec();
    for l in (1..=depth).rev() {
        let tau = temps.temp(l);
        let count = tree.class_count(l - 1).expect("level in range");
        let below = &levels[l];
        let parents: Vec<f64> = (0..count)
            .map(|k| {
                let children = tree.children_indices(l - 1, k);
                soft_max(children.iter().map(|&c| below[c]), tau)
            })
            .collect();
        levels[l - 1] = parents;
    }
    ClassScores(levels)
}

/// Log-probabilities `log x_a = Σ_ℓ (y_{K_ℓ(a)} − y_{K_{ℓ-1}(a)}) / τ_ℓ`.
pub fn nlc_log(tree: &SimilarityTree, temps: &TempProfile, y: &[f64]) -> Result<Vec<f64>> {
    check(tree, temps, y)?;
    Ok(log_from_scores(
        tree,
        temps,
        &scores_unchecked(tree, temps, y),
    ))
}

fn log_from_scores(tree: &SimilarityTree, temps: &TempProfile, s: &ClassScores) -> Vec<f64> {
    let depth = tree.depth();
    (0..tree.n())
        .map(|a| {
            (1..=depth)
                .map(|l| {
                    let own = s.0[l][tree.ancestor_index(a, l)];
                    let up = s.0[l - 1][tree.ancestor_index(a, l - 1)];
                    (own - up) / temps.temp(l)
                })
                .sum()
        })
        .collect()
}

/// Nested logit choice probabilities.
pub fn nlc(tree: &SimilarityTree, temps: &TempProfile, y: &[f64]) -> Result<Vec<f64>> {
    let logs = nlc_log(tree, temps, y)?;
    let mut x: Vec<f64> = logs.iter().map(|v| v.exp()).collect();
    let total: f64 = x.iter().sum();
    x.iter_mut().for_each(|v| *v /= total);
    Ok(x)
}

/// Probability of selecting `class` as the product of conditional logits
/// along its lineage.
pub fn class_probability(
    tree: &SimilarityTree,
    temps: &TempProfile,
    scores: &ClassScores,
    class: ClassId,
) -> Result<f64> {
    let lineage = tree.lineage(class)?;
    let log: f64 = lineage
        .windows(2)
        .map(|w| (scores.get(w[1]) - scores.get(w[0])) / temps.temp(w[1].level()))
        .sum();
    Ok(log.exp())
}

/// Conditional choice probabilities `x_{a|K}` for every action; zero off `K`.
pub fn conditional_choice(
    tree: &SimilarityTree,
    temps: &TempProfile,
    y: &[f64],
    class: ClassId,
) -> Result<Vec<f64>> {
    check(tree, temps, y)?;
    let members = tree.members(class)?;
    let s = scores_unchecked(tree, temps, y);
    let depth = tree.depth();
    let level = class.level();
    let mut x = vec![0.0; tree.n()];
    for &a in members {
        let log: f64 = (level + 1..=depth)
            .map(|l| {
                let own = s.0[l][tree.ancestor_index(a, l)];
                let up = s.0[l - 1][tree.ancestor_index(a, l - 1)];
                (own - up) / temps.temp(l)
            })
            .sum();
        x[a] = log.exp();
    }
    let total: f64 = x.iter().sum();
    x.iter_mut().for_each(|v| *v /= total);
    Ok(x)
}

/// A score vector whose nested logit choice is `x`: `y_a = Σ_ℓ c_ℓ log x_{K_ℓ(a)}`.
/// Unique up to an additive constant.
pub fn scores_for_state(tree: &SimilarityTree, temps: &TempProfile, x: &[f64]) -> Result<Vec<f64>> {
    temps.check_tree(tree)?;
    if x.len() != tree.n() {
        return Err(Error::DimensionMismatch {
            expected: tree.n(),
            actual: x.len(),
        });
    }
    if x.iter().any(|&v| !(v > 0.0)) {
        return Err(Error::InvalidState(
            "score inversion needs an interior state".into(),
        ));
    }
    let masses = tree.masses(x);
    let depth = tree.depth();
    Ok((0..tree.n())
        .map(|a| {
            (1..=depth)
                .map(|l| {
                    let c = temps.temp(l) - temps.temp(l + 1);
                    c * masses[l][tree.ancestor_index(a, l)].ln()
                })
                .sum()
        })
        .collect())
}
