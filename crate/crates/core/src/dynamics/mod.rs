//! Replicator-type vector fields on the simplex and their integrator.
//!
//! Fields accept any state on the simplex. A class of zero mass only ever
//! multiplies shares that are themselves zero, so boundary states are
//! handled without special cases and every restricted equilibrium is a
//! rest point.

mod integrator;
mod protocol;
mod rates;

pub(crate) use integrator::rk4_increment;
pub use integrator::{integrate, integrate_unconstrained, IntegratorConfig, Trajectory};
pub use protocol::{extrinsic_switch_rates, mean_dynamics, nppi_switch_rates, SwitchRates};
pub use rates::{ExtrinsicProfile, RateProfile};

use crate::error::Result;
use crate::games::{check_simplex, Game, SIMPLEX_TOL};
use crate::hierarchy::SimilarityTree;

/// Class masses and class-mean payoffs for every level of a tree.
#[derive(Debug, Clone)]
pub struct ClassPayoffs {
    pub masses: Vec<Vec<f64>>,
    /// `means[ℓ][k]` is `F̂_K` for the k-th class of level ℓ, or 0 when `x_K = 0`.
    pub means: Vec<Vec<f64>>,
}

impl ClassPayoffs {
    pub fn compute(tree: &SimilarityTree, x: &[f64], f: &[f64]) -> Self {
        let depth = tree.depth();
        let mut masses = Vec::with_capacity(depth + 1);
        let mut means = Vec::with_capacity(depth + 1);
        for level in 0..=depth {
            let count = tree.class_count(level).expect("level in range");
            let mut m = vec![0.0; count];
            let mut s = vec![0.0; count];
            for a in 0..x.len() {
                let k = tree.ancestor_index(a, level);
                m[k] += x[a];
                s[k] += x[a] * f[a];
            }
            let avg = m
                .iter()
                .zip(&s)
                .map(|(&mass, &sum)| if mass > 0.0 { sum / mass } else { 0.0 })
                .collect();
            masses.push(m);
            means.push(avg);
        }
        Self { masses, means }
    }
}

fn check_inputs(game: &Game, tree: Option<&SimilarityTree>, x: &[f64]) -> Result<()> {
    if x.len() != game.n() {
        return Err(crate::Error::DimensionMismatch {
            expected: game.n(),
            actual: x.len(),
        });
    }
    if let Some(tree) = tree {
        if tree.n() != game.n() {
            return Err(crate::Error::DimensionMismatch {
                expected: game.n(),
                actual: tree.n(),
            });
        }
    }
    check_simplex(x, SIMPLEX_TOL)
}

/// Replicator dynamics `ẋ_a = x_a [F_a(x) − F̄(x)]`.
pub fn rd_field(game: &Game, x: &[f64]) -> Result<Vec<f64>> {
    check_inputs(game, None, x)?;
    let f = game.payoff(x)?;
    let mean: f64 = x.iter().zip(&f).map(|(a, b)| a * b).sum();
    Ok(x.iter()
        .zip(&f)
        .map(|(&xa, &fa)| xa * (fa - mean))
        .collect())
}

/// Nested replicator dynamics `ẋ_a = x_a Σ_ℓ λ_ℓ [F_a(x) − F̂_{K_ℓ(a)}(x)]`.
pub fn nrd_field(
    game: &Game,
    tree: &SimilarityTree,
    rates: &RateProfile,
    x: &[f64],
) -> Result<Vec<f64>> {
    check_inputs(game, Some(tree), x)?;
    rates.check_tree(tree)?;
    let f = game.payoff(x)?;
    Ok(nrd_from_payoffs(tree, rates.rates(), x, &f))
}

pub(crate) fn nrd_from_payoffs(
    tree: &SimilarityTree,
    rates: &[f64],
    x: &[f64],
    f: &[f64],
) -> Vec<f64> {
    let cp = ClassPayoffs::compute(tree, x, f);
    (0..x.len())
        .map(|a| {
            let growth: f64 = rates
                .iter()
                .enumerate()
                .map(|(l, &r)| r * (f[a] - cp.means[l][tree.ancestor_index(a, l)]))
                .sum();
            x[a] * growth
        })
        .collect()
}

/// Extrinsic variant `ẋ_a = x_a Σ_ℓ η_ℓ x_{K_ℓ(a)} [F_a(x) − F̂_{K_ℓ(a)}(x)]`.
pub fn nrd_extr_field(
    game: &Game,
    tree: &SimilarityTree,
    etas: &ExtrinsicProfile,
    x: &[f64],
) -> Result<Vec<f64>> {
    check_inputs(game, Some(tree), x)?;
    etas.check_tree(tree)?;
    let f = game.payoff(x)?;
    let cp = ClassPayoffs::compute(tree, x, &f);
    Ok((0..x.len())
        .map(|a| {
            let growth: f64 = etas
                .coefficients()
                .iter()
                .enumerate()
                .map(|(l, &eta)| {
                    let k = tree.ancestor_index(a, l);
                    eta * cp.masses[l][k] * (f[a] - cp.means[l][k])
                })
                .sum();
            x[a] * growth
        })
        .collect())
}

/// Per-capita growth rates `ẋ_a / x_a` under the nested dynamics.
pub fn nrd_growth_rates(
    game: &Game,
    tree: &SimilarityTree,
    rates: &RateProfile,
    x: &[f64],
) -> Result<Vec<f64>> {
    check_inputs(game, Some(tree), x)?;
    rates.check_tree(tree)?;
    let f = game.payoff(x)?;
    let cp = ClassPayoffs::compute(tree, x, &f);
    Ok((0..x.len())
        .map(|a| {
            rates
                .rates()
                .iter()
                .enumerate()
                .map(|(l, &r)| r * (f[a] - cp.means[l][tree.ancestor_index(a, l)]))
                .sum()
        })
        .collect())
}

/// Right-hand side of the class dynamics for a class `K` at level `ℓ`:
/// `x_K Σ_{k<ℓ} λ_k [F̂_K − F̂_{K_k(K)}]`.
pub fn class_velocity(
    game: &Game,
    tree: &SimilarityTree,
    rates: &RateProfile,
    x: &[f64],
    class: crate::hierarchy::ClassId,
) -> Result<f64> {
    check_inputs(game, Some(tree), x)?;
    rates.check_tree(tree)?;
    let f = game.payoff(x)?;
    let cp = ClassPayoffs::compute(tree, x, &f);
    let level = class.level();
    let rep = tree.members(class)?[0];
    let own = cp.means[level][class.index()];
    let mass = cp.masses[level][class.index()];
    Ok(mass
        * (0..level)
            .map(|k| rates.rate(k) * (own - cp.means[k][tree.ancestor_index(rep, k)]))
            .sum::<f64>())
}
