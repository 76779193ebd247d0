use serde::Serialize;

use crate::choice::NklWeights;
use crate::dynamics::{nrd_field, rk4_increment, ClassPayoffs, RateProfile};
use crate::error::{Error, Result};
use crate::games::{dot, Game};
use crate::hierarchy::SimilarityTree;

use super::divergence::{lyapunov_difference, DivergenceSpec};

/// A finite-difference derivative compared against its closed form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub finite_difference: f64,
    pub predicted: f64,
    pub residual: f64,
}

/// `log(x_K(t + h) / x_K(t − h))` for every class, from one RK4 step forward
/// and one backward along the nested flow. Working from the increments keeps
/// the central difference free of cancellation against `x`.
fn log_mass_gap(
    game: &Game,
    tree: &SimilarityTree,
    rates: &RateProfile,
    x: &[f64],
    h: f64,
) -> Result<Vec<Vec<f64>>> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidIntegrator(format!(
            "step {h} must be positive"
        )));
    }
    let mut field = |s: &[f64]| nrd_field(game, tree, rates, s);
    let plus = rk4_increment(&mut field, x, h)?;
    let minus = rk4_increment(&mut field, x, -h)?;
    let split: Vec<f64> = plus.iter().zip(&minus).map(|(a, b)| a - b).collect();
    let base = tree.masses(x);
    let lower = tree.masses(&minus);
    let spread = tree.masses(&split);
    let mut gap = Vec::with_capacity(base.len());
    for l in 0..base.len() {
        let mut level = Vec::with_capacity(base[l].len());
        for k in 0..base[l].len() {
            if base[l][k] <= 0.0 {
                // faces of the simplex are invariant, an absent class stays absent
                level.push(0.0);
                continue;
            }
            let from = base[l][k] + lower[l][k];
            if from <= 0.0 {
                return Err(Error::SupportMismatch);
            }
            level.push((spread[l][k] / from).ln_1p());
        }
        gap.push(level);
    }
    Ok(gap)
}

/// Central difference of `D_N(p, x(t))` along the nested flow against
/// `⟨F(x), x − p⟩`.
pub fn check_dkl_identity(
    game: &Game,
    tree: &SimilarityTree,
    rates: &RateProfile,
    x: &[f64],
    p: &[f64],
    h: f64,
) -> Result<IdentityCheck> {
    let spec = DivergenceSpec::from_rates(tree, rates, p.to_vec())?;
    if x.len() != tree.n() {
        return Err(Error::DimensionMismatch {
            expected: tree.n(),
            actual: x.len(),
        });
    }
    let gap = log_mass_gap(game, tree, rates, x, h)?;
    let pm = tree.masses(p);
    let mut change = 0.0;
    for l in 1..=tree.depth() {
        let level: f64 = pm[l]
            .iter()
            .zip(&gap[l])
            .filter(|(q, _)| **q > 0.0)
            .map(|(q, g)| q * g)
            .sum();
        change -= spec.weights().weight(l) * level;
    }
    let fd = change / (2.0 * h);
    let f = game.payoff(x)?;
    let diff: Vec<f64> = x.iter().zip(p).map(|(a, b)| a - b).collect();
    let predicted = dot(&f, &diff);
    Ok(IdentityCheck {
        finite_difference: fd,
        predicted,
        residual: (fd - predicted).abs(),
    })
}

/// Central difference of `V_{ab} = D_N(e_a, x) − D_N(e_b, x)` against `F_b − F_a`.
pub fn check_paydiff(
    game: &Game,
    tree: &SimilarityTree,
    rates: &RateProfile,
    x: &[f64],
    a: usize,
    b: usize,
    h: f64,
) -> Result<IdentityCheck> {
    let w = NklWeights::from_rates(rates);
    // validates indices and support
    lyapunov_difference(tree, &w, x, a, b)?;
    let gap = log_mass_gap(game, tree, rates, x, h)?;
    let mut change = 0.0;
    for l in 1..=tree.depth() {
        let (ka, kb) = (tree.ancestor_index(a, l), tree.ancestor_index(b, l));
        change += w.weight(l) * (gap[l][kb] - gap[l][ka]);
    }
    let fd = change / (2.0 * h);
    let f = game.payoff(x)?;
    let predicted = f[b] - f[a];
    Ok(IdentityCheck {
        finite_difference: fd,
        predicted,
        residual: (fd - predicted).abs(),
    })
}

/// Rate of change of the potential along the nested flow, evaluated two ways:
/// as `Σ_ℓ λ_ℓ Σ_K x_K Var_K(F)` (class-conditional payoff variances) and as
/// `⟨∇Φ, ẋ⟩`. The game's payoff field stands in for `∇Φ`.
pub fn potential_rate(
    game: &Game,
    tree: &SimilarityTree,
    rates: &RateProfile,
    x: &[f64],
) -> Result<IdentityCheck> {
    let v = nrd_field(game, tree, rates, x)?;
    let f = game.payoff(x)?;
    let inner = dot(&f, &v);
    let cp = ClassPayoffs::compute(tree, x, &f);
    let mut variances = 0.0;
    for (l, &r) in rates.rates().iter().enumerate() {
        let mut level = 0.0;
        for a in 0..x.len() {
            let dev = f[a] - cp.means[l][tree.ancestor_index(a, l)];
            level += x[a] * dev * dev;
        }
        variances += r * level;
    }
    Ok(IdentityCheck {
        finite_difference: inner,
        predicted: variances,
        residual: (inner - variances).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::presets;

    fn bus_tree() -> SimilarityTree {
        SimilarityTree::build(3, &[vec![vec![0, 1], vec![2]]]).unwrap()
    }

    #[test]
    fn stationary_point_has_zero_derivative() {
        let g = presets::commuting();
        let tree = bus_tree();
        let rates = RateProfile::new(vec![0.25, 0.75]).unwrap();
        let x = [0.0, 0.5, 0.5];
        let r = check_dkl_identity(&g, &tree, &rates, &x, &x, 1e-4).unwrap();
        assert!(r.finite_difference.abs() < 1e-15 && r.predicted.abs() < 1e-15);
    }

    #[test]
    fn identity_residual_is_second_order() {
        let g = presets::commuting();
        let tree = bus_tree();
        let rates = RateProfile::new(vec![0.25, 0.75]).unwrap();
        let x = [0.3, 0.2, 0.5];
        let p = [0.1, 0.6, 0.3];
        let r1 = check_dkl_identity(&g, &tree, &rates, &x, &p, 1e-3).unwrap();
        let r2 = check_dkl_identity(&g, &tree, &rates, &x, &p, 5e-4).unwrap();
        assert!(r1.residual < 1e-5);
        assert!(
            r1.residual / r2.residual > 3.5,
            "{} {}",
            r1.residual,
            r2.residual
        );
    }

    #[test]
    fn paydiff_holds() {
        let g = presets::commuting();
        let tree = bus_tree();
        let rates = RateProfile::new(vec![0.25, 0.75]).unwrap();
        let r = check_paydiff(&g, &tree, &rates, &[0.3, 0.2, 0.5], 0, 2, 1e-4).unwrap();
        assert!(r.residual < 1e-6);
    }

    #[test]
    fn variance_form_of_potential_rate() {
        let g =
            Game::symmetric_potential(3, vec![1.0, 0.5, 0.0, 0.5, 2.0, -1.0, 0.0, -1.0, 0.3], None)
                .unwrap();
        let tree = bus_tree();
        let rates = RateProfile::new(vec![0.4, 0.6]).unwrap();
        let r = potential_rate(&g, &tree, &rates, &[0.2, 0.5, 0.3]).unwrap();
        assert!(r.residual < 1e-14);
        assert!(r.predicted >= 0.0);
    }
}
