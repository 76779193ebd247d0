use crate::error::{Error, Result};
use crate::games::{check_simplex, SIMPLEX_TOL};
use crate::hierarchy::{ClassId, SimilarityTree};

use super::profiles::{EntropyWeights, TempProfile};

/// `v log v` with `0 log 0 = 0`.
pub fn xlogx(v: f64) -> f64 {
    if v > 0.0 {
        v * v.ln()
    } else {
        0.0
    }
}

fn check(tree: &SimilarityTree, depth: usize, x: &[f64]) -> Result<()> {
    if depth != tree.depth() {
        return Err(Error::DimensionMismatch {
            expected: tree.depth(),
            actual: depth,
        });
    }
    if x.len() != tree.n() {
        return Err(Error::DimensionMismatch {
            expected: tree.n(),
            actual: x.len(),
        });
    }
    check_simplex(x, SIMPLEX_TOL)
}

/// Nested negative entropy `h(x) = Σ_ℓ c_ℓ Σ_{K ∈ level ℓ} x_K log x_K`.
pub fn nested_entropy(tree: &SimilarityTree, weights: &EntropyWeights, x: &[f64]) -> Result<f64> {
    check(tree, weights.depth(), x)?;
    let masses = tree.masses(x);
    Ok((1..=tree.depth())
        .map(|l| weights.weight(l) * masses[l].iter().map(|&m| xlogx(m)).sum::<f64>())
        .sum())
}

/// Nested entropy relative to `class` at level `ℓ`: only levels `ℓ..N` and
/// only classes inside `class` contribute.
pub fn class_nested_entropy(
    tree: &SimilarityTree,
    weights: &EntropyWeights,
    x: &[f64],
    class: ClassId,
) -> Result<f64> {
    check(tree, weights.depth(), x)?;
    let members = tree.members(class)?;
    let masses = tree.masses(x);
    let level = class.level();
    let mut total = 0.0;
    for l in level..=tree.depth() {
        let mut seen = vec![false; masses[l].len()];
        let mut s = 0.0;
        for &a in members {
            let k = tree.ancestor_index(a, l);
            if !seen[k] {
                seen[k] = true;
                s += xlogx(masses[l][k]);
            }
        }
        total += weights.weight(l) * s;
    }
    Ok(total)
}

/// Conditional entropy `τ_{ℓ+1} Σ_{K' child of K} x_{K'} log(x_{K'}/x_K)`;
/// zero for singletons and for classes of zero mass.
pub fn conditional_entropy(
    tree: &SimilarityTree,
    temps: &TempProfile,
    x: &[f64],
    class: ClassId,
) -> Result<f64> {
    check(tree, temps.depth(), x)?;
    let children = tree.children(class)?;
    let mass = tree.class_mass(x, class)?;
    if children.is_empty() || mass <= 0.0 {
        return Ok(0.0);
    }
    let tau = temps.temp(class.level() + 1);
    let mut s = 0.0;
    for child in children {
        let m = tree.class_mass(x, child)?;
        if m > 0.0 {
            s += m * (m / mass).ln();
        }
    }
    Ok(tau * s)
}

/// Gradient `∂h/∂x_a = Σ_ℓ c_ℓ (1 + log x_{K_ℓ(a)})`; needs an interior state.
pub fn entropy_gradient(
    tree: &SimilarityTree,
    weights: &EntropyWeights,
    x: &[f64],
) -> Result<Vec<f64>> {
    check(tree, weights.depth(), x)?;
    if x.iter().any(|&v| v <= 0.0) {
        return Err(Error::InvalidState(
            "the entropy gradient is unbounded on the boundary".into(),
        ));
    }
    let masses = tree.masses(x);
    Ok((0..tree.n())
        .map(|a| {
            (1..=tree.depth())
                .map(|l| weights.weight(l) * (1.0 + masses[l][tree.ancestor_index(a, l)].ln()))
                .sum()
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bus_tree() -> SimilarityTree {
        SimilarityTree::build(3, &[vec![vec![0, 1], vec![2]]]).unwrap()
    }

    #[test]
    fn vertex_has_zero_entropy() {
        let tree = bus_tree();
        let c = EntropyWeights::new(vec![0.0, 3.0, 1.0]).unwrap();
        assert_eq!(nested_entropy(&tree, &c, &[0.0, 0.0, 1.0]).unwrap(), 0.0);
        assert_eq!(nested_entropy(&tree, &c, &[1.0, 0.0, 0.0]).unwrap(), 0.0);
    }

    #[test]
    fn flat_tree_uniform() {
        let tree = SimilarityTree::flat(5).unwrap();
        let c = EntropyWeights::new(vec![0.0, 1.0]).unwrap();
        let h = nested_entropy(&tree, &c, &[0.2; 5]).unwrap();
        assert!((h + 5f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn two_level_value() {
        let tree = bus_tree();
        let temps = TempProfile::new(vec![4.0, 1.0]).unwrap();
        let c = EntropyWeights::from_temps(&temps);
        let x = [0.25, 0.25, 0.5];
        let half = 0.5 * 0.5f64.ln();
        let quarter = 0.25 * 0.25f64.ln();
        let expected = 3.0 * (half + half) + (2.0 * quarter + half);
        assert!((nested_entropy(&tree, &c, &x).unwrap() - expected).abs() < 1e-15);
    }

    #[test]
    fn decomposes_into_conditional_entropies() {
        let tree = SimilarityTree::build(
            8,
            &[
                vec![vec![0, 1, 2, 3], vec![4, 5, 6, 7]],
                vec![vec![0, 1], vec![2, 3], vec![4, 5], vec![6, 7]],
            ],
        )
        .unwrap();
        let temps = TempProfile::new(vec![5.0, 2.0, 0.5]).unwrap();
        let c = EntropyWeights::from_temps(&temps);
        let x = [0.05, 0.1, 0.15, 0.2, 0.02, 0.08, 0.3, 0.1];
        for class in tree.classes().collect::<Vec<_>>() {
            let h = class_nested_entropy(&tree, &c, &x, class).unwrap();
            let members = tree.members(class).unwrap().to_vec();
            let mut cond = 0.0;
            for other in tree.classes().collect::<Vec<_>>() {
                if other.level() >= class.level()
                    && members.contains(&tree.members(other).unwrap()[0])
                {
                    cond += conditional_entropy(&tree, &temps, &x, other).unwrap();
                }
            }
            let tau = if class.level() == 0 {
                0.0
            } else {
                temps.temp(class.level())
            };
            let mass = tree.class_mass(&x, class).unwrap();
            assert!((h - (cond + tau * xlogx(mass))).abs() < 1e-14, "{class:?}");
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let tree = bus_tree();
        let c = EntropyWeights::new(vec![0.0, 3.0, 1.0]).unwrap();
        let x = [0.2, 0.3, 0.5];
        let g = entropy_gradient(&tree, &c, &x).unwrap();
        // directional derivative along e_0 - e_2 stays on the simplex
        let h = 1e-6;
        let plus = nested_entropy(&tree, &c, &[0.2 + h, 0.3, 0.5 - h]).unwrap();
        let minus = nested_entropy(&tree, &c, &[0.2 - h, 0.3, 0.5 + h]).unwrap();
        assert!(((plus - minus) / (2.0 * h) - (g[0] - g[2])).abs() < 1e-8);
    }
}
