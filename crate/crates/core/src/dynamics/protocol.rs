use crate::error::{Error, Result};
use crate::games::{check_simplex, SIMPLEX_TOL};
use crate::hierarchy::SimilarityTree;

use super::{ExtrinsicProfile, RateProfile};

/// Conditional switch rates `ρ_{ab}` of a revision protocol, row-major `n × n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SwitchRates {
    n: usize,
    rho: Vec<f64>,
}

impl SwitchRates {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            rho: vec![0.0; n * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.rho[a * self.n + b]
    }

    pub fn row(&self, a: usize) -> &[f64] {
        &self.rho[a * self.n..(a + 1) * self.n]
    }
}

fn check(tree: &SimilarityTree, payoffs: &[f64], x: &[f64]) -> Result<()> {
    let n = tree.n();
    for len in [payoffs.len(), x.len()] {
        if len != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: len,
            });
        }
    }
    check_simplex(x, SIMPLEX_TOL)
}

/// Nested pairwise proportional imitation:
/// `ρ_{ab} = Σ_ℓ λ_ℓ x_{b|K_ℓ(a)} [π_b − π_a]_+`.
///
/// Rows of actions with `x_a = 0` are set to zero; they carry no mass.
pub fn nppi_switch_rates(
    tree: &SimilarityTree,
    rates: &RateProfile,
    payoffs: &[f64],
    x: &[f64],
) -> Result<SwitchRates> {
    check(tree, payoffs, x)?;
    rates.check_tree(tree)?;
    let n = tree.n();
    let masses = tree.masses(x);
    let mut out = SwitchRates::zeros(n);
    for a in 0..n {
        if x[a] <= 0.0 {
            continue;
        }
        for b in 0..n {
            let gain = payoffs[b] - payoffs[a];
            if gain <= 0.0 {
                continue;
            }
            let deg = if a == b { 0 } else { tree.degree(a, b)? };
            let meet: f64 = (0..=deg)
                .map(|l| rates.rate(l) * x[b] / masses[l][tree.ancestor_index(a, l)])
                .sum();
            out.rho[a * n + b] = meet * gain;
        }
    }
    Ok(out)
}

/// Extrinsic imitation: uniform encounters, imitation scaled by
/// `η_0 + … + η_{deg(a,b)}`, so `ρ_{ab} = H_{ab} x_b [π_b − π_a]_+`.
pub fn extrinsic_switch_rates(
    tree: &SimilarityTree,
    etas: &ExtrinsicProfile,
    payoffs: &[f64],
    x: &[f64],
) -> Result<SwitchRates> {
    check(tree, payoffs, x)?;
    etas.check_tree(tree)?;
    let n = tree.n();
    let mut out = SwitchRates::zeros(n);
    for a in 0..n {
        if x[a] <= 0.0 {
            continue;
        }
        for b in 0..n {
            let gain = payoffs[b] - payoffs[a];
            if gain > 0.0 {
                out.rho[a * n + b] = etas.imitation_coefficient(tree, a, b)? * x[b] * gain;
            }
        }
    }
    Ok(out)
}

/// Mean dynamics: inflow `Σ_b x_b ρ_{ba}` minus outflow `x_a Σ_b ρ_{ab}`.
pub fn mean_dynamics(rho: &SwitchRates, x: &[f64]) -> Result<Vec<f64>> {
    if x.len() != rho.n {
        return Err(Error::DimensionMismatch {
            expected: rho.n,
            actual: x.len(),
        });
    }
    let n = rho.n;
    Ok((0..n)
        .map(|a| {
            let inflow: f64 = (0..n).map(|b| x[b] * rho.get(b, a)).sum();
            let outflow: f64 = rho.row(a).iter().sum();
            inflow - x[a] * outflow
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{nrd_extr_field, nrd_field, rd_field};
    use crate::games::presets;

    fn bus_tree() -> SimilarityTree {
        SimilarityTree::build(3, &[vec![vec![0, 1], vec![2]]]).unwrap()
    }

    #[test]
    fn equal_payoffs_never_switch() {
        let tree = bus_tree();
        let rates = RateProfile::new(vec![0.25, 0.75]).unwrap();
        let rho = nppi_switch_rates(&tree, &rates, &[1.0; 3], &[0.2, 0.3, 0.5]).unwrap();
        assert_eq!(rho, SwitchRates::zeros(3));
        assert_eq!(mean_dynamics(&rho, &[0.2, 0.3, 0.5]).unwrap(), vec![0.0; 3]);
    }

    #[test]
    fn flat_protocol_is_plain_imitation() {
        let tree = SimilarityTree::flat(3).unwrap();
        let rates = RateProfile::new(vec![1.0]).unwrap();
        let x = [0.2, 0.3, 0.5];
        let pi = [1.0, -2.0, 0.5];
        let rho = nppi_switch_rates(&tree, &rates, &pi, &x).unwrap();
        for a in 0..3 {
            for b in 0..3 {
                let expected = x[b] * (pi[b] - pi[a]).max(0.0);
                assert!((rho.get(a, b) - expected).abs() < 1e-15);
            }
        }
        let g = presets::commuting();
        let f = g.payoff(&x).unwrap();
        let rho = nppi_switch_rates(&tree, &rates, &f, &x).unwrap();
        let md = mean_dynamics(&rho, &x).unwrap();
        let rd = rd_field(&g, &x).unwrap();
        assert!(md.iter().zip(&rd).all(|(a, b)| (a - b).abs() < 1e-13));
    }

    #[test]
    fn conditional_imitation_rates() {
        let tree = bus_tree();
        let rates = RateProfile::new(vec![0.25, 0.75]).unwrap();
        let x = [0.1, 0.3, 0.6];
        let pi = [0.0, 1.0, 2.0];
        let rho = nppi_switch_rates(&tree, &rates, &pi, &x).unwrap();
        // bus1 -> bus2 share level 1; bus1 -> car only the root.
        let same = (pi[1] - pi[0]) * (0.25 / 1.0 + 0.75 / 0.4);
        assert!((rho.get(0, 1) / x[1] - same).abs() < 1e-14);
        let cross = (pi[2] - pi[0]) * 0.25;
        assert!((rho.get(0, 2) / x[2] - cross).abs() < 1e-14);
        assert_eq!(rho.get(2, 0), 0.0);
    }

    #[test]
    fn protocol_aggregates_to_the_nested_field() {
        let g = presets::commuting();
        let tree = bus_tree();
        let rates = RateProfile::new(vec![0.25, 0.75]).unwrap();
        let x = [0.4, 0.4, 0.2];
        let f = g.payoff(&x).unwrap();
        let md = mean_dynamics(&nppi_switch_rates(&tree, &rates, &f, &x).unwrap(), &x).unwrap();
        let nrd = nrd_field(&g, &tree, &rates, &x).unwrap();
        for (a, b) in md.iter().zip(&nrd) {
            assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn extrinsic_protocol_aggregates_to_its_field() {
        let g = presets::commuting();
        let tree = bus_tree();
        let etas = ExtrinsicProfile::new(vec![0.5, 2.0]).unwrap();
        let x = [0.3, 0.25, 0.45];
        let f = g.payoff(&x).unwrap();
        let md = mean_dynamics(&extrinsic_switch_rates(&tree, &etas, &f, &x).unwrap(), &x).unwrap();
        let field = nrd_extr_field(&g, &tree, &etas, &x).unwrap();
        for (a, b) in md.iter().zip(&field) {
            assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn boundary_rows_are_zero() {
        let tree = bus_tree();
        let rates = RateProfile::new(vec![0.25, 0.75]).unwrap();
        let rho = nppi_switch_rates(&tree, &rates, &[0.0, 1.0, 2.0], &[0.0, 0.5, 0.5]).unwrap();
        assert!(rho.row(0).iter().all(|&v| v == 0.0));
    }
}
