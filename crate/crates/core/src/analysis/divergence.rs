use serde::Serialize;

use crate::choice::NklWeights;
use crate::dynamics::RateProfile;
use crate::error::{Error, Result};
use crate::games::{check_simplex, SIMPLEX_TOL};
use crate::hierarchy::SimilarityTree;

/// Nested Kullback–Leibler divergence to a fixed reference point `p`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DivergenceSpec {
    #[serde(skip)]
    tree: SimilarityTree,
    weights: NklWeights,
    reference: Vec<f64>,
    #[serde(skip)]
    reference_masses: Vec<Vec<f64>>,
}

impl DivergenceSpec {
    pub fn new(tree: &SimilarityTree, weights: NklWeights, reference: Vec<f64>) -> Result<Self> {
        if weights.depth() != tree.depth() {
            return Err(Error::DimensionMismatch {
                expected: tree.depth(),
                actual: weights.depth(),
            });
        }
        if reference.len() != tree.n() {
            return Err(Error::DimensionMismatch {
                expected: tree.n(),
                actual: reference.len(),
            });
        }
        check_simplex(&reference, SIMPLEX_TOL)?;
        Ok(Self {
            reference_masses: tree.masses(&reference),
            tree: tree.clone(),
            weights,
            reference,
        })
    }

    /// Weights `w_ℓ = λ_ℓ / (Λ_{ℓ-1} Λ_ℓ)`, `w_N = 1`.
    pub fn from_rates(
        tree: &SimilarityTree,
        rates: &RateProfile,
        reference: Vec<f64>,
    ) -> Result<Self> {
        Self::new(tree, NklWeights::from_rates(rates), reference)
    }

    pub fn reference(&self) -> &[f64] {
        &self.reference
    }

    pub fn weights(&self) -> &NklWeights {
        &self.weights
    }

    /// `D_N(p, x) = Σ_ℓ w_ℓ Σ_K p_K log(p_K / x_K)`.
    pub fn divergence(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.tree.n() {
            return Err(Error::DimensionMismatch {
                expected: self.tree.n(),
                actual: x.len(),
            });
        }
        check_simplex(x, SIMPLEX_TOL)?;
        let masses = self.tree.masses(x);
        let mut total = 0.0;
        for l in 1..=self.tree.depth() {
            let mut level = 0.0;
            for (&p, &q) in self.reference_masses[l].iter().zip(&masses[l]) {
                if p <= 0.0 {
                    continue;
                }
                if q <= 0.0 {
                    return Err(Error::SupportMismatch);
                }
                level += p * (p / q).ln();
            }
            total += self.weights.weight(l) * level;
        }
        Ok(total)
    }
}

/// Free-function form of [`DivergenceSpec::divergence`].
pub fn nested_kl(spec: &DivergenceSpec, x: &[f64]) -> Result<f64> {
    spec.divergence(x)
}

/// `V_{ab}(x) = D_N(e_a, x) − D_N(e_b, x) = Σ_ℓ w_ℓ log(x_{K_ℓ(b)} / x_{K_ℓ(a)})`,
/// whose time derivative along the nested replicator flow is `F_b − F_a`.
pub fn lyapunov_difference(
    tree: &SimilarityTree,
    weights: &NklWeights,
    x: &[f64],
    a: usize,
    b: usize,
) -> Result<f64> {
    if weights.depth() != tree.depth() {
        return Err(Error::DimensionMismatch {
            expected: tree.depth(),
            actual: weights.depth(),
        });
    }
    for i in [a, b] {
        if i >= tree.n() {
            return Err(Error::IndexOutOfRange {
                index: i,
                n: tree.n(),
            });
        }
    }
    let masses = tree.masses(x);
    let mut total = 0.0;
    for l in 1..=tree.depth() {
        let ka = tree.ancestor_index(a, l);
        let kb = tree.ancestor_index(b, l);
        if ka == kb {
            continue;
        }
        let (ma, mb) = (masses[l][ka], masses[l][kb]);
        if ma <= 0.0 || mb <= 0.0 {
            return Err(Error::SupportMismatch);
        }
        total += weights.weight(l) * (mb / ma).ln();
    }
    Ok(total)
}
