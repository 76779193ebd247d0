use serde::Serialize;

use crate::error::{Error, Result};
use crate::hierarchy::SimilarityTree;

/// Intra-level sampling probabilities `λ_0, …, λ_{N-1}` of the nested protocol.
///
/// The rates are nonnegative, sum to one, and `λ_0 > 0`: every revising
/// agent considers the whole action set at a positive rate.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct RateProfile(Vec<f64>);

impl RateProfile {
    pub const SUM_TOL: f64 = 1e-12;

    pub fn new(rates: Vec<f64>) -> Result<Self> {
        if rates.is_empty() {
            return Err(Error::InvalidProfile("rate profile is empty".into()));
        }
        if rates.iter().any(|r| !r.is_finite() || *r < 0.0) {
            return Err(Error::InvalidProfile(
                "rates must be finite and nonnegative".into(),
            ));
        }
        if rates[0] <= 0.0 {
            return Err(Error::InvalidProfile(
                "the level-0 rate must be positive".into(),
            ));
        }
        let total: f64 = rates.iter().sum();
        if (total - 1.0).abs() > Self::SUM_TOL {
            return Err(Error::InvalidProfile(format!(
                "rates sum to {total}, not 1"
            )));
        }
        Ok(Self(rates))
    }

    /// `λ_0 = 1`, all other levels zero: the plain replicator dynamics.
    pub fn replicator(depth: usize) -> Self {
        let mut r = vec![0.0; depth];
        r[0] = 1.0;
        Self(r)
    }

    pub fn rates(&self) -> &[f64] {
        &self.0
    }

    pub fn rate(&self, level: usize) -> f64 {
        self.0[level]
    }

    /// Tree depth `N` the profile applies to.
    pub fn depth(&self) -> usize {
        self.0.len()
    }

    /// `Λ_ℓ = λ_0 + … + λ_ℓ`.
    pub fn cumulative(&self, level: usize) -> f64 {
        self.0[..=level].iter().sum()
    }

    pub fn cumulative_all(&self) -> Vec<f64> {
        self.0
            .iter()
            .scan(0.0, |acc, r| {
                *acc += r;
                Some(*acc)
            })
            .collect()
    }

    pub fn check_tree(&self, tree: &SimilarityTree) -> Result<()> {
        if self.depth() != tree.depth() {
            return Err(Error::DimensionMismatch {
                expected: tree.depth(),
                actual: self.depth(),
            });
        }
        Ok(())
    }
}

/// Extrinsic imitation coefficients `η_0, …, η_{N-1} ≥ 0`, not all zero.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct ExtrinsicProfile(Vec<f64>);

impl ExtrinsicProfile {
    pub fn new(etas: Vec<f64>) -> Result<Self> {
        if etas.is_empty() {
            return Err(Error::InvalidProfile("extrinsic profile is empty".into()));
        }
        if etas.iter().any(|e| !e.is_finite() || *e < 0.0) {
            return Err(Error::InvalidProfile(
                "extrinsic coefficients must be finite and nonnegative".into(),
            ));
        }
        if etas.iter().all(|&e| e == 0.0) {
            return Err(Error::InvalidProfile(
                "at least one extrinsic coefficient must be positive".into(),
            ));
        }
        Ok(Self(etas))
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.0
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }

    /// Imitation coefficient `η_0 + … + η_{deg(a,b)}` between two actions.
    pub fn imitation_coefficient(&self, tree: &SimilarityTree, a: usize, b: usize) -> Result<f64> {
        let deg = tree.degree(a, b)?;
        Ok(self.0[..=deg].iter().sum())
    }

    pub fn check_tree(&self, tree: &SimilarityTree) -> Result<()> {
        if self.depth() != tree.depth() {
            return Err(Error::DimensionMismatch {
                expected: tree.depth(),
                actual: self.depth(),
            });
        }
        Ok(())
    }
}
