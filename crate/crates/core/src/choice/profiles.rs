//! The equivalent parameterizations of nesting intensity and the maps between them.
//!
//! Revision rates `λ_0..λ_{N-1}`, temperatures `τ_1..τ_N`, nested-KL weights
//! `w_1..w_N` and entropy weights `c_0..c_N`. Temperatures that are not
//! normalized (`τ_N ≠ 1`) correspond to rates that sum to `1/τ_N`; those are
//! reported as a normalized [`RateProfile`] plus an explicit time scale.

use serde::Serialize;

use crate::dynamics::RateProfile;
use crate::error::{Error, Result};
use crate::hierarchy::SimilarityTree;

/// Uncertainty levels `τ_1 ≥ τ_2 ≥ … ≥ τ_N > 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct TempProfile(Vec<f64>);

impl TempProfile {
    pub fn new(temps: Vec<f64>) -> Result<Self> {
        if temps.is_empty() {
            return Err(Error::InvalidProfile("temperature profile is empty".into()));
        }
        if temps.iter().any(|t| !t.is_finite() || *t <= 0.0) {
            return Err(Error::InvalidProfile(
                "temperatures must be finite and positive".into(),
            ));
        }
        if temps.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::InvalidProfile(
                "temperatures must be non-increasing from coarse to fine".into(),
            ));
        }
        Ok(Self(temps))
    }

    /// Uniform temperature `τ` on every level: plain logit at that temperature.
    pub fn uniform(depth: usize, tau: f64) -> Result<Self> {
        Self::new(vec![tau; depth])
    }

    pub fn temps(&self) -> &[f64] {
        &self.0
    }

    /// `τ_ℓ` for `ℓ = 1..=N`; `τ_{N+1} = 0` by convention.
    pub fn temp(&self, level: usize) -> f64 {
        assert!(level >= 1, "temperatures are indexed from level 1");
        self.0.get(level - 1).copied().unwrap_or(0.0)
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }

    pub fn finest(&self) -> f64 {
        *self.0.last().expect("nonempty")
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

    /// `τ_ℓ = 1/Λ_{ℓ-1}`.
    pub fn from_rates(rates: &RateProfile) -> Self {
        Self(rates.cumulative_all().iter().map(|c| 1.0 / c).collect())
    }

    /// Rates `λ_0 = 1/τ_1`, `λ_ℓ = 1/τ_{ℓ+1} − 1/τ_ℓ`, before normalization.
    /// They sum to `1/τ_N`.
    pub fn raw_rates(&self) -> Vec<f64> {
        let t = &self.0;
        let mut out = Vec::with_capacity(t.len());
        out.push(1.0 / t[0]);
        for l in 1..t.len() {
            out.push(1.0 / t[l] - 1.0 / t[l - 1]);
        }
        out
    }

    /// Normalized rates and the factor `1/τ_N` by which the score dynamics
    /// run faster than the nested replicator dynamics with those rates.
    pub fn to_rates(&self) -> Result<(RateProfile, f64)> {
        let raw = self.raw_rates();
        let scale = 1.0 / self.finest();
        let mut rates: Vec<f64> = raw.iter().map(|r| (r / scale).max(0.0)).collect();
        // absorb rounding so the profile sums to one
        let total: f64 = rates.iter().sum();
        rates.iter_mut().for_each(|r| *r /= total);
        Ok((RateProfile::new(rates)?, scale))
    }
}

/// Nested-KL weights `w_1..w_N` with `w_ℓ = λ_ℓ / (Λ_{ℓ-1} Λ_ℓ)` and `w_N = 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct NklWeights(Vec<f64>);

impl NklWeights {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidProfile("weight profile is empty".into()));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidProfile(
                "divergence weights must be finite and nonnegative".into(),
            ));
        }
        Ok(Self(weights))
    }

    pub fn from_rates(rates: &RateProfile) -> Self {
        let cum = rates.cumulative_all();
        let n = rates.depth();
        let mut w: Vec<f64> = (1..n)
            .map(|l| rates.rate(l) / (cum[l - 1] * cum[l]))
            .collect();
        w.push(1.0);
        Self(w)
    }

    pub fn weights(&self) -> &[f64] {
        &self.0
    }

    /// `w_ℓ` for `ℓ = 1..=N`.
    pub fn weight(&self, level: usize) -> f64 {
        self.0[level - 1]
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }
}

/// Entropy weights `c_0..c_N`, `c_ℓ = τ_ℓ − τ_{ℓ+1}` with `τ_{N+1} = 0`.
///
/// `c_0` multiplies `x_root log x_root = 0` and is stored as 0.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct EntropyWeights(Vec<f64>);

impl EntropyWeights {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.len() < 2 {
            return Err(Error::InvalidProfile(
                "entropy weights need entries for levels 0..N with N >= 1".into(),
            ));
        }
        if weights.iter().any(|c| !c.is_finite() || *c < 0.0) {
            return Err(Error::InvalidProfile(
                "entropy weights must be finite and nonnegative".into(),
            ));
        }
        if *weights.last().unwrap() <= 0.0 {
            return Err(Error::InvalidProfile(
                "the finest entropy weight must be positive".into(),
            ));
        }
        Ok(Self(weights))
    }

    pub fn from_temps(temps: &TempProfile) -> Self {
        let n = temps.depth();
        let mut c = vec![0.0];
        c.extend((1..=n).map(|l| temps.temp(l) - temps.temp(l + 1)));
        Self(c)
    }

    pub fn weights(&self) -> &[f64] {
        &self.0
    }

    /// `c_ℓ` for `ℓ = 0..=N`.
    pub fn weight(&self, level: usize) -> f64 {
        self.0[level]
    }

    pub fn depth(&self) -> usize {
        self.0.len() - 1
    }

    /// `τ_ℓ = c_ℓ + … + c_N`.
    pub fn to_temps(&self) -> Result<TempProfile> {
        let n = self.depth();
        let temps = (1..=n).map(|l| self.tail(l)).collect();
        TempProfile::new(temps)
    }

    /// `λ_0 = 1/Σ_{k≥1} c_k` and `λ_ℓ = c_ℓ / (Σ_{k≥ℓ} c_k · Σ_{k≥ℓ+1} c_k)`,
    /// before normalization.
    pub fn raw_rates(&self) -> Vec<f64> {
        let n = self.depth();
        let mut out = vec![1.0 / self.tail(1)];
        out.extend((1..n).map(|l| self.0[l] / (self.tail(l) * self.tail(l + 1))));
        out
    }

    fn tail(&self, level: usize) -> f64 {
        self.0[level..].iter().sum()
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

/// Both weight vectors derived from one rate profile.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightProfile {
    pub nkl: NklWeights,
    pub entropy: EntropyWeights,
}

impl WeightProfile {
    pub fn from_rates(rates: &RateProfile) -> Self {
        Self {
            nkl: NklWeights::from_rates(rates),
            entropy: EntropyWeights::from_temps(&TempProfile::from_rates(rates)),
        }
    }
}

/// All four parameterizations of one nesting intensity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileSet {
    pub rates: RateProfile,
    pub temps: TempProfile,
    pub nkl_weights: NklWeights,
    pub entropy_weights: EntropyWeights,
    /// Speed of the score dynamics relative to the rate-normalized replicator flow.
    pub time_scale: f64,
}

/// Largest relative discrepancy tolerated by the internal round-trip checks.
pub const ROUND_TRIP_TOL: f64 = 1e-12;

pub(crate) fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

fn all_close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| close(*x, *y, tol))
}

impl ProfileSet {
    pub fn from_rates(rates: RateProfile) -> Result<Self> {
        let temps = TempProfile::from_rates(&rates);
        let set = Self {
            nkl_weights: NklWeights::from_rates(&rates),
            entropy_weights: EntropyWeights::from_temps(&temps),
            temps,
            rates,
            time_scale: 1.0,
        };
        set.check()?;
        Ok(set)
    }

    pub fn from_temps(temps: TempProfile) -> Result<Self> {
        let (rates, time_scale) = temps.to_rates()?;
        let set = Self {
            nkl_weights: NklWeights::from_rates(&rates),
            entropy_weights: EntropyWeights::from_temps(&temps),
            temps,
            rates,
            time_scale,
        };
        set.check()?;
        Ok(set)
    }

    /// Verifies every leg of the conversion triangle.
    pub fn check(&self) -> Result<()> {
        let tol = ROUND_TRIP_TOL * 16.0;
        let scale = self.time_scale;
        let raw = self.temps.raw_rates();
        let scaled: Vec<f64> = self.rates.rates().iter().map(|r| r * scale).collect();
        let back = self.entropy_weights.to_temps()?;
        let via_c = self.entropy_weights.raw_rates();
        let ok = all_close(&raw, &scaled, tol)
            && all_close(back.temps(), self.temps.temps(), tol)
            && all_close(&via_c, &scaled, tol);
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidProfile(
                "parameter conversions failed to round-trip".into(),
            ))
        }
    }
}
