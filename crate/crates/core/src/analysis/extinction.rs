use serde::Serialize;

use crate::choice::NklWeights;
use crate::dynamics::{RateProfile, Trajectory};
use crate::error::{Error, Result};
use crate::games::{dominated_pairs, Game};
use crate::hierarchy::SimilarityTree;

use super::divergence::lyapunov_difference;

/// Fewest samples a slope fit accepts.
pub const MIN_FIT_POINTS: usize = 3;

/// Slack on the pointwise bound, in units of `log x_a`, for integration error.
pub const BOUND_SLACK: f64 = 1e-8;

/// Ordinary least squares `y ≈ slope · t + intercept`.
pub fn linear_fit(t: &[f64], y: &[f64]) -> (f64, f64) {
    let n = t.len() as f64;
    let mt = t.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = t.iter().zip(y).map(|(a, b)| (a - mt) * (b - my)).sum();
    let sxx: f64 = t.iter().map(|a| (a - mt) * (a - mt)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mt)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateFitReport {
    pub action: usize,
    pub dominator: usize,
    pub margin: f64,
    pub degree: usize,
    /// Least-squares slope of `log x_a(t)` over the window.
    pub slope: f64,
    pub intercept: f64,
    /// `Λ_deg · δ`.
    pub bound_exponent: f64,
    /// The constant `c` of `x_a(t) ≤ exp(c − Λ_deg δ t)`, computed from `x(0)`.
    pub bound_offset: f64,
    /// Largest value of `log x_a(t) − (c − Λ_deg δ t)` over the trajectory.
    pub worst_bound_gap: f64,
    pub bound_satisfied: bool,
    pub window: (f64, f64),
    pub points: usize,
}

/// Fits the extinction exponent of a strictly dominated action and checks the
/// pointwise bound `log x_a(t) ≤ c − Λ_deg δ t` along the whole trajectory.
///
/// Among the actions dominating `action` the one with the largest
/// `Λ_deg δ` is used. The offset is `c = −Λ_deg V_{ab}(x(0))`, which follows
/// from `V̇_{ab} = F_b − F_a ≥ δ` and `V_{ab} ≤ −log x_a / Λ_deg`.
/// `window` is the fraction of the time grid, counted from the end, used in
/// the fit (default one half).
pub fn fit_extinction_rate(
    game: &Game,
    tree: &SimilarityTree,
    rates: &RateProfile,
    trajectory: &Trajectory,
    action: usize,
    window: Option<f64>,
) -> Result<RateFitReport> {
    rates.check_tree(tree)?;
    if action >= game.n() {
        return Err(Error::IndexOutOfRange {
            index: action,
            n: game.n(),
        });
    }
    let fraction = window.unwrap_or(0.5);
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::InvalidState(format!(
            "window fraction {fraction} must be in (0, 1]"
        )));
    }
    let cum = rates.cumulative_all();
    let best = dominated_pairs(game)?
        .into_iter()
        .filter(|d| d.dominated == action)
        .map(|d| {
            let deg = tree.degree(action, d.dominator).expect("valid actions");
            (cum[deg] * d.margin, deg, d)
        })
        .max_by(|a, b| a.0.total_cmp(&b.0));
    let (exponent, degree, dom) = best.ok_or(Error::NotDominated { action })?;

    let len = trajectory.len();
    let start = ((1.0 - fraction) * (len as f64)).floor() as usize;
    let points = len - start.min(len);
    if points < MIN_FIT_POINTS {
        return Err(Error::WindowTooShort {
            points,
            required: MIN_FIT_POINTS,
        });
    }
    let times = &trajectory.times[start..];
    let logs: Vec<f64> = trajectory.states[start..]
        .iter()
        .map(|s| s[action].ln())
        .collect();
    if logs.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidState(
            "share left the interior during the window".into(),
        ));
    }
    let (slope, intercept) = linear_fit(times, &logs);

    let w = NklWeights::from_rates(rates);
    let v0 = lyapunov_difference(tree, &w, trajectory.initial(), action, dom.dominator)?;
    let offset = -cum[degree] * v0;
    let t0 = trajectory.times[0];
    let worst = trajectory
        .times
        .iter()
        .zip(&trajectory.states)
        .map(|(&t, s)| s[action].ln() - (offset - exponent * (t - t0)))
        .fold(f64::NEG_INFINITY, f64::max);

    Ok(RateFitReport {
        action,
        dominator: dom.dominator,
        margin: dom.margin,
        degree,
        slope,
        intercept,
        bound_exponent: exponent,
        bound_offset: offset,
        worst_bound_gap: worst,
        bound_satisfied: worst <= BOUND_SLACK,
        window: (times[0], *times.last().unwrap()),
        points,
    })
}
