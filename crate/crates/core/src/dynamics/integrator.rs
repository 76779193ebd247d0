use serde::Serialize;

use crate::error::{Error, Result};

/// Settings for the fixed-step Runge–Kutta integrator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegratorConfig {
    pub step: f64,
    pub t_end: f64,
    /// Store every `sample_stride`-th step (the initial and final states are always stored).
    pub sample_stride: usize,
    /// Divide by the coordinate sum after each step.
    pub renormalize: bool,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            step: 1e-3,
            t_end: 10.0,
            sample_stride: 10,
            renormalize: true,
        }
    }
}

impl IntegratorConfig {
    pub fn new(step: f64, t_end: f64) -> Self {
        Self {
            step,
            t_end,
            ..Self::default()
        }
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.sample_stride = stride;
        self
    }

    pub fn with_renormalize(mut self, renormalize: bool) -> Self {
        self.renormalize = renormalize;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step.is_finite() && self.step > 0.0) {
            return Err(Error::InvalidIntegrator(format!(
                "step {} must be positive",
                self.step
            )));
        }
        if !(self.t_end.is_finite() && self.t_end >= 0.0) {
            return Err(Error::InvalidIntegrator(format!(
                "t_end {} must be nonnegative",
                self.t_end
            )));
        }
        if self.sample_stride == 0 {
            return Err(Error::InvalidIntegrator(
                "sample_stride must be at least 1".into(),
            ));
        }
        Ok(())
    }

    /// Number of steps; the last step lands exactly on `t_end` up to rounding.
    pub fn steps(&self) -> usize {
        (self.t_end / self.step).round() as usize
    }
}

/// Time-stamped states plus optional named diagnostics sampled on the same grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub diagnostics: Vec<(String, Vec<f64>)>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.states.first().map_or(0, Vec::len)
    }

    pub fn initial(&self) -> &[f64] {
        &self.states[0]
    }

    pub fn terminal(&self) -> &[f64] {
        self.states.last().expect("trajectory is nonempty")
    }

    /// Series of one coordinate.
    pub fn component(&self, a: usize) -> Vec<f64> {
        self.states.iter().map(|s| s[a]).collect()
    }

    /// Evaluates `f` at every stored state and records it under `name`.
    pub fn add_diagnostic<F>(&mut self, name: impl Into<String>, mut f: F) -> Result<()>
    where
        F: FnMut(&[f64]) -> Result<f64>,
    {
        let values = self
            .states
            .iter()
            .map(|s| f(s))
            .collect::<Result<Vec<_>>>()?;
        self.diagnostics.push((name.into(), values));
        Ok(())
    }

    pub fn diagnostic(&self, name: &str) -> Option<&[f64]> {
        self.diagnostics
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_slice())
    }

    /// Smallest value reached by each coordinate over the trajectory.
    pub fn min_shares(&self) -> Vec<f64> {
        let mut mins = vec![f64::INFINITY; self.dim()];
        for s in &self.states {
            for (m, v) in mins.iter_mut().zip(s) {
                *m = m.min(*v);
            }
        }
        mins
    }
}

/// One classical RK4 step of size `h` (negative `h` integrates backward).
pub(crate) fn rk4_step<F>(field: &mut F, x: &[f64], h: f64) -> Result<Vec<f64>>
where
    F: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    let inc = rk4_increment(field, x, h)?;
    Ok(x.iter().zip(&inc).map(|(a, d)| a + d).collect())
}

/// The RK4 increment `x(t + h) − x(t)`, kept separate from `x` so that
/// differences of nearby increments do not lose digits to `x`'s magnitude.
pub(crate) fn rk4_increment<F>(field: &mut F, x: &[f64], h: f64) -> Result<Vec<f64>>
where
    F: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    let shift = |base: &[f64], k: &[f64], s: f64| -> Vec<f64> {
        base.iter().zip(k).map(|(b, k)| b + s * k).collect()
    };
    let k1 = field(x)?;
    let k2 = field(&shift(x, &k1, h / 2.0))?;
    let k3 = field(&shift(x, &k2, h / 2.0))?;
    let k4 = field(&shift(x, &k3, h))?;
    Ok((0..x.len())
        .map(|i| h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect())
}

/// An RK4 stage can leave the simplex when the step is too large for the
/// field; the error then names the step.
fn stage_error(step: usize, e: Error) -> Error {
    Error::StepFailed {
        step,
        reason: e.to_string(),
    }
}

/// Integrates `ẋ = field(x)` on the simplex with fixed-step RK4.
///
/// Shares that start positive must stay positive; a step that drives one to
/// zero or below fails with [`Error::PositivityLoss`] rather than clamping.
pub fn integrate<F>(mut field: F, x0: &[f64], config: &IntegratorConfig) -> Result<Trajectory>
where
    F: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    config.validate()?;
    let steps = config.steps();
    let positive: Vec<bool> = x0.iter().map(|&v| v > 0.0).collect();
    let mut x = x0.to_vec();
    let mut traj = Trajectory {
        times: vec![0.0],
        states: vec![x.clone()],
        diagnostics: Vec::new(),
    };
    for step in 1..=steps {
        let mut next = rk4_step(&mut field, &x, config.step).map_err(|e| stage_error(step, e))?;
        if next.iter().any(|v| !v.is_finite()) {
            return Err(Error::StepBlowup { step });
        }
        if config.renormalize {
            let total: f64 = next.iter().sum();
            next.iter_mut().for_each(|v| *v /= total);
        }
        if let Some(action) = (0..next.len()).find(|&a| positive[a] && next[a] <= 0.0) {
            return Err(Error::PositivityLoss { step, action });
        }
        x = next;
        if step % config.sample_stride == 0 || step == steps {
            traj.times.push(step as f64 * config.step);
            traj.states.push(x.clone());
        }
    }
    Ok(traj)
}

/// Integrates `ẏ = field(y)` on an unconstrained space: no positivity check
/// and no renormalization, whatever `config.renormalize` says.
pub fn integrate_unconstrained<F>(
    mut field: F,
    y0: &[f64],
    config: &IntegratorConfig,
) -> Result<Trajectory>
where
    F: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    config.validate()?;
    let steps = config.steps();
    let mut y = y0.to_vec();
    let mut traj = Trajectory {
        times: vec![0.0],
        states: vec![y.clone()],
        diagnostics: Vec::new(),
    };
    for step in 1..=steps {
        let next = rk4_step(&mut field, &y, config.step).map_err(|e| stage_error(step, e))?;
        if next.iter().any(|v| !v.is_finite()) {
            return Err(Error::StepBlowup { step });
        }
        y = next;
        if step % config.sample_stride == 0 || step == steps {
            traj.times.push(step as f64 * config.step);
            traj.states.push(y.clone());
        }
    }
    Ok(traj)
}
