//! Running a resolved experiment and writing its trajectory.

use std::io::Write;

use nested_dynamics::analysis::DivergenceSpec;
use nested_dynamics::choice::{new_integrate, nrl_integrate};
use nested_dynamics::dynamics::{integrate, nrd_extr_field, nrd_field, rd_field, Trajectory};
use nested_dynamics::Error;
use serde::Serialize;

use crate::config::{Diagnostic, DynamicsKind, Experiment};
use crate::error::{CliError, CliResult};

/// A finished run: shares over time, plus scores for the learning dynamics.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub path: Trajectory,
    pub scores: Option<Vec<Vec<f64>>>,
}

/// Where and why a run stopped early.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunFailure {
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step: Option<usize>,
}

impl RunFailure {
    pub fn from_error(e: &Error) -> Self {
        let step = match e {
            Error::PositivityLoss { step, .. }
            | Error::StepBlowup { step }
            | Error::StepFailed { step, .. } => Some(*step),
            _ => None,
        };
        Self {
            message: e.to_string(),
            step,
        }
    }
}

/// Integrates the configured dynamics from the resolved initial condition.
pub fn run(exp: &Experiment) -> Result<RunOutput, Error> {
    let (game, tree, cfg) = (&exp.game, &exp.tree, &exp.integrator);
    let x0 = &exp.init.x0;
    let d = &exp.dynamics;
    let states = |path| RunOutput { path, scores: None };
    match d.kind {
        DynamicsKind::Rd => integrate(|x| rd_field(game, x), x0, cfg).map(states),
        DynamicsKind::Nrd => {
            let rates = d.rates().expect("nrd carries rates");
            integrate(|x| nrd_field(game, tree, rates, x), x0, cfg).map(states)
        }
        DynamicsKind::NrdExtr => {
            let etas = d.etas.as_ref().expect("nrd_extr carries etas");
            integrate(|x| nrd_extr_field(game, tree, etas, x), x0, cfg).map(states)
        }
        DynamicsKind::New | DynamicsKind::Nrl => {
            let y0 = exp.init.y0.as_ref().expect("learning dynamics carry y0");
            let profiles = d
                .profiles
                .as_ref()
                .expect("learning dynamics carry profiles");
            let out = if d.kind == DynamicsKind::New {
                new_integrate(game, tree, &profiles.temps, y0, cfg)?
            } else {
                nrl_integrate(game, tree, &profiles.entropy_weights, y0, cfg, &d.solver)?
            };
            Ok(RunOutput {
                path: out.path,
                scores: Some(out.scores),
            })
        }
    }
}

/// Evaluates the requested diagnostics along the stored states.
pub fn add_diagnostics(exp: &Experiment, out: &mut RunOutput) -> CliResult<()> {
    for diag in &exp.config.outputs.diagnostics {
        let game = &exp.game;
        let result = match diag {
            Diagnostic::Potential => out.path.add_diagnostic(diag.name(), |x| {
                game.potential_value(x)
                    .ok_or(Error::UnsupportedKind("potential"))
            }),
            Diagnostic::MeanPayoff => out
                .path
                .add_diagnostic(diag.name(), |x| game.mean_payoff(x)),
            Diagnostic::MinShare => out.path.add_diagnostic(diag.name(), |x| {
                Ok(x.iter().copied().fold(f64::INFINITY, f64::min))
            }),
            Diagnostic::NestedKl => {
                let reference = exp
                    .config
                    .outputs
                    .reference
                    .clone()
                    .expect("checked at resolution");
                let weights = match exp.dynamics.rates() {
                    Some(r) => nested_dynamics::choice::NklWeights::from_rates(r),
                    None => {
                        return Err(CliError::Config(
                            "nested_kl needs a rate-based dynamics".into(),
                        ));
                    }
                };
                let spec =
                    DivergenceSpec::new(&exp.tree, weights, reference).map_err(CliError::config)?;
                out.path.add_diagnostic(diag.name(), |x| spec.divergence(x))
            }
        };
        result.map_err(CliError::runtime)?;
    }
    Ok(())
}

/// Writes `t, x_0.., [y_0..], [diagnostics..]` with 17 significant digits.
pub fn write_csv<W: Write>(out: &RunOutput, sink: W) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(sink);
    let n = out.path.dim();
    let mut header = vec!["t".to_string()];
    header.extend((0..n).map(|a| format!("x_{a}")));
    if out.scores.is_some() {
        header.extend((0..n).map(|a| format!("y_{a}")));
    }
    header.extend(out.path.diagnostics.iter().map(|(name, _)| name.clone()));
    w.write_record(&header).map_err(CliError::runtime)?;
    let fmt = |v: f64| format!("{v:.16e}");
    for (k, (t, x)) in out.path.times.iter().zip(&out.path.states).enumerate() {
        let mut row = vec![fmt(*t)];
        row.extend(x.iter().map(|v| fmt(*v)));
        if let Some(scores) = &out.scores {
            row.extend(scores[k].iter().map(|v| fmt(*v)));
        }
        row.extend(out.path.diagnostics.iter().map(|(_, vals)| fmt(vals[k])));
        w.write_record(&row).map_err(CliError::runtime)?;
    }
    w.flush().map_err(CliError::runtime)?;
    Ok(())
}
