//! Config-driven experiment runner for the `nested_dynamics` library.
//!
//! Four commands: `simulate` writes a CSV trajectory and a JSON manifest,
//! `verify` runs the invariant suite, `convert` maps one nesting profile to
//! all four parameterizations, and `classify` tests a point for equilibrium.

pub mod config;
pub mod error;
pub mod simulate;
pub mod verify;

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use nested_dynamics::choice::{ProfileSet, TempProfile};
use nested_dynamics::dynamics::RateProfile;
use nested_dynamics::games::{
    classify_point, dominated_pairs, Domination, EquilibriumReport, Game, PopulationState,
};
use serde::Serialize;

pub use config::{parse_config, parse_list, resolve, Experiment, ExperimentConfig};
pub use error::{CliError, CliResult};
use simulate::RunFailure;
use verify::CheckResult;

/// Bundled experiment configs, by name.
pub const PRESETS: [(&str, &str); 5] = [
    ("commuting_rd", include_str!("../presets/commuting_rd.json")),
    (
        "commuting_nrd",
        include_str!("../presets/commuting_nrd.json"),
    ),
    ("good_rps", include_str!("../presets/good_rps.json")),
    ("red_bus", include_str!("../presets/red_bus.json")),
    ("tree8", include_str!("../presets/tree8.json")),
];

pub fn preset(name: &str) -> CliResult<&'static str> {
    PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| *text)
        .ok_or_else(|| {
            let names: Vec<&str> = PRESETS.iter().map(|(n, _)| *n).collect();
            CliError::Config(format!(
                "unknown preset {name:?}; bundled: {}",
                names.join(", ")
            ))
        })
}

/// Loads a config from a path or a bundled preset name.
pub fn load_config(path: Option<&Path>, preset_name: Option<&str>) -> CliResult<ExperimentConfig> {
    match (path, preset_name) {
        (Some(p), None) => {
            let text = fs::read_to_string(p)
                .map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
            parse_config(&text)
        }
        (None, Some(name)) => parse_config(preset(name)?),
        _ => Err(CliError::Config(
            "give exactly one of --config or --preset".into(),
        )),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ToolInfo {
    pub name: &'static str,
    pub version: &'static str,
}

const TOOL: ToolInfo = ToolInfo {
    name: env!("CARGO_PKG_NAME"),
    version: env!("CARGO_PKG_VERSION"),
};

/// Everything needed to reproduce a run. Only `wall_clock_secs` varies
/// between identical invocations.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: ToolInfo,
    pub command: &'static str,
    pub config: ExperimentConfig,
    pub dynamics: &'static str,
    pub tree: Vec<Vec<Vec<usize>>>,
    /// `λ`, `τ`, `w`, `c` and the time scale; absent for the extrinsic variant.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub profiles: Option<ProfileSet>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub etas: Option<Vec<f64>>,
    pub integrator: nested_dynamics::dynamics::IntegratorConfig,
    pub init: config::ResolvedInit,
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trajectory: Option<String>,
    pub samples: usize,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<CheckResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<RunFailure>,
    pub wall_clock_secs: f64,
}

fn manifest(exp: &Experiment, command: &'static str) -> RunManifest {
    RunManifest {
        tool: TOOL,
        command,
        config: exp.config.clone(),
        dynamics: exp.config.dynamics.kind.name(),
        tree: exp.tree.partitions(),
        profiles: exp.dynamics.profiles.clone(),
        etas: exp
            .dynamics
            .etas
            .as_ref()
            .map(|e| e.coefficients().to_vec()),
        integrator: exp.integrator,
        init: exp.init.clone(),
        seed: exp.seed,
        trajectory: None,
        samples: 0,
        checks: Vec::new(),
        failure: None,
        wall_clock_secs: 0.0,
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value).map_err(CliError::runtime)?;
    fs::write(path, text + "\n").map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))
}

fn out_path(dir: &Path, name: &str) -> CliResult<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| CliError::Runtime(format!("{}: {e}", dir.display())))?;
    Ok(dir.join(name))
}

/// Runs the experiment, writes the trajectory CSV and the manifest into
/// `out_dir`. A run that fails midway still writes its manifest.
pub fn cmd_simulate(exp: &Experiment, out_dir: &Path) -> CliResult<RunManifest> {
    let start = Instant::now();
    let mut m = manifest(exp, "simulate");
    let report_path = out_path(out_dir, &exp.config.outputs.report)?;
    let result = simulate::run(exp);
    let mut output = match result {
        Ok(o) => o,
        Err(e) => {
            log::error!("run failed: {e}");
            m.failure = Some(RunFailure::from_error(&e));
            m.wall_clock_secs = start.elapsed().as_secs_f64();
            write_json(&report_path, &m)?;
            return Err(CliError::runtime(e));
        }
    };
    simulate::add_diagnostics(exp, &mut output)?;
    let csv_path = out_path(out_dir, &exp.config.outputs.trajectory)?;
    let file = fs::File::create(&csv_path)
        .map_err(|e| CliError::Runtime(format!("{}: {e}", csv_path.display())))?;
    simulate::write_csv(&output, std::io::BufWriter::new(file))?;
    log::info!(
        "wrote {} samples to {}",
        output.path.len(),
        csv_path.display()
    );
    m.trajectory = Some(exp.config.outputs.trajectory.clone());
    m.samples = output.path.len();
    m.wall_clock_secs = start.elapsed().as_secs_f64();
    write_json(&report_path, &m)?;
    Ok(m)
}

/// Runs the experiment and the invariant suite; the manifest lists every
/// check. Fails with exit code 1 if any check fails.
pub fn cmd_verify(exp: &Experiment, out_dir: Option<&Path>) -> CliResult<RunManifest> {
    let start = Instant::now();
    let mut m = manifest(exp, "verify");
    let output = match simulate::run(exp) {
        Ok(o) => o,
        Err(e) => {
            m.failure = Some(RunFailure::from_error(&e));
            if let Some(dir) = out_dir {
                write_json(&out_path(dir, &exp.config.outputs.report)?, &m)?;
            }
            return Err(CliError::runtime(e));
        }
    };
    m.samples = output.path.len();
    m.checks = verify::run_suite(exp, &output);
    for c in &m.checks {
        log::info!(
            "{} {}: {:e} (tol {:e}) {}",
            if c.passed { "pass" } else { "FAIL" },
            c.name,
            c.value,
            c.tol,
            c.detail
        );
    }
    m.wall_clock_secs = start.elapsed().as_secs_f64();
    if let Some(dir) = out_dir {
        write_json(&out_path(dir, &exp.config.outputs.report)?, &m)?;
    }
    Ok(m)
}

/// Names of the failed checks, if any, as an error.
pub fn verdict(m: &RunManifest) -> CliResult<()> {
    let names: Vec<String> = m
        .checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| c.name.clone())
        .collect();
    if names.is_empty() {
        Ok(())
    } else {
        Err(CliError::ChecksFailed {
            failed: names.len(),
            names,
        })
    }
}

/// Source profile for `convert`.
#[derive(Debug, Clone, PartialEq)]
pub enum ProfileSource {
    Rates(Vec<f64>),
    Temps(Vec<f64>),
}

/// All four parameterizations of a nesting profile, after an internal
/// round-trip check.
pub fn cmd_convert(source: ProfileSource) -> CliResult<ProfileSet> {
    match source {
        ProfileSource::Rates(r) => {
            ProfileSet::from_rates(RateProfile::new(r).map_err(CliError::config)?)
        }
        ProfileSource::Temps(t) => {
            ProfileSet::from_temps(TempProfile::new(t).map_err(CliError::config)?)
        }
    }
    .map_err(CliError::config)
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassifyReport {
    pub report: EquilibriumReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    /// Strictly dominated pairs; absent for games without an affine form.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dominated: Option<Vec<Domination>>,
}

pub fn cmd_classify(game: &Game, point: Vec<f64>, tol: f64) -> CliResult<ClassifyReport> {
    if point.len() != game.n() {
        return Err(CliError::Config(format!(
            "point has {} entries, expected {}",
            point.len(),
            game.n()
        )));
    }
    let state = PopulationState::new(point).map_err(CliError::config)?;
    let report = classify_point(game, &state, tol).map_err(CliError::runtime)?;
    Ok(ClassifyReport {
        report,
        labels: game.labels().map(|l| l.to_vec()),
        dominated: dominated_pairs(game).ok(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_resolves() {
        for (name, text) in PRESETS {
            let cfg = parse_config(text).unwrap_or_else(|e| panic!("{name}: {e}"));
            resolve(&cfg, None).unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }

    #[test]
    fn convert_worked_example() {
        let p = cmd_convert(ProfileSource::Rates(vec![0.25, 0.75])).unwrap();
        assert_eq!(p.temps.temps(), &[4.0, 1.0]);
        assert_eq!(p.nkl_weights.weights(), &[3.0, 1.0]);
        assert_eq!(p.entropy_weights.weights(), &[0.0, 3.0, 1.0]);
    }

    #[test]
    fn convert_rejects_zero_root_rate() {
        assert_eq!(
            cmd_convert(ProfileSource::Rates(vec![0.0, 1.0]))
                .unwrap_err()
                .exit_code(),
            2
        );
    }

    #[test]
    fn single_temperature_is_plain_replicator() {
        let p = cmd_convert(ProfileSource::Temps(vec![1.0])).unwrap();
        assert_eq!(p.rates.rates(), &[1.0]);
    }

    #[test]
    fn classify_commuting_car() {
        let g = nested_dynamics::games::presets::commuting();
        let r = cmd_classify(&g, vec![0.0, 0.0, 1.0], 1e-9).unwrap();
        assert!(r.report.is_nash && r.report.is_strict);
        let d = r.dominated.unwrap();
        assert_eq!((d[0].dominated, d[0].dominator, d[0].margin), (0, 2, 1.0));
    }

    #[test]
    fn classify_zero_game_uniform() {
        let g = nested_dynamics::games::presets::zero(3);
        let r = cmd_classify(&g, vec![1.0 / 3.0; 3], 1e-9).unwrap();
        assert!(r.report.is_restricted_eq && r.report.is_nash);
    }

    #[test]
    fn classify_rejects_bad_point() {
        let g = nested_dynamics::games::presets::commuting();
        assert_eq!(
            cmd_classify(&g, vec![0.5, 0.6, 0.0], 1e-9)
                .unwrap_err()
                .exit_code(),
            2
        );
        assert_eq!(
            cmd_classify(&g, vec![1.0], 1e-9).unwrap_err().exit_code(),
            2
        );
    }
}
