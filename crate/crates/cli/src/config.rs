//! Experiment configuration: the JSON schema and its resolution into library
//! objects.

use nested_dynamics::choice::{scores_for_state, ProfileSet, SolverConfig, TempProfile};
use nested_dynamics::dynamics::{ExtrinsicProfile, IntegratorConfig, RateProfile};
use nested_dynamics::games::{presets, sample_simplex, Game, PopulationState};
use nested_dynamics::hierarchy::{ActionSet, SimilarityTree};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub game: GameConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tree: Option<TreeConfig>,
    pub dynamics: DynamicsConfig,
    #[serde(default)]
    pub integrator: IntegratorBlock,
    #[serde(default)]
    pub init: InitConfig,
    #[serde(default)]
    pub outputs: OutputsConfig,
    #[serde(default)]
    pub verify: VerifyConfig,
}

/// Either a named preset or an explicit payoff model.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<GameKindName>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Row-major `n × n` matrix.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GameKindName {
    Matrix,
    Affine,
    /// Symmetric `A`: `F = Ax + b` with potential `x·Ax/2 + b·x`.
    Potential,
}

/// Interior levels of the tree, coarse to fine; the root and the singletons
/// are implied. Actions are given by index or by label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreeConfig {
    pub levels: Vec<Vec<Vec<ActionRef>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ActionRef {
    Index(usize),
    Label(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DynamicsKind {
    Rd,
    Nrd,
    NrdExtr,
    New,
    Nrl,
}

impl DynamicsKind {
    pub fn name(self) -> &'static str {
        match self {
            DynamicsKind::Rd => "rd",
            DynamicsKind::Nrd => "nrd",
            DynamicsKind::NrdExtr => "nrd_extr",
            DynamicsKind::New => "new",
            DynamicsKind::Nrl => "nrl",
        }
    }

    /// Dynamics that evolve scores rather than shares.
    pub fn is_learning(self) -> bool {
        matches!(self, DynamicsKind::New | DynamicsKind::Nrl)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicsConfig {
    pub kind: DynamicsKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rates: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub temps: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub etas: Option<Vec<f64>>,
    /// Tolerance and iteration cap of the argmax solver (nrl only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver_max_iter: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IntegratorBlock {
    pub step: f64,
    pub t_end: f64,
    pub sample_stride: usize,
    pub renormalize: bool,
}

impl Default for IntegratorBlock {
    fn default() -> Self {
        let d = IntegratorConfig::default();
        Self {
            step: d.step,
            t_end: d.t_end,
            sample_stride: d.sample_stride,
            renormalize: d.renormalize,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y0: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<InitPreset>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitPreset {
    Uniform,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Diagnostic {
    Potential,
    MeanPayoff,
    /// Nested KL divergence to `outputs.reference`.
    NestedKl,
    MinShare,
}

impl Diagnostic {
    pub fn name(self) -> &'static str {
        match self {
            Diagnostic::Potential => "potential",
            Diagnostic::MeanPayoff => "mean_payoff",
            Diagnostic::NestedKl => "nested_kl",
            Diagnostic::MinShare => "min_share",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputsConfig {
    pub trajectory: String,
    pub report: String,
    pub diagnostics: Vec<Diagnostic>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference: Option<Vec<f64>>,
}

impl Default for OutputsConfig {
    fn default() -> Self {
        Self {
            trajectory: "trajectory.csv".into(),
            report: "manifest.json".into(),
            diagnostics: Vec::new(),
            reference: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifyConfig {
    /// Interior GESS candidate; enables the attraction check.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gess_reference: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub terminal_tol: Option<f64>,
    /// States sampled by the pointwise checks.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
}

pub fn parse_config(text: &str) -> CliResult<ExperimentConfig> {
    serde_json::from_str(text).map_err(CliError::config)
}

/// Comma-separated list of finite numbers, as used by `--rates`, `--temps`
/// and `--point`.
pub fn parse_list(text: &str) -> CliResult<Vec<f64>> {
    let values = text
        .split(',')
        .map(|s| {
            let s = s.trim();
            s.parse::<f64>()
                .map_err(|e| CliError::Config(format!("bad number {s:?}: {e}")))
        })
        .collect::<CliResult<Vec<f64>>>()?;
    if let Some(v) = values.iter().find(|v| !v.is_finite()) {
        return Err(CliError::Config(format!("non-finite value {v}")));
    }
    Ok(values)
}

/// Resolves the tree block against a game's action count and labels.
pub fn resolve_tree(
    tree: Option<&TreeConfig>,
    n: usize,
    labels: Option<&[String]>,
) -> CliResult<SimilarityTree> {
    let actions = match labels {
        Some(l) => ActionSet::with_labels(l.to_vec()),
        None => ActionSet::new(n),
    }
    .map_err(CliError::config)?;
    let Some(tree) = tree else {
        return SimilarityTree::with_actions(actions, &[]).map_err(CliError::config);
    };
    let mut levels = Vec::with_capacity(tree.levels.len());
    for level in &tree.levels {
        let mut classes = Vec::with_capacity(level.len());
        for class in level {
            let members = class
                .iter()
                .map(|r| match r {
                    ActionRef::Index(i) => Ok(*i),
                    ActionRef::Label(s) => actions
                        .index_of(s)
                        .ok_or_else(|| CliError::Config(format!("unknown action label {s:?}"))),
                })
                .collect::<CliResult<Vec<usize>>>()?;
            classes.push(members);
        }
        levels.push(classes);
    }
    SimilarityTree::with_actions(actions, &levels).map_err(CliError::config)
}

fn matrix_size(len: usize) -> CliResult<usize> {
    let n = (len as f64).sqrt().round() as usize;
    if n == 0 || n * n != len {
        return Err(CliError::Config(format!(
            "matrix has {len} entries, not a square count"
        )));
    }
    Ok(n)
}

pub fn resolve_game(cfg: &GameConfig) -> CliResult<Game> {
    let game = if let Some(name) = &cfg.preset {
        if cfg.kind.is_some() || cfg.a.is_some() || cfg.b.is_some() || cfg.n.is_some() {
            return Err(CliError::Config(
                "a preset game takes no kind, n, a or b".into(),
            ));
        }
        match name.as_str() {
            "commuting" => presets::commuting(),
            "good_rps" => presets::good_rps(),
            other => return Err(CliError::Config(format!("unknown game preset {other:?}"))),
        }
    } else {
        let kind = cfg
            .kind
            .ok_or_else(|| CliError::Config("game needs a preset or a kind".into()))?;
        let a = cfg
            .a
            .clone()
            .ok_or_else(|| CliError::Config("game needs a matrix `a`".into()))?;
        let n = matrix_size(a.len())?;
        if let Some(declared) = cfg.n {
            if declared != n {
                return Err(CliError::Config(format!(
                    "n = {declared} but `a` is {n} × {n}"
                )));
            }
        }
        let game = match kind {
            GameKindName::Matrix => {
                if cfg.b.is_some() {
                    return Err(CliError::Config(
                        "matrix games take no offset `b`; use kind affine".into(),
                    ));
                }
                Game::matrix(n, a)
            }
            GameKindName::Affine => {
                let b = cfg.b.clone().unwrap_or_else(|| vec![0.0; n]);
                Game::affine(n, a, b)
            }
            GameKindName::Potential => Game::symmetric_potential(n, a, cfg.b.clone()),
        };
        game.map_err(CliError::config)?
    };
    match &cfg.labels {
        Some(l) => game.with_labels(l.clone()).map_err(CliError::config),
        None => Ok(game),
    }
}

/// Parameters of the configured dynamics after conversion.
#[derive(Debug, Clone)]
pub struct ResolvedDynamics {
    pub kind: DynamicsKind,
    /// All four parameterizations; for `nrd_extr` there are none.
    pub profiles: Option<ProfileSet>,
    pub etas: Option<ExtrinsicProfile>,
    pub solver: SolverConfig,
}

impl ResolvedDynamics {
    pub fn rates(&self) -> Option<&RateProfile> {
        self.profiles.as_ref().map(|p| &p.rates)
    }

    pub fn temps(&self) -> Option<&TempProfile> {
        self.profiles.as_ref().map(|p| &p.temps)
    }
}

pub fn resolve_dynamics(cfg: &DynamicsConfig, depth: usize) -> CliResult<ResolvedDynamics> {
    let given = [cfg.rates.is_some(), cfg.temps.is_some(), cfg.etas.is_some()];
    let count = given.iter().filter(|g| **g).count();
    let kind = cfg.kind;
    let profiles = match kind {
        DynamicsKind::Rd => {
            if count != 0 {
                return Err(CliError::Config("rd takes no rates, temps or etas".into()));
            }
            Some(ProfileSet::from_rates(RateProfile::replicator(depth)).map_err(CliError::config)?)
        }
        DynamicsKind::NrdExtr => {
            if count != 1 || cfg.etas.is_none() {
                return Err(CliError::Config(
                    "nrd_extr takes etas and nothing else".into(),
                ));
            }
            None
        }
        DynamicsKind::Nrd | DynamicsKind::New | DynamicsKind::Nrl => {
            if count != 1 || cfg.etas.is_some() {
                return Err(CliError::Config(format!(
                    "{} takes exactly one of rates or temps",
                    kind.name()
                )));
            }
            let set = if let Some(r) = &cfg.rates {
                ProfileSet::from_rates(RateProfile::new(r.clone()).map_err(CliError::config)?)
            } else {
                let t = cfg.temps.clone().unwrap_or_default();
                ProfileSet::from_temps(TempProfile::new(t).map_err(CliError::config)?)
            };
            Some(set.map_err(CliError::config)?)
        }
    };
    if let Some(p) = &profiles {
        if p.rates.depth() != depth {
            return Err(CliError::Config(format!(
                "profile has {} levels but the tree has depth {depth}",
                p.rates.depth()
            )));
        }
    }
    let etas = match &cfg.etas {
        Some(e) => {
            let e = ExtrinsicProfile::new(e.clone()).map_err(CliError::config)?;
            if e.depth() != depth {
                return Err(CliError::Config(format!(
                    "etas have {} levels but the tree has depth {depth}",
                    e.depth()
                )));
            }
            Some(e)
        }
        None => None,
    };
    let mut solver = SolverConfig::default();
    if let Some(t) = cfg.solver_tol {
        if !(t > 0.0 && t.is_finite()) {
            return Err(CliError::Config("solver_tol must be positive".into()));
        }
        solver.tol = t;
    }
    if let Some(m) = cfg.solver_max_iter {
        solver.max_iter = m;
    }
    Ok(ResolvedDynamics {
        kind,
        profiles,
        etas,
        solver,
    })
}

/// Initial condition: shares for the replicator family, scores for learning.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolvedInit {
    pub x0: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y0: Option<Vec<f64>>,
}

/// A config resolved into library objects, ready to run.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub config: ExperimentConfig,
    pub game: Game,
    pub tree: SimilarityTree,
    pub dynamics: ResolvedDynamics,
    pub integrator: IntegratorConfig,
    pub init: ResolvedInit,
    pub seed: Option<u64>,
}

/// `seed` from the command line overrides the config's.
pub fn resolve(config: &ExperimentConfig, seed: Option<u64>) -> CliResult<Experiment> {
    let game = resolve_game(&config.game)?;
    let n = game.n();
    let tree = resolve_tree(config.tree.as_ref(), n, game.labels())?;
    let dynamics = resolve_dynamics(&config.dynamics, tree.depth())?;
    let ib = config.integrator;
    let integrator = IntegratorConfig::new(ib.step, ib.t_end)
        .with_stride(ib.sample_stride)
        .with_renormalize(ib.renormalize);
    integrator.validate().map_err(CliError::config)?;
    let seed = seed.or(config.init.seed);
    let init = resolve_init(&config.init, &tree, &dynamics, seed)?;
    if let Some(r) = &config.outputs.reference {
        check_point(r, n, "outputs.reference")?;
    }
    if config.outputs.diagnostics.contains(&Diagnostic::NestedKl)
        && config.outputs.reference.is_none()
    {
        return Err(CliError::Config(
            "the nested_kl diagnostic needs outputs.reference".into(),
        ));
    }
    if config.outputs.diagnostics.contains(&Diagnostic::Potential) && !game.has_potential() {
        return Err(CliError::Config(
            "the potential diagnostic needs a potential game".into(),
        ));
    }
    if let Some(r) = &config.verify.gess_reference {
        check_point(r, n, "verify.gess_reference")?;
    }
    Ok(Experiment {
        config: config.clone(),
        game,
        tree,
        dynamics,
        integrator,
        init,
        seed,
    })
}

fn check_point(x: &[f64], n: usize, what: &str) -> CliResult<()> {
    if x.len() != n {
        return Err(CliError::Config(format!(
            "{what} has {} entries, expected {n}",
            x.len()
        )));
    }
    PopulationState::new(x.to_vec()).map_err(|e| CliError::Config(format!("{what}: {e}")))?;
    Ok(())
}

fn resolve_init(
    cfg: &InitConfig,
    tree: &SimilarityTree,
    dynamics: &ResolvedDynamics,
    seed: Option<u64>,
) -> CliResult<ResolvedInit> {
    let n = tree.n();
    let given = [cfg.x0.is_some(), cfg.y0.is_some(), cfg.preset.is_some()];
    if given.iter().filter(|g| **g).count() > 1 {
        return Err(CliError::Config(
            "init takes one of x0, y0 or preset".into(),
        ));
    }
    let learning = dynamics.kind.is_learning();
    if let Some(y0) = &cfg.y0 {
        if !learning {
            return Err(CliError::Config("y0 applies to new and nrl only".into()));
        }
        if y0.len() != n || y0.iter().any(|v| !v.is_finite()) {
            return Err(CliError::Config(format!("y0 needs {n} finite entries")));
        }
        let temps = dynamics
            .temps()
            .expect("learning dynamics carry temperatures");
        let x0 = nested_dynamics::choice::nlc(tree, temps, y0).map_err(CliError::config)?;
        return Ok(ResolvedInit {
            x0,
            y0: Some(y0.clone()),
        });
    }
    let x0 = match (&cfg.x0, cfg.preset) {
        (Some(x), _) => {
            check_point(x, n, "x0")?;
            x.clone()
        }
        (None, Some(InitPreset::Random)) => {
            let seed = seed.ok_or_else(|| CliError::Config("random init needs a seed".into()))?;
            sample_simplex(n, &mut ChaCha8Rng::seed_from_u64(seed))
        }
        (None, _) => vec![1.0 / n as f64; n],
    };
    let y0 = if learning {
        let temps = dynamics
            .temps()
            .expect("learning dynamics carry temperatures");
        Some(scores_for_state(tree, temps, &x0).map_err(CliError::config)?)
    } else {
        None
    };
    Ok(ResolvedInit { x0, y0 })
}
