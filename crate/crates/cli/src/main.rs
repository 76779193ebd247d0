use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nested_dynamics::games::DEFAULT_EQ_TOL;
use nested_dynamics_cli::config::resolve_game;
use nested_dynamics_cli::{
    cmd_classify, cmd_convert, cmd_simulate, cmd_verify, load_config, parse_list, resolve, verdict,
    CliError, CliResult, ProfileSource,
};
use serde::Serialize;

/// Nested replicator dynamics, nested logit choice and their checks.
#[derive(Debug, Parser)]
#[command(name = "nested-dynamics", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Source {
    /// Experiment config (JSON).
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Bundled config: commuting_rd, commuting_nrd, good_rps, red_bus, tree8.
    #[arg(long)]
    preset: Option<String>,
    /// Seed for random initial states and sampled checks; overrides the config.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate the configured dynamics; writes a CSV trajectory and a manifest.
    Simulate {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Run the invariant suite; exit 1 if any check fails.
    Verify {
        #[command(flatten)]
        source: Source,
        /// Also write the report into this directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print rates, temperatures and both weight vectors of one profile.
    Convert {
        #[arg(
            long,
            conflicts_with = "temps",
            required_unless_present = "temps",
            allow_hyphen_values = true
        )]
        rates: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        temps: Option<String>,
    },
    /// Classify a population state of the configured game.
    Classify {
        #[command(flatten)]
        source: Source,
        /// Comma-separated shares.
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[arg(long, default_value_t = DEFAULT_EQ_TOL)]
        tol: f64,
    },
}

fn print_json<T: Serialize>(value: &T) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value).map_err(CliError::runtime)?;
    let mut out = std::io::stdout().lock();
    writeln!(out, "{text}").map_err(CliError::runtime)
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Simulate { source, out } => {
            let cfg = load_config(source.config.as_deref(), source.preset.as_deref())?;
            let exp = resolve(&cfg, source.seed)?;
            let m = cmd_simulate(&exp, &out)?;
            log::info!("simulate finished in {:.3}s", m.wall_clock_secs);
            Ok(())
        }
        Command::Verify { source, out } => {
            let cfg = load_config(source.config.as_deref(), source.preset.as_deref())?;
            let exp = resolve(&cfg, source.seed)?;
            let m = cmd_verify(&exp, out.as_deref())?;
            print_json(&m.checks)?;
            verdict(&m)
        }
        Command::Convert { rates, temps } => {
            let source = match (rates, temps) {
                (Some(r), None) => ProfileSource::Rates(parse_list(&r)?),
                (None, Some(t)) => ProfileSource::Temps(parse_list(&t)?),
                _ => {
                    return Err(CliError::Config(
                        "give exactly one of --rates or --temps".into(),
                    ))
                }
            };
            print_json(&cmd_convert(source)?)
        }
        Command::Classify { source, point, tol } => {
            let cfg = load_config(source.config.as_deref(), source.preset.as_deref())?;
            let game = resolve_game(&cfg.game)?;
            print_json(&cmd_classify(&game, parse_list(&point)?, tol)?)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("NESTED_DYNAMICS_LOG", "warn"))
        .init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
