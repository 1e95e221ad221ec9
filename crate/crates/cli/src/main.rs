//! `robustqv` command-line front end.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod bipp_cmd;
mod check_cmd;
mod error;
mod eval;
mod grid;
mod ipsp_cmd;
mod manifest;
mod mission_cmd;
mod output;
mod svg;

use error::{CmdResult, Classify};
use manifest::RunManifest;

#[derive(Parser, Debug)]
#[command(name = "robustqv", version, about = "Robust Bayesian verification of interval CTMCs")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Seed for every random choice the command makes.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long, global = true, value_enum, default_value_t = SemanticsArg::Strict)]
    pub reward_semantics: SemanticsArg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SemanticsArg {
    Strict,
    UntilAbsorption,
}

impl From<SemanticsArg> for robustqv::checker::RewardSemantics {
    fn from(s: SemanticsArg) -> Self {
        match s {
            SemanticsArg::Strict => Self::Strict,
            SemanticsArg::UntilAbsorption => Self::UntilAbsorption,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Posterior bounds of a singular event rate from a partial prior.
    Bipp(bipp_cmd::BippArgs),
    /// Posterior bounds of a regular event rate on a simulated event stream.
    Ipsp(ipsp_cmd::IpspArgs),
    /// Check a property on a model file.
    Check(check_cmd::CheckArgs),
    /// Inspection and cleaning mission.
    #[command(subcommand)]
    Mission(mission_cmd::MissionCommand),
    /// Regenerate the estimator evaluation curves.
    #[command(subcommand)]
    Eval(eval::EvalCommand),
    /// Re-run the command recorded in a manifest.
    Replay(ReplayArgs),
}

#[derive(Args, Debug)]
struct ReplayArgs {
    /// Manifest written by an earlier run.
    #[arg(long)]
    manifest: PathBuf,
    /// Write the replayed outputs here instead of the recorded directory.
    #[arg(long)]
    into: Option<PathBuf>,
}

impl Command {
    fn config(&self) -> Option<PathBuf> {
        match self {
            Command::Bipp(a) => Some(a.prior.clone()),
            Command::Ipsp(a) => Some(a.prior.clone()),
            Command::Check(a) => Some(a.model.clone()),
            Command::Mission(m) => m.config(),
            Command::Eval(_) => None,
            Command::Replay(a) => Some(a.manifest.clone()),
        }
    }
}

fn run(cli: Cli) -> CmdResult {
    let g = &cli.global;
    match cli.command {
        Command::Bipp(a) => bipp_cmd::run(g, a),
        Command::Ipsp(a) => ipsp_cmd::run(g, a),
        Command::Check(a) => check_cmd::run(g, a),
        Command::Mission(m) => mission_cmd::run(g, m),
        Command::Eval(e) => eval::run(g, e),
        Command::Replay(a) => replay(a),
    }
}

/// Recorded arguments with any `--out` replaced by `out`.
fn redirect(command: &[String], out: &Path) -> Vec<String> {
    let mut args = Vec::with_capacity(command.len() + 2);
    let mut it = command.iter();
    while let Some(a) = it.next() {
        if a == "--out" {
            it.next();
        } else if !a.starts_with("--out=") {
            args.push(a.clone());
        }
    }
    args.extend(["--out".to_string(), out.display().to_string()]);
    args
}

fn replay(a: ReplayArgs) -> CmdResult {
    let recorded = RunManifest::load(&a.manifest).usage(format!("cannot read manifest {}", a.manifest.display()))?;
    let args = match &a.into {
        Some(out) => redirect(&recorded.command, out),
        None => recorded.command.clone(),
    };
    let cli = Cli::try_parse_from(std::iter::once("robustqv".to_string()).chain(args.iter().cloned()))
        .usage("recorded command no longer parses")?;
    if matches!(cli.command, Command::Replay(_)) {
        return Err(error::usage_error("a replay manifest cannot be replayed"));
    }
    let manifest = RunManifest::start(args, cli.command.config(), cli.global.seed, &cli.global.out)?;
    let result = run(cli);
    manifest.finish(status(&result))?;
    result
}

fn status(result: &CmdResult) -> u8 {
    match result {
        Ok(()) => 0,
        Err(error::Failure::Usage(_)) => 2,
        Err(error::Failure::Domain(_)) => 3,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Command::Replay(a) = cli.command {
        // The replayed run writes its own manifest.
        return match replay(a) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e}");
                e.exit_code()
            }
        };
    }
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let manifest = match RunManifest::start(argv, cli.command.config(), cli.global.seed, &cli.global.out) {
        Ok(m) => m,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    let result = run(cli);
    let code = match &result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    if let Err(e) = manifest.finish(status(&result)) {
        eprintln!("error: {e}");
    }
    code
}
