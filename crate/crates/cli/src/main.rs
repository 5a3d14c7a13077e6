//! `domlab`: iterated elimination of strictly dominated strategies.
//!
//! Finite games load from a JSON payoff table; infinite games come from
//! the built-in catalog, each with an exact closed-form dominance oracle.
//! Every subcommand prints one JSON document when stdout is not a
//! terminal, so pipelines always see machine-readable output.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod cmd;
mod render;
mod source;

use render::Sink;

#[derive(Parser)]
#[command(
    name = "domlab",
    version,
    about = "Iterated elimination of strictly dominated strategies",
    long_about = "Runs, validates, and analyzes elimination sequences over finite payoff \
                  tables and the built-in infinite games. Dominator scope per step is \
                  `nested` (current reduction), `universal` (full space), or `gkz` \
                  (survivors of the step). Caps for enumeration come from the \
                  DOMLAB_CAPS environment variable (key=value, comma separated)."
)]
struct Cli {
    /// Force JSON output even on a terminal.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an elimination sequence and record its trace.
    Run(RunArgs),
    /// Re-check a recorded trace, stage by stage, against a game.
    Validate(ValidateArgs),
    /// Boundedness and closure diagnostics at a reduction.
    Analyze(AnalyzeArgs),
    /// Enumerate every elimination sequence of a finite game.
    Enumerate(EnumerateArgs),
    /// Check the structural assertions on finite games.
    CheckTheorems(CheckTheoremsArgs),
    /// List or verify the built-in infinite games.
    Catalog(CatalogArgs),
    /// Expand one space-scoped step into a chain of survivor-scoped steps.
    InterpolateGkz(InterpolateArgs),
}

#[derive(Args)]
struct GameSource {
    /// Finite game file (JSON payoff table).
    #[arg(long, value_name = "PATH", group = "src")]
    game: Option<PathBuf>,
    /// Built-in entry id (see `catalog list`).
    #[arg(long, value_name = "ID", group = "src")]
    catalog: Option<String>,
    /// Use the finite truncation of the catalog entry at this size.
    #[arg(long, value_name = "N", requires = "catalog")]
    trunc: Option<usize>,
}

impl GameSource {
    fn load(&self) -> domlab_core::error::Result<domlab_core::game::Game> {
        source::load_game(&self.game, &self.catalog, self.trunc)
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    source: GameSource,
    /// Dominator scope: nested, universal, or gkz.
    #[arg(long, default_value = "nested")]
    mode: String,
    /// Stage policy: remove-all, remove-one, random, or scripted.
    #[arg(long, default_value = "remove-all")]
    policy: String,
    /// Seed for the random policy.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Stage script file, for --policy scripted.
    #[arg(long, value_name = "PATH")]
    script: Option<PathBuf>,
    /// Successor steps allowed per block before a limit is attempted.
    #[arg(long, value_name = "N")]
    max_steps: Option<u64>,
    /// Limit stages allowed in total.
    #[arg(long, value_name = "N")]
    max_limits: Option<u64>,
    /// Trailing stages inspected for a chain pattern.
    #[arg(long, value_name = "N")]
    window: Option<usize>,
    /// Accept window-only limit certificates (default: inductive only).
    #[arg(long)]
    allow_window_certificates: bool,
    /// Write the JSON-lines trace here instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    #[command(flatten)]
    source: GameSource,
    /// Trace file (JSON lines, as written by `run`).
    #[arg(long, value_name = "PATH")]
    trace: PathBuf,
    /// Accept window-only limit certificates.
    #[arg(long)]
    lenient: bool,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    source: GameSource,
    /// Reduction part for one player; repeat once per player, in order.
    /// Defaults to the full strategy space.
    #[arg(long = "reduction", value_name = "SET")]
    reduction: Vec<String>,
    /// Diagnostic: complete, local, cover, closure-star, forgetful, or all.
    #[arg(long, default_value = "all")]
    check: String,
    /// Target reduction part for closure-star; repeat once per player.
    #[arg(long = "target", value_name = "SET")]
    target: Vec<String>,
    /// Removed set for the forgetful check; repeat once per player.
    #[arg(long = "removed", value_name = "SET")]
    removed: Vec<String>,
}

#[derive(Args)]
struct EnumerateArgs {
    #[command(flatten)]
    source: GameSource,
    /// Dominator scope: nested, universal, or gkz.
    #[arg(long, default_value = "nested")]
    mode: String,
    /// Write the full sequence-class document here.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CheckTheoremsArgs {
    #[command(flatten)]
    source: GameSource,
    /// Check this many random small games instead of a single game.
    #[arg(long, value_name = "N", conflicts_with_all = ["game", "catalog"])]
    seeds: Option<u64>,
    /// First seed of the random-game range.
    #[arg(long, default_value_t = 0)]
    seed_start: u64,
}

#[derive(Args)]
struct CatalogArgs {
    #[command(subcommand)]
    cmd: CatalogCmd,
}

#[derive(Subcommand)]
enum CatalogCmd {
    /// List the built-in entries.
    List,
    /// Replay the expected fixtures of an entry, or of `all`.
    Verify {
        /// Entry id, or `all`.
        id: String,
    },
}

#[derive(Args)]
struct InterpolateArgs {
    #[command(flatten)]
    source: GameSource,
    /// Source reduction part; repeat once per player. Defaults to the
    /// full strategy space.
    #[arg(long = "from", value_name = "SET")]
    from: Vec<String>,
    /// Target reduction part; repeat once per player.
    #[arg(long = "to", value_name = "SET", required = true)]
    to: Vec<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let sink = Sink::new(cli.json);
    let result = match &cli.command {
        Command::Run(args) => cmd::run(args, &sink),
        Command::Validate(args) => cmd::validate(args, &sink),
        Command::Analyze(args) => cmd::analyze(args, &sink),
        Command::Enumerate(args) => cmd::enumerate(args, &sink),
        Command::CheckTheorems(args) => cmd::check_theorems(args, &sink),
        Command::Catalog(args) => cmd::catalog(args, &sink),
        Command::InterpolateGkz(args) => cmd::interpolate_gkz(args, &sink),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
