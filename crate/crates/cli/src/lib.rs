//! The `makerforge` command line. [`run_cli`] parses, runs one command and
//! returns the exit code: 0 on success, 2 when a check fails, 1 on usage
//! or IO errors.

mod commands;
mod play;

use std::io::{BufRead, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;
use thiserror::Error;

use makerforge_core::budget::explicit_budget;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_FAILED: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "makerforge", version, about = "Maker/Breaker games on tree hypergraphs")]
pub struct Cli {
    /// Print results as one JSON document.
    #[arg(long, global = true)]
    pub json: bool,
    /// Count an edge in its own neighborhood.
    #[arg(long, global = true)]
    pub include_self: bool,
    /// Use all cores for tournaments and sweeps.
    #[arg(long, global = true)]
    pub parallel: bool,
    /// Vertex budget of explicit builders [default: $MAKERFORGE_BUDGET or 2^22].
    #[arg(long, global = true, value_name = "VERTICES")]
    pub budget: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ConstructionArg {
    Es,
    Theorem1,
    Weak,
    Strong,
}

/// Where a hypergraph comes from: a document, or a construction.
#[derive(Clone, Debug, Default, Args)]
pub struct Source {
    /// A `treehg/1` document.
    #[arg(long = "in", value_name = "PATH", conflicts_with = "construction")]
    pub input: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub construction: Option<ConstructionArg>,
    /// Edge size of the construction.
    #[arg(long, requires = "construction")]
    pub n: Option<u32>,
    /// Constant of the strong construction (`1/8` or `0.125`).
    #[arg(long)]
    pub c: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BreakerArg {
    Random,
    Potential,
    Optimal,
    /// Moves read from standard input, one vertex id per line.
    Human,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ExportFormat {
    Json,
    Dot,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BackendArg {
    Symbolic,
    Explicit,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Record,
    Strict,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a construction and write its document.
    Build {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Audit a hypergraph and check that Maker's walk wins on it.
    Verify {
        /// Document to verify (same as --in).
        #[arg(value_name = "PATH", conflicts_with = "input")]
        file: Option<PathBuf>,
        #[command(flatten)]
        source: Source,
        /// Random Breaker matches.
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
    /// Neighborhood sizes by starting level of the counterexample's edges.
    Census {
        #[arg(value_name = "PATH", conflicts_with = "input")]
        file: Option<PathBuf>,
        #[command(flatten)]
        source: Source,
    },
    /// Play one match with Maker's walk; locally, or against a server.
    Play {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_enum, default_value = "random")]
        breaker: BreakerArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Game service root, e.g. http://127.0.0.1:8080.
        #[arg(long, value_name = "URL")]
        server: Option<String>,
        /// Vertex limit of the exact solver.
        #[arg(long, default_value_t = makerforge_core::game::MINIMAX_BUDGET)]
        minimax_budget: usize,
    },
    /// Maker's walk against several Breakers.
    Tournament {
        #[arg(value_name = "PATH", conflicts_with = "input")]
        file: Option<PathBuf>,
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        /// Comma-separated: random, potential, optimal.
        #[arg(long, value_delimiter = ',', default_value = "random,potential")]
        adversaries: Vec<String>,
    },
    /// Exact game value by exhaustive search.
    Solve {
        #[arg(value_name = "PATH", conflicts_with = "input")]
        file: Option<PathBuf>,
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = makerforge_core::game::MINIMAX_BUDGET)]
        minimax_budget: usize,
    },
    /// Audit the strong pipeline for one (n, c), or sweep a grid.
    AuditStrong {
        /// Edge size, a power of two of at least 16.
        #[arg(long, required_unless_present = "sweep")]
        n: Option<u32>,
        /// The constant c, as `1/8` or `0.125`.
        #[arg(long, required_unless_present = "sweep")]
        c: Option<String>,
        #[arg(long, value_enum, default_value = "symbolic")]
        backend: BackendArg,
        #[arg(long, value_enum, default_value = "record")]
        mode: ModeArg,
        /// Sweep every pair of --ns and --cs instead.
        #[arg(long)]
        sweep: bool,
        #[arg(long, value_delimiter = ',', default_value = "64,256,1024,4096")]
        ns: Vec<u32>,
        #[arg(long, value_delimiter = ',', default_value = "1/16,1/8,1/4,3/8")]
        cs: Vec<String>,
    },
    /// A proper halving 2-coloring of a hypergraph.
    Color {
        /// A `treehg/1` document or a plain hypergraph
        /// `{"n":..,"vertex_count":..,"edges":[[..],..]}`.
        #[arg(long = "in", value_name = "PATH")]
        input: Option<PathBuf>,
        /// Random instance: edge size.
        #[arg(long, conflicts_with = "input")]
        n: Option<u32>,
        /// Random instance: maximum degree [default: the local lemma threshold].
        #[arg(long, conflicts_with = "input")]
        max_degree: Option<u32>,
        #[arg(long, conflicts_with = "input")]
        edges: Option<usize>,
        #[arg(long, conflicts_with = "input")]
        vertices: Option<u32>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = makerforge_core::coloring::DEFAULT_MAX_RESAMPLES)]
        max_resamples: u64,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Write a hypergraph as JSON or Graphviz DOT.
    Export {
        #[arg(value_name = "PATH", conflicts_with = "input")]
        file: Option<PathBuf>,
        #[command(flatten)]
        source: Source,
        #[arg(long, value_enum, default_value = "dot")]
        format: ExportFormat,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Run the game service under /v1.
    Serve {
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        /// Largest board a game may use.
        #[arg(long, default_value_t = makerforge_service::DEFAULT_MAX_VERTICES)]
        max_vertices: u64,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}

/// What a command produced: a verdict, the JSON result and its text form.
pub struct Outcome {
    pub ok: bool,
    pub json: Value,
    pub text: String,
}

impl Outcome {
    fn ok(json: Value, text: String) -> Self {
        Self { ok: true, json, text }
    }
}

/// Handles for the command's input and output.
pub struct Io<'a> {
    pub input: &'a mut dyn BufRead,
    pub out: &'a mut dyn Write,
    pub err: &'a mut dyn Write,
}

pub struct Context {
    pub json: bool,
    pub include_self: bool,
    pub parallel: bool,
    pub budget: u64,
}

pub fn run_cli<I, T>(args: I, io: &mut Io) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(io.err, "{text}") } else { write!(io.out, "{text}") };
            return code;
        }
    };
    let ctx = Context {
        json: cli.json,
        include_self: cli.include_self,
        parallel: cli.parallel,
        budget: cli.budget.filter(|&b| b > 0).unwrap_or_else(explicit_budget),
    };
    match commands::run(cli.command, &ctx, io) {
        Ok(outcome) => {
            let printed = if ctx.json {
                serde_json::to_string_pretty(&outcome.json).map(|s| writeln!(io.out, "{s}"))
            } else {
                Ok(write!(io.out, "{}", outcome.text))
            };
            if !matches!(printed, Ok(Ok(()))) {
                return EXIT_ERROR;
            }
            if outcome.ok {
                EXIT_OK
            } else {
                EXIT_FAILED
            }
        }
        Err(e) => {
            let _ = writeln!(io.err, "error: {e}");
            match e {
                CliError::Failed(_) => EXIT_FAILED,
                _ => EXIT_ERROR,
            }
        }
    }
}
