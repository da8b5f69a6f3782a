//! The `tipsy` command line: analyze scenarios, reproduce the published tables,
//! check lumpings against the joint chain, simulate, and evaluate closed forms.
//!
//! Exit status is 0 on success, 1 when a table or lumping check falls outside
//! tolerance, and 2 for configuration errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

mod commands;
pub mod output;
mod scenario;

pub use output::{Cell, Format, Report};

pub const EXIT_OK: i32 = 0;
pub const EXIT_TOLERANCE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("--{field}: {message}")]
    Config {
        field: &'static str,
        message: String,
    },
    #[error(transparent)]
    Model(#[from] tipsy_core::Error),
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("output: {0}")]
    Output(String),
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Output(e.to_string())
    }
}

pub(crate) fn config(field: &'static str, message: impl Into<String>) -> CliError {
    CliError::Config {
        field,
        message: message.into(),
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "tipsy",
    version,
    about = "Markov-chain analysis of the tipsy cop and tipsy robber game"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Survival probabilities, expected game length and absorption split per start state.
    Analyze(AnalyzeArgs),
    /// Recompute a published table and diff it against the embedded values.
    ReproduceTable(ReproduceArgs),
    /// Build the joint (cop, robber) chain, lump it, and compare with the hand-built chain.
    Verify(VerifyArgs),
    /// Monte-Carlo estimates of survival and game length.
    Simulate(SimulateArgs),
    /// Gambler's-ruin formulas for the game on a regular tree.
    ClosedForm(ClosedFormArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyKind {
    Cycle,
    Petersen,
    Friendship,
    /// The 7×7 torus.
    Torus7,
    /// Regular tree with a call-off distance.
    Tree,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TieBreakArg {
    Geodesic,
    Uniform,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoundaryArg {
    /// The maximum-distance row uses its own distance.
    Own,
    /// The maximum-distance row uses the tipsiness one step closer.
    Previous,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Significant digits for numbers (table default 4; csv and json default to exact).
    #[arg(long)]
    pub digits: Option<usize>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct SpinnerArgs {
    /// Sober-cop probability.
    #[arg(long)]
    pub c: Option<f64>,
    /// Sober-robber probability.
    #[arg(long)]
    pub r: Option<f64>,
    /// Tipsy probability, split evenly between the players.
    #[arg(long, conflicts_with_all = ["tc", "tr"])]
    pub t: Option<f64>,
    /// Tipsy-cop probability.
    #[arg(long, requires = "tr")]
    pub tc: Option<f64>,
    /// Tipsy-robber probability.
    #[arg(long, requires = "tc")]
    pub tr: Option<f64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct GraphArgs {
    #[arg(long, value_enum)]
    pub family: Option<FamilyKind>,
    /// Cycle length, or number of friendship triangles.
    #[arg(long)]
    pub n: Option<usize>,
    /// Tree degree.
    #[arg(long)]
    pub delta: Option<usize>,
    /// Call-off distance on trees.
    #[arg(long = "max-dist")]
    pub max_dist: Option<usize>,
    /// Edge list: a `V E` line, then one `u v` pair per line; `#` starts a comment.
    #[arg(long = "graph-file", conflicts_with = "family")]
    pub graph_file: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[command(flatten)]
    pub spinner: SpinnerArgs,
    /// Time schedule (`hyper:a,b`, `exp2:a,b`, `const:t`) or distance schedule (`linear`, `exp12`, `expb:base`).
    #[arg(long)]
    pub schedule: Option<String>,
    /// Robber's share of the sober mass under a schedule.
    #[arg(long = "robber-share")]
    pub robber_share: Option<f64>,
    /// Rounds M at which to report the survival probability G_M.
    #[arg(long, value_delimiter = ',')]
    pub rounds: Vec<u32>,
    /// Series terms for time-varying expectations.
    #[arg(long = "max-terms", default_value_t = 1000)]
    pub max_terms: u32,
    /// Maximum-distance row convention for distance schedules on even cycles.
    #[arg(long, value_enum, default_value_t = BoundaryArg::Own)]
    pub boundary: BoundaryArg,
    /// Sober-move tie-breaking for graph files.
    #[arg(long = "tie-break", value_enum, default_value_t = TieBreakArg::Geodesic)]
    pub tie_break: TieBreakArg,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ReproduceArgs {
    /// Table id, or `all`.
    pub id: String,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub family: FamilyKind,
    #[arg(long)]
    pub n: Option<usize>,
    #[command(flatten)]
    pub spinner: SpinnerArgs,
    #[arg(long = "tie-break", value_enum, default_value_t = TieBreakArg::Geodesic)]
    pub tie_break: TieBreakArg,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[command(flatten)]
    pub spinner: SpinnerArgs,
    /// Starting distance, cop on vertex 0.
    #[arg(long, conflicts_with_all = ["cop", "robber"])]
    pub distance: Option<u32>,
    #[arg(long, requires = "robber")]
    pub cop: Option<usize>,
    #[arg(long, requires = "cop")]
    pub robber: Option<usize>,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Rounds M at which to report G_M.
    #[arg(long, value_delimiter = ',')]
    pub rounds: Vec<u32>,
    /// Trials still running after this many rounds are censored.
    #[arg(long = "max-rounds", default_value_t = 10_000)]
    pub max_rounds: u32,
    #[arg(long = "tie-break", value_enum, default_value_t = TieBreakArg::Geodesic)]
    pub tie_break: TieBreakArg,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ClosedFormArgs {
    #[arg(long)]
    pub delta: Option<usize>,
    #[arg(long = "max-dist")]
    pub max_dist: usize,
    #[command(flatten)]
    pub spinner: SpinnerArgs,
    /// Up-step probability, instead of a spinner and degree.
    #[arg(long, conflicts_with_all = ["c", "r", "t", "tc", "tr", "delta"])]
    pub p: Option<f64>,
    /// Start distances (default all of 1..max-dist-1).
    #[arg(long, value_delimiter = ',')]
    pub d: Vec<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// What a command produced: the report and whether every check held.
pub struct Outcome {
    pub report: Report,
    pub within_tolerance: bool,
    pub warnings: Vec<String>,
}

impl Outcome {
    fn ok(report: Report) -> Self {
        Self {
            report,
            within_tolerance: true,
            warnings: Vec::new(),
        }
    }
}

pub fn execute(cmd: &Command) -> Result<Outcome, CliError> {
    match cmd {
        Command::Analyze(a) => commands::analyze(a),
        Command::ReproduceTable(a) => commands::reproduce(a),
        Command::Verify(a) => commands::verify(a),
        Command::Simulate(a) => commands::simulate(a),
        Command::ClosedForm(a) => commands::closed_form(a),
    }
}

fn output_args(cmd: &Command) -> &OutputArgs {
    match cmd {
        Command::Analyze(a) => &a.output,
        Command::ReproduceTable(a) => &a.output,
        Command::Verify(a) => &a.output,
        Command::Simulate(a) => &a.output,
        Command::ClosedForm(a) => &a.output,
    }
}

/// Parses `args`, runs the command and writes to `out`/`err`; returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let opts = output_args(&cli.command).clone();
    let outcome = match execute(&cli.command) {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_CONFIG;
        }
    };
    for w in &outcome.warnings {
        let _ = writeln!(err, "warning: {w}");
    }
    match outcome.report.render(opts.format, opts.digits) {
        Ok(text) => {
            let _ = out.write_all(text.as_bytes());
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_CONFIG;
        }
    }
    if opts.format == Format::Csv {
        for note in &outcome.report.notes {
            let _ = writeln!(err, "note: {note}");
        }
    }
    if outcome.within_tolerance {
        EXIT_OK
    } else {
        EXIT_TOLERANCE
    }
}
