use std::path::PathBuf;
use std::process::ExitCode;

use amplisat::{InitialObjective, OracleKind};
use anyhow::Result;
use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod instance;
mod manifest;

/// Exit codes shared by every subcommand.
pub mod exit {
    pub const OK: u8 = 0;
    pub const IO: u8 = 1;
    pub const INVALID: u8 = 2;
    pub const BUDGET: u8 = 3;
}

#[derive(Parser, Debug)]
#[command(
    name = "amplisat",
    version,
    about = "Amplitude-amplification-style conditioning of relaxed k-SAT objectives"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a planted random k-SAT instance (DIMACS + JSON sidecar).
    Gen(GenArgs),
    /// Parse and validate a DIMACS file; report n, M, widths and L.
    Validate(ValidateArgs),
    /// Print the expectation ledger for an instance.
    Ledger(LedgerArgs),
    /// Write vertex sweeps (one CSV per ℓ) and landscape statistics.
    Landscape(LandscapeArgs),
    /// Run one solver on one instance and print its report.
    Solve(SolveArgs),
    /// Compare iteration counts over a planted ensemble.
    Bench(BenchArgs),
    /// Re-run the command recorded in a manifest.
    Replay(ReplayArgs),
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[arg(short = 'n')]
    pub n: usize,
    #[arg(short = 'M')]
    pub m: usize,
    #[arg(short = 'k', default_value_t = 3)]
    pub k: usize,
    /// Regenerate until the instance has exactly this many solutions.
    #[arg(long = "target-L")]
    pub target_l: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output prefix; writes <out>.cnf, <out>.json and <out>.manifest.json.
    #[arg(long, default_value = "instance")]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct ValidateArgs {
    pub instance: PathBuf,
    /// Print the canonical DIMACS form instead of the summary.
    #[arg(long)]
    pub canonical: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum F0Arg {
    Unit,
    #[value(alias = "v", alias = "V")]
    ClauseCount,
}

impl From<F0Arg> for InitialObjective {
    fn from(f: F0Arg) -> Self {
        match f {
            F0Arg::Unit => InitialObjective::Unit,
            F0Arg::ClauseCount => InitialObjective::ClauseCount,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum OracleArg {
    Product,
    Min,
    WeightedMin,
}

impl From<OracleArg> for OracleKind {
    fn from(o: OracleArg) -> Self {
        match o {
            OracleArg::Product => OracleKind::Product,
            OracleArg::Min => OracleKind::Min,
            OracleArg::WeightedMin => OracleKind::WeightedMin,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum SolverArg {
    Anneal,
    Gradient,
}

#[derive(Args, Debug)]
pub struct LedgerArgs {
    pub instance: PathBuf,
    #[arg(long, value_enum, default_value_t = F0Arg::ClauseCount)]
    pub f0: F0Arg,
    #[arg(long, default_value_t = 10)]
    pub ell_max: usize,
    /// Known solution count; skips the brute-force count.
    #[arg(long = "L")]
    pub l: Option<u64>,
}

#[derive(Args, Debug)]
pub struct LandscapeArgs {
    pub instance: PathBuf,
    #[arg(long, value_enum, default_value_t = F0Arg::ClauseCount)]
    pub f0: F0Arg,
    #[arg(long, value_enum, default_value_t = OracleArg::Product)]
    pub oracle: OracleArg,
    /// Comma-separated iteration counts; `auto` is the optimal count.
    #[arg(long, value_delimiter = ',', default_value = "0,1,2,3")]
    pub ell: Vec<String>,
    /// Output prefix; writes <out>_ell<ℓ>.csv, <out>_stats.json and a manifest.
    #[arg(long, default_value = "landscape")]
    pub out: PathBuf,
    /// Cross-check every sweep against the explicit-vector reference.
    #[arg(long)]
    pub verify: bool,
    #[arg(long = "L")]
    pub l: Option<u64>,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    pub instance: PathBuf,
    #[arg(long, value_enum, default_value_t = SolverArg::Anneal)]
    pub solver: SolverArg,
    /// JSON file with the solver's configuration fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Iteration count or `auto`.
    #[arg(long, default_value = "0")]
    pub ell: String,
    #[arg(long, value_enum, default_value_t = OracleArg::Product)]
    pub oracle: OracleArg,
    #[arg(long, value_enum, default_value_t = F0Arg::ClauseCount)]
    pub f0: F0Arg,
    #[arg(long = "L")]
    pub l: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Also write the report (and a manifest) to this file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// Instance files; when empty a planted ensemble is generated.
    pub instances: Vec<PathBuf>,
    #[arg(short = 'n', default_value_t = 12)]
    pub n: usize,
    /// Clause count; defaults to round(4.26·n).
    #[arg(short = 'M')]
    pub m: Option<usize>,
    #[arg(short = 'k', default_value_t = 3)]
    pub k: usize,
    #[arg(long = "count", default_value_t = 100)]
    pub count: usize,
    #[arg(long = "target-L")]
    pub target_l: Option<u64>,
    #[arg(long, value_enum, default_value_t = SolverArg::Anneal)]
    pub solver: SolverArg,
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Comma-separated iteration counts; `auto` or -1 is the optimal count.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "0,auto",
        allow_hyphen_values = true
    )]
    pub ell: Vec<String>,
    #[arg(long, value_enum, default_value_t = OracleArg::Product)]
    pub oracle: OracleArg,
    #[arg(long, value_enum, default_value_t = F0Arg::ClauseCount)]
    pub f0: F0Arg,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value = "bench.csv")]
    pub out: PathBuf,
    /// Worker threads (default: all cores).
    #[arg(long, env = "AMPLISAT_JOBS")]
    pub jobs: Option<usize>,
    /// Write wall_ms as 0 so the CSV is byte-reproducible.
    #[arg(long)]
    pub no_wall_time: bool,
}

#[derive(Args, Debug)]
pub struct ReplayArgs {
    pub manifest: PathBuf,
}

/// Marks an error as a user/domain problem (exit 2) rather than I/O.
#[derive(Debug)]
pub struct Invalid(pub String);

impl std::fmt::Display for Invalid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Invalid {}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<amplisat::Error>() || cause.is::<Invalid>() || cause.is::<serde_json::Error>()
        {
            return exit::INVALID;
        }
        if cause.is::<std::io::Error>() {
            return exit::IO;
        }
    }
    exit::IO
}

fn describe(err: &anyhow::Error) -> String {
    // lead with the variant name for library errors, e.g. `InvalidWidth: ...`
    match err
        .chain()
        .find_map(|c| c.downcast_ref::<amplisat::Error>())
    {
        Some(e) => {
            let debug = format!("{e:?}");
            let kind = debug.split([' ', '(', '{']).next().unwrap_or("");
            format!("{kind}: {err:#}")
        }
        None => format!("{err:#}"),
    }
}

pub fn run(cli: Cli, raw_args: &[String]) -> Result<u8> {
    match cli.command {
        Command::Gen(a) => commands::gen(a, raw_args),
        Command::Validate(a) => commands::validate(a),
        Command::Ledger(a) => commands::ledger(a),
        Command::Landscape(a) => commands::landscape(a, raw_args),
        Command::Solve(a) => commands::solve(a, raw_args),
        Command::Bench(a) => commands::bench(a, raw_args),
        Command::Replay(a) => commands::replay(a),
    }
}

fn main() -> ExitCode {
    let raw: Vec<String> = std::env::args().skip(1).collect();
    let cli = Cli::parse();
    match run(cli, &raw) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {}", describe(&err));
            ExitCode::from(exit_code(&err))
        }
    }
}
