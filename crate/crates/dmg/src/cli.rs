use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{
    parse_real, BasisChoice, CommandKind, MethodChoice, ProblemName, RunConfig, SourceChoice, Suite,
};

#[derive(Debug, Parser)]
#[command(
    name = "dmg",
    version,
    about = "Direct multigrid solvers for red-black aliasing systems"
)]
pub struct Cli {
    /// JSON run configuration; flags given on the command line override it.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Upper bound on worker threads for the additive solvers.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Directory for reports and field dumps [env: DMG_OUTPUT_DIR].
    #[arg(long, global = true, value_name = "DIR")]
    pub output_dir: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one system and write a JSON report.
    Solve(SolveArgs),
    /// Run the numerical checks behind the solvers.
    Verify(VerifyArgs),
    /// Count multiplications over a size sweep.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ProblemArgs {
    #[arg(long, value_enum)]
    pub problem: Option<ProblemName>,
    /// Matrix Market file to solve instead of a built-in problem.
    #[arg(long, value_name = "FILE")]
    pub matrix: Option<PathBuf>,
    /// Number of unknowns of a 1D problem.
    #[arg(long)]
    pub n: Option<usize>,
    /// Side of a 2D problem.
    #[arg(long = "N")]
    pub side: Option<usize>,
    /// Wavenumber, e.g. `pi/3` or `1.047`.
    #[arg(long, value_parser = parse_real, allow_hyphen_values = true)]
    pub k: Option<f64>,
    /// Largest grid solved directly.
    #[arg(long)]
    pub n0: Option<usize>,
}

impl ProblemArgs {
    fn into_config(self) -> RunConfig {
        RunConfig {
            problem: self.problem,
            matrix: self.matrix,
            n: self.n,
            side: self.side,
            k: self.k,
            n0: self.n0,
            ..Default::default()
        }
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[arg(long, value_enum)]
    pub method: Option<MethodChoice>,
    #[arg(long, value_enum)]
    pub source: Option<SourceChoice>,
    /// CSV with a `re` column (and optionally `im`, `i`, `j`).
    #[arg(long, value_name = "FILE")]
    pub source_file: Option<PathBuf>,
    /// Channel depth of the multichannel method.
    #[arg(long)]
    pub depth: Option<usize>,
    /// Largest accepted relative residual.
    #[arg(long = "tol", value_parser = parse_real)]
    pub tolerance: Option<f64>,
    /// Also write intermediate fields as CSV.
    #[arg(long)]
    pub dump_fields: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub suite: Option<Suite>,
    /// Size of the 1D checks.
    #[arg(long)]
    pub n: Option<usize>,
    /// Side of the 2D checks.
    #[arg(long = "N")]
    pub side: Option<usize>,
    #[arg(long, value_parser = parse_real, allow_hyphen_values = true)]
    pub k: Option<f64>,
    /// dft1d, dft2d, sine or sine<n>.
    #[arg(long)]
    pub basis: Option<BasisChoice>,
    /// Perturb one filter symbol by this amount; the affected checks must fail.
    #[arg(long, value_parser = parse_real, allow_hyphen_values = true)]
    pub break_symbol: Option<f64>,
    /// Override every check tolerance.
    #[arg(long = "tol", value_parser = parse_real)]
    pub tolerance: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    /// Comma-separated sizes (`n` in 1D, `N` in 2D).
    #[arg(long, value_delimiter = ',')]
    pub sizes: Option<Vec<usize>>,
    /// multiplicative or additive; both when absent.
    #[arg(long, value_enum)]
    pub method: Option<MethodChoice>,
    /// CSV destination; stdout when absent.
    #[arg(long, value_name = "FILE")]
    pub output: Option<PathBuf>,
}

impl Cli {
    /// The flags as a configuration layer, without the `--config` file.
    pub fn flags(&self) -> RunConfig {
        let mut c = match &self.command {
            None => RunConfig::default(),
            Some(Command::Solve(a)) => RunConfig {
                command: Some(CommandKind::Solve),
                method: a.method,
                source: a.source,
                source_file: a.source_file.clone(),
                depth: a.depth,
                tolerance: a.tolerance,
                dump_fields: a.dump_fields.then_some(true),
                ..clone_problem(&a.problem)
            },
            Some(Command::Verify(a)) => RunConfig {
                command: Some(CommandKind::Verify),
                suite: a.suite,
                n: a.n,
                side: a.side,
                k: a.k,
                basis: a.basis,
                break_symbol: a.break_symbol,
                tolerance: a.tolerance,
                seed: a.seed,
                ..Default::default()
            },
            Some(Command::Bench(a)) => RunConfig {
                command: Some(CommandKind::Bench),
                sizes: a.sizes.clone(),
                method: a.method,
                output: a.output.clone(),
                ..clone_problem(&a.problem)
            },
        };
        c.threads = self.threads;
        c.output_dir = self.output_dir.clone();
        c
    }
}

fn clone_problem(p: &ProblemArgs) -> RunConfig {
    p.clone().into_config()
}
