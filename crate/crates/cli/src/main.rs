use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use setfix::commands::{
    CheckOptions, Common, GenerateFlags, KindArg, OracleSource, SolveFlags, EXIT_INPUT,
};
use setfix::{cmd_check, cmd_oracle, cmd_solve, cmd_validate, Format, Outcome};

#[derive(Parser)]
#[command(
    name = "setfix",
    version,
    about = "Fixed points of multivalued maps on finite uniform spaces"
)]
struct Cli {
    /// Tolerance for every numeric comparison.
    #[arg(long, global = true, default_value_t = setfix_core::DEFAULT_TOL)]
    tol: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check document structure and the pseudometric axioms.
    Validate { path: PathBuf },
    /// Evaluate the contraction condition over all tuples.
    Check {
        path: PathBuf,
        /// Use the single-valued form (singleton images, r = 1).
        #[arg(long)]
        single_valued: bool,
        /// Replace every a with -1.
        #[arg(long)]
        a_neg_one: bool,
        #[arg(long, default_value_t = 10)]
        max_violations: usize,
        /// Check this many random tuples instead (large instances only).
        #[arg(long)]
        sample: Option<usize>,
        #[arg(long, default_value_t = 0, requires = "sample")]
        seed: u64,
    },
    /// Certify the condition and follow the nearest-point orbit.
    Solve {
        path: PathBuf,
        /// Label of the starting point.
        #[arg(long)]
        start: Option<String>,
        /// Metric that drives the orbit: position, name, or `aggregate`.
        #[arg(long)]
        index: Option<String>,
        #[arg(long)]
        max_steps: Option<usize>,
        #[arg(long)]
        allow_non_separating: bool,
    },
    /// Enumerate fixed points, or generate a certified instance.
    Oracle(OracleArgs),
}

#[derive(Args)]
struct OracleArgs {
    #[arg(required_unless_present = "generate", conflicts_with = "generate")]
    path: Option<PathBuf>,
    /// Also decide whether the fixed point is unique.
    #[arg(long, conflicts_with = "generate")]
    uniqueness: bool,
    /// Print a new certified instance document.
    #[arg(long)]
    generate: bool,
    #[arg(long, value_enum, default_value_t = KindArg::Sink)]
    kind: KindArg,
    #[arg(long, default_value_t = 5)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    m: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    r: u32,
    /// Lower end of the range for a.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    a_min: f64,
    /// Upper end of the range for a.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    a_max: f64,
    /// Attempts before giving up.
    #[arg(long, default_value_t = 10_000)]
    budget: u32,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT } else { 0 });
        }
    };
    let common = Common {
        tol: cli.tol,
        format: cli.format,
    };
    let outcome: Outcome = match cli.command {
        Command::Validate { path } => cmd_validate(&path, &common),
        Command::Check {
            path,
            single_valued,
            a_neg_one,
            max_violations,
            sample,
            seed,
        } => cmd_check(
            &path,
            &common,
            &CheckOptions {
                single_valued,
                a_neg_one,
                max_violations,
                sample,
                seed,
            },
        ),
        Command::Solve {
            path,
            start,
            index,
            max_steps,
            allow_non_separating,
        } => cmd_solve(
            &path,
            &common,
            &SolveFlags {
                start,
                index,
                max_steps,
                allow_non_separating,
            },
        ),
        Command::Oracle(args) => {
            let source = match args.path {
                Some(path) => OracleSource::File(path),
                None => OracleSource::Generate(GenerateFlags {
                    kind: args.kind,
                    n: args.n,
                    m: args.m,
                    seed: args.seed,
                    r: args.r,
                    a: (args.a_min, args.a_max),
                    budget: args.budget,
                }),
            };
            cmd_oracle(&source, &common, args.uniqueness)
        }
    };
    let _ = std::io::stdout().write_all(outcome.stdout.as_bytes());
    let _ = std::io::stderr().write_all(outcome.stderr.as_bytes());
    ExitCode::from(outcome.code)
}
