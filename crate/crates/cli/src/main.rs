mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use report::{Failure, RunReport};

#[derive(Parser, Debug)]
#[command(name = "cubepsc", version, about = "Cubical homotopy, spectral sequences and curvature checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Options,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Check the cubical identities of every set and map in a file
    Validate,
    /// Horn filling up to --max-dim
    Kan,
    /// Sphere filling up to --max-dim
    Contractible,
    /// Horn lifting for the first map in a file
    Fibration,
    /// Path components
    Pi0,
    /// The homotopy group pi_n at --base
    Pi,
    /// Integral homology and Euler characteristic
    Homology,
    /// Reduced product of the first two sets in a file
    Product,
    /// Pages and checks of a filtered complex, couple or monoid sequence
    Specseq,
    /// Warped scalar curvature against the finite-difference oracle
    Curvature,
    /// Suspension identity, slowness bound and error term
    Suspension,
    /// Rescaling identity and decay exponent
    Rescale,
    /// Pre-gauge postconditions on random positive-definite pairs
    Pregauge,
    /// Pullback metric of an angle chart
    Angle,
    /// Property scan of the dice function
    Dice,
    /// Gradient flow of the merged dice function
    Flow,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Mode {
    Eighth,
    Chapter7,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Default)]
enum Switch {
    #[default]
    On,
    Off,
}

#[derive(Args, Debug, Clone)]
struct Options {
    #[arg(long, global = true, value_name = "PATH")]
    input: Option<PathBuf>,
    #[arg(long, global = true, value_name = "PATH")]
    family: Option<PathBuf>,
    #[arg(long, global = true, value_name = "PATH")]
    couple: Option<PathBuf>,
    #[arg(long = "max-dim", global = true, value_name = "N")]
    max_dim: Option<usize>,
    #[arg(long, global = true, value_name = "N")]
    n: Option<usize>,
    #[arg(long, global = true, value_name = "NAME")]
    base: Option<String>,
    #[arg(long, global = true, value_name = "R")]
    pages: Option<usize>,
    #[arg(long, global = true, value_name = "K")]
    samples: Option<usize>,
    #[arg(long, global = true, value_name = "S")]
    seed: Option<u64>,
    #[arg(long, global = true, value_name = "X")]
    tol: Option<f64>,
    #[arg(long, global = true, value_enum)]
    mode: Option<Mode>,
    #[arg(long, global = true, value_enum, default_value_t = Switch::On)]
    parallel: Switch,
    /// Dice scale for `dice` and `flow`
    #[arg(long, global = true, value_name = "X")]
    rho: Option<f64>,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Kan => "kan",
            Command::Contractible => "contractible",
            Command::Fibration => "fibration",
            Command::Pi0 => "pi0",
            Command::Pi => "pi",
            Command::Homology => "homology",
            Command::Product => "product",
            Command::Specseq => "specseq",
            Command::Curvature => "curvature",
            Command::Suspension => "suspension",
            Command::Rescale => "rescale",
            Command::Pregauge => "pregauge",
            Command::Angle => "angle",
            Command::Dice => "dice",
            Command::Flow => "flow",
        }
    }
}

fn run(cli: &Cli) -> Result<RunReport, Failure> {
    let mut ctx = commands::Context::new(&cli.opts);
    let outcome = commands::dispatch(cli.command, &mut ctx)?;
    Ok(RunReport::new(cli.command.name(), ctx, outcome))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.opts.parallel {
        Switch::On => run(&cli),
        Switch::Off => match rayon::ThreadPoolBuilder::new().num_threads(1).build() {
            Ok(pool) => pool.install(|| run(&cli)),
            Err(e) => Err(Failure::Internal(format!("cannot build a sequential pool: {}", e))),
        },
    };
    match result {
        Ok(report) => {
            report.emit();
            ExitCode::from(if report.passed { 0 } else { 1 })
        }
        Err(failure) => {
            failure.emit(cli.command.name());
            ExitCode::from(failure.code())
        }
    }
}
