use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use tangential_experiments::{run, ExperimentConfig, Suite};

#[derive(Parser)]
#[command(
    name = "tangential",
    version,
    about = "Numerical checks for tangential maximal operators"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Quasimetric and homogeneity constants of a model space
    VerifySpace(RunArgs),
    /// Strong-type ratios and the pointwise domination
    StrongType(RunArgs),
    /// Decay of the parametric maximal functions in A
    Decay(RunArgs),
    /// Weak-type constants
    WeakType(RunArgs),
    /// Boundary convergence over tangential regions
    Convergence(RunArgs),
    /// Ratios for the logarithmic content
    Weighted(RunArgs),
    /// Local bound on a compact subset
    Local(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON document overriding the suite defaults
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Number of points of the space
    #[arg(long)]
    resolution: Option<usize>,
    /// Also run at twice the resolution
    #[arg(long)]
    refine: bool,
}

fn main() -> anyhow::Result<ExitCode> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let (suite, args) = match cli.command {
        Command::VerifySpace(a) => (Suite::VerifySpace, a),
        Command::StrongType(a) => (Suite::StrongType, a),
        Command::Decay(a) => (Suite::Decay, a),
        Command::WeakType(a) => (Suite::WeakType, a),
        Command::Convergence(a) => (Suite::Convergence, a),
        Command::Weighted(a) => (Suite::Weighted, a),
        Command::Local(a) => (Suite::Local, a),
    };
    let mut cfg = ExperimentConfig::load(suite, args.config.as_deref()).context("loading configuration")?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(n) = args.resolution {
        cfg.space.resolution = n;
    }
    cfg.refine |= args.refine;
    let report = run(suite, &cfg).with_context(|| format!("running {suite}"))?;
    report
        .write(&args.out)
        .with_context(|| format!("writing to {}", args.out.display()))?;
    for v in &report.verdicts {
        println!("{}", v.line());
    }
    println!("{suite}: {}", if report.passed { "PASS" } else { "FAIL" });
    Ok(if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}
