use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use aefa::experiment::{describe, list, run_experiment, ExperimentConfig};
use aefa::{Error, Registry};

#[derive(Parser)]
#[command(
    name = "aefa",
    version,
    about = "Artificial electric field optimiser for constrained problems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output directory (overrides the config file).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Base seed; run i uses seed + i.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Write per-run traces and SHAP/correlation exports.
    #[arg(long, global = true)]
    trace: bool,

    /// Worker threads.
    #[arg(long, global = true)]
    parallel: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a TOML config file.
    Run { config: PathBuf },
    /// Show a registered problem.
    Describe { problem: String },
    /// List registered problems.
    List,
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::UnknownProblem { .. } | Error::UnknownAlgorithm(_) => 2,
        Error::RunFailed { .. } | Error::NonFiniteEvaluation { .. } => 3,
        _ => 1,
    }
}

fn execute(cli: Cli) -> aefa::Result<()> {
    let registry = Registry::builtin();
    match cli.command {
        Command::List => {
            for line in list(&registry) {
                println!("{line}");
            }
        }
        Command::Describe { problem } => print!("{}", describe(&registry, &problem)?),
        Command::Run { config } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if let Some(out) = cli.out {
                cfg.out = out;
            }
            if let Some(seed) = cli.seed {
                cfg.seed = seed;
            }
            if let Some(parallel) = cli.parallel {
                cfg.parallel = parallel;
            }
            cfg.trace |= cli.trace;
            let report = run_experiment(&cfg)?;
            println!(
                "{:<22} {:<8} {:>14} {:>11} {:>6} {:>10} {:>3} {:>10}",
                "problem", "algo", "mean", "std", "FR", "p", "", "mpii"
            );
            for r in &report.summary {
                println!(
                    "{:<22} {:<8} {:>14.8} {:>11.3e} {:>6.1} {:>10.3e} {:>3} {:>10}",
                    r.problem,
                    r.algorithm,
                    r.mean,
                    r.std,
                    r.feasibility_rate,
                    r.p_wilcoxon,
                    r.verdict,
                    r.mpii.map_or("NA".to_string(), |m| format!("{m:.4e}"))
                );
            }
            println!("wrote {} runs to {}", report.records.len(), report.out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
