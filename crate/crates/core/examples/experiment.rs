//! Drive a full experiment from TOML, as the CLI `run` command does, and read
//! the summary back.
//!
//!     cargo run --release --example experiment [config.toml]
//!
//! Without an argument the bundled `examples/experiment.toml` is used.

use std::path::PathBuf;

use aefa::experiment::{run_experiment, ExperimentConfig};

fn main() -> aefa::Result<()> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/experiment.toml"));
    let mut config = ExperimentConfig::load(&path)?;
    config.out = std::env::temp_dir().join("aefa-experiment");
    let report = run_experiment(&config)?;

    for row in &report.summary {
        println!(
            "{:<14} {:<8} mean {:.8} FR {:>5.1} p {:.3e} {} mpii {}",
            row.problem,
            row.algorithm,
            row.mean,
            row.feasibility_rate,
            row.p_wilcoxon,
            row.verdict,
            row.mpii.map_or("NA".into(), |m| format!("{m:.4}"))
        );
    }
    println!("outputs in {}", report.out.display());
    Ok(())
}
