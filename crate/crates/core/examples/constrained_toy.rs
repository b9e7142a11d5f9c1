//! Constrained quadratic: minimise (x1−2)² + (x2−2)² subject to x1 + x2 ≤ 2.
//! The optimum is 2 at (1, 1), on the constraint boundary.
//!
//!     cargo run --release --example constrained_toy

use aefa::metrics::{mean_std_fr, RunSummary};
use aefa::{registry_get, run, RunConfig};

fn main() -> aefa::Result<()> {
    let problem = registry_get("toy-quadratic")?;
    let results = (0..20)
        .map(|seed| run(&problem, &RunConfig::ai_aefa().with_seed(seed)))
        .collect::<aefa::Result<Vec<_>>>()?;

    for (seed, r) in results.iter().enumerate().take(5) {
        println!(
            "seed {seed:>2}: f = {:.6}  violation = {:.1e}  x = [{:.4}, {:.4}]",
            r.best_objective, r.best_violation, r.best_position[0], r.best_position[1]
        );
    }
    let stats = mean_std_fr(&RunSummary::from_results(&results))?;
    println!(
        "20 runs: mean {:.6}, std {:.2e}, feasible {:.0}%",
        stats.mean, stats.std, stats.feasibility_rate
    );
    Ok(())
}
