//! ai-aefa against the baseline on every RRA system: mean, std, feasibility
//! rate, Wilcoxon verdict and MPII over 10 paired runs.
//!
//!     cargo run --release --example compare_variants

use aefa::metrics::{mean_std_fr, mpii, wilcoxon_signed_rank, RunSummary};
use aefa::{run, Algorithm, Registry};

fn main() -> aefa::Result<()> {
    let registry = Registry::builtin();
    let runs = 10;
    println!(
        "{:<20} {:>12} {:>12} {:>9} {:>9} {:>3} {:>10}",
        "problem", "ai-aefa", "aefa", "std(ai)", "p", "", "MPII"
    );
    for name in registry.names().iter().filter(|n| n.starts_with("rra-")) {
        let problem = registry.get(name)?;
        let collect = |a: Algorithm| -> aefa::Result<RunSummary> {
            let results = (0..runs)
                .map(|s| run(problem, &a.default_config().with_seed(s)))
                .collect::<aefa::Result<Vec<_>>>()?;
            Ok(RunSummary::from_results(&results))
        };
        let ai = collect(Algorithm::AiAefa)?;
        let base = collect(Algorithm::Aefa)?;
        let (sa, sb) = (mean_std_fr(&ai)?, mean_std_fr(&base)?);
        let w = wilcoxon_signed_rank(&ai.objectives, &base.objectives)?;
        println!(
            "{name:<20} {:>12.8} {:>12.8} {:>9.2e} {:>9.3e} {:>3} {:>10.4e}",
            sa.mean,
            sb.mean,
            sa.std,
            w.p_value,
            w.verdict,
            mpii(sa.mean, sb.mean)?
        );
    }
    Ok(())
}
