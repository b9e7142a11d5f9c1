//! Trace one ai-aefa run, then explain the elite objective from (K, Q) and the
//! elite position norm from (A, E) with exact Shapley values of a linear
//! surrogate.
//!
//!     cargo run --release --example explain_trace

use aefa::explain::{build_datasets, explain, pearson_correlation, SurrogateKind};
use aefa::{registry_get, run, RunConfig};

fn main() -> aefa::Result<()> {
    let problem = registry_get("rra-series")?;
    let result = run(&problem, &RunConfig::ai_aefa().with_seed(3).with_trace(true))?;
    println!(
        "{} iterations traced, R = {:.6}",
        result.trace.len(),
        result.best_objective
    );

    let (by_charge, by_force) = build_datasets(&result.trace)?;
    for d in [&by_charge, &by_force] {
        let (model, shap, summary) = explain(d, SurrogateKind::Linear)?;
        println!("\n{} → {}", d.feature_names.join(", "), d.target_name);
        println!("  surrogate: {model:?}");
        for bar in &summary.bars {
            println!("  mean |φ| {:<2} = {:.4e}", bar.feature, bar.mean_abs_shap);
        }
        let last = shap.last().expect("non-empty");
        println!(
            "  last iteration: φ0 = {:.6}, φ = {:.4?}, prediction = {:.6}",
            last.base_value, last.attributions, last.prediction
        );
        let corr = pearson_correlation(d)?;
        for (label, row) in corr.labels.iter().zip(&corr.values) {
            println!("  r[{label:<6}] = {row:+.3?}");
        }
    }
    Ok(())
}
