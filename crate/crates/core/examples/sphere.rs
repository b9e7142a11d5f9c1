//! Minimise the unconstrained 2-D sphere with both variants.
//!
//!     cargo run --release --example sphere

use aefa::{registry_get, run, Algorithm};

fn main() -> aefa::Result<()> {
    let problem = registry_get("sphere")?;
    for algorithm in [Algorithm::AiAefa, Algorithm::Aefa] {
        let config = algorithm.default_config().with_seed(42).with_budget(30, 6000);
        let r = run(&problem, &config)?;
        println!(
            "{algorithm:<8} f = {:.3e} at {:?} ({} evaluations, {} iterations)",
            r.best_objective, r.best_position, r.evaluations_used, r.iterations
        );
    }
    Ok(())
}
