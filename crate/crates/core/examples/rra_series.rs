//! Reliability-redundancy allocation on the 5-subsystem series system:
//! choose component reliabilities r_i and integer redundancies n_i to
//! maximise system reliability under volume, cost and weight limits.
//!
//!     cargo run --release --example rra_series

use aefa::problems::rra;
use aefa::{registry_get, run, RunConfig};

fn main() -> aefa::Result<()> {
    let problem = registry_get("rra-series")?;
    let system = rra::series_system();
    let known = problem.known_best().expect("tabulated");

    let mut best: Option<aefa::RunResult> = None;
    for seed in 0..10 {
        let r = run(&problem, &RunConfig::ai_aefa().with_seed(seed))?;
        println!(
            "seed {seed}: R = {:.6} feasible = {}",
            r.best_objective,
            r.is_feasible()
        );
        if r.is_feasible() && best.as_ref().is_none_or(|b| r.best_objective > b.best_objective) {
            best = Some(r);
        }
    }
    let best = best.expect("at least one feasible run");
    let (r, n) = best.best_position.split_at(5);
    println!(
        "\nbest R = {:.6} (literature {} from {})",
        best.best_objective, known.value, known.citation
    );
    println!("r = {r:.5?}");
    println!("n = {n:?}");
    println!(
        "constraints (≤ 0 when met): volume {:.3}, cost {:.3}, weight {:.3}",
        system.volume_constraint(n),
        system.cost_constraint(r, n),
        system.weight_constraint(n)
    );
    Ok(())
}
