//! Register a user-defined problem and solve it by name.
//!
//! minimise x + y  subject to  x² + y² ≤ 1,  y ≥ x − 1.
//! The optimum is −√2 at (−1/√2, −1/√2).
//!
//!     cargo run --release --example custom_problem

use aefa::problems::{ProblemSpec, Registry};
use aefa::{run, ConstraintSet, RunConfig, SearchSpace};

fn main() -> aefa::Result<()> {
    let space = SearchSpace::uniform(2, -2.0, 2.0)?;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let problem = ProblemSpec::new("disk-line", space, |x| x[0] + x[1])
        .with_constraints(
            ConstraintSet::new()
                .inequality(|x| x[0] * x[0] + x[1] * x[1] - 1.0)
                .inequality(|x| x[0] - 1.0 - x[1]),
        )
        .with_description("linear objective on the unit disk cut by a line")
        .with_known_best(-std::f64::consts::SQRT_2, Some(vec![-h, -h]), "analytic");

    let mut registry = Registry::builtin();
    registry.register(problem)?;
    let problem = registry.get("disk-line")?;
    print!("{}", problem.describe());

    let r = run(problem, &RunConfig::ai_aefa().with_seed(5))?;
    println!(
        "\nf = {:.6}, violation = {:.1e}, x = {:.4?}",
        r.best_objective, r.best_violation, r.best_position
    );
    Ok(())
}
