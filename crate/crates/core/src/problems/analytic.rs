//! Small analytic problems with closed-form optima.

use super::ProblemSpec;
use crate::constraints::ConstraintSet;
use crate::space::SearchSpace;

pub fn all() -> Vec<ProblemSpec> {
    vec![sphere(2), toy_quadratic(), rosenbrock_disk(), sphere_equality()]
}

/// Unconstrained `Σ x²` on `[-5, 5]^dim`.
pub fn sphere(dim: usize) -> ProblemSpec {
    let space = SearchSpace::uniform(dim, -5.0, 5.0).expect("valid bounds");
    let name = if dim == 2 {
        "sphere".to_string()
    } else {
        format!("sphere-{dim}")
    };
    ProblemSpec::new(name, space, |x| x.iter().map(|v| v * v).sum())
        .with_description("unconstrained sphere, optimum 0 at the origin")
        .with_known_best(0.0, Some(vec![0.0; dim]), "analytic")
}

/// `(x1−2)² + (x2−2)²` subject to `x1 + x2 ≤ 2`; optimum 2 at (1, 1).
pub fn toy_quadratic() -> ProblemSpec {
    let space = SearchSpace::uniform(2, -4.0, 4.0).expect("valid bounds");
    ProblemSpec::new("toy-quadratic", space, |x| (x[0] - 2.0).powi(2) + (x[1] - 2.0).powi(2))
        .with_constraints(ConstraintSet::new().inequality(|x| x[0] + x[1] - 2.0))
        .with_description("quadratic with one linear inequality")
        .with_known_best(2.0, Some(vec![1.0, 1.0]), "analytic KKT point")
}

/// Rosenbrock restricted to the disk `x² + y² ≤ 2`; optimum 0 at (1, 1).
pub fn rosenbrock_disk() -> ProblemSpec {
    let space = SearchSpace::uniform(2, -1.5, 1.5).expect("valid bounds");
    ProblemSpec::new("rosenbrock-disk", space, |x| {
        (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2)
    })
    .with_constraints(ConstraintSet::new().inequality(|x| x[0] * x[0] + x[1] * x[1] - 2.0))
    .with_description("Rosenbrock constrained to a disk of radius sqrt(2)")
    .with_known_best(0.0, Some(vec![1.0, 1.0]), "analytic")
}

/// `Σ x²` in three dimensions subject to `x1 + x2 + x3 = 1`; optimum 1/3.
pub fn sphere_equality() -> ProblemSpec {
    let space = SearchSpace::uniform(3, -2.0, 2.0).expect("valid bounds");
    let third = 1.0 / 3.0;
    ProblemSpec::new("sphere-equality", space, |x| x.iter().map(|v| v * v).sum())
        .with_constraints(ConstraintSet::new().equality(|x| x.iter().sum::<f64>() - 1.0))
        .with_description("sphere on the plane x1 + x2 + x3 = 1")
        .with_known_best(third, Some(vec![third; 3]), "analytic")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn optima_evaluate_as_documented() {
        let t = toy_quadratic();
        assert_eq!(t.objective(&[1.0, 1.0]), 2.0);
        assert_eq!(t.violation(&[1.0, 1.0]), 0.0);
        assert!(t.violation(&[2.0, 2.0]) > 0.0);

        let r = rosenbrock_disk();
        assert_eq!(r.objective(&[1.0, 1.0]), 0.0);
        assert_eq!(r.violation(&[1.0, 1.0]), 0.0);

        let s = sphere_equality();
        assert_eq!(s.violation(&[0.5, 0.5, 0.0]), 0.0);
        assert!(s.violation(&[0.0, 0.0, 0.0]) > 0.0);

        assert_eq!(sphere(4).name(), "sphere-4");
        assert_eq!(sphere(4).objective(&[1.0, 1.0, 1.0, 1.0]), 4.0);
    }
}
