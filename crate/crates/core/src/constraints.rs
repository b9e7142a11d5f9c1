//! Parameter-free constraint handling.
//!
//! A point's violation degree is the mean over all constraints of the positive
//! inequality excess and of any equality residual that exceeds the tolerance.
//! Points are then ranked by the feasibility rules: feasible before infeasible,
//! feasible by objective, infeasible by violation.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use crate::agent::{Agent, Fitness};

/// Constraint function `x ↦ value`.
pub type ConstraintFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Inequalities `g(x) ≤ 0` and equalities `h(x) = 0`.
#[derive(Clone, Default)]
pub struct ConstraintSet {
    inequality: Vec<ConstraintFn>,
    equality: Vec<ConstraintFn>,
}

impl fmt::Debug for ConstraintSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConstraintSet")
            .field("inequalities", &self.inequality.len())
            .field("equalities", &self.equality.len())
            .finish()
    }
}

impl ConstraintSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn inequality(mut self, g: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        self.inequality.push(Arc::new(g));
        self
    }

    pub fn equality(mut self, h: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        self.equality.push(Arc::new(h));
        self
    }

    pub fn inequality_count(&self) -> usize {
        self.inequality.len()
    }

    pub fn equality_count(&self) -> usize {
        self.equality.len()
    }

    pub fn len(&self) -> usize {
        self.inequality.len() + self.equality.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Raw constraint values `(g(x), h(x))`.
    pub fn evaluate(&self, x: &[f64]) -> (Vec<f64>, Vec<f64>) {
        (
            self.inequality.iter().map(|g| g(x)).collect(),
            self.equality.iter().map(|h| h(x)).collect(),
        )
    }

    /// Violation degree of `x`; zero for an unconstrained set.
    pub fn violation(&self, x: &[f64], epsilon: f64) -> f64 {
        let (g, h) = self.evaluate(x);
        violation_from_values(&g, &h, epsilon)
    }
}

/// Violation degree from already-evaluated constraint values.
///
/// An equality residual contributes `|h|` (not `|h| − ε`) once it exceeds `ε`.
pub fn violation_from_values(inequality: &[f64], equality: &[f64], epsilon: f64) -> f64 {
    let n = inequality.len() + equality.len();
    if n == 0 {
        return 0.0;
    }
    let g: f64 = inequality.iter().map(|&g| if g > 0.0 { g } else { 0.0 }).sum();
    let h: f64 = equality
        .iter()
        .map(|&h| if h.abs() - epsilon > 0.0 { h.abs() } else { 0.0 })
        .sum();
    (g + h) / n as f64
}

/// Feasibility-rule ordering. `Less` means `a` is preferred over `b`.
pub fn compare(a: &Fitness, b: &Fitness) -> Ordering {
    match (a.is_feasible(), b.is_feasible()) {
        (true, false) => Ordering::Less,
        (false, true) => Ordering::Greater,
        (true, true) => a.objective.partial_cmp(&b.objective).unwrap_or(Ordering::Equal),
        (false, false) => a.violation.partial_cmp(&b.violation).unwrap_or(Ordering::Equal),
    }
}

/// True when `a` strictly precedes `b`.
pub fn precedes(a: &Fitness, b: &Fitness) -> bool {
    compare(a, b) == Ordering::Less
}

/// Stable sort: feasible agents by objective, then infeasible by violation.
pub fn sort_population(agents: &mut [Agent]) {
    agents.sort_by(|a, b| compare(&a.fitness, &b.fitness));
}

/// Indices of `fitness` in feasibility-rule order (stable).
pub fn ranking(fitness: &[Fitness]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..fitness.len()).collect();
    idx.sort_by(|&a, &b| compare(&fitness[a], &fitness[b]));
    idx
}
