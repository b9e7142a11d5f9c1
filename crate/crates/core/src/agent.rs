use serde::{Deserialize, Serialize};

/// Objective value paired with its constraint-violation degree.
///
/// Objectives here are always on the minimisation scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fitness {
    pub objective: f64,
    pub violation: f64,
}

impl Fitness {
    pub fn new(objective: f64, violation: f64) -> Self {
        Self { objective, violation }
    }

    pub fn is_feasible(&self) -> bool {
        self.violation == 0.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Agent {
    pub position: Vec<f64>,
    pub velocity: Vec<f64>,
    pub charge: f64,
    pub fitness: Fitness,
}

impl Agent {
    /// Agent at rest at `position`.
    pub fn at_rest(position: Vec<f64>, fitness: Fitness) -> Self {
        let dim = position.len();
        Self {
            position,
            velocity: vec![0.0; dim],
            charge: 0.0,
            fitness,
        }
    }

    pub fn objective(&self) -> f64 {
        self.fitness.objective
    }

    pub fn violation(&self) -> f64 {
        self.fitness.violation
    }

    pub fn is_feasible(&self) -> bool {
        self.fitness.is_feasible()
    }
}
