//! Problem definitions and the name-addressable registry.
//!
//! A [`ProblemSpec`] bundles an objective, a [`ConstraintSet`] and a
//! [`SearchSpace`]. The engine always minimises; maximisation problems are
//! negated internally and reported on their own scale.
//!
//! User problems are added by building a `ProblemSpec` and calling
//! [`Registry::register`]:
//!
//! ```
//! use aefa::problems::{ProblemSpec, Registry};
//! use aefa::{ConstraintSet, SearchSpace};
//!
//! let space = SearchSpace::uniform(2, -1.0, 1.0).unwrap();
//! let p = ProblemSpec::new("ring", space, |x| x[0] + x[1])
//!     .with_constraints(ConstraintSet::new().inequality(|x| 0.25 - x[0] * x[0] - x[1] * x[1]));
//! let mut reg = Registry::builtin();
//! reg.register(p).unwrap();
//! assert!(reg.get("ring").is_ok());
//! ```

pub mod analytic;
pub mod rra;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::agent::Fitness;
use crate::constraints::ConstraintSet;
use crate::error::{Error, Result};
use crate::space::SearchSpace;

pub type ObjectiveFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    Minimize,
    Maximize,
}

impl Sense {
    fn sign(self) -> f64 {
        match self {
            Sense::Minimize => 1.0,
            Sense::Maximize => -1.0,
        }
    }
}

/// Best known solution with the source it comes from.
#[derive(Debug, Clone, PartialEq)]
pub struct KnownBest {
    /// On the problem's reported scale.
    pub value: f64,
    pub position: Option<Vec<f64>>,
    pub citation: String,
}

#[derive(Clone)]
pub struct ProblemSpec {
    name: String,
    description: String,
    space: SearchSpace,
    objective: ObjectiveFn,
    constraints: ConstraintSet,
    known_best: Option<KnownBest>,
    sense: Sense,
}

impl fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("name", &self.name)
            .field("dim", &self.space.dim())
            .field("constraints", &self.constraints)
            .field("sense", &self.sense)
            .field("known_best", &self.known_best)
            .finish()
    }
}

impl ProblemSpec {
    /// Minimisation problem with no constraints.
    pub fn new(
        name: impl Into<String>,
        space: SearchSpace,
        objective: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            description: String::new(),
            space,
            objective: Arc::new(objective),
            constraints: ConstraintSet::new(),
            known_best: None,
            sense: Sense::Minimize,
        }
    }

    pub fn maximize(mut self) -> Self {
        self.sense = Sense::Maximize;
        self
    }

    pub fn with_constraints(mut self, constraints: ConstraintSet) -> Self {
        self.constraints = constraints;
        self
    }

    pub fn with_known_best(mut self, value: f64, position: Option<Vec<f64>>, citation: impl Into<String>) -> Self {
        self.known_best = Some(KnownBest {
            value,
            position,
            citation: citation.into(),
        });
        self
    }

    pub fn with_description(mut self, description: impl Into<String>) -> Self {
        self.description = description.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn space(&self) -> &SearchSpace {
        &self.space
    }

    pub fn constraints(&self) -> &ConstraintSet {
        &self.constraints
    }

    pub fn known_best(&self) -> Option<&KnownBest> {
        self.known_best.as_ref()
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// Objective on the reported scale.
    pub fn objective(&self, x: &[f64]) -> f64 {
        (self.objective)(x)
    }

    pub fn violation(&self, x: &[f64]) -> f64 {
        self.constraints.violation(x, self.space.equality_tolerance())
    }

    /// Objective (minimisation scale) and violation degree.
    pub fn evaluate(&self, x: &[f64]) -> Fitness {
        Fitness::new(self.sense.sign() * self.objective(x), self.violation(x))
    }

    /// Converts a minimisation-scale objective back to the reported scale.
    pub fn to_reported(&self, internal: f64) -> f64 {
        self.sense.sign() * internal
    }

    /// Human-readable summary: bounds, constraint counts, integer mask and the
    /// known best.
    pub fn describe(&self) -> String {
        use std::fmt::Write;
        let mut s = String::new();
        let _ = writeln!(s, "name:        {}", self.name);
        if !self.description.is_empty() {
            let _ = writeln!(s, "description: {}", self.description);
        }
        let _ = writeln!(s, "sense:       {:?}", self.sense);
        let _ = writeln!(s, "dimension:   {}", self.dim());
        let _ = writeln!(s, "lower:       {:?}", self.space.lower());
        let _ = writeln!(s, "upper:       {:?}", self.space.upper());
        let ints: Vec<usize> = self
            .space
            .integer_mask()
            .iter()
            .enumerate()
            .filter_map(|(d, &b)| b.then_some(d))
            .collect();
        if ints.is_empty() {
            let _ = writeln!(s, "integer:     none (continuous)");
        } else {
            let _ = writeln!(s, "integer:     dims {ints:?} ({} of {})", ints.len(), self.dim());
        }
        let _ = writeln!(
            s,
            "constraints: {} inequality, {} equality (tolerance {:e})",
            self.constraints.inequality_count(),
            self.constraints.equality_count(),
            self.space.equality_tolerance()
        );
        match &self.known_best {
            Some(kb) => {
                let _ = writeln!(s, "known best:  {} [{}]", kb.value, kb.citation);
                if let Some(p) = &kb.position {
                    let _ = writeln!(s, "  at:        {p:?}");
                }
            }
            None => {
                let _ = writeln!(s, "known best:  unknown");
            }
        }
        s
    }
}

/// Name → problem map.
#[derive(Debug, Clone, Default)]
pub struct Registry {
    problems: BTreeMap<String, ProblemSpec>,
}

impl Registry {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Analytic test problems plus the reliability-redundancy suite.
    pub fn builtin() -> Self {
        let mut reg = Self::empty();
        for p in analytic::all().into_iter().chain(rra::all()) {
            reg.problems.insert(p.name().to_string(), p);
        }
        reg
    }

    /// Adds a problem. Names must be unique.
    pub fn register(&mut self, problem: ProblemSpec) -> Result<()> {
        if self.problems.contains_key(problem.name()) {
            return Err(Error::InvalidConfig(format!(
                "problem `{}` is already registered",
                problem.name()
            )));
        }
        self.problems.insert(problem.name().to_string(), problem);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Result<&ProblemSpec> {
        self.problems.get(name).ok_or_else(|| Error::UnknownProblem {
            name: name.to_string(),
            available: self.names(),
        })
    }

    pub fn names(&self) -> Vec<String> {
        self.problems.keys().cloned().collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &ProblemSpec> {
        self.problems.values()
    }
}

/// Looks `name` up in the built-in registry.
pub fn registry_get(name: &str) -> Result<ProblemSpec> {
    Registry::builtin().get(name).cloned()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lookup_examples() {
        let toy = registry_get("toy-quadratic").unwrap();
        assert_eq!(toy.dim(), 2);
        assert_eq!(toy.known_best().unwrap().value, 2.0);

        let series = registry_get("rra-series").unwrap();
        assert_eq!(series.dim(), 10);
        assert_eq!(series.space().integer_count(), 5);
        assert_eq!(series.sense(), Sense::Maximize);

        match registry_get("nosuch") {
            Err(Error::UnknownProblem { available, .. }) => {
                assert!(available.contains(&"rra-series".to_string()));
                assert!(available.contains(&"toy-quadratic".to_string()));
            }
            other => panic!("unexpected {other:?}"),
        }
        let msg = registry_get("nosuch").unwrap_err().to_string();
        assert!(msg.contains("toy-quadratic"));
    }

    #[test]
    fn known_bests_are_feasible_and_match() {
        for p in Registry::builtin().iter() {
            let kb = p.known_best().expect("builtin problems carry a known best");
            if let Some(x) = &kb.position {
                assert!(p.space().contains(x), "{}", p.name());
                assert_eq!(p.violation(x), 0.0, "{} known best infeasible", p.name());
                let v = p.objective(x);
                let rel = (v - kb.value).abs() / kb.value.abs().max(1e-12);
                assert!(
                    rel < 5e-6 || (v - kb.value).abs() < 1e-9,
                    "{}: {v} vs {}",
                    p.name(),
                    kb.value
                );
            }
        }
    }

    #[test]
    fn maximisation_is_negated_internally() {
        let p = registry_get("rra-series").unwrap();
        let x = p.known_best().unwrap().position.clone().unwrap();
        let fit = p.evaluate(&x);
        assert!(fit.objective < 0.0);
        assert_eq!(p.to_reported(fit.objective), p.objective(&x));
    }

    #[test]
    fn register_rejects_duplicates() {
        let mut reg = Registry::builtin();
        let dup = registry_get("toy-quadratic").unwrap();
        assert!(reg.register(dup).is_err());
    }

    #[test]
    fn describe_mentions_integer_dims_and_known_best() {
        let d = registry_get("rra-series").unwrap().describe();
        assert!(d.contains("integer:     dims [5, 6, 7, 8, 9]"));
        assert!(d.contains("0.931682"));
        let d = registry_get("toy-quadratic").unwrap().describe();
        assert!(d.contains("known best:  2 "));
    }
}
