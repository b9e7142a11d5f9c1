use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::schedule::{ChaoticState, CoulombSchedule, ExponentialK, SigmoidK};
use crate::space::check_fraction;

/// Which agents exert force.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KBestMode {
    /// Attractor set shrinks linearly from `N` to 2 over the run.
    #[serde(rename = "linear-n-to-2")]
    LinearNTo2,
    AllAgents,
}

impl KBestMode {
    /// Attractor-set size at iteration `l` of `l_max` for a population of `n`.
    pub fn size(self, n: usize, l: usize, l_max: usize) -> usize {
        match self {
            KBestMode::AllAgents => n,
            KBestMode::LinearNTo2 => {
                let frac = (l as f64 / l_max.max(1) as f64).min(1.0);
                let k = (n as f64 - (n as f64 - 2.0) * frac).floor() as usize;
                k.clamp(2.min(n), n)
            }
        }
    }
}

/// How positions are rounded after a move.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PositionMode {
    Continuous,
    /// Integer-masked dimensions are rounded, the rest stay continuous.
    Mixed,
    /// Every dimension is rounded.
    Integer,
}

impl PositionMode {
    pub fn from_mask(mask: &[bool]) -> Self {
        let ints = mask.iter().filter(|&&b| b).count();
        if ints == 0 {
            PositionMode::Continuous
        } else if ints == mask.len() {
            PositionMode::Integer
        } else {
            PositionMode::Mixed
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Aefa,
    AiAefa,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Aefa => "aefa",
            Algorithm::AiAefa => "ai-aefa",
        }
    }

    pub fn default_config(self) -> RunConfig {
        match self {
            Algorithm::Aefa => RunConfig::aefa(),
            Algorithm::AiAefa => RunConfig::ai_aefa(),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "aefa" => Ok(Algorithm::Aefa),
            "ai-aefa" | "ai_aefa" | "aiaefa" => Ok(Algorithm::AiAefa),
            _ => Err(Error::UnknownAlgorithm(s.to_string())),
        }
    }
}

/// Evaluation budget per dimension class: `500·N` up to 10 dimensions,
/// `1000·N` above.
pub fn default_max_evaluations(dim: usize, population_size: usize) -> usize {
    if dim <= 10 {
        500 * population_size
    } else {
        1000 * population_size
    }
}

/// Everything one optimisation run needs besides the problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub population_size: usize,
    pub max_iterations: usize,
    pub max_evaluations: usize,
    pub schedule: CoulombSchedule,
    /// Velocity clamp as a fraction of each dimension's range; `None` leaves
    /// velocities unbounded.
    pub velocity_bound_fraction: Option<f64>,
    pub kbest_mode: KBestMode,
    pub seed: u64,
    /// Guard added to the inter-agent distance in the force denominator.
    pub epsilon_force: f64,
    /// Rounding rule; `None` derives it from the problem's integer mask.
    pub position_mode: Option<PositionMode>,
    pub trace: bool,
}

impl RunConfig {
    /// Chaotic log-sigmoid schedule (K0=500, β=6, δ=300), bounded velocities,
    /// every agent attracting.
    pub fn ai_aefa() -> Self {
        Self {
            population_size: 30,
            max_iterations: 500,
            max_evaluations: 15_000,
            schedule: CoulombSchedule::ChaoticSigmoid {
                sigmoid: SigmoidK::default(),
                chaos: ChaoticState::default(),
            },
            velocity_bound_fraction: Some(0.5),
            kbest_mode: KBestMode::AllAgents,
            seed: 0,
            epsilon_force: 1e-10,
            position_mode: None,
            trace: false,
        }
    }

    /// Exponential schedule (K0=500, α=30), shrinking attractor set, no
    /// velocity clamp.
    pub fn aefa() -> Self {
        Self {
            schedule: CoulombSchedule::Exponential(ExponentialK::default()),
            velocity_bound_fraction: None,
            kbest_mode: KBestMode::LinearNTo2,
            ..Self::ai_aefa()
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_trace(mut self, trace: bool) -> Self {
        self.trace = trace;
        self
    }

    /// Sets `N`, `MaxFE` and derives `l_max = MaxFE / N`.
    pub fn with_budget(mut self, population_size: usize, max_evaluations: usize) -> Self {
        self.population_size = population_size;
        self.max_evaluations = max_evaluations;
        self.max_iterations = (max_evaluations / population_size.max(1)).max(1);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.population_size < 2 {
            return Err(Error::InvalidConfig(format!(
                "population size must be at least 2, got {}",
                self.population_size
            )));
        }
        if self.max_iterations < 1 {
            return Err(Error::InvalidConfig("max_iterations must be at least 1".into()));
        }
        if self.max_evaluations < self.population_size {
            return Err(Error::InvalidConfig(format!(
                "max_evaluations ({}) must cover one population ({})",
                self.max_evaluations, self.population_size
            )));
        }
        if let Some(f) = self.velocity_bound_fraction {
            check_fraction(f)?;
        }
        if !(self.epsilon_force > 0.0) {
            return Err(Error::InvalidConfig("epsilon_force must be positive".into()));
        }
        self.schedule.validate()
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        Self::ai_aefa()
    }
}
