//! The optimisation loop.
//!
//! Each iteration sorts the population by the feasibility rules, draws the
//! Coulomb constant from the run's schedule, turns objectives into charges,
//! lets the attractor set pull every agent, moves agents under velocity and
//! position bounds, and keeps each agent's new position only if it does not
//! lose to the old one.
//!
//! Random draws follow a fixed order so that a seed reproduces a run exactly:
//! initial positions (agent, then dimension), then per iteration the force
//! factors (agent `i` ascending, attractor `j` ascending) followed by the
//! velocity factors (agent ascending, dimension ascending).

use std::time::Instant;

use crate::agent::{Agent, Fitness};
use crate::config::{PositionMode, RunConfig};
use crate::constraints::{precedes, ranking};
use crate::error::{Error, Result};
use crate::explain::IterationTrace;
use crate::problems::ProblemSpec;
use crate::rng::{RngStream, Uniform};
use crate::space::SearchSpace;

/// Parameters of the force computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForceField {
    pub epsilon_force: f64,
    pub kbest_size: usize,
    /// Agent mass; accelerations are `force / mass`.
    pub mass: f64,
}

impl Default for ForceField {
    fn default() -> Self {
        Self {
            epsilon_force: 1e-10,
            kbest_size: 2,
            mass: 1.0,
        }
    }
}

/// Outcome of one run. Objectives are on the problem's reported scale.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub best_position: Vec<f64>,
    pub best_objective: f64,
    pub best_violation: f64,
    pub evaluations_used: usize,
    pub iterations: usize,
    pub trace: Vec<IterationTrace>,
    /// Seconds.
    pub wall_time: f64,
}

impl RunResult {
    pub fn is_feasible(&self) -> bool {
        self.best_violation == 0.0
    }
}

/// Per-iteration view handed to a [`run_observed`] observer.
pub struct IterationView<'a> {
    pub record: &'a IterationTrace,
    pub agents: &'a [Agent],
    pub elite: &'a Agent,
}

/// Normalised charges.
///
/// `q_i = exp((f_i − max f)/(min f − max f))`, `Q_i = q_i / Σ q`. When every
/// objective is equal all `q_i` are 1.
pub fn compute_charges(objectives: &[f64]) -> Vec<f64> {
    if objectives.is_empty() {
        return Vec::new();
    }
    let (min, max) = objectives
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &f| {
            (lo.min(f), hi.max(f))
        });
    let q: Vec<f64> = if min == max {
        vec![1.0; objectives.len()]
    } else {
        objectives.iter().map(|&f| ((f - max) / (min - max)).exp()).collect()
    };
    let total: f64 = q.iter().sum();
    q.into_iter().map(|qi| qi / total).collect()
}

/// Total electrostatic force on every agent from the attractor set `kbest`.
///
/// `F_i = Σ_{j ∈ kbest, j ≠ i} rand_j · k · Q_i · Q_j · (x_j − x_i) / (R_ij + ε)`,
/// with one `rand_j` per pair shared by all dimensions.
pub fn compute_forces<U: Uniform>(
    positions: &[Vec<f64>],
    charges: &[f64],
    k: f64,
    field: &ForceField,
    kbest: &[usize],
    rng: &mut U,
) -> Vec<Vec<f64>> {
    let mut attractors = kbest.to_vec();
    attractors.sort_unstable();
    attractors.dedup();
    positions
        .iter()
        .enumerate()
        .map(|(i, xi)| {
            let mut force = vec![0.0; xi.len()];
            for &j in attractors.iter().filter(|&&j| j != i) {
                let xj = &positions[j];
                let r = euclidean(xi, xj);
                let scale = rng.uniform() * k * charges[i] * charges[j] / (r + field.epsilon_force);
                for ((f, a), b) in force.iter_mut().zip(xi).zip(xj) {
                    *f += scale * (b - a);
                }
            }
            force
        })
        .collect()
}

/// `v' = rand·v + a` per dimension, then clamped to `±fraction·(ub − lb)`
/// when a fraction is given.
pub fn update_velocity<U: Uniform>(
    space: &SearchSpace,
    velocity: &[f64],
    acceleration: &[f64],
    bound_fraction: Option<f64>,
    rng: &mut U,
) -> Vec<f64> {
    let mut v: Vec<f64> = velocity
        .iter()
        .zip(acceleration)
        .map(|(v, a)| rng.uniform() * v + a)
        .collect();
    if let Some(fraction) = bound_fraction {
        space.clamp_velocity_in_place(&mut v, fraction);
    }
    v
}

/// `x' = x + v`, rounded (half away from zero) on integer dimensions per
/// `mode`, then clamped into the box.
pub fn update_position(space: &SearchSpace, position: &[f64], velocity: &[f64], mode: PositionMode) -> Vec<f64> {
    let mask = space.integer_mask();
    let mut x: Vec<f64> = position
        .iter()
        .zip(velocity)
        .enumerate()
        .map(|(d, (x, v))| {
            let moved = x + v;
            if rounds(mode, mask[d]) {
                moved.round()
            } else {
                moved
            }
        })
        .collect();
    space.clamp_position_in_place(&mut x);
    x
}

fn rounds(mode: PositionMode, integer_dim: bool) -> bool {
    match mode {
        PositionMode::Continuous => false,
        PositionMode::Mixed => integer_dim,
        PositionMode::Integer => true,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Replacement {
    KeepOld,
    TakeNew,
}

/// Keeps the old entry only if it strictly precedes the new one.
pub fn greedy_replace(old: &Fitness, new: &Fitness) -> Replacement {
    if precedes(old, new) {
        Replacement::KeepOld
    } else {
        Replacement::TakeNew
    }
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn evaluate_checked(problem: &ProblemSpec, x: &[f64], agent: usize, iteration: usize) -> Result<Fitness> {
    let fit = problem.evaluate(x);
    if fit.objective.is_finite() && fit.violation.is_finite() {
        Ok(fit)
    } else {
        Err(Error::NonFiniteEvaluation { agent, iteration })
    }
}

/// Runs the optimiser on `problem`.
pub fn run(problem: &ProblemSpec, config: &RunConfig) -> Result<RunResult> {
    run_observed(problem, config, |_| {})
}

/// Like [`run`], calling `observer` after every completed iteration.
pub fn run_observed<F>(problem: &ProblemSpec, config: &RunConfig, mut observer: F) -> Result<RunResult>
where
    F: FnMut(&IterationView<'_>),
{
    config.validate()?;
    let started = Instant::now();
    let space = problem.space();
    let n = config.population_size;
    let l_max = config.max_iterations;
    let mode = config
        .position_mode
        .unwrap_or_else(|| PositionMode::from_mask(space.integer_mask()));
    let mut rng = RngStream::new(config.seed);
    let mut schedule = config.schedule.clone();
    let field = ForceField {
        epsilon_force: config.epsilon_force,
        kbest_size: n,
        mass: 1.0,
    };

    let mut agents = Vec::with_capacity(n);
    for i in 0..n {
        let mut x: Vec<f64> = space
            .lower()
            .iter()
            .zip(space.upper())
            .enumerate()
            .map(|(d, (&lo, &hi))| {
                let u = rng.uniform_in(lo, hi);
                if rounds(mode, space.integer_mask()[d]) {
                    u.round()
                } else {
                    u
                }
            })
            .collect();
        space.clamp_position_in_place(&mut x);
        let fit = evaluate_checked(problem, &x, i, 0)?;
        agents.push(Agent::at_rest(x, fit));
    }
    let mut evaluations = n;
    let fitness: Vec<Fitness> = agents.iter().map(|a| a.fitness).collect();
    let mut elite = agents[ranking(&fitness)[0]].clone();

    let mut trace = Vec::new();
    let mut iterations = 0;
    for l in 1..=l_max {
        if evaluations + n > config.max_evaluations {
            break;
        }
        let fitness: Vec<Fitness> = agents.iter().map(|a| a.fitness).collect();
        let order = ranking(&fitness);
        let k = schedule.advance(l, l_max)?;
        let objectives: Vec<f64> = fitness.iter().map(|f| f.objective).collect();
        let charges = compute_charges(&objectives);
        for (a, q) in agents.iter_mut().zip(&charges) {
            a.charge = *q;
        }
        let kbest_size = config.kbest_mode.size(n, l, l_max);
        let kbest = &order[..kbest_size];
        let positions: Vec<Vec<f64>> = agents.iter().map(|a| a.position.clone()).collect();
        let forces = compute_forces(
            &positions,
            &charges,
            k,
            &ForceField { kbest_size, ..field },
            kbest,
            &mut rng,
        );

        let leader = order[0];
        let leader_force = norm(&forces[leader]);
        let leader_charge = charges[leader];

        let mut candidates = Vec::with_capacity(n);
        for (agent, force) in agents.iter_mut().zip(&forces) {
            let acceleration: Vec<f64> = force.iter().map(|f| f / field.mass).collect();
            agent.velocity = update_velocity(
                space,
                &agent.velocity,
                &acceleration,
                config.velocity_bound_fraction,
                &mut rng,
            );
            candidates.push(update_position(space, &agent.position, &agent.velocity, mode));
        }
        for (i, (agent, x)) in agents.iter_mut().zip(candidates).enumerate() {
            let fit = evaluate_checked(problem, &x, i, l)?;
            if greedy_replace(&agent.fitness, &fit) == Replacement::TakeNew {
                agent.position = x;
                agent.fitness = fit;
            }
        }
        evaluations += n;
        iterations += 1;

        let fitness: Vec<Fitness> = agents.iter().map(|a| a.fitness).collect();
        let best_now = ranking(&fitness)[0];
        if precedes(&agents[best_now].fitness, &elite.fitness) {
            elite = agents[best_now].clone();
        }

        let record = IterationTrace {
            iteration: l,
            k_value: k,
            q_best: leader_charge,
            a_norm: leader_force / field.mass,
            e_norm: leader_force,
            f_best: problem.to_reported(elite.fitness.objective),
            x_norm: norm(&elite.position),
        };
        observer(&IterationView {
            record: &record,
            agents: &agents,
            elite: &elite,
        });
        if config.trace {
            trace.push(record);
        }
    }

    Ok(RunResult {
        best_objective: problem.to_reported(elite.fitness.objective),
        best_violation: elite.fitness.violation,
        best_position: elite.position,
        evaluations_used: evaluations,
        iterations,
        trace,
        wall_time: started.elapsed().as_secs_f64(),
    })
}
