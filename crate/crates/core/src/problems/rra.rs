//! Reliability-redundancy allocation with active redundancy.
//!
//! Each subsystem `i` has a component reliability `r_i` (continuous) and a
//! redundancy level `n_i` (integer), giving subsystem reliability
//! `1 − (1 − r_i)^{n_i}`. The system reliability composes those through a
//! series, series-parallel or bridge network, subject to the usual three
//! resource limits:
//!
//! * volume `Σ v_i·n_i² ≤ V`
//! * cost `Σ α_i·(−T / ln r_i)^{β_i}·(n_i + exp(n_i/4)) ≤ C`
//! * weight `Σ w_i·n_i·exp(n_i/4) ≤ W`
//!
//! Decision vectors are laid out as `[r_1..r_s, n_1..n_s]`: continuous
//! dimensions first, integer dimensions last.

use std::sync::Arc;

use super::ProblemSpec;
use crate::constraints::ConstraintSet;
use crate::error::{Error, Result};
use crate::space::SearchSpace;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Topology {
    Series,
    /// Subsystems 1–2 in series, in parallel with (3 ∥ 4) in series with 5.
    SeriesParallel,
    /// Five-subsystem complex bridge.
    Bridge,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RraSystem {
    pub topology: Topology,
    /// Cost scale per subsystem.
    pub alpha: Vec<f64>,
    /// Cost exponent per subsystem.
    pub beta: Vec<f64>,
    pub volume: Vec<f64>,
    pub weight: Vec<f64>,
    pub volume_limit: f64,
    pub cost_limit: f64,
    pub weight_limit: f64,
    /// Mission time in the cost term.
    pub mission_time: f64,
    pub r_bounds: (f64, f64),
    pub n_bounds: (u32, u32),
}

/// `1 − (1 − r)^n`.
pub fn subsystem_reliability(r: f64, n: f64) -> f64 {
    1.0 - (1.0 - r).powf(n)
}

fn compose(topology: Topology, rel: &[f64]) -> f64 {
    match topology {
        Topology::Series => rel.iter().product(),
        Topology::SeriesParallel => {
            let upper = rel[0] * rel[1];
            let lower = (1.0 - (1.0 - rel[2]) * (1.0 - rel[3])) * rel[4];
            1.0 - (1.0 - upper) * (1.0 - lower)
        }
        Topology::Bridge => {
            let [r1, r2, r3, r4, r5] = [rel[0], rel[1], rel[2], rel[3], rel[4]];
            r1 * r2 + r3 * r4 + r1 * r4 * r5 + r2 * r3 * r5
                - r1 * r2 * r3 * r4
                - r1 * r2 * r3 * r5
                - r1 * r2 * r4 * r5
                - r1 * r3 * r4 * r5
                - r2 * r3 * r4 * r5
                + 2.0 * r1 * r2 * r3 * r4 * r5
        }
    }
}

impl RraSystem {
    pub fn subsystems(&self) -> usize {
        self.alpha.len()
    }

    /// System reliability for component reliabilities `r` and redundancy
    /// levels `n`. Rejects inputs outside `(0, 1)` or below one component.
    pub fn reliability(&self, r: &[f64], n: &[u32]) -> Result<f64> {
        let s = self.subsystems();
        if r.len() != s || n.len() != s {
            return Err(Error::DimensionMismatch {
                expected: s,
                found: if r.len() != s { r.len() } else { n.len() },
            });
        }
        if let Some(bad) = r.iter().find(|&&ri| !(ri > 0.0 && ri < 1.0)) {
            return Err(Error::OutOfRange(format!("component reliability {bad} not in (0, 1)")));
        }
        if n.contains(&0) {
            return Err(Error::OutOfRange("redundancy level must be at least 1".into()));
        }
        let n: Vec<f64> = n.iter().map(|&k| k as f64).collect();
        Ok(self.reliability_unchecked(r, &n))
    }

    fn reliability_unchecked(&self, r: &[f64], n: &[f64]) -> f64 {
        let rel: Vec<f64> = r
            .iter()
            .zip(n)
            .map(|(&ri, &ni)| subsystem_reliability(ri, ni))
            .collect();
        compose(self.topology, &rel)
    }

    fn split<'a>(&self, x: &'a [f64]) -> (&'a [f64], &'a [f64]) {
        x.split_at(self.subsystems())
    }

    /// `Σ v_i n_i² − V`; non-positive when the volume limit holds.
    pub fn volume_constraint(&self, n: &[f64]) -> f64 {
        self.volume.iter().zip(n).map(|(v, k)| v * k * k).sum::<f64>() - self.volume_limit
    }

    /// `Σ α_i (−T/ln r_i)^β_i (n_i + e^{n_i/4}) − C`.
    pub fn cost_constraint(&self, r: &[f64], n: &[f64]) -> f64 {
        let t = self.mission_time;
        self.alpha
            .iter()
            .zip(&self.beta)
            .zip(r.iter().zip(n))
            .map(|((a, b), (ri, k))| a * (-t / ri.ln()).powf(*b) * (k + (k / 4.0).exp()))
            .sum::<f64>()
            - self.cost_limit
    }

    /// `Σ w_i n_i e^{n_i/4} − W`.
    pub fn weight_constraint(&self, n: &[f64]) -> f64 {
        self.weight
            .iter()
            .zip(n)
            .map(|(w, k)| w * k * (k / 4.0).exp())
            .sum::<f64>()
            - self.weight_limit
    }

    pub fn search_space(&self) -> SearchSpace {
        let s = self.subsystems();
        let (rlo, rhi) = self.r_bounds;
        let (nlo, nhi) = self.n_bounds;
        let mut lower = vec![rlo; s];
        let mut upper = vec![rhi; s];
        lower.extend(std::iter::repeat_n(nlo as f64, s));
        upper.extend(std::iter::repeat_n(nhi as f64, s));
        let mut mask = vec![false; s];
        mask.extend(std::iter::repeat_n(true, s));
        SearchSpace::with_integers(lower, upper, mask).expect("valid RRA bounds")
    }

    /// Maximisation problem over `[r, n]` with the three resource constraints.
    pub fn into_problem(self, name: &str) -> ProblemSpec {
        let sys = Arc::new(self);
        let space = sys.search_space();
        let (o, v, c, w) = (sys.clone(), sys.clone(), sys.clone(), sys.clone());
        let constraints = ConstraintSet::new()
            .inequality(move |x| {
                let (_, n) = v.split(x);
                v.volume_constraint(n)
            })
            .inequality(move |x| {
                let (r, n) = c.split(x);
                c.cost_constraint(r, n)
            })
            .inequality(move |x| {
                let (_, n) = w.split(x);
                w.weight_constraint(n)
            });
        ProblemSpec::new(name, space, move |x| {
            let (r, n) = o.split(x);
            o.reliability_unchecked(r, n)
        })
        .maximize()
        .with_constraints(constraints)
    }
}

const R_BOUNDS: (f64, f64) = (0.5, 1.0 - 1e-6);

/// Five-subsystem series system.
pub fn series_system() -> RraSystem {
    RraSystem {
        topology: Topology::Series,
        alpha: [2.33, 1.45, 0.541, 8.05, 1.95].iter().map(|a| a * 1e-5).collect(),
        beta: vec![1.5; 5],
        volume: vec![1.0, 2.0, 3.0, 4.0, 2.0],
        weight: vec![7.0, 8.0, 8.0, 6.0, 9.0],
        volume_limit: 110.0,
        cost_limit: 175.0,
        weight_limit: 200.0,
        mission_time: 1000.0,
        r_bounds: R_BOUNDS,
        n_bounds: (1, 5),
    }
}

pub fn series_parallel_system() -> RraSystem {
    RraSystem {
        topology: Topology::SeriesParallel,
        alpha: [2.5, 1.45, 0.541, 0.541, 2.1].iter().map(|a| a * 1e-5).collect(),
        beta: vec![1.5; 5],
        volume: vec![2.0, 4.0, 5.0, 8.0, 4.0],
        weight: vec![3.5, 4.0, 4.0, 3.5, 4.5],
        volume_limit: 180.0,
        cost_limit: 175.0,
        weight_limit: 100.0,
        mission_time: 1000.0,
        r_bounds: R_BOUNDS,
        n_bounds: (1, 5),
    }
}

/// Complex bridge; same resource data as the series system.
pub fn bridge_system() -> RraSystem {
    RraSystem {
        topology: Topology::Bridge,
        ..series_system()
    }
}

/// Four-stage overspeed protection system of a gas turbine (series).
pub fn overspeed_system() -> RraSystem {
    RraSystem {
        topology: Topology::Series,
        alpha: [1.0, 2.3, 0.3, 2.3].iter().map(|a| a * 1e-5).collect(),
        beta: vec![1.5; 4],
        volume: vec![1.0, 2.0, 3.0, 2.0],
        weight: vec![6.0, 6.0, 8.0, 7.0],
        volume_limit: 250.0,
        cost_limit: 400.0,
        weight_limit: 500.0,
        mission_time: 1000.0,
        r_bounds: R_BOUNDS,
        n_bounds: (1, 10),
    }
}

fn layout(r: &[f64], n: &[f64]) -> Vec<f64> {
    r.iter().chain(n).copied().collect()
}

pub fn all() -> Vec<ProblemSpec> {
    vec![
        series_system()
            .into_problem("rra-series")
            .with_description("series system, 5 subsystems (Kuo et al.)")
            .with_known_best(
                0.931682,
                Some(layout(
                    &[0.7793988, 0.8718370, 0.9028853, 0.7114025, 0.7877994],
                    &[3.0, 2.0, 2.0, 3.0, 3.0],
                )),
                "IA (Hsieh 2011), TLNNABC (Kundu 2022), INGHS (Ouyang 2015)",
            ),
        series_parallel_system()
            .into_problem("rra-series-parallel")
            .with_description("series-parallel system, 5 subsystems")
            .with_known_best(
                0.99997665,
                Some(layout(
                    &[0.8196592, 0.8449810, 0.8955062, 0.8955063, 0.8684477],
                    &[2.0, 2.0, 2.0, 2.0, 4.0],
                )),
                "IA (Hsieh 2011), INGHS (Ouyang 2015)",
            ),
        bridge_system()
            .into_problem("rra-bridge")
            .with_description("complex bridge system, 5 subsystems")
            .with_known_best(
                0.99988964,
                Some(layout(
                    &[0.8280858, 0.8578041, 0.9142410, 0.6481481, 0.7041556],
                    &[3.0, 3.0, 2.0, 4.0, 1.0],
                )),
                "IA (Hsieh 2011), TLNNABC (Kundu 2022), INGHS (Ouyang 2015)",
            ),
        overspeed_system()
            .into_problem("rra-overspeed")
            .with_description("overspeed protection system of a gas turbine, 4 subsystems")
            .with_known_best(
                0.99995467,
                Some(layout(
                    &[0.9016147, 0.8882229, 0.9481413, 0.8499211],
                    &[5.0, 5.0, 4.0, 6.0],
                )),
                "NMDE (Zou 2011), EBBO (Garg 2015), INGHS (Ouyang 2015)",
            ),
    ]
}
