//! Coulomb-constant schedules.
//!
//! Two families are provided. [`ExponentialK`] is the classic decaying constant
//! `K0·exp(−α·l/l_max)`. [`SigmoidK`] replaces it with a log-sigmoid that holds
//! a high value for the first half of the run, and [`final_k`] adds a
//! normalised sine-map term on top whose envelope `g(l)` shrinks linearly from
//! `a` to `b`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentialK {
    pub k0: f64,
    pub alpha: f64,
}

impl ExponentialK {
    pub fn new(k0: f64, alpha: f64) -> Result<Self> {
        let s = Self { k0, alpha };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k0 > 0.0 && self.alpha > 0.0 {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!(
                "exponential schedule needs k0 > 0 and alpha > 0 (k0={}, alpha={})",
                self.k0, self.alpha
            )))
        }
    }

    /// `k0·exp(−alpha·l/l_max)`.
    pub fn value(&self, l: usize, l_max: usize) -> Result<f64> {
        if l_max == 0 {
            return Err(Error::InvalidConfig("l_max must be at least 1".into()));
        }
        Ok(self.k0 * (-self.alpha * l as f64 / l_max as f64).exp())
    }
}

impl Default for ExponentialK {
    fn default() -> Self {
        Self { k0: 500.0, alpha: 30.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SigmoidK {
    pub k0: f64,
    pub beta: f64,
    pub delta: f64,
}

impl SigmoidK {
    pub fn new(k0: f64, beta: f64, delta: f64) -> Result<Self> {
        let s = Self { k0, beta, delta };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k0 > 0.0 && self.beta > 0.0 && self.delta > 0.0 {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!(
                "sigmoid schedule needs positive k0, beta, delta (k0={}, beta={}, delta={})",
                self.k0, self.beta, self.delta
            )))
        }
    }

    /// `k0 / (1 + exp(beta·(l − l_max/2)/delta))`.
    pub fn value(&self, l: usize, l_max: usize) -> f64 {
        let shift = l as f64 - l_max as f64 / 2.0;
        self.k0 / (1.0 + (self.beta * shift / self.delta).exp())
    }
}

impl Default for SigmoidK {
    fn default() -> Self {
        Self {
            k0: 500.0,
            beta: 6.0,
            delta: 300.0,
        }
    }
}

/// Sine-map state plus the normalisation envelope.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChaoticState {
    pub k1: f64,
    pub r: f64,
    pub r1: f64,
    pub r2: f64,
    pub a: f64,
    pub b: f64,
}

impl Default for ChaoticState {
    fn default() -> Self {
        Self {
            k1: 0.7,
            r: 4.0,
            r1: 0.0,
            r2: 1.0,
            a: 20.0,
            b: 1e-10,
        }
    }
}

impl ChaoticState {
    pub fn validate(&self) -> Result<()> {
        if !self.k1.is_finite() {
            return Err(Error::InvalidConfig(format!("k1 must be finite, got {}", self.k1)));
        }
        if !(self.r > 0.0) {
            return Err(Error::InvalidConfig(format!("r must be positive, got {}", self.r)));
        }
        if !(self.r1 < self.r2) {
            return Err(Error::InvalidConfig(format!(
                "chaotic range needs r1 < r2 (r1={}, r2={})",
                self.r1, self.r2
            )));
        }
        if !(self.a > self.b && self.b > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "envelope needs a > b > 0 (a={}, b={})",
                self.a, self.b
            )));
        }
        Ok(())
    }

    /// One sine-map iteration: `k1 ← (r/4)·sin(π·k1)`.
    pub fn step(&mut self) {
        self.k1 = self.r / 4.0 * (PI * self.k1).sin();
    }

    pub fn stepped(mut self) -> Self {
        self.step();
        self
    }

    /// Envelope `g(l) = a − (l/l_max)·(a − b)`.
    pub fn envelope(&self, l: usize, l_max: usize) -> f64 {
        debug_assert!(l_max > 0);
        // Convex-combination form hits `b` exactly at l = l_max.
        let t = l as f64 / l_max as f64;
        (1.0 - t) * self.a + t * self.b
    }

    /// Maps `k1` from `[r1, r2]` onto `[0, g]`.
    pub fn normalize(&self, g: f64) -> Result<f64> {
        if self.r1 == self.r2 {
            return Err(Error::Undefined("chaotic range r1 == r2"));
        }
        Ok((self.k1 - self.r1) * g / (self.r2 - self.r1))
    }
}

/// Chaotic log-sigmoid constant for iteration `l`.
///
/// Advances `state` by one sine-map step, then returns
/// `normalize(g(l)) + sigmoid(l)`.
pub fn final_k(sigmoid: &SigmoidK, state: &mut ChaoticState, l: usize, l_max: usize) -> Result<f64> {
    state.step();
    let g = state.envelope(l, l_max);
    Ok(state.normalize(g)? + sigmoid.value(l, l_max))
}

/// The Coulomb-constant rule a run uses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CoulombSchedule {
    Exponential(ExponentialK),
    ChaoticSigmoid { sigmoid: SigmoidK, chaos: ChaoticState },
}

impl CoulombSchedule {
    pub fn validate(&self) -> Result<()> {
        match self {
            CoulombSchedule::Exponential(e) => e.validate(),
            CoulombSchedule::ChaoticSigmoid { sigmoid, chaos } => {
                sigmoid.validate()?;
                chaos.validate()
            }
        }
    }

    /// Constant for iteration `l`. For the chaotic variant this advances the
    /// sine map, so it must be called exactly once per iteration.
    pub fn advance(&mut self, l: usize, l_max: usize) -> Result<f64> {
        match self {
            CoulombSchedule::Exponential(e) => e.value(l, l_max),
            CoulombSchedule::ChaoticSigmoid { sigmoid, chaos } => final_k(sigmoid, chaos, l, l_max),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fig2() -> SigmoidK {
        SigmoidK::new(500.0, 3.0, 100.0).unwrap()
    }

    #[test]
    fn exponential_examples() {
        let e = ExponentialK::new(500.0, 30.0).unwrap();
        assert_eq!(e.value(0, 500).unwrap(), 500.0);
        let end = e.value(500, 500).unwrap();
        assert!((end - 500.0 * (-30.0f64).exp()).abs() < 1e-20);
        assert!((end - 4.6789e-11).abs() / 4.6789e-11 < 1e-4);
        let half = ExponentialK::new(1.0, std::f64::consts::LN_2).unwrap();
        assert!((half.value(7, 7).unwrap() - 0.5).abs() < 1e-15);
        assert!(e.value(0, 0).is_err());
        assert!(ExponentialK::new(0.0, 1.0).is_err());
    }

    #[test]
    fn sigmoid_examples() {
        let s = fig2();
        assert_eq!(s.value(250, 500), 250.0);
        let start = 500.0 / (1.0 + (-7.5f64).exp());
        let end = 500.0 / (1.0 + 7.5f64.exp());
        assert!((s.value(0, 500) - start).abs() < 1e-10);
        assert!((s.value(500, 500) - end).abs() < 1e-12);
        // quoted to four decimals
        assert!((s.value(0, 500) - 499.7235).abs() < 2e-4);
        assert!((s.value(500, 500) - 0.2765).abs() < 2e-4);
    }

    #[test]
    fn sine_map_examples() {
        let base = ChaoticState::default();
        assert_eq!(ChaoticState { k1: 0.5, ..base }.stepped().k1, 1.0);
        assert_eq!(ChaoticState { k1: 0.0, ..base }.stepped().k1, 0.0);
        assert!(ChaoticState { k1: 1.0, ..base }.stepped().k1.abs() < 1e-15);
    }

    #[test]
    fn envelope_examples() {
        let c = ChaoticState::default();
        assert_eq!(c.envelope(0, 500), 20.0);
        assert!((c.envelope(500, 500) - 1e-10).abs() < 1e-20);
        assert!((c.envelope(250, 500) - (10.0 + 5e-11)).abs() < 1e-12);
    }

    #[test]
    fn normalize_examples() {
        let c = ChaoticState {
            k1: 0.0,
            ..ChaoticState::default()
        };
        assert_eq!(c.normalize(7.0).unwrap(), 0.0);
        assert_eq!(ChaoticState { k1: 1.0, ..c }.normalize(10.0).unwrap(), 10.0);
        assert_eq!(ChaoticState { k1: 0.25, ..c }.normalize(20.0).unwrap(), 5.0);
        let degenerate = ChaoticState { r1: 1.0, r2: 1.0, ..c };
        assert!(degenerate.normalize(1.0).is_err());
    }

    #[test]
    fn final_k_examples() {
        let s = fig2();
        // k1 = 1 steps to sin(pi) ~ 1e-16, so the chaotic term is ~ 0
        let mut lower = ChaoticState {
            k1: 1.0,
            ..ChaoticState::default()
        };
        let k = final_k(&s, &mut lower, 100, 500).unwrap();
        assert!((k - s.value(100, 500)).abs() < 1e-12);
        let mut at_zero = ChaoticState {
            k1: 0.0,
            ..ChaoticState::default()
        };
        assert_eq!(final_k(&s, &mut at_zero, 100, 500).unwrap(), s.value(100, 500));

        let mut half = ChaoticState {
            k1: 0.5,
            ..ChaoticState::default()
        };
        let k = final_k(&s, &mut half, 0, 500).unwrap();
        assert_eq!(half.k1, 1.0);
        assert!((k - (20.0 + 500.0 / (1.0 + (-7.5f64).exp()))).abs() < 1e-10);
        assert!((k - 519.7235).abs() < 2e-4);

        let mut any = ChaoticState::default();
        for _ in 0..10 {
            any.step();
        }
        let k = final_k(&s, &mut any, 500, 500).unwrap();
        assert!(k <= s.value(500, 500) + 1e-10 + 1e-15);
        assert!(k > 0.0);
    }

    #[test]
    fn sigmoid_above_exponential_in_early_half() {
        let s = fig2();
        let e = ExponentialK::new(500.0, 30.0).unwrap();
        for l in 50..=250 {
            assert!(s.value(l, 500) > e.value(l, 500).unwrap(), "l = {l}");
        }
    }

    #[test]
    fn schedule_advance_steps_chaos_once() {
        let mut sched = CoulombSchedule::ChaoticSigmoid {
            sigmoid: SigmoidK::default(),
            chaos: ChaoticState::default(),
        };
        sched.advance(1, 500).unwrap();
        let CoulombSchedule::ChaoticSigmoid { chaos, .. } = &sched else {
            unreachable!()
        };
        assert_eq!(chaos.k1, ChaoticState::default().stepped().k1);
    }

    #[test]
    fn schedule_validation() {
        let bad = CoulombSchedule::ChaoticSigmoid {
            sigmoid: SigmoidK::default(),
            chaos: ChaoticState {
                a: 1.0,
                b: 2.0,
                ..ChaoticState::default()
            },
        };
        assert!(bad.validate().is_err());
        assert!(CoulombSchedule::Exponential(ExponentialK::default()).validate().is_ok());
    }

    proptest! {
        #[test]
        fn sigmoid_strictly_decreasing(l1 in 0usize..500, gap in 1usize..50) {
            let s = fig2();
            let l2 = (l1 + gap).min(500);
            prop_assume!(l2 > l1);
            prop_assert!(s.value(l1, 500) > s.value(l2, 500));
        }

        #[test]
        fn sine_map_stays_in_unit_interval(k1 in 0.0f64..1.0) {
            let mut c = ChaoticState { k1, ..ChaoticState::default() };
            for _ in 0..200 {
                c.step();
                prop_assert!((0.0..=1.0).contains(&c.k1));
            }
        }

        #[test]
        fn normalized_within_envelope(k1 in 0.0f64..=1.0, g in 0.0f64..50.0) {
            let c = ChaoticState { k1, ..ChaoticState::default() };
            let n = c.normalize(g).unwrap();
            prop_assert!(n >= 0.0 && n <= g);
        }

        #[test]
        fn envelope_is_affine(l in 0usize..400, step in 1usize..50) {
            let c = ChaoticState::default();
            let g0 = c.envelope(l, 500);
            let g1 = c.envelope(l + step, 500);
            let g2 = c.envelope(l + 2 * step, 500);
            prop_assert!((g2 - 2.0 * g1 + g0).abs() < 1e-12);
        }
    }
}
