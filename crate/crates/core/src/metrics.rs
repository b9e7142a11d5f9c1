//! Run aggregation and comparison statistics.

use std::time::Instant;

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal, StudentsT};

use crate::config::RunConfig;
use crate::engine::{run, RunResult};
use crate::error::{Error, Result};
use crate::problems::ProblemSpec;
use crate::rng::RngStream;

/// Significance level for verdicts.
pub const ALPHA: f64 = 0.05;

/// Largest reduced sample size using the exact Wilcoxon distribution.
pub const WILCOXON_EXACT_LIMIT: usize = 25;

/// Per-run outcomes of one problem × algorithm cell.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunSummary {
    pub objectives: Vec<f64>,
    pub violations: Vec<f64>,
    pub wall_times: Vec<f64>,
    pub feasible: Vec<bool>,
}

impl RunSummary {
    pub fn from_results<'a>(results: impl IntoIterator<Item = &'a RunResult>) -> Self {
        let mut s = Self::default();
        for r in results {
            s.push(r);
        }
        s
    }

    pub fn push(&mut self, result: &RunResult) {
        self.objectives.push(result.best_objective);
        self.violations.push(result.best_violation);
        self.wall_times.push(result.wall_time);
        self.feasible.push(result.is_feasible());
    }

    pub fn len(&self) -> usize {
        self.objectives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objectives.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanStdFr {
    pub mean: f64,
    /// Sample standard deviation; 0 for a single run.
    pub std: f64,
    /// Percentage of feasible runs.
    pub feasibility_rate: f64,
}

pub fn mean_std_fr(summary: &RunSummary) -> Result<MeanStdFr> {
    let n = summary.len();
    if n == 0 {
        return Err(Error::Empty("run summary"));
    }
    if summary.feasible.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: summary.feasible.len(),
        });
    }
    let mean = summary.objectives.iter().sum::<f64>() / n as f64;
    let std = if n > 1 {
        (summary.objectives.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
    } else {
        0.0
    };
    let feasible = summary.feasible.iter().filter(|&&f| f).count();
    Ok(MeanStdFr {
        mean,
        std,
        feasibility_rate: 100.0 * feasible as f64 / n as f64,
    })
}

/// Maximum possible improvement index `|(a − b)/(1 − b)|`.
pub fn mpii(mean_ai: f64, mean_other: f64) -> Result<f64> {
    let gap = 1.0 - mean_other;
    if gap == 0.0 {
        return Err(Error::Undefined("MPII reference mean equals 1"));
    }
    Ok(((mean_ai - mean_other) / gap).abs())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    /// First sample significantly larger.
    #[serde(rename = "+")]
    Better,
    #[serde(rename = "=")]
    Tie,
    /// First sample significantly smaller.
    #[serde(rename = "-")]
    Worse,
}

impl Verdict {
    pub fn symbol(self) -> &'static str {
        match self {
            Verdict::Better => "+",
            Verdict::Tie => "=",
            Verdict::Worse => "-",
        }
    }

    /// Flips the sense for minimisation, where smaller is better.
    pub fn for_minimization(self) -> Self {
        match self {
            Verdict::Better => Verdict::Worse,
            Verdict::Worse => Verdict::Better,
            Verdict::Tie => Verdict::Tie,
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WilcoxonResult {
    /// `min(W+, W−)`.
    pub statistic: f64,
    pub w_plus: f64,
    pub w_minus: f64,
    /// Non-zero differences used.
    pub n: usize,
    pub p_value: f64,
    pub exact: bool,
    pub verdict: Verdict,
}

/// Average ranks of `values` (1-based), doubled so ties stay integral.
fn doubled_ranks(values: &[f64]) -> Vec<u64> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0u64; values.len()];
    let mut start = 0;
    while start < idx.len() {
        let mut end = start + 1;
        while end < idx.len() && values[idx[end]] == values[idx[start]] {
            end += 1;
        }
        // positions start+1..=end averaged, times two
        let doubled = (start + 1 + end) as u64;
        for &i in &idx[start..end] {
            ranks[i] = doubled;
        }
        start = end;
    }
    ranks
}

/// Two-sided paired signed-rank test of `a` against `b`.
///
/// Zero differences are dropped and tied magnitudes share average ranks. Up
/// to [`WILCOXON_EXACT_LIMIT`] remaining pairs the null distribution of `W+`
/// is counted exactly; beyond that a tie-corrected normal approximation is
/// used.
pub fn wilcoxon_signed_rank(a: &[f64], b: &[f64]) -> Result<WilcoxonResult> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).filter(|d| *d != 0.0).collect();
    let n = diffs.len();
    if n == 0 {
        return Ok(WilcoxonResult {
            statistic: 0.0,
            w_plus: 0.0,
            w_minus: 0.0,
            n: 0,
            p_value: 1.0,
            exact: true,
            verdict: Verdict::Tie,
        });
    }
    let magnitudes: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
    let ranks = doubled_ranks(&magnitudes);
    let plus2: u64 = diffs
        .iter()
        .zip(&ranks)
        .filter(|(d, _)| **d > 0.0)
        .map(|(_, r)| r)
        .sum();
    let total2: u64 = ranks.iter().sum();
    let minus2 = total2 - plus2;
    let w_plus = plus2 as f64 / 2.0;
    let w_minus = minus2 as f64 / 2.0;

    let exact = n <= WILCOXON_EXACT_LIMIT;
    let p_value = if exact {
        exact_two_sided(&ranks, plus2.min(minus2))
    } else {
        normal_two_sided(&ranks, plus2)
    };
    let verdict = if p_value < ALPHA && w_plus > w_minus {
        Verdict::Better
    } else if p_value < ALPHA && w_plus < w_minus {
        Verdict::Worse
    } else {
        Verdict::Tie
    };
    Ok(WilcoxonResult {
        statistic: w_plus.min(w_minus),
        w_plus,
        w_minus,
        n,
        p_value,
        exact,
        verdict,
    })
}

/// `min(1, 2·P(W ≤ w))` where `W` is the sum of a random subset of the
/// doubled ranks, each included with probability ½.
fn exact_two_sided(ranks: &[u64], w: u64) -> f64 {
    let total: u64 = ranks.iter().sum();
    let mut counts = vec![0f64; total as usize + 1];
    counts[0] = 1.0;
    let mut reach = 0usize;
    for &r in ranks {
        let r = r as usize;
        for s in (0..=reach).rev() {
            if counts[s] != 0.0 {
                counts[s + r] += counts[s];
            }
        }
        reach += r;
    }
    let tail: f64 = counts[..=w as usize].iter().sum();
    let all = 2f64.powi(ranks.len() as i32);
    (2.0 * tail / all).min(1.0)
}

fn normal_two_sided(ranks: &[u64], plus2: u64) -> f64 {
    let n = ranks.len() as f64;
    let mean = n * (n + 1.0) / 4.0;
    // Σ r² over undoubled ranks = n(n+1)(2n+1)/6 minus the tie correction.
    let var = ranks.iter().map(|&r| (r as f64 / 2.0).powi(2)).sum::<f64>() / 4.0;
    if var <= 0.0 {
        return 1.0;
    }
    let z = (plus2 as f64 / 2.0 - mean) / var.sqrt();
    let normal = Normal::standard();
    (2.0 * normal.cdf(-z.abs())).min(1.0)
}

/// Two-sided Welch t-test p-value.
pub fn t_test(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::Empty("t-test needs at least two values per sample"));
    }
    let moments = |s: &[f64]| {
        let n = s.len() as f64;
        let m = s.iter().sum::<f64>() / n;
        let v = s.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
        (n, m, v)
    };
    let (na, ma, va) = moments(a);
    let (nb, mb, vb) = moments(b);
    let se2 = va / na + vb / nb;
    if se2 == 0.0 {
        return Ok(if ma == mb { 1.0 } else { 0.0 });
    }
    let t = (ma - mb) / se2.sqrt();
    let df = se2 * se2 / ((va / na).powi(2) / (na - 1.0) + (vb / nb).powi(2) / (nb - 1.0));
    let dist = StudentsT::new(0.0, 1.0, df).map_err(|_| Error::Undefined("Welch degrees of freedom"))?;
    Ok((2.0 * dist.cdf(-t.abs())).min(1.0))
}

/// `(T2 − T1) / T1`.
pub fn time_complexity_ratio(t1: f64, t2: f64) -> Result<f64> {
    if !(t1 > 0.0) {
        return Err(Error::Undefined("bare evaluation time is not positive"));
    }
    Ok((t2 - t1) / t1)
}

/// Evaluations spent per problem by default in [`timing_complexity`].
pub const TIMING_BUDGET: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimingReport {
    /// Mean seconds for `fe_budget` bare evaluations.
    pub t1: f64,
    /// Mean seconds for a full run with the same budget.
    pub t2: f64,
    pub ratio: f64,
}

/// Measures algorithm overhead relative to bare objective evaluation.
///
/// Runs on the calling thread. One untimed warm-up pass of each stage
/// precedes the measurement.
pub fn timing_complexity(problems: &[&ProblemSpec], config: &RunConfig, fe_budget: usize) -> Result<TimingReport> {
    if problems.is_empty() {
        return Err(Error::Empty("problem set"));
    }
    let config = config
        .clone()
        .with_budget(config.population_size, fe_budget)
        .with_trace(false);

    let bare = |p: &ProblemSpec| {
        let mut rng = RngStream::new(config.seed);
        let space = p.space();
        let points: Vec<Vec<f64>> = (0..fe_budget.min(1024))
            .map(|_| {
                space
                    .lower()
                    .iter()
                    .zip(space.upper())
                    .map(|(&lo, &hi)| rng.uniform_in(lo, hi))
                    .collect()
            })
            .collect();
        let start = Instant::now();
        let mut sink = 0.0;
        for i in 0..fe_budget {
            let f = p.evaluate(&points[i % points.len()]);
            sink += f.objective + f.violation;
        }
        std::hint::black_box(sink);
        start.elapsed().as_secs_f64()
    };

    for p in problems {
        bare(p);
        run(p, &config)?;
    }
    let mut t1 = 0.0;
    let mut t2 = 0.0;
    for p in problems {
        t1 += bare(p);
        let start = Instant::now();
        run(p, &config)?;
        t2 += start.elapsed().as_secs_f64();
    }
    let k = problems.len() as f64;
    let (t1, t2) = (t1 / k, t2 / k);
    Ok(TimingReport {
        t1,
        t2,
        ratio: time_complexity_ratio(t1, t2)?,
    })
}
