//! Multi-run experiments driven by a TOML file.
//!
//! ```toml
//! problems = ["rra-series", "toy-quadratic"]
//! algorithms = ["ai-aefa", "aefa"]
//! runs = 20            # run i uses seed + i
//! seed = 1
//! out = "results"
//! trace = false        # per-run trace CSVs plus SHAP and correlation exports
//! parallel = 1         # worker threads; output is identical for any value
//! reference = "aefa"   # baseline for p-values, verdicts and MPII
//! time_complexity = false
//! surrogate = "linear" # or "knn"
//!
//! [ai-aefa]            # optional per-algorithm overrides
//! k0 = 500.0
//! beta = 6.0
//! delta = 300.0
//! population_size = 30
//! max_evaluations = 15000
//! ```
//!
//! Recognised override keys: `k0`, `alpha` (exponential schedule only),
//! `beta`, `delta`, `r`, `k1_init`, `a`, `b` (chaotic sigmoid only),
//! `population_size`, `max_iterations`, `max_evaluations`,
//! `velocity_bound_fraction` (0 disables the clamp), `kbest_mode`
//! (`linear-n-to-2` or `all-agents`), `position_mode` (`continuous`, `mixed`,
//! `integer`) and `epsilon_force`. Without `max_evaluations` the budget is
//! `500·N` for problems of up to 10 dimensions and `1000·N` above; without
//! `max_iterations`, `l_max = MaxFE / N`.
//!
//! Output files in `out`:
//!
//! | file | columns |
//! |------|---------|
//! | `results.csv` | problem, algorithm, run, seed, best_objective, best_violation, feasible, evaluations, iterations, best_position |
//! | `timing.csv` | problem, algorithm, run, wall_time_s |
//! | `summary.csv` | problem, algorithm, mean, std, FR, p_wilcoxon, verdict, mpii, time_complexity, p_t_test |
//! | `traces/trace_<problem>_<algorithm>_<run>.csv` | iteration, K, Q, A, E, f_best, x_norm |
//! | `shap_bar.csv` | problem, algorithm, run, dataset, feature, mean_abs_shap, rank |
//! | `shap_beeswarm.csv` | problem, algorithm, run, dataset, sample, feature, shap, value |
//! | `correlation.csv` | problem, algorithm, run, dataset, row, column, r |
//!
//! Floats are written as `{:.10e}`; positions are `;`-separated. Verdicts
//! compare each algorithm with the reference on the problem's own sense: `+`
//! means significantly better. MPII is reported for maximisation problems
//! only, `NA` elsewhere.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Deserialize;

use crate::config::{default_max_evaluations, Algorithm, KBestMode, PositionMode, RunConfig};
use crate::engine::{run, RunResult};
use crate::error::{Error, Result};
use crate::explain::{
    build_datasets, explain, pearson_correlation, write_bar_csv, write_beeswarm_csv, write_correlation_csv,
    write_trace_file, SurrogateKind,
};
use crate::metrics::{mean_std_fr, mpii, t_test, timing_complexity, wilcoxon_signed_rank, RunSummary, TIMING_BUDGET};
use crate::problems::{ProblemSpec, Registry, Sense};
use crate::schedule::CoulombSchedule;

/// Per-algorithm overrides of the default [`RunConfig`].
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    pub k0: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub delta: Option<f64>,
    pub r: Option<f64>,
    pub k1_init: Option<f64>,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub population_size: Option<usize>,
    pub max_iterations: Option<usize>,
    pub max_evaluations: Option<usize>,
    pub velocity_bound_fraction: Option<f64>,
    pub kbest_mode: Option<KBestMode>,
    pub position_mode: Option<PositionMode>,
    pub epsilon_force: Option<f64>,
}

impl Overrides {
    /// Run configuration for `algorithm` on a problem of dimension `dim`.
    pub fn apply(&self, algorithm: Algorithm, dim: usize) -> Result<RunConfig> {
        let mut c = algorithm.default_config();
        match &mut c.schedule {
            CoulombSchedule::Exponential(e) => {
                let stray = [
                    ("beta", self.beta),
                    ("delta", self.delta),
                    ("r", self.r),
                    ("k1_init", self.k1_init),
                    ("a", self.a),
                    ("b", self.b),
                ];
                if let Some((key, _)) = stray.iter().find(|(_, v)| v.is_some()) {
                    return Err(Error::InvalidConfig(format!(
                        "`{key}` does not apply to the exponential schedule of {algorithm}"
                    )));
                }
                e.k0 = self.k0.unwrap_or(e.k0);
                e.alpha = self.alpha.unwrap_or(e.alpha);
            }
            CoulombSchedule::ChaoticSigmoid { sigmoid, chaos } => {
                if self.alpha.is_some() {
                    return Err(Error::InvalidConfig(format!(
                        "`alpha` does not apply to the chaotic sigmoid schedule of {algorithm}"
                    )));
                }
                sigmoid.k0 = self.k0.unwrap_or(sigmoid.k0);
                sigmoid.beta = self.beta.unwrap_or(sigmoid.beta);
                sigmoid.delta = self.delta.unwrap_or(sigmoid.delta);
                chaos.r = self.r.unwrap_or(chaos.r);
                chaos.k1 = self.k1_init.unwrap_or(chaos.k1);
                chaos.a = self.a.unwrap_or(chaos.a);
                chaos.b = self.b.unwrap_or(chaos.b);
            }
        }
        let n = self.population_size.unwrap_or(c.population_size);
        let max_fe = self.max_evaluations.unwrap_or_else(|| default_max_evaluations(dim, n));
        c = c.with_budget(n, max_fe);
        if let Some(l) = self.max_iterations {
            c.max_iterations = l;
        }
        if let Some(f) = self.velocity_bound_fraction {
            c.velocity_bound_fraction = (f != 0.0).then_some(f);
        }
        c.kbest_mode = self.kbest_mode.unwrap_or(c.kbest_mode);
        if self.position_mode.is_some() {
            c.position_mode = self.position_mode;
        }
        c.epsilon_force = self.epsilon_force.unwrap_or(c.epsilon_force);
        c.validate()?;
        Ok(c)
    }
}

fn default_runs() -> usize {
    20
}

fn default_parallel() -> usize {
    1
}

fn default_out() -> PathBuf {
    PathBuf::from("results")
}

fn default_surrogate() -> SurrogateKind {
    SurrogateKind::Linear
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub problems: Vec<String>,
    pub algorithms: Vec<String>,
    #[serde(default = "default_runs")]
    pub runs: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    #[serde(default)]
    pub trace: bool,
    #[serde(default = "default_parallel")]
    pub parallel: usize,
    /// Defaults to the last listed algorithm.
    #[serde(default)]
    pub reference: Option<String>,
    #[serde(default)]
    pub time_complexity: bool,
    #[serde(default = "default_surrogate")]
    pub surrogate: SurrogateKind,
    #[serde(rename = "aefa", default)]
    pub aefa: Overrides,
    #[serde(rename = "ai-aefa", default)]
    pub ai_aefa: Overrides,
}

impl ExperimentConfig {
    pub fn new(problems: &[&str], algorithms: &[Algorithm], runs: usize) -> Self {
        Self {
            problems: problems.iter().map(|s| s.to_string()).collect(),
            algorithms: algorithms.iter().map(|a| a.name().to_string()).collect(),
            runs,
            seed: 0,
            out: default_out(),
            trace: false,
            parallel: 1,
            reference: None,
            time_complexity: false,
            surrogate: SurrogateKind::Linear,
            aefa: Overrides::default(),
            ai_aefa: Overrides::default(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn overrides(&self, algorithm: Algorithm) -> &Overrides {
        match algorithm {
            Algorithm::Aefa => &self.aefa,
            Algorithm::AiAefa => &self.ai_aefa,
        }
    }

    pub fn parsed_algorithms(&self) -> Result<Vec<Algorithm>> {
        self.algorithms.iter().map(|a| a.parse()).collect()
    }

    pub fn reference_algorithm(&self) -> Result<Algorithm> {
        let algorithms = self.parsed_algorithms()?;
        match &self.reference {
            Some(r) => {
                let a: Algorithm = r.parse()?;
                if !algorithms.contains(&a) {
                    return Err(Error::InvalidConfig(format!(
                        "reference `{r}` is not among the algorithms"
                    )));
                }
                Ok(a)
            }
            None => algorithms.last().copied().ok_or(Error::Empty("algorithm list")),
        }
    }

    pub fn validate(&self, registry: &Registry) -> Result<()> {
        if self.runs == 0 {
            return Err(Error::InvalidConfig("runs must be at least 1".into()));
        }
        if self.parallel == 0 {
            return Err(Error::InvalidConfig("parallel must be at least 1".into()));
        }
        if self.problems.is_empty() {
            return Err(Error::Empty("problem list"));
        }
        for p in &self.problems {
            registry.get(p)?;
        }
        let algorithms = self.parsed_algorithms()?;
        if algorithms.is_empty() {
            return Err(Error::Empty("algorithm list"));
        }
        self.reference_algorithm()?;
        for p in &self.problems {
            let dim = registry.get(p)?.dim();
            for &a in &algorithms {
                self.overrides(a).apply(a, dim)?;
            }
        }
        Ok(())
    }
}

/// Seed of run `index` for base seed `base`.
pub fn run_seed(base: u64, index: usize) -> u64 {
    base.wrapping_add(index as u64)
}

/// One finished run.
#[derive(Debug, Clone)]
pub struct RunRecord {
    pub problem: String,
    pub algorithm: Algorithm,
    pub run: usize,
    pub seed: u64,
    pub result: RunResult,
}

/// One `summary.csv` row.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub problem: String,
    pub algorithm: Algorithm,
    pub mean: f64,
    pub std: f64,
    pub feasibility_rate: f64,
    pub p_wilcoxon: f64,
    pub p_t_test: Option<f64>,
    pub verdict: String,
    pub mpii: Option<f64>,
    pub time_complexity: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub records: Vec<RunRecord>,
    pub summary: Vec<SummaryRow>,
    pub out: PathBuf,
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    run_experiment_with(config, &Registry::builtin())
}

/// Runs every problem × algorithm × run, then writes all outputs.
pub fn run_experiment_with(config: &ExperimentConfig, registry: &Registry) -> Result<ExperimentReport> {
    config.validate(registry)?;
    let algorithms = config.parsed_algorithms()?;

    let mut jobs = Vec::new();
    for p in &config.problems {
        let problem = registry.get(p)?;
        for &a in &algorithms {
            let base = config.overrides(a).apply(a, problem.dim())?.with_trace(config.trace);
            for i in 0..config.runs {
                jobs.push((problem, a, i, base.clone().with_seed(run_seed(config.seed, i))));
            }
        }
    }

    let execute = |(problem, algorithm, index, rc): &(&ProblemSpec, Algorithm, usize, RunConfig)| {
        run(problem, rc)
            .map(|result| RunRecord {
                problem: problem.name().to_string(),
                algorithm: *algorithm,
                run: *index,
                seed: rc.seed,
                result,
            })
            .map_err(|e| Error::RunFailed {
                problem: problem.name().to_string(),
                algorithm: algorithm.to_string(),
                run: *index,
                source: Box::new(e),
            })
    };
    let records: Vec<RunRecord> = if config.parallel > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.parallel)
            .build()
            .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
        pool.install(|| jobs.par_iter().map(execute).collect::<Result<Vec<_>>>())?
    } else {
        jobs.iter().map(execute).collect::<Result<Vec<_>>>()?
    };

    let timing = if config.time_complexity {
        let problems: Vec<&ProblemSpec> = config.problems.iter().map(|p| registry.get(p)).collect::<Result<_>>()?;
        let mut out = BTreeMap::new();
        for &a in &algorithms {
            let rc = config.overrides(a).apply(a, problems[0].dim())?.with_seed(config.seed);
            out.insert(a, timing_complexity(&problems, &rc, TIMING_BUDGET)?.ratio);
        }
        Some(out)
    } else {
        None
    };

    let summary = summarize(config, registry, &algorithms, &records, timing.as_ref())?;

    fs::create_dir_all(&config.out).map_err(|e| Error::io(&config.out, e))?;
    write_results(&config.out.join("results.csv"), &records)?;
    write_timing(&config.out.join("timing.csv"), &records)?;
    write_summary(&config.out.join("summary.csv"), &summary)?;
    if config.trace {
        write_explanations(&config.out, &records, config.surrogate)?;
    }
    Ok(ExperimentReport {
        records,
        summary,
        out: config.out.clone(),
    })
}

fn summarize(
    config: &ExperimentConfig,
    registry: &Registry,
    algorithms: &[Algorithm],
    records: &[RunRecord],
    timing: Option<&BTreeMap<Algorithm, f64>>,
) -> Result<Vec<SummaryRow>> {
    let reference = config.reference_algorithm()?;
    let mut rows = Vec::new();
    for p in &config.problems {
        let sense = registry.get(p)?.sense();
        let cell = |a: Algorithm| {
            RunSummary::from_results(
                records
                    .iter()
                    .filter(|r| &r.problem == p && r.algorithm == a)
                    .map(|r| &r.result),
            )
        };
        let ref_summary = cell(reference);
        let ref_stats = mean_std_fr(&ref_summary)?;
        for &a in algorithms {
            let s = cell(a);
            let stats = mean_std_fr(&s)?;
            let w = wilcoxon_signed_rank(&s.objectives, &ref_summary.objectives)?;
            let verdict = match sense {
                Sense::Maximize => w.verdict,
                Sense::Minimize => w.verdict.for_minimization(),
            };
            let p_t = (s.len() >= 2)
                .then(|| t_test(&s.objectives, &ref_summary.objectives))
                .transpose()?;
            let mpii = match sense {
                Sense::Maximize => mpii(stats.mean, ref_stats.mean).ok(),
                Sense::Minimize => None,
            };
            rows.push(SummaryRow {
                problem: p.clone(),
                algorithm: a,
                mean: stats.mean,
                std: stats.std,
                feasibility_rate: stats.feasibility_rate,
                p_wilcoxon: w.p_value,
                p_t_test: p_t,
                verdict: verdict.symbol().to_string(),
                mpii,
                time_complexity: timing.and_then(|t| t.get(&a).copied()),
            });
        }
    }
    Ok(rows)
}

/// Float format used in every experiment CSV.
pub fn fmt_value(v: f64) -> String {
    format!("{v:.10e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), fmt_value)
}

fn writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::Writer::from_writer(file))
}

fn finish(mut w: csv::Writer<fs::File>, path: &Path) -> Result<()> {
    w.flush().map_err(|e| Error::io(path, e))
}

pub const RESULTS_HEADER: [&str; 10] = [
    "problem",
    "algorithm",
    "run",
    "seed",
    "best_objective",
    "best_violation",
    "feasible",
    "evaluations",
    "iterations",
    "best_position",
];

fn write_results(path: &Path, records: &[RunRecord]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(RESULTS_HEADER)?;
    for r in records {
        let position: Vec<String> = r.result.best_position.iter().map(|v| fmt_value(*v)).collect();
        w.write_record([
            r.problem.clone(),
            r.algorithm.to_string(),
            r.run.to_string(),
            r.seed.to_string(),
            fmt_value(r.result.best_objective),
            fmt_value(r.result.best_violation),
            r.result.is_feasible().to_string(),
            r.result.evaluations_used.to_string(),
            r.result.iterations.to_string(),
            position.join(";"),
        ])?;
    }
    finish(w, path)
}

fn write_timing(path: &Path, records: &[RunRecord]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["problem", "algorithm", "run", "wall_time_s"])?;
    for r in records {
        w.write_record([
            r.problem.clone(),
            r.algorithm.to_string(),
            r.run.to_string(),
            fmt_value(r.result.wall_time),
        ])?;
    }
    finish(w, path)
}

pub const SUMMARY_HEADER: [&str; 10] = [
    "problem",
    "algorithm",
    "mean",
    "std",
    "FR",
    "p_wilcoxon",
    "verdict",
    "mpii",
    "time_complexity",
    "p_t_test",
];

fn write_summary(path: &Path, rows: &[SummaryRow]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(SUMMARY_HEADER)?;
    for r in rows {
        w.write_record([
            r.problem.clone(),
            r.algorithm.to_string(),
            fmt_value(r.mean),
            fmt_value(r.std),
            fmt_value(r.feasibility_rate),
            fmt_value(r.p_wilcoxon),
            r.verdict.clone(),
            fmt_opt(r.mpii),
            fmt_opt(r.time_complexity),
            fmt_opt(r.p_t_test),
        ])?;
    }
    finish(w, path)
}

/// File name of a run's trace inside `traces/`.
pub fn trace_file_name(problem: &str, algorithm: Algorithm, run: usize) -> String {
    format!("trace_{problem}_{algorithm}_{run}.csv")
}

fn write_explanations(out: &Path, records: &[RunRecord], surrogate: SurrogateKind) -> Result<()> {
    let traces = out.join("traces");
    fs::create_dir_all(&traces).map_err(|e| Error::io(&traces, e))?;
    let bar_path = out.join("shap_bar.csv");
    let bee_path = out.join("shap_beeswarm.csv");
    let cor_path = out.join("correlation.csv");
    let mut bar = writer(&bar_path)?;
    let mut bee = writer(&bee_path)?;
    let mut cor = writer(&cor_path)?;
    let mut first = true;
    for r in records {
        write_trace_file(
            &traces.join(trace_file_name(&r.problem, r.algorithm, r.run)),
            &r.result.trace,
        )?;
        if r.result.trace.len() < 3 {
            continue;
        }
        let (d1, d2) = build_datasets(&r.result.trace)?;
        let run = r.run.to_string();
        let algorithm = r.algorithm.to_string();
        for d in [&d1, &d2] {
            let context = [
                ("problem", r.problem.as_str()),
                ("algorithm", algorithm.as_str()),
                ("run", run.as_str()),
                ("dataset", d.name.as_str()),
            ];
            let (_, _, summary) = explain(d, surrogate)?;
            write_bar_csv(&mut bar, &context, &summary, first)?;
            write_beeswarm_csv(&mut bee, &context, &summary, first)?;
            write_correlation_csv(&mut cor, &context, &pearson_correlation(d)?, first)?;
            first = false;
        }
    }
    finish(bar, &bar_path)?;
    finish(bee, &bee_path)?;
    finish(cor, &cor_path)
}

/// `describe` text for a registered problem.
pub fn describe(registry: &Registry, name: &str) -> Result<String> {
    Ok(registry.get(name)?.describe())
}

/// One line per registered problem: name, dimension, sense and description.
pub fn list(registry: &Registry) -> Vec<String> {
    registry
        .iter()
        .map(|p| {
            let sense = match p.sense() {
                Sense::Minimize => "min",
                Sense::Maximize => "max",
            };
            format!("{:<22} dim={:<3} {}  {}", p.name(), p.dim(), sense, p.description())
        })
        .collect()
}
