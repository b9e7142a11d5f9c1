//! Explaining a run from its parameter trace.
//!
//! A traced run records, per iteration, the Coulomb constant `K`, the charge
//! `Q` and the acceleration and force norms `A`, `E` of the leading agent,
//! plus the elite objective and the norm of the elite position. Two datasets
//! are built from that trace, `(K, Q) → f_best` and `(A, E) → x_norm`, a
//! surrogate regression is fitted to each, and exact Shapley values of the
//! surrogate are computed by enumerating every feature coalition. Coalition
//! values are interventional: features outside the coalition are filled in
//! from the background rows and the prediction is averaged.
//!
//! Everything here produces plain data and CSV; rendering is left to external
//! tools.

use std::io::Write;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest feature count accepted by [`exact_shapley`].
pub const MAX_EXACT_FEATURES: usize = 12;

/// One iteration of a traced run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationTrace {
    pub iteration: usize,
    #[serde(rename = "K")]
    pub k_value: f64,
    #[serde(rename = "Q")]
    pub q_best: f64,
    #[serde(rename = "A")]
    pub a_norm: f64,
    #[serde(rename = "E")]
    pub e_norm: f64,
    pub f_best: f64,
    pub x_norm: f64,
}

/// Header of trace CSV files.
pub const TRACE_HEADER: [&str; 7] = ["iteration", "K", "Q", "A", "E", "f_best", "x_norm"];

/// Rows of features with a scalar target.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub feature_names: Vec<String>,
    pub target_name: String,
    pub features: Vec<Vec<f64>>,
    pub target: Vec<f64>,
}

impl Dataset {
    pub fn new(
        name: impl Into<String>,
        feature_names: Vec<String>,
        target_name: impl Into<String>,
        features: Vec<Vec<f64>>,
        target: Vec<f64>,
    ) -> Result<Self> {
        if features.len() != target.len() {
            return Err(Error::DimensionMismatch {
                expected: features.len(),
                found: target.len(),
            });
        }
        if let Some(bad) = features.iter().find(|r| r.len() != feature_names.len()) {
            return Err(Error::DimensionMismatch {
                expected: feature_names.len(),
                found: bad.len(),
            });
        }
        Ok(Self {
            name: name.into(),
            feature_names,
            target_name: target_name.into(),
            features,
            target,
        })
    }

    pub fn rows(&self) -> usize {
        self.target.len()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn feature_column(&self, j: usize) -> Vec<f64> {
        self.features.iter().map(|r| r[j]).collect()
    }

    /// A constant target carries no signal for attribution.
    pub fn target_is_constant(&self) -> bool {
        is_constant(&self.target)
    }
}

fn is_constant(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[0] == w[1])
}

/// `(K, Q) → f_best` and `(A, E) → x_norm`.
pub fn build_datasets(trace: &[IterationTrace]) -> Result<(Dataset, Dataset)> {
    if trace.is_empty() {
        return Err(Error::Empty("trace has no iterations"));
    }
    let d1 = Dataset::new(
        "coulomb-charge",
        vec!["K".into(), "Q".into()],
        "f_best",
        trace.iter().map(|t| vec![t.k_value, t.q_best]).collect(),
        trace.iter().map(|t| t.f_best).collect(),
    )?;
    let d2 = Dataset::new(
        "acceleration-force",
        vec!["A".into(), "E".into()],
        "x_norm",
        trace.iter().map(|t| vec![t.a_norm, t.e_norm]).collect(),
        trace.iter().map(|t| t.x_norm).collect(),
    )?;
    Ok((d1, d2))
}

/// Pearson correlations over every feature column plus the target.
///
/// Entries involving a constant column are `NaN`; those columns are listed in
/// `undefined`.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    pub labels: Vec<String>,
    pub values: Vec<Vec<f64>>,
    pub undefined: Vec<String>,
}

/// Pearson correlation of two equal-length samples; `None` when either is
/// constant or shorter than two.
pub fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return None;
    }
    let zx = standardize(x)?;
    let zy = standardize(y)?;
    let r = zx.iter().zip(&zy).map(|(a, b)| a * b).sum::<f64>();
    Some(r.clamp(-1.0, 1.0))
}

/// Centres and scales to unit Euclidean norm.
fn standardize(v: &[f64]) -> Option<Vec<f64>> {
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    let centred: Vec<f64> = v.iter().map(|x| x - mean).collect();
    let ss = centred.iter().map(|c| c * c).sum::<f64>().sqrt();
    if ss == 0.0 || !ss.is_finite() {
        return None;
    }
    Some(centred.into_iter().map(|c| c / ss).collect())
}

pub fn pearson_correlation(dataset: &Dataset) -> Result<CorrelationMatrix> {
    if dataset.rows() < 2 {
        return Err(Error::Empty("correlation needs at least two rows"));
    }
    let mut labels = dataset.feature_names.clone();
    labels.push(dataset.target_name.clone());
    let mut columns: Vec<Vec<f64>> = (0..dataset.n_features()).map(|j| dataset.feature_column(j)).collect();
    columns.push(dataset.target.clone());

    let m = columns.len();
    let mut values = vec![vec![f64::NAN; m]; m];
    let undefined: Vec<String> = columns
        .iter()
        .zip(&labels)
        .filter(|(c, _)| is_constant(c))
        .map(|(_, l)| l.clone())
        .collect();
    for a in 0..m {
        for b in a..m {
            let r = if a == b {
                if is_constant(&columns[a]) {
                    f64::NAN
                } else {
                    1.0
                }
            } else {
                pearson(&columns[a], &columns[b]).unwrap_or(f64::NAN)
            };
            values[a][b] = r;
            values[b][a] = r;
        }
    }
    Ok(CorrelationMatrix {
        labels,
        values,
        undefined,
    })
}

/// Anything that maps a feature vector to a prediction.
pub trait Surrogate {
    fn predict(&self, x: &[f64]) -> f64;
}

impl<F: Fn(&[f64]) -> f64> Surrogate for F {
    fn predict(&self, x: &[f64]) -> f64 {
        self(x)
    }
}

/// Ordinary least squares with intercept.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    pub intercept: f64,
    pub coefficients: Vec<f64>,
    /// Set when the design was singular and a tiny ridge penalty was used.
    pub regularized: bool,
}

impl Surrogate for LinearModel {
    fn predict(&self, x: &[f64]) -> f64 {
        self.intercept + self.coefficients.iter().zip(x).map(|(c, v)| c * v).sum::<f64>()
    }
}

impl LinearModel {
    pub fn fit(dataset: &Dataset) -> Result<Self> {
        let n = dataset.rows();
        let p = dataset.n_features();
        if n == 0 {
            return Err(Error::Empty("no rows to fit"));
        }
        let x_mean: Vec<f64> = (0..p)
            .map(|j| dataset.features.iter().map(|r| r[j]).sum::<f64>() / n as f64)
            .collect();
        let y_mean = dataset.target.iter().sum::<f64>() / n as f64;
        let xc = DMatrix::from_fn(n, p, |i, j| dataset.features[i][j] - x_mean[j]);
        let yc = DVector::from_iterator(n, dataset.target.iter().map(|y| y - y_mean));

        let gram = xc.transpose() * &xc;
        let rhs = xc.transpose() * yc;

        let coefficients;
        let mut singular = false;
        if p == 0 {
            coefficients = Vec::new();
        } else if let Some(chol) = well_conditioned(&gram) {
            coefficients = chol.solve(&rhs).iter().copied().collect();
        } else {
            // Ridge with λ = 1e-10·λ_max; null-space directions are dropped
            // so duplicated columns share their weight exactly.
            singular = true;
            let eig = gram.symmetric_eigen();
            let max_eig = eig.eigenvalues.iter().cloned().fold(0.0f64, f64::max);
            let lambda = if max_eig > 0.0 { 1e-10 * max_eig } else { 1.0 };
            let mut beta = DVector::zeros(p);
            for (i, &e) in eig.eigenvalues.iter().enumerate() {
                if e > SINGULAR_RATIO * max_eig {
                    let v = eig.eigenvectors.column(i);
                    beta += v * (v.dot(&rhs) / (e + lambda));
                }
            }
            coefficients = beta.iter().copied().collect();
        }
        let intercept = y_mean - coefficients.iter().zip(&x_mean).map(|(c, m)| c * m).sum::<f64>();
        Ok(Self {
            intercept,
            coefficients,
            regularized: singular,
        })
    }
}

/// Eigenvalue ratio below which the normal equations count as singular.
const SINGULAR_RATIO: f64 = 1e-12;

fn well_conditioned(gram: &DMatrix<f64>) -> Option<nalgebra::Cholesky<f64, nalgebra::Dyn>> {
    let eig = gram.clone().symmetric_eigenvalues();
    let max = eig.iter().cloned().fold(0.0f64, f64::max);
    let min = eig.iter().cloned().fold(f64::INFINITY, f64::min);
    if max <= 0.0 || min <= SINGULAR_RATIO * max {
        return None;
    }
    gram.clone().cholesky()
}

/// Mean target of the `k` nearest training rows (Euclidean, ties by row
/// order).
#[derive(Debug, Clone, PartialEq)]
pub struct KnnModel {
    pub k: usize,
    features: Vec<Vec<f64>>,
    target: Vec<f64>,
}

impl KnnModel {
    pub fn fit(dataset: &Dataset, k: usize) -> Result<Self> {
        if dataset.rows() == 0 {
            return Err(Error::Empty("no rows to fit"));
        }
        if k == 0 {
            return Err(Error::InvalidConfig("k must be at least 1".into()));
        }
        Ok(Self {
            k: k.min(dataset.rows()),
            features: dataset.features.clone(),
            target: dataset.target.clone(),
        })
    }
}

impl Surrogate for KnnModel {
    fn predict(&self, x: &[f64]) -> f64 {
        let mut dist: Vec<(f64, usize)> = self
            .features
            .iter()
            .enumerate()
            .map(|(i, r)| (r.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum::<f64>(), i))
            .collect();
        dist.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        dist[..self.k].iter().map(|&(_, i)| self.target[i]).sum::<f64>() / self.k as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SurrogateKind {
    Linear,
    Knn,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FittedSurrogate {
    Linear(LinearModel),
    Knn(KnnModel),
}

impl Surrogate for FittedSurrogate {
    fn predict(&self, x: &[f64]) -> f64 {
        match self {
            FittedSurrogate::Linear(m) => m.predict(x),
            FittedSurrogate::Knn(m) => m.predict(x),
        }
    }
}

/// Neighbours used by the k-NN surrogate.
pub const KNN_NEIGHBOURS: usize = 5;

/// Fits a surrogate; needs at least three rows.
pub fn fit_surrogate(dataset: &Dataset, kind: SurrogateKind) -> Result<FittedSurrogate> {
    if dataset.rows() < 3 {
        return Err(Error::Empty("surrogate fit needs at least three rows"));
    }
    Ok(match kind {
        SurrogateKind::Linear => FittedSurrogate::Linear(LinearModel::fit(dataset)?),
        SurrogateKind::Knn => FittedSurrogate::Knn(KnnModel::fit(dataset, KNN_NEIGHBOURS)?),
    })
}

/// Shapley decomposition of one prediction.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapResult {
    /// Mean prediction over the background.
    pub base_value: f64,
    pub attributions: Vec<f64>,
    pub prediction: f64,
}

/// Exact Shapley values of `model` at `sample` by enumerating all `2^M`
/// coalitions against `background`.
pub fn exact_shapley<M: Surrogate + ?Sized>(model: &M, background: &[Vec<f64>], sample: &[f64]) -> Result<ShapResult> {
    let m = sample.len();
    if m > MAX_EXACT_FEATURES {
        return Err(Error::TooManyFeatures(m, MAX_EXACT_FEATURES));
    }
    if background.is_empty() {
        return Err(Error::Empty("background dataset"));
    }
    if let Some(bad) = background.iter().find(|r| r.len() != m) {
        return Err(Error::DimensionMismatch {
            expected: m,
            found: bad.len(),
        });
    }

    let subsets = 1usize << m;
    let mut value = vec![0.0; subsets];
    let mut z = vec![0.0; m];
    for (mask, v) in value.iter_mut().enumerate() {
        let mut acc = 0.0;
        for row in background {
            for d in 0..m {
                z[d] = if mask & (1 << d) != 0 { sample[d] } else { row[d] };
            }
            acc += model.predict(&z);
        }
        *v = acc / background.len() as f64;
    }

    // weight(|S|) = |S|!(M−|S|−1)!/M!
    let mut fact = vec![1.0f64; m + 1];
    for i in 1..=m {
        fact[i] = fact[i - 1] * i as f64;
    }
    let weight = |s: usize| fact[s] * fact[m - s - 1] / fact[m];

    let mut attributions = vec![0.0; m];
    for (i, phi) in attributions.iter_mut().enumerate() {
        let bit = 1usize << i;
        for mask in (0..subsets).filter(|s| s & bit == 0) {
            *phi += weight(mask.count_ones() as usize) * (value[mask | bit] - value[mask]);
        }
    }
    Ok(ShapResult {
        base_value: value[0],
        attributions,
        prediction: value[subsets - 1],
    })
}

/// Explains every row of `dataset` against the dataset itself as background.
pub fn explain_dataset<M: Surrogate + ?Sized>(model: &M, dataset: &Dataset) -> Result<Vec<ShapResult>> {
    dataset
        .features
        .iter()
        .map(|x| exact_shapley(model, &dataset.features, x))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct BarEntry {
    pub feature: String,
    pub mean_abs_shap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BeeswarmPoint {
    pub sample: usize,
    pub feature: String,
    pub shap: f64,
    pub value: f64,
}

/// Plot-ready SHAP data: global bar heights and per-sample points.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapSummary {
    /// Sorted by descending mean |φ|; ties keep feature order.
    pub bars: Vec<BarEntry>,
    pub beeswarm: Vec<BeeswarmPoint>,
}

pub fn export_shap_summary(
    feature_names: &[String],
    samples: &[Vec<f64>],
    results: &[ShapResult],
) -> Result<ShapSummary> {
    if results.is_empty() {
        return Err(Error::Empty("no explained samples"));
    }
    if samples.len() != results.len() {
        return Err(Error::DimensionMismatch {
            expected: results.len(),
            found: samples.len(),
        });
    }
    let m = feature_names.len();
    let mut bars: Vec<BarEntry> = (0..m)
        .map(|j| BarEntry {
            feature: feature_names[j].clone(),
            mean_abs_shap: results.iter().map(|r| r.attributions[j].abs()).sum::<f64>() / results.len() as f64,
        })
        .collect();
    bars.sort_by(|a, b| b.mean_abs_shap.total_cmp(&a.mean_abs_shap));
    let beeswarm = results
        .iter()
        .zip(samples)
        .enumerate()
        .flat_map(|(s, (r, x))| {
            (0..m).map(move |j| BeeswarmPoint {
                sample: s,
                feature: feature_names[j].clone(),
                shap: r.attributions[j],
                value: x[j],
            })
        })
        .collect();
    Ok(ShapSummary { bars, beeswarm })
}

/// Fits the surrogate on `dataset`, explains every row, and summarises.
pub fn explain(dataset: &Dataset, kind: SurrogateKind) -> Result<(FittedSurrogate, Vec<ShapResult>, ShapSummary)> {
    let model = fit_surrogate(dataset, kind)?;
    let results = explain_dataset(&model, dataset)?;
    let summary = export_shap_summary(&dataset.feature_names, &dataset.features, &results)?;
    Ok((model, results, summary))
}

/// Fixed-precision float formatting used by every CSV export.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "NaN".to_string()
    } else {
        format!("{v:.9e}")
    }
}

/// Writes `trace` with [`TRACE_HEADER`] columns.
pub fn write_trace_csv<W: Write>(out: W, trace: &[IterationTrace]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRACE_HEADER)?;
    for t in trace {
        w.write_record([
            t.iteration.to_string(),
            fmt_f64(t.k_value),
            fmt_f64(t.q_best),
            fmt_f64(t.a_norm),
            fmt_f64(t.e_norm),
            fmt_f64(t.f_best),
            fmt_f64(t.x_norm),
        ])?;
    }
    w.flush().map_err(|e| Error::io("<trace csv>", e))?;
    Ok(())
}

pub fn write_trace_file(path: &Path, trace: &[IterationTrace]) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_trace_csv(file, trace)
}

/// Leading `(column, value)` pairs added to every exported row, e.g. problem
/// and algorithm names.
pub type Context<'a> = &'a [(&'a str, &'a str)];

fn header(context: Context<'_>, rest: &[&str]) -> Vec<String> {
    context
        .iter()
        .map(|(k, _)| k.to_string())
        .chain(rest.iter().map(|s| s.to_string()))
        .collect()
}

fn row(context: Context<'_>, rest: Vec<String>) -> Vec<String> {
    context.iter().map(|(_, v)| v.to_string()).chain(rest).collect()
}

/// `shap_bar.csv` layout: context columns, `feature, mean_abs_shap, rank`.
pub fn write_bar_csv<W: Write>(
    w: &mut csv::Writer<W>,
    context: Context<'_>,
    summary: &ShapSummary,
    with_header: bool,
) -> Result<()> {
    if with_header {
        w.write_record(header(context, &["feature", "mean_abs_shap", "rank"]))?;
    }
    for (rank, b) in summary.bars.iter().enumerate() {
        w.write_record(row(
            context,
            vec![b.feature.clone(), fmt_f64(b.mean_abs_shap), (rank + 1).to_string()],
        ))?;
    }
    Ok(())
}

/// `shap_beeswarm.csv` layout: context columns, `sample, feature, shap, value`.
pub fn write_beeswarm_csv<W: Write>(
    w: &mut csv::Writer<W>,
    context: Context<'_>,
    summary: &ShapSummary,
    with_header: bool,
) -> Result<()> {
    if with_header {
        w.write_record(header(context, &["sample", "feature", "shap", "value"]))?;
    }
    for p in &summary.beeswarm {
        w.write_record(row(
            context,
            vec![
                p.sample.to_string(),
                p.feature.clone(),
                fmt_f64(p.shap),
                fmt_f64(p.value),
            ],
        ))?;
    }
    Ok(())
}

/// `correlation.csv` layout: context columns, `row, column, r`.
pub fn write_correlation_csv<W: Write>(
    w: &mut csv::Writer<W>,
    context: Context<'_>,
    matrix: &CorrelationMatrix,
    with_header: bool,
) -> Result<()> {
    if with_header {
        w.write_record(header(context, &["row", "column", "r"]))?;
    }
    for (a, la) in matrix.labels.iter().enumerate() {
        for (b, lb) in matrix.labels.iter().enumerate() {
            w.write_record(row(context, vec![la.clone(), lb.clone(), fmt_f64(matrix.values[a][b])]))?;
        }
    }
    Ok(())
}
