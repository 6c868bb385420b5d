//! Cross-validation of one (dataset, oversampler, classifier) cell.
//!
//! For every repeat and fold: scaling is fitted on the training rows, the
//! training rows are oversampled to equal class counts, every classifier
//! configuration is trained on the result, and the untouched validation fold
//! is scored. Scores are averaged over folds per hyper-parameter
//! combination, and each metric reports its own best combination.

use ndarray::{concatenate, Array2, Axis};
use serde::{Deserialize, Serialize};

use super::kfold::stratified_kfold;
use super::metrics::{metrics, Metric, Scores};
use crate::classifiers::{ClassifierConfig, Model};
use crate::dataset::ScalingParams;
use crate::error::{Error, Result};
use crate::oversampling::{Fallback, Oversampler};
use crate::seeding::{derive_seed, stream};
use crate::Dataset;

/// Threshold turning probabilities into labels for F-measure and G-mean.
pub const DECISION_THRESHOLD: f64 = 0.5;

/// Best cross-validation score of one cell for one metric and repeat.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvCellResult {
    pub dataset: String,
    pub classifier: String,
    pub oversampler: String,
    pub metric: Metric,
    pub repeat: usize,
    pub score: f64,
    pub best_params: String,
}

/// An oversampler that had to take its fallback path.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FallbackEvent {
    pub dataset: String,
    pub oversampler: String,
    pub params: String,
    pub repeat: usize,
    pub fold: usize,
    pub kind: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CellOutcome {
    pub results: Vec<CvCellResult>,
    pub fallbacks: Vec<FallbackEvent>,
}

/// Origin of a row in an oversampled training set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowOrigin {
    Original(usize),
    Synthetic,
}

/// Steps of the protocol, reported with the dataset row indices involved.
#[derive(Debug)]
pub enum ProtocolEvent<'a> {
    Split { repeat: usize, fold: usize, train: &'a [usize], validation: &'a [usize] },
    ScalingFit { repeat: usize, fold: usize, rows: &'a [usize] },
    Oversample { repeat: usize, fold: usize, minority: &'a [usize], majority: &'a [usize] },
    Fit { repeat: usize, fold: usize, rows: &'a [RowOrigin], labels: &'a [bool] },
    Score { repeat: usize, fold: usize, rows: &'a [usize] },
}

/// Receives protocol events; used to audit the pipeline for leakage.
pub trait ProtocolObserver {
    fn observe(&mut self, _event: ProtocolEvent<'_>) {}
}

impl ProtocolObserver for () {}

/// One benchmark cell: an oversampler grid and a classifier grid, each from
/// a single family.
#[derive(Debug, Clone)]
pub struct CellSpec<'a> {
    pub dataset: &'a Dataset,
    pub oversamplers: &'a [Oversampler],
    pub classifiers: &'a [ClassifierConfig],
    pub n_folds: usize,
    pub repeats: usize,
    pub seed: u64,
}

impl CellSpec<'_> {
    pub fn label(&self) -> String {
        format!(
            "dataset={} oversampler={} classifier={}",
            self.dataset.name(),
            self.oversamplers.first().map_or("?", |o| o.id()),
            self.classifiers.first().map_or("?", |c| c.id()),
        )
    }

    fn validate(&self) -> Result<()> {
        let Some(first_o) = self.oversamplers.first() else {
            return Err(Error::InvalidParameter("oversampler grid is empty".into()));
        };
        let Some(first_c) = self.classifiers.first() else {
            return Err(Error::InvalidParameter("classifier grid is empty".into()));
        };
        if self.oversamplers.iter().any(|o| o.id() != first_o.id()) {
            return Err(Error::InvalidParameter("oversampler grid mixes families".into()));
        }
        if self.classifiers.iter().any(|c| c.id() != first_c.id()) {
            return Err(Error::InvalidParameter("classifier grid mixes families".into()));
        }
        if self.repeats == 0 {
            return Err(Error::InvalidParameter("repeats must be at least 1".into()));
        }
        self.oversamplers.iter().try_for_each(Oversampler::validate)
    }
}

/// Seed of the fold assignment for one repeat.
pub fn split_seed(root: u64, dataset: &str, repeat: usize) -> u64 {
    derive_seed(root, &[dataset.into(), "cv".into(), repeat.into()])
}

pub fn run_cell(spec: &CellSpec<'_>) -> Result<CellOutcome> {
    run_cell_observed(spec, &mut ())
}

pub fn run_cell_observed(spec: &CellSpec<'_>, observer: &mut dyn ProtocolObserver) -> Result<CellOutcome> {
    spec.validate().map_err(|e| e.context(spec.label()))?;
    run_inner(spec, observer).map_err(|e| e.context(spec.label()))
}

fn run_inner(spec: &CellSpec<'_>, observer: &mut dyn ProtocolObserver) -> Result<CellOutcome> {
    let data = spec.dataset;
    let labels = data.is_minority();
    let n_o = spec.oversamplers.len();
    let n_c = spec.classifiers.len();
    let family = spec.oversamplers[0].id();
    let fit_source = prefix_sources(spec.classifiers);
    let mut outcome = CellOutcome::default();

    for repeat in 0..spec.repeats {
        let folds = stratified_kfold(labels, spec.n_folds, split_seed(spec.seed, data.name(), repeat))?;
        // sums[o][c] accumulates per-fold scores
        let mut sums = vec![vec![[0.0; 3]; n_c]; n_o];

        for fold in 0..spec.n_folds {
            let train: Vec<usize> = (0..folds.len()).filter(|&i| folds[i] != fold).collect();
            let validation: Vec<usize> = (0..folds.len()).filter(|&i| folds[i] == fold).collect();
            observer.observe(ProtocolEvent::Split { repeat, fold, train: &train, validation: &validation });

            let train_raw = data.features().select(Axis(0), &train);
            let scaling = ScalingParams::fit(train_raw.view());
            observer.observe(ProtocolEvent::ScalingFit { repeat, fold, rows: &train });
            let x_train = scaling.apply(train_raw.view());
            let x_val = scaling.apply(data.features().select(Axis(0), &validation).view());
            let y_train: Vec<bool> = train.iter().map(|&i| labels[i]).collect();
            let y_val: Vec<bool> = validation.iter().map(|&i| labels[i]).collect();

            let (min_pos, maj_pos): (Vec<usize>, Vec<usize>) = (0..train.len()).partition(|&i| y_train[i]);
            let s_min = x_train.select(Axis(0), &min_pos);
            let s_maj = x_train.select(Axis(0), &maj_pos);
            let n_synthetic = match spec.oversamplers[0] {
                Oversampler::None => 0,
                _ => maj_pos.len().saturating_sub(min_pos.len()),
            };

            let rng_seed = derive_seed(spec.seed, &[data.name().into(), family.into(), fold.into(), repeat.into()]);
            let min_rows: Vec<usize> = min_pos.iter().map(|&i| train[i]).collect();
            let maj_rows: Vec<usize> = maj_pos.iter().map(|&i| train[i]).collect();
            // every configuration of the family replays the same stream
            for (oi, oversampler) in spec.oversamplers.iter().enumerate() {
                let mut rng = stream(rng_seed, &[]);
                let batch = if n_synthetic > 0 {
                    observer.observe(ProtocolEvent::Oversample { repeat, fold, minority: &min_rows, majority: &maj_rows });
                    oversampler
                        .generate(s_min.view(), s_maj.view(), n_synthetic, &mut rng)
                        .map_err(|e| e.context(format!("{} {} repeat={repeat} fold={fold}", family, oversampler.params())))?
                } else {
                    crate::SyntheticBatch::empty(data.n_features())
                };
                if batch.len() != n_synthetic {
                    return Err(Error::Numerical(format!(
                        "{family} produced {} rows, expected {n_synthetic}",
                        batch.len()
                    )));
                }
                if let Some(kind) = batch.fallback {
                    outcome.fallbacks.push(fallback_event(data.name(), oversampler, repeat, fold, kind));
                }

                let x_fit: Array2<f64> = if batch.is_empty() {
                    x_train.clone()
                } else {
                    concatenate(Axis(0), &[x_train.view(), batch.samples.view()])
                        .map_err(|e| Error::Numerical(e.to_string()))?
                };
                let mut y_fit = y_train.clone();
                y_fit.extend(std::iter::repeat(true).take(batch.len()));
                let origins: Vec<RowOrigin> = train
                    .iter()
                    .map(|&i| RowOrigin::Original(i))
                    .chain(std::iter::repeat(RowOrigin::Synthetic).take(batch.len()))
                    .collect();

                let mut models: Vec<Option<Model>> = vec![None; n_c];
                for (ci, classifier) in spec.classifiers.iter().enumerate() {
                    observer.observe(ProtocolEvent::Fit { repeat, fold, rows: &origins, labels: &y_fit });
                    let src = fit_source[ci];
                    if models[src].is_none() {
                        models[src] = Some(spec.classifiers[src].fit(x_fit.view(), &y_fit)?);
                    }
                    let proba = match (classifier, models[src].as_ref().expect("fitted above")) {
                        (ClassifierConfig::GradientBoosting(c), Model::GradientBoosting(m)) => {
                            m.staged_proba(x_val.view(), c.n_estimators)?
                        }
                        (_, model) => model.predict_proba(x_val.view())?,
                    };
                    observer.observe(ProtocolEvent::Score { repeat, fold, rows: &validation });
                    let s: Scores = metrics(&y_val, &proba, DECISION_THRESHOLD)?;
                    for (m, metric) in Metric::ALL.iter().enumerate() {
                        sums[oi][ci][m] += s.get(*metric);
                    }
                }
            }
        }

        for (m, metric) in Metric::ALL.iter().enumerate() {
            let mut best: Option<(f64, usize, usize)> = None;
            for oi in 0..n_o {
                for ci in 0..n_c {
                    let mean = sums[oi][ci][m] / spec.n_folds as f64;
                    if best.is_none_or(|(b, _, _)| mean > b) {
                        best = Some((mean, oi, ci));
                    }
                }
            }
            let (score, oi, ci) = best.expect("grids are nonempty");
            outcome.results.push(CvCellResult {
                dataset: data.name().to_string(),
                classifier: spec.classifiers[ci].id().to_string(),
                oversampler: family.to_string(),
                metric: *metric,
                repeat,
                score,
                best_params: join_params(&spec.oversamplers[oi], &spec.classifiers[ci]),
            });
        }
    }
    Ok(outcome)
}

// Boosting configurations that differ only in the number of stages share one
// fit with the most stages; the first k stages of that model are exactly
// the model a k-stage fit would produce.
fn prefix_sources(classifiers: &[ClassifierConfig]) -> Vec<usize> {
    (0..classifiers.len())
        .map(|ci| match &classifiers[ci] {
            ClassifierConfig::GradientBoosting(c) => {
                let mut best = ci;
                for (j, other) in classifiers.iter().enumerate() {
                    if let (ClassifierConfig::GradientBoosting(o), ClassifierConfig::GradientBoosting(b)) =
                        (other, &classifiers[best])
                    {
                        let same = o.max_depth == c.max_depth
                            && o.learning_rate == c.learning_rate
                            && o.min_samples_leaf == c.min_samples_leaf;
                        if same && o.n_estimators > b.n_estimators {
                            best = j;
                        }
                    }
                }
                best
            }
            ClassifierConfig::Logistic(_) => ci,
        })
        .collect()
}

fn join_params(o: &Oversampler, c: &ClassifierConfig) -> String {
    match o.params() {
        p if p.is_empty() => c.params(),
        p => format!("{p}|{}", c.params()),
    }
}

fn fallback_event(dataset: &str, o: &Oversampler, repeat: usize, fold: usize, kind: Fallback) -> FallbackEvent {
    FallbackEvent {
        dataset: dataset.to_string(),
        oversampler: o.id().to_string(),
        params: o.params(),
        repeat,
        fold,
        kind: kind.to_string(),
    }
}
