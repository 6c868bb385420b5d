//! Aggregation of cell results into score, ranking and Friedman tables.

use std::collections::BTreeMap;

use super::metrics::Metric;
use super::protocol::CvCellResult;
use super::ranking::{friedman, rank_row, FriedmanResult};
use crate::error::{Error, Result};

/// Mean score over repeats for one dataset, classifier and metric, with one
/// entry per method.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreRow {
    pub dataset: String,
    pub classifier: String,
    pub metric: Metric,
    pub scores: Vec<f64>,
    pub ranks: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeanRankRow {
    pub classifier: String,
    pub metric: Metric,
    pub mean_ranks: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FriedmanRow {
    pub classifier: String,
    pub metric: Metric,
    /// `None` when there are fewer than two datasets or methods.
    pub result: Option<FriedmanResult>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankTable {
    pub methods: Vec<String>,
    pub rows: Vec<ScoreRow>,
    pub mean_ranks: Vec<MeanRankRow>,
    pub friedman: Vec<FriedmanRow>,
}

type Key = (String, String, Metric, String);

/// Mean of `score` over repeats, keyed by (dataset, classifier, metric,
/// oversampler). Summation runs in repeat order.
pub fn mean_over_repeats(results: &[CvCellResult]) -> BTreeMap<Key, f64> {
    let mut sorted: Vec<&CvCellResult> = results.iter().collect();
    sorted.sort_by_key(|r| r.repeat);
    let mut acc: BTreeMap<Key, (f64, usize)> = BTreeMap::new();
    for r in sorted {
        let e = acc
            .entry((r.dataset.clone(), r.classifier.clone(), r.metric, r.oversampler.clone()))
            .or_default();
        e.0 += r.score;
        e.1 += 1;
    }
    acc.into_iter().map(|(k, (s, n))| (k, s / n as f64)).collect()
}

/// Rank the methods within every (dataset, classifier, metric) row, average
/// the ranks over datasets, and run the Friedman test per (classifier,
/// metric). Output order follows the given dataset, classifier and method
/// orders, with metrics in [`Metric::ALL`] order.
pub fn rank_table(
    results: &[CvCellResult],
    datasets: &[String],
    classifiers: &[String],
    methods: &[String],
) -> Result<RankTable> {
    let means = mean_over_repeats(results);
    let mut rows = Vec::new();
    for dataset in datasets {
        for classifier in classifiers {
            for metric in Metric::ALL {
                let scores = methods
                    .iter()
                    .map(|m| {
                        means
                            .get(&(dataset.clone(), classifier.clone(), metric, m.clone()))
                            .copied()
                            .ok_or_else(|| {
                                Error::InvalidParameter(format!(
                                    "missing result for dataset={dataset} classifier={classifier} metric={} oversampler={m}",
                                    metric.as_str()
                                ))
                            })
                    })
                    .collect::<Result<Vec<f64>>>()?;
                let ranks = rank_row(&scores, true);
                rows.push(ScoreRow {
                    dataset: dataset.clone(),
                    classifier: classifier.clone(),
                    metric,
                    scores,
                    ranks,
                });
            }
        }
    }

    let mut mean_ranks = Vec::new();
    let mut friedman_rows = Vec::new();
    for classifier in classifiers {
        for metric in Metric::ALL {
            let block: Vec<Vec<f64>> = rows
                .iter()
                .filter(|r| &r.classifier == classifier && r.metric == metric)
                .map(|r| r.ranks.clone())
                .collect();
            let n = block.len() as f64;
            let mean: Vec<f64> = (0..methods.len())
                .map(|j| block.iter().map(|r| r[j]).sum::<f64>() / n)
                .collect();
            mean_ranks.push(MeanRankRow { classifier: classifier.clone(), metric, mean_ranks: mean });
            let result = if block.len() >= 2 && methods.len() >= 2 { Some(friedman(&block)?) } else { None };
            friedman_rows.push(FriedmanRow { classifier: classifier.clone(), metric, result });
        }
    }

    Ok(RankTable { methods: methods.to_vec(), rows, mean_ranks, friedman: friedman_rows })
}
