//! Evaluation protocol: stratified cross-validation with in-fold
//! oversampling, imbalance-aware metrics, per-row ranking and the Friedman
//! test.

mod kfold;
mod metrics;
mod protocol;
mod ranking;
mod report;

pub use kfold::stratified_kfold;
pub use metrics::{auc, auc_trapezoid, metrics, Metric, Scores};
pub use protocol::{
    run_cell, run_cell_observed, split_seed, CellOutcome, CellSpec, CvCellResult, FallbackEvent,
    ProtocolEvent, ProtocolObserver, RowOrigin, DECISION_THRESHOLD,
};
pub use ranking::{chi_square_sf, friedman, gamma_q, ln_gamma, rank_row, FriedmanResult, SIGNIFICANCE};
pub use report::{mean_over_repeats, rank_table, FriedmanRow, MeanRankRow, RankTable, ScoreRow};
