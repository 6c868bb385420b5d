//! Command-line front end for the G-SMOTE benchmark: run configuration,
//! fixture generation, single-dataset oversampling and the benchmark runner.

pub mod bench;
pub mod config;
pub mod fixture;
pub mod oversample;
