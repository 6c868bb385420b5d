//! Geometric SMOTE (G-SMOTE) oversampling for imbalanced binary
//! classification, together with the comparator oversamplers, classifiers,
//! metrics and cross-validation protocol used to benchmark it.

pub mod classifiers;
pub mod dataset;
pub mod error;
pub mod evaluation;
pub mod geometry;
pub mod neighbors;
pub mod oversampling;
pub mod seeding;

pub use dataset::{synthetic_count, Dataset, ScalingParams};
pub use error::{Error, Result};
pub use oversampling::{GSmoteConfig, Oversampler, Selection, SyntheticBatch};
