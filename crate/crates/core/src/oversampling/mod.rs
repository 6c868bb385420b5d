//! Minority oversamplers.
//!
//! Every generator takes the minority rows, the majority rows, the number of
//! synthetic rows to produce and a random stream, and returns a
//! [`SyntheticBatch`]. Draws are consumed in a fixed order (the center
//! shuffle first, then per sample the neighbor pick followed by the
//! sample-specific draws), so a seeded stream gives bit-identical output.

mod adasyn;
mod gsmote;
mod random;
mod smote;

use std::fmt;
use std::str::FromStr;

use ndarray::{Array2, ArrayView2};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::neighbors::{knn, NeighborResult};

pub use adasyn::{adasyn_generate, adasyn_weights, allocate};
pub use gsmote::{gsmote_generate, select_surface, SurfaceSelector};
pub use random::random_oversample;
pub use smote::{borderline_smote, danger_set, interpolate, smote_generate, BorderlineVariant};

/// How G-SMOTE picks the surface point that fixes the radius.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Selection {
    /// A random one of the k nearest minority neighbors.
    Minority,
    /// The nearest majority point.
    Majority,
    /// Whichever of the two above is closer; the minority point wins ties.
    Combined,
}

impl Selection {
    pub const ALL: [Selection; 3] = [Selection::Minority, Selection::Majority, Selection::Combined];

    pub fn as_str(self) -> &'static str {
        match self {
            Selection::Minority => "minority",
            Selection::Majority => "majority",
            Selection::Combined => "combined",
        }
    }
}

impl fmt::Display for Selection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Selection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "minority" => Ok(Selection::Minority),
            "majority" => Ok(Selection::Majority),
            "combined" => Ok(Selection::Combined),
            other => Err(Error::InvalidParameter(format!(
                "unknown selection strategy '{other}' (expected minority, majority or combined)"
            ))),
        }
    }
}

/// G-SMOTE hyper-parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GSmoteConfig {
    pub k: usize,
    pub a_trunc: f64,
    pub a_def: f64,
    pub selection: Selection,
}

impl GSmoteConfig {
    pub fn new(k: usize, a_trunc: f64, a_def: f64, selection: Selection) -> Result<Self> {
        let cfg = Self { k, a_trunc, a_def, selection };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidParameter("k must be positive".into()));
        }
        if !(-1.0..=1.0).contains(&self.a_trunc) {
            return Err(Error::InvalidParameter(format!(
                "truncation factor {} outside [-1, 1]",
                self.a_trunc
            )));
        }
        if !(0.0..=1.0).contains(&self.a_def) {
            return Err(Error::InvalidParameter(format!(
                "deformation factor {} outside [0, 1]",
                self.a_def
            )));
        }
        Ok(())
    }
}

/// Which class the surface point of a generated sample came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SurfaceSource {
    Minority,
    Majority,
}

/// Surface point chosen for one center.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceSelection {
    pub surface: Vec<f64>,
    /// Row of `surface` in the minority or majority set, per `source`.
    pub index: usize,
    pub radius: f64,
    pub source: SurfaceSource,
}

/// Where a synthetic row came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Provenance {
    /// Row of the minority set used as the center (or copied verbatim).
    pub center: usize,
    /// Partner row and its class; `None` for verbatim copies.
    pub surface: Option<(SurfaceSource, usize)>,
    /// Maximum distance of the sample from its center.
    pub radius: f64,
}

/// A degraded generation path taken instead of the method's own rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fallback {
    /// Borderline-SMOTE found no minority point in danger; plain SMOTE was used.
    EmptyDangerSet,
    /// No ADASYN weight was positive; samples were allocated uniformly.
    ZeroAdasynWeights,
}

impl fmt::Display for Fallback {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Fallback::EmptyDangerSet => "empty_danger_set",
            Fallback::ZeroAdasynWeights => "zero_adasyn_weights",
        })
    }
}

/// Generated minority rows.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticBatch {
    pub samples: Array2<f64>,
    pub provenance: Vec<Provenance>,
    pub fallback: Option<Fallback>,
}

impl SyntheticBatch {
    pub fn empty(p: usize) -> Self {
        Self { samples: Array2::zeros((0, p)), provenance: Vec::new(), fallback: None }
    }

    fn from_rows(p: usize, rows: Vec<Vec<f64>>, provenance: Vec<Provenance>) -> Self {
        let n = rows.len();
        let flat: Vec<f64> = rows.into_iter().flatten().collect();
        Self {
            samples: Array2::from_shape_vec((n, p), flat).expect("rows have dimension p"),
            provenance,
            fallback: None,
        }
    }

    pub fn len(&self) -> usize {
        self.samples.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// The oversamplers available to the benchmark.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Oversampler {
    /// No oversampling; always produces zero rows.
    None,
    Random,
    Smote { k: usize },
    Borderline { k: usize, variant: BorderlineVariant },
    Adasyn { k: usize },
    GSmote(GSmoteConfig),
}

impl Oversampler {
    /// Identifiers accepted by [`Oversampler::family_from_id`].
    pub const IDS: [&'static str; 7] =
        ["none", "random", "smote", "borderline1", "borderline2", "adasyn", "gsmote"];

    pub fn id(&self) -> &'static str {
        match self {
            Oversampler::None => "none",
            Oversampler::Random => "random",
            Oversampler::Smote { .. } => "smote",
            Oversampler::Borderline { variant: BorderlineVariant::One, .. } => "borderline1",
            Oversampler::Borderline { variant: BorderlineVariant::Two, .. } => "borderline2",
            Oversampler::Adasyn { .. } => "adasyn",
            Oversampler::GSmote(_) => "gsmote",
        }
    }

    /// Check that `id` names a known oversampler.
    pub fn family_from_id(id: &str) -> Result<&'static str> {
        Self::IDS.iter().copied().find(|&known| known == id).ok_or_else(|| {
            Error::InvalidParameter(format!(
                "unknown oversampler '{id}' (valid: {})",
                Self::IDS.join(", ")
            ))
        })
    }

    /// Compact `key=value` rendering of the hyper-parameters.
    pub fn params(&self) -> String {
        match self {
            Oversampler::None | Oversampler::Random => String::new(),
            Oversampler::Smote { k } | Oversampler::Borderline { k, .. } | Oversampler::Adasyn { k } => {
                format!("k={k}")
            }
            Oversampler::GSmote(c) => format!(
                "selection={};k={};truncation={};deformation={}",
                c.selection, c.k, c.a_trunc, c.a_def
            ),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Oversampler::GSmote(c) => c.validate(),
            Oversampler::Smote { k } | Oversampler::Borderline { k, .. } | Oversampler::Adasyn { k }
                if *k == 0 =>
            {
                Err(Error::InvalidParameter("k must be positive".into()))
            }
            _ => Ok(()),
        }
    }

    /// Generate `n` synthetic minority rows (zero rows for [`Oversampler::None`]).
    pub fn generate<R: Rng + ?Sized>(
        &self,
        minority: ArrayView2<'_, f64>,
        majority: ArrayView2<'_, f64>,
        n: usize,
        rng: &mut R,
    ) -> Result<SyntheticBatch> {
        match *self {
            Oversampler::None => Ok(SyntheticBatch::empty(minority.ncols())),
            Oversampler::Random => random_oversample(minority, n, rng),
            Oversampler::Smote { k } => smote_generate(minority, n, k, rng),
            Oversampler::Borderline { k, variant } => {
                borderline_smote(majority, minority, n, k, variant, rng)
            }
            Oversampler::Adasyn { k } => adasyn_generate(majority, minority, n, k, rng),
            Oversampler::GSmote(cfg) => gsmote_generate(majority, minority, n, &cfg, rng),
        }
    }
}

/// k nearest minority neighbors of every minority row, self excluded.
pub(crate) fn minority_neighbor_table(
    minority: ArrayView2<'_, f64>,
    k: usize,
) -> Result<Vec<NeighborResult>> {
    (0..minority.nrows())
        .map(|i| knn(&row(minority, i), minority, k, Some(i)))
        .collect()
}

pub(crate) fn row(m: ArrayView2<'_, f64>, i: usize) -> Vec<f64> {
    m.row(i).to_vec()
}

/// Shuffled visiting order of the minority rows. The order is drawn once
/// and cycled when more samples than rows are needed.
pub(crate) fn center_order<R: Rng + ?Sized>(n_min: usize, rng: &mut R) -> Vec<usize> {
    use rand::seq::SliceRandom;
    let mut order: Vec<usize> = (0..n_min).collect();
    order.shuffle(rng);
    order
}
