//! Benchmark configuration, read from TOML and validated before any work.
//!
//! ```toml
//! seed = 7
//! folds = 5
//! repeats = 5
//! output_dir = "results"
//!
//! [[datasets]]
//! path = "data/moons.csv"
//! label_column = "label"
//!
//! [oversamplers.none]
//! [oversamplers.smote]
//! k = [3, 4]
//! [oversamplers.gsmote]
//! selection = ["minority", "majority", "combined"]
//!
//! [classifiers.gbc]
//! max_depth = [5, 8]
//! ```
//!
//! Omitting `[oversamplers]` or `[classifiers]` selects every method with
//! its default grid. Omitted grid keys take their default values.

use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use gsmote::classifiers::{ClassifierConfig, GbcConfig, LrConfig};
use gsmote::oversampling::{BorderlineVariant, GSmoteConfig, Oversampler, Selection};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_folds")]
    pub folds: usize,
    #[serde(default = "default_repeats")]
    pub repeats: usize,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default = "default_workers")]
    pub workers: usize,
    pub datasets: Vec<DatasetEntry>,
    #[serde(default)]
    pub oversamplers: Option<OversamplerGrids>,
    #[serde(default)]
    pub classifiers: Option<ClassifierGrids>,
}

fn default_folds() -> usize {
    5
}
fn default_repeats() -> usize {
    5
}
fn default_output_dir() -> PathBuf {
    PathBuf::from("results")
}
fn default_workers() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetEntry {
    pub path: PathBuf,
    #[serde(default)]
    pub label_column: Option<String>,
    /// Defaults to the file stem.
    #[serde(default)]
    pub name: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Empty {}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KGrid {
    #[serde(default = "default_k")]
    pub k: Vec<usize>,
}

fn default_k() -> Vec<usize> {
    vec![3, 4]
}

impl Default for KGrid {
    fn default() -> Self {
        Self { k: default_k() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdasynGrid {
    #[serde(default = "default_adasyn_k")]
    pub k: Vec<usize>,
}

fn default_adasyn_k() -> Vec<usize> {
    vec![3]
}

impl Default for AdasynGrid {
    fn default() -> Self {
        Self { k: default_adasyn_k() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GSmoteGrid {
    #[serde(default = "default_selection")]
    pub selection: Vec<Selection>,
    #[serde(default = "default_k")]
    pub k: Vec<usize>,
    #[serde(default = "default_truncation")]
    pub truncation: Vec<f64>,
    #[serde(default = "default_deformation")]
    pub deformation: Vec<f64>,
}

fn default_selection() -> Vec<Selection> {
    Selection::ALL.to_vec()
}
fn default_truncation() -> Vec<f64> {
    vec![-1.0, 0.0, 0.5, 1.0]
}
fn default_deformation() -> Vec<f64> {
    vec![0.0, 0.5, 1.0]
}

impl Default for GSmoteGrid {
    fn default() -> Self {
        Self {
            selection: default_selection(),
            k: default_k(),
            truncation: default_truncation(),
            deformation: default_deformation(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OversamplerGrids {
    pub none: Option<Empty>,
    pub random: Option<Empty>,
    pub smote: Option<KGrid>,
    pub borderline1: Option<KGrid>,
    pub borderline2: Option<KGrid>,
    pub adasyn: Option<AdasynGrid>,
    pub gsmote: Option<GSmoteGrid>,
}

impl Default for OversamplerGrids {
    /// The five compared oversamplers plus the no-oversampling baseline.
    fn default() -> Self {
        Self {
            none: Some(Empty {}),
            random: None,
            smote: Some(KGrid::default()),
            borderline1: Some(KGrid::default()),
            borderline2: Some(KGrid::default()),
            adasyn: Some(AdasynGrid::default()),
            gsmote: Some(GSmoteGrid::default()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LrGrid {
    #[serde(default = "LrGrid::default_learning_rate")]
    pub learning_rate: f64,
    #[serde(default = "LrGrid::default_max_iter")]
    pub max_iter: usize,
    #[serde(default = "LrGrid::default_l2")]
    pub l2: f64,
    #[serde(default = "LrGrid::default_tol")]
    pub tol: f64,
}

impl LrGrid {
    fn default_learning_rate() -> f64 {
        LrConfig::default().learning_rate
    }
    fn default_max_iter() -> usize {
        LrConfig::default().max_iter
    }
    fn default_l2() -> f64 {
        LrConfig::default().l2
    }
    fn default_tol() -> f64 {
        LrConfig::default().tol
    }
}

impl Default for LrGrid {
    fn default() -> Self {
        let c = LrConfig::default();
        Self { learning_rate: c.learning_rate, max_iter: c.max_iter, l2: c.l2, tol: c.tol }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GbcGrid {
    #[serde(default = "GbcGrid::default_depth")]
    pub max_depth: Vec<usize>,
    #[serde(default = "GbcGrid::default_estimators")]
    pub n_estimators: Vec<usize>,
    #[serde(default = "GbcGrid::default_learning_rate")]
    pub learning_rate: f64,
}

impl GbcGrid {
    fn default_depth() -> Vec<usize> {
        vec![5, 8]
    }
    fn default_estimators() -> Vec<usize> {
        vec![50, 100]
    }
    fn default_learning_rate() -> f64 {
        0.1
    }
}

impl Default for GbcGrid {
    fn default() -> Self {
        Self {
            max_depth: Self::default_depth(),
            n_estimators: Self::default_estimators(),
            learning_rate: Self::default_learning_rate(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifierGrids {
    pub lr: Option<LrGrid>,
    pub gbc: Option<GbcGrid>,
}

impl Default for ClassifierGrids {
    fn default() -> Self {
        Self { lr: Some(LrGrid::default()), gbc: Some(GbcGrid::default()) }
    }
}

/// An oversampler family with its expanded grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodGrid {
    pub id: &'static str,
    pub grid: Vec<Oversampler>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassifierGrid {
    pub id: &'static str,
    pub grid: Vec<ClassifierConfig>,
}

fn nonempty<T>(name: &str, v: &[T]) -> Result<()> {
    ensure!(!v.is_empty(), "grid '{name}' is empty");
    Ok(())
}

impl OversamplerGrids {
    /// Expanded grids in the fixed method order none, random, smote,
    /// borderline1, borderline2, adasyn, gsmote.
    pub fn expand(&self) -> Result<Vec<MethodGrid>> {
        let mut out = Vec::new();
        if self.none.is_some() {
            out.push(MethodGrid { id: "none", grid: vec![Oversampler::None] });
        }
        if self.random.is_some() {
            out.push(MethodGrid { id: "random", grid: vec![Oversampler::Random] });
        }
        let k_family = |id: &'static str, ks: &[usize], make: &dyn Fn(usize) -> Oversampler| -> Result<MethodGrid> {
            nonempty(&format!("{id}.k"), ks)?;
            for &k in ks {
                ensure!(k >= 1, "{id}: k must be positive, got {k}");
            }
            Ok(MethodGrid { id, grid: ks.iter().map(|&k| make(k)).collect() })
        };
        if let Some(g) = &self.smote {
            out.push(k_family("smote", &g.k, &|k| Oversampler::Smote { k })?);
        }
        if let Some(g) = &self.borderline1 {
            out.push(k_family("borderline1", &g.k, &|k| Oversampler::Borderline {
                k,
                variant: BorderlineVariant::One,
            })?);
        }
        if let Some(g) = &self.borderline2 {
            out.push(k_family("borderline2", &g.k, &|k| Oversampler::Borderline {
                k,
                variant: BorderlineVariant::Two,
            })?);
        }
        if let Some(g) = &self.adasyn {
            out.push(k_family("adasyn", &g.k, &|k| Oversampler::Adasyn { k })?);
        }
        if let Some(g) = &self.gsmote {
            nonempty("gsmote.selection", &g.selection)?;
            nonempty("gsmote.k", &g.k)?;
            nonempty("gsmote.truncation", &g.truncation)?;
            nonempty("gsmote.deformation", &g.deformation)?;
            let mut grid = Vec::new();
            for &selection in &g.selection {
                for &k in &g.k {
                    for &a_trunc in &g.truncation {
                        for &a_def in &g.deformation {
                            let cfg = GSmoteConfig::new(k, a_trunc, a_def, selection)
                                .with_context(|| "invalid gsmote grid value")?;
                            grid.push(Oversampler::GSmote(cfg));
                        }
                    }
                }
            }
            out.push(MethodGrid { id: "gsmote", grid });
        }
        ensure!(!out.is_empty(), "no oversamplers selected");
        Ok(out)
    }
}

impl ClassifierGrids {
    pub fn expand(&self) -> Result<Vec<ClassifierGrid>> {
        let mut out = Vec::new();
        if let Some(g) = &self.lr {
            ensure!(g.learning_rate > 0.0, "lr.learning_rate must be positive");
            ensure!(g.l2 >= 0.0, "lr.l2 must be non-negative");
            ensure!(g.tol >= 0.0, "lr.tol must be non-negative");
            out.push(ClassifierGrid {
                id: "lr",
                grid: vec![ClassifierConfig::Logistic(LrConfig {
                    learning_rate: g.learning_rate,
                    max_iter: g.max_iter,
                    l2: g.l2,
                    tol: g.tol,
                })],
            });
        }
        if let Some(g) = &self.gbc {
            nonempty("gbc.max_depth", &g.max_depth)?;
            nonempty("gbc.n_estimators", &g.n_estimators)?;
            ensure!(g.learning_rate > 0.0, "gbc.learning_rate must be positive");
            let mut grid = Vec::new();
            for &max_depth in &g.max_depth {
                ensure!(max_depth >= 1, "gbc.max_depth must be at least 1");
                for &n_estimators in &g.n_estimators {
                    grid.push(ClassifierConfig::GradientBoosting(GbcConfig {
                        n_estimators,
                        max_depth,
                        learning_rate: g.learning_rate,
                        min_samples_leaf: 1,
                    }));
                }
            }
            out.push(ClassifierGrid { id: "gbc", grid });
        }
        ensure!(!out.is_empty(), "no classifiers selected");
        Ok(out)
    }
}

/// A validated configuration with relative paths resolved.
#[derive(Debug, Clone)]
pub struct Plan {
    pub config: RunConfig,
    pub datasets: Vec<DatasetEntry>,
    pub methods: Vec<MethodGrid>,
    pub classifiers: Vec<ClassifierGrid>,
    pub output_dir: PathBuf,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).context("cannot parse run config")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        Self::from_toml(&text)
    }

    /// Check every value and resolve paths relative to `base_dir`.
    pub fn plan(&self, base_dir: &Path) -> Result<Plan> {
        ensure!(self.folds >= 2, "folds must be at least 2, got {}", self.folds);
        ensure!(self.repeats >= 1, "repeats must be at least 1");
        ensure!(self.workers >= 1, "workers must be at least 1");
        ensure!(!self.datasets.is_empty(), "no datasets configured");
        let methods = self.oversamplers.clone().unwrap_or_default().expand()?;
        let classifiers = self.classifiers.clone().unwrap_or_default().expand()?;

        let mut datasets = Vec::new();
        let mut names = std::collections::BTreeSet::new();
        for d in &self.datasets {
            let path = if d.path.is_absolute() { d.path.clone() } else { base_dir.join(&d.path) };
            let name = match &d.name {
                Some(n) => n.clone(),
                None => path
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_default(),
            };
            if !names.insert(name.clone()) {
                bail!("duplicate dataset name '{name}'");
            }
            datasets.push(DatasetEntry { path, label_column: d.label_column.clone(), name: Some(name) });
        }
        let output_dir =
            if self.output_dir.is_absolute() { self.output_dir.clone() } else { base_dir.join(&self.output_dir) };
        Ok(Plan { config: self.clone(), datasets, methods, classifiers, output_dir })
    }
}
