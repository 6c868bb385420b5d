//! Binary-labeled tabular datasets: CSV loading, min-max scaling and the
//! balancing target used by every oversampler.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use ndarray::{Array2, ArrayView2, Axis};

use crate::error::{Error, Result};

/// A feature matrix with exactly two classes.
///
/// The rarer class is the minority class. When both classes have the same
/// count, the label that sorts last lexicographically is the minority, so
/// `"0"/"1"` data treats `"1"` as positive.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    name: String,
    feature_names: Vec<String>,
    label_name: String,
    features: Array2<f64>,
    labels: Vec<String>,
    minority_label: String,
    majority_label: String,
    is_minority: Vec<bool>,
}

impl Dataset {
    pub fn new(
        name: impl Into<String>,
        feature_names: Vec<String>,
        label_name: impl Into<String>,
        features: Array2<f64>,
        labels: Vec<String>,
    ) -> Result<Self> {
        let (n, p) = features.dim();
        if n < 2 {
            return Err(Error::InvalidDataset(format!("need at least 2 rows, got {n}")));
        }
        if p == 0 {
            return Err(Error::InvalidDataset("need at least 1 feature column".into()));
        }
        if labels.len() != n {
            return Err(Error::DimensionMismatch { expected: n, actual: labels.len() });
        }
        if feature_names.len() != p {
            return Err(Error::DimensionMismatch { expected: p, actual: feature_names.len() });
        }
        if let Some(((row, col), v)) = features.indexed_iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::Parse {
                row,
                column: feature_names[col].clone(),
                value: v.to_string(),
            });
        }

        let mut counts: BTreeMap<String, usize> = BTreeMap::new();
        for l in &labels {
            *counts.entry(l.clone()).or_default() += 1;
        }
        if counts.len() != 2 {
            return Err(Error::NotBinary(counts.len()));
        }
        let mut it = counts.into_iter();
        let (first, first_count) = it.next().unwrap();
        let (second, second_count) = it.next().unwrap();
        // BTreeMap order is lexicographic; ties go to the later label.
        let (minority, majority) =
            if first_count < second_count { (first, second) } else { (second, first) };
        let is_minority = labels.iter().map(|l| *l == minority).collect();

        Ok(Self {
            name: name.into(),
            feature_names,
            label_name: label_name.into(),
            features,
            labels,
            minority_label: minority,
            majority_label: majority,
            is_minority,
        })
    }

    /// Load a CSV file with a header row. `label_column = None` selects the
    /// last column.
    pub fn load_csv(path: impl AsRef<Path>, label_column: Option<&str>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        Self::from_reader(file, name, label_column)
    }

    pub fn from_reader<R: Read>(
        reader: R,
        name: impl Into<String>,
        label_column: Option<&str>,
    ) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        let header: Vec<String> = rdr.headers()?.iter().map(|h| h.trim().to_string()).collect();
        if header.len() < 2 {
            return Err(Error::InvalidDataset(format!(
                "need a label column and at least one feature column, header has {} columns",
                header.len()
            )));
        }
        let label_idx = match label_column {
            Some(name) => header
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::MissingLabelColumn(name.to_string()))?,
            None => header.len() - 1,
        };
        let feature_names: Vec<String> = header
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != label_idx)
            .map(|(_, h)| h.clone())
            .collect();

        let mut values = Vec::new();
        let mut labels = Vec::new();
        for (row, record) in rdr.records().enumerate() {
            let record = record?;
            if record.len() != header.len() {
                return Err(Error::InvalidDataset(format!(
                    "row {row} has {} fields, header has {}",
                    record.len(),
                    header.len()
                )));
            }
            for (col, cell) in record.iter().enumerate() {
                let cell = cell.trim();
                if col == label_idx {
                    labels.push(cell.to_string());
                    continue;
                }
                match cell.parse::<f64>() {
                    Ok(v) if v.is_finite() => values.push(v),
                    _ => {
                        return Err(Error::Parse {
                            row,
                            column: header[col].clone(),
                            value: cell.to_string(),
                        })
                    }
                }
            }
        }
        let n = labels.len();
        let features = Array2::from_shape_vec((n, feature_names.len()), values)
            .map_err(|e| Error::InvalidDataset(e.to_string()))?;
        let label_name = header[label_idx].clone();
        Self::new(name, feature_names, label_name, features, labels)
    }

    /// Write the dataset as CSV, features first and the label column last.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        let mut header = self.feature_names.clone();
        header.push(self.label_name.clone());
        wtr.write_record(&header)?;
        for (row, label) in self.features.outer_iter().zip(&self.labels) {
            let mut rec: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            rec.push(label.clone());
            wtr.write_record(&rec)?;
        }
        wtr.flush().map_err(|source| Error::Io { path: "<csv writer>".into(), source })?;
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn label_name(&self) -> &str {
        &self.label_name
    }

    pub fn features(&self) -> ArrayView2<'_, f64> {
        self.features.view()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn minority_label(&self) -> &str {
        &self.minority_label
    }

    pub fn majority_label(&self) -> &str {
        &self.majority_label
    }

    /// `true` for minority rows. The minority class is the positive class.
    pub fn is_minority(&self) -> &[bool] {
        &self.is_minority
    }

    pub fn n_rows(&self) -> usize {
        self.features.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.features.ncols()
    }

    pub fn minority_indices(&self) -> Vec<usize> {
        (0..self.n_rows()).filter(|&i| self.is_minority[i]).collect()
    }

    pub fn majority_indices(&self) -> Vec<usize> {
        (0..self.n_rows()).filter(|&i| !self.is_minority[i]).collect()
    }

    pub fn minority_count(&self) -> usize {
        self.is_minority.iter().filter(|&&m| m).count()
    }

    pub fn majority_count(&self) -> usize {
        self.n_rows() - self.minority_count()
    }

    pub fn imbalance_ratio(&self) -> f64 {
        self.majority_count() as f64 / self.minority_count() as f64
    }
}

/// Number of synthetic minority rows needed for equal class counts.
pub fn synthetic_count(dataset: &Dataset) -> usize {
    dataset.majority_count() - dataset.minority_count()
}

/// Per-feature minimum and maximum of the fitting data.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingParams {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl ScalingParams {
    pub fn fit(features: ArrayView2<'_, f64>) -> Self {
        let p = features.ncols();
        let mut min = vec![f64::INFINITY; p];
        let mut max = vec![f64::NEG_INFINITY; p];
        for row in features.outer_iter() {
            for (j, &v) in row.iter().enumerate() {
                min[j] = min[j].min(v);
                max[j] = max[j].max(v);
            }
        }
        Self { min, max }
    }

    /// `(x - min) / (max - min)`; constant features map to 0. Values outside
    /// the fitted range fall outside `[0, 1]`.
    pub fn apply(&self, features: ArrayView2<'_, f64>) -> Array2<f64> {
        let mut out = features.to_owned();
        for mut row in out.axis_iter_mut(Axis(0)) {
            for (j, v) in row.iter_mut().enumerate() {
                let range = self.max[j] - self.min[j];
                *v = if range > 0.0 { (*v - self.min[j]) / range } else { 0.0 };
            }
        }
        out
    }
}

pub fn fit_minmax(features: ArrayView2<'_, f64>) -> ScalingParams {
    ScalingParams::fit(features)
}

pub fn apply_minmax(params: &ScalingParams, features: ArrayView2<'_, f64>) -> Array2<f64> {
    params.apply(features)
}
