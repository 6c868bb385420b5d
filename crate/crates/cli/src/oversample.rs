//! Oversample a single dataset and write original plus synthetic rows.

use std::io::Write;

use anyhow::{Context, Result};
use gsmote::oversampling::BorderlineVariant;
use gsmote::seeding::stream;
use gsmote::{synthetic_count, Dataset, GSmoteConfig, Oversampler, Selection};
use ndarray::Axis;

/// Method parameters from the command line; unset values take defaults.
#[derive(Debug, Clone, Default)]
pub struct MethodParams {
    pub k: Option<usize>,
    pub truncation: Option<f64>,
    pub deformation: Option<f64>,
    pub selection: Option<Selection>,
}

pub fn build_oversampler(method: &str, params: &MethodParams) -> Result<Oversampler> {
    let id = Oversampler::family_from_id(method)?;
    let k = params.k.unwrap_or(5);
    let o = match id {
        "none" => Oversampler::None,
        "random" => Oversampler::Random,
        "smote" => Oversampler::Smote { k },
        "borderline1" => Oversampler::Borderline { k, variant: BorderlineVariant::One },
        "borderline2" => Oversampler::Borderline { k, variant: BorderlineVariant::Two },
        "adasyn" => Oversampler::Adasyn { k },
        "gsmote" => Oversampler::GSmote(GSmoteConfig::new(
            k,
            params.truncation.unwrap_or(1.0),
            params.deformation.unwrap_or(0.0),
            params.selection.unwrap_or(Selection::Combined),
        )?),
        _ => unreachable!("family_from_id returned an unknown id"),
    };
    o.validate()?;
    Ok(o)
}

/// Rows appended by [`oversample`], with the fallback taken if any.
#[derive(Debug)]
pub struct OversampleSummary {
    pub original: usize,
    pub synthetic: usize,
    pub fallback: Option<String>,
}

/// Balance `data` on its raw feature scale and write the CSV: features,
/// label, and a `synthetic` column holding 0 or 1.
pub fn oversample<W: Write>(data: &Dataset, oversampler: &Oversampler, seed: u64, out: W) -> Result<OversampleSummary> {
    let x = data.features();
    let min = x.select(Axis(0), &data.minority_indices());
    let maj = x.select(Axis(0), &data.majority_indices());
    let n = match oversampler {
        Oversampler::None => 0,
        _ => synthetic_count(data),
    };
    let mut rng = stream(seed, &[data.name().into(), oversampler.id().into()]);
    let batch = if n == 0 {
        gsmote::SyntheticBatch::empty(data.n_features())
    } else {
        oversampler
            .generate(min.view(), maj.view(), n, &mut rng)
            .with_context(|| format!("oversampling {} with {}", data.name(), oversampler.id()))?
    };

    let mut wtr = csv::Writer::from_writer(out);
    let mut header = data.feature_names().to_vec();
    header.push(data.label_name().to_string());
    header.push("synthetic".into());
    wtr.write_record(&header)?;
    for (row, label) in x.outer_iter().zip(data.labels()) {
        let mut rec: Vec<String> = row.iter().map(f64::to_string).collect();
        rec.push(label.clone());
        rec.push("0".into());
        wtr.write_record(&rec)?;
    }
    for row in batch.samples.outer_iter() {
        let mut rec: Vec<String> = row.iter().map(f64::to_string).collect();
        rec.push(data.minority_label().to_string());
        rec.push("1".into());
        wtr.write_record(&rec)?;
    }
    wtr.flush()?;
    Ok(OversampleSummary {
        original: data.n_rows(),
        synthetic: batch.len(),
        fallback: batch.fallback.map(|f| f.to_string()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_method_lists_valid_ids() {
        let err = build_oversampler("tomek", &MethodParams::default()).unwrap_err().to_string();
        assert!(err.contains("tomek") && err.contains("gsmote") && err.contains("borderline2"), "{err}");
    }

    #[test]
    fn gsmote_parameters_are_validated() {
        let p = MethodParams { truncation: Some(1.5), ..Default::default() };
        assert!(build_oversampler("gsmote", &p).is_err());
        let p = MethodParams { k: Some(3), selection: Some(Selection::Majority), ..Default::default() };
        assert!(matches!(build_oversampler("gsmote", &p).unwrap(), Oversampler::GSmote(c) if c.k == 3));
    }
}
