//! Binary classifiers used to score oversamplers: L2-regularized logistic
//! regression and gradient-boosted regression trees on the log-loss.
//!
//! Labels are `bool` with `true` for the positive (minority) class.
//! Probabilities are always clamped to `[PROBA_FLOOR, 1 - PROBA_FLOOR]`.

mod gbc;
mod logistic;

use ndarray::ArrayView2;

use crate::error::{Error, Result};

pub use gbc::{gbc_fit, GbcConfig, GbcModel, Node, Tree};
pub use logistic::{lr_fit, lr_objective, LrConfig, LrModel};

pub const PROBA_FLOOR: f64 = 1e-12;

pub fn clamp_proba(p: f64) -> f64 {
    p.clamp(PROBA_FLOOR, 1.0 - PROBA_FLOOR)
}

/// Logistic function, evaluated without overflow for large `|z|`.
pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^z)` without overflow.
pub(crate) fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

/// Log-loss of a raw score `z` against label `y`.
pub(crate) fn logit_loss(z: f64, y: bool) -> f64 {
    softplus(z) - if y { z } else { 0.0 }
}

/// Mean binary cross-entropy of probabilities (clamped first).
pub fn log_loss(y: &[bool], proba: &[f64]) -> f64 {
    let total: f64 = y
        .iter()
        .zip(proba)
        .map(|(&yi, &p)| {
            let p = clamp_proba(p);
            if yi {
                -p.ln()
            } else {
                -(1.0 - p).ln()
            }
        })
        .sum();
    total / y.len() as f64
}

fn check_training(x: &ArrayView2<'_, f64>, y: &[bool]) -> Result<()> {
    if x.nrows() == 0 {
        return Err(Error::InvalidParameter("cannot fit on zero rows".into()));
    }
    if x.nrows() != y.len() {
        return Err(Error::DimensionMismatch { expected: x.nrows(), actual: y.len() });
    }
    Ok(())
}

/// A classifier family with its hyper-parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClassifierConfig {
    Logistic(LrConfig),
    GradientBoosting(GbcConfig),
}

impl ClassifierConfig {
    pub fn id(&self) -> &'static str {
        match self {
            ClassifierConfig::Logistic(_) => "lr",
            ClassifierConfig::GradientBoosting(_) => "gbc",
        }
    }

    pub fn params(&self) -> String {
        match self {
            ClassifierConfig::Logistic(c) => format!(
                "learning_rate={};max_iter={};l2={};tol={}",
                c.learning_rate, c.max_iter, c.l2, c.tol
            ),
            ClassifierConfig::GradientBoosting(c) => format!(
                "max_depth={};n_estimators={};learning_rate={}",
                c.max_depth, c.n_estimators, c.learning_rate
            ),
        }
    }

    pub fn fit(&self, x: ArrayView2<'_, f64>, y: &[bool]) -> Result<Model> {
        Ok(match self {
            ClassifierConfig::Logistic(c) => Model::Logistic(lr_fit(x, y, c)?),
            ClassifierConfig::GradientBoosting(c) => Model::GradientBoosting(gbc_fit(x, y, c)?),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Logistic(LrModel),
    GradientBoosting(GbcModel),
}

impl Model {
    pub fn predict_proba(&self, x: ArrayView2<'_, f64>) -> Result<Vec<f64>> {
        match self {
            Model::Logistic(m) => m.predict_proba(x),
            Model::GradientBoosting(m) => m.predict_proba(x),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigmoid_is_stable() {
        assert_eq!(sigmoid(0.0), 0.5);
        assert!((sigmoid(0.5) - 0.6225).abs() < 1e-4);
        assert!(sigmoid(1e6).is_finite() && sigmoid(-1e6).is_finite());
        assert!(clamp_proba(sigmoid(1e6)) < 1.0);
        assert!(clamp_proba(sigmoid(-1e6)) > 0.0);
    }

    #[test]
    fn softplus_matches_direct_form() {
        for z in [-30.0, -2.0, 0.0, 0.7, 12.0] {
            assert!((softplus(z) - (1.0 + f64::exp(z)).ln()).abs() < 1e-12);
        }
        assert_eq!(softplus(1000.0), 1000.0);
    }
}
