use ndarray::ArrayView2;

use super::{check_training, clamp_proba, sigmoid};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LrConfig {
    pub learning_rate: f64,
    pub max_iter: usize,
    pub l2: f64,
    pub tol: f64,
}

impl Default for LrConfig {
    fn default() -> Self {
        Self { learning_rate: 0.1, max_iter: 5000, l2: 1e-4, tol: 1e-8 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LrModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub iterations: usize,
    pub final_loss: f64,
    /// Loss after every accepted step, starting from the initial point.
    pub loss_history: Vec<f64>,
}

/// Mean log-loss plus `l2 / 2 * |w|^2`, with its gradient in `w` and `b`.
/// The bias is not regularized.
pub fn lr_objective(
    weights: &[f64],
    bias: f64,
    x: ArrayView2<'_, f64>,
    y: &[bool],
    l2: f64,
) -> (f64, Vec<f64>, f64) {
    let x = x.as_standard_layout();
    objective(weights, bias, x.as_slice().expect("standard layout"), y, l2, &mut Vec::new())
}

// Row-major slice version. One exponential per row serves both the loss
// and the sigmoid; the `ln(1 + e)` terms are multiplied in blocks and
// logged once per block (each factor lies in [1, 2]). `buf` holds the
// per-row scores and then the per-row errors.
fn objective(weights: &[f64], bias: f64, x: &[f64], y: &[bool], l2: f64, buf: &mut Vec<f64>) -> (f64, Vec<f64>, f64) {
    const BLOCK: usize = 64;
    let p = weights.len().max(1);
    let n = y.len() as f64;
    buf.clear();
    buf.extend(x.chunks_exact(p).map(|row| bias + row.iter().zip(weights).map(|(a, w)| a * w).sum::<f64>()));

    let mut linear = 0.0;
    let mut log_terms = 0.0;
    let mut grad_b = 0.0;
    for (block, labels) in buf.chunks_mut(BLOCK).zip(y.chunks(BLOCK)) {
        let mut product = 1.0;
        for (z, &yi) in block.iter_mut().zip(labels) {
            let e = (-z.abs()).exp();
            let t = if yi { 1.0 } else { 0.0 };
            linear += z.max(0.0) - t * *z;
            product *= 1.0 + e;
            let prob = if *z >= 0.0 { 1.0 } else { e } / (1.0 + e);
            *z = prob - t;
            grad_b += *z;
        }
        log_terms += product.ln();
    }

    let mut grad = vec![0.0; weights.len()];
    for (row, err) in x.chunks_exact(p).zip(buf.iter()) {
        for (g, a) in grad.iter_mut().zip(row) {
            *g += err * a;
        }
    }
    let penalty: f64 = weights.iter().map(|w| w * w).sum::<f64>() * l2 / 2.0;
    for (g, w) in grad.iter_mut().zip(weights) {
        *g = *g / n + l2 * w;
    }
    ((linear + log_terms) / n + penalty, grad, grad_b / n)
}

/// Full-batch gradient descent from zero weights. A step that would raise
/// the loss is rejected and the step size halved, so accepted losses never
/// increase. Stops when an accepted step improves the loss by less than
/// `tol` or after `max_iter` iterations.
pub fn lr_fit(x: ArrayView2<'_, f64>, y: &[bool], cfg: &LrConfig) -> Result<LrModel> {
    check_training(&x, y)?;
    let p = x.ncols();
    let rows = x.as_standard_layout();
    let rows = rows.as_slice().expect("standard layout");
    let mut buf = Vec::with_capacity(y.len());
    let mut weights = vec![0.0; p];
    let mut bias = 0.0;
    let (mut loss, mut grad, mut grad_b) = objective(&weights, bias, rows, y, cfg.l2, &mut buf);
    let mut step = cfg.learning_rate;
    let mut history = vec![loss];
    let mut iterations = 0;

    while iterations < cfg.max_iter {
        iterations += 1;
        let cand_w: Vec<f64> = weights.iter().zip(&grad).map(|(w, g)| w - step * g).collect();
        let cand_b = bias - step * grad_b;
        let (cand_loss, cand_grad, cand_grad_b) = objective(&cand_w, cand_b, rows, y, cfg.l2, &mut buf);
        if !cand_loss.is_finite() {
            return Err(Error::Numerical(format!(
                "logistic regression loss became {cand_loss} at iteration {iterations}; is the input scaled?"
            )));
        }
        if cand_loss <= loss {
            let improvement = loss - cand_loss;
            weights = cand_w;
            bias = cand_b;
            loss = cand_loss;
            grad = cand_grad;
            grad_b = cand_grad_b;
            history.push(loss);
            if improvement < cfg.tol {
                break;
            }
        } else {
            step *= 0.5;
            if step < 1e-12 {
                break;
            }
        }
    }

    Ok(LrModel { weights, bias, iterations, final_loss: loss, loss_history: history })
}

impl LrModel {
    pub fn decision_function(&self, x: ArrayView2<'_, f64>) -> Result<Vec<f64>> {
        if x.ncols() != self.weights.len() {
            return Err(Error::DimensionMismatch { expected: self.weights.len(), actual: x.ncols() });
        }
        Ok(x.outer_iter()
            .map(|row| self.bias + row.iter().zip(&self.weights).map(|(a, w)| a * w).sum::<f64>())
            .collect())
    }

    pub fn predict_proba(&self, x: ArrayView2<'_, f64>) -> Result<Vec<f64>> {
        Ok(self.decision_function(x)?.into_iter().map(|z| clamp_proba(sigmoid(z))).collect())
    }
}
