use ndarray::ArrayView2;

use super::{check_training, clamp_proba, logit_loss, sigmoid, PROBA_FLOOR};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GbcConfig {
    pub n_estimators: usize,
    pub max_depth: usize,
    pub learning_rate: f64,
    pub min_samples_leaf: usize,
}

impl Default for GbcConfig {
    fn default() -> Self {
        Self { n_estimators: 100, max_depth: 3, learning_rate: 0.1, min_samples_leaf: 1 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Leaf(f64),
    /// Rows with `x[feature] <= threshold` go left.
    Split { feature: usize, threshold: f64, left: usize, right: usize },
}

/// A regression tree; node 0 is the root.
#[derive(Debug, Clone, PartialEq)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

impl Tree {
    pub fn predict_row(&self, row: &[f64]) -> f64 {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                Node::Leaf(v) => return v,
                Node::Split { feature, threshold, left, right } => {
                    i = if row[feature] <= threshold { left } else { right };
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], i: usize) -> usize {
            match nodes[i] {
                Node::Leaf(_) => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, left).max(walk(nodes, right)),
            }
        }
        walk(&self.nodes, 0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GbcModel {
    pub initial_log_odds: f64,
    pub trees: Vec<Tree>,
    pub learning_rate: f64,
    pub n_features: usize,
    /// Mean training log-loss before the first tree and after each stage.
    pub train_loss: Vec<f64>,
}

impl GbcModel {
    /// Raw additive score using only the first `stages` trees.
    pub fn staged_decision(&self, x: ArrayView2<'_, f64>, stages: usize) -> Result<Vec<f64>> {
        if x.ncols() != self.n_features {
            return Err(Error::DimensionMismatch { expected: self.n_features, actual: x.ncols() });
        }
        let trees = &self.trees[..stages.min(self.trees.len())];
        Ok(x.outer_iter()
            .map(|row| {
                let row = row.to_vec();
                self.initial_log_odds
                    + self.learning_rate * trees.iter().map(|t| t.predict_row(&row)).sum::<f64>()
            })
            .collect())
    }

    pub fn decision_function(&self, x: ArrayView2<'_, f64>) -> Result<Vec<f64>> {
        self.staged_decision(x, self.trees.len())
    }

    pub fn predict_proba(&self, x: ArrayView2<'_, f64>) -> Result<Vec<f64>> {
        self.staged_proba(x, self.trees.len())
    }

    /// Probabilities from the first `stages` trees. Boosting is stagewise,
    /// so this equals the prediction of the same configuration fitted with
    /// `n_estimators = stages`.
    pub fn staged_proba(&self, x: ArrayView2<'_, f64>, stages: usize) -> Result<Vec<f64>> {
        Ok(self.staged_decision(x, stages)?.into_iter().map(|z| clamp_proba(sigmoid(z))).collect())
    }
}

struct TreeBuilder<'a> {
    /// Feature columns, `cols[j][row]`.
    cols: &'a [Vec<f64>],
    residual: &'a [f64],
    max_depth: usize,
    min_leaf: usize,
    nodes: Vec<Node>,
    /// `(node, rows)` for every leaf, filled in later.
    leaves: Vec<(usize, Vec<u32>)>,
    goes_left: Vec<bool>,
    scratch: Vec<u32>,
}

struct BestSplit {
    gain: f64,
    feature: usize,
    threshold: f64,
}

impl TreeBuilder<'_> {
    /// `sorted[j][lo..hi]` holds the node's rows ordered by feature `j`.
    /// Children are laid out in place: left rows first, order preserved.
    fn build(&mut self, sorted: &mut [Vec<u32>], lo: usize, hi: usize, depth: usize) -> usize {
        let id = self.nodes.len();
        self.nodes.push(Node::Leaf(0.0));
        let n = hi - lo;

        let split = if depth < self.max_depth && n >= 2 * self.min_leaf {
            self.best_split(sorted, lo, hi)
        } else {
            None
        };
        let Some(split) = split else {
            let mut rows = sorted[0][lo..hi].to_vec();
            rows.sort_unstable();
            self.leaves.push((id, rows));
            return id;
        };

        let col = &self.cols[split.feature];
        for &r in &sorted[0][lo..hi] {
            self.goes_left[r as usize] = col[r as usize] <= split.threshold;
        }
        let mut n_left = 0;
        for rows in sorted.iter_mut() {
            let slice = &mut rows[lo..hi];
            self.scratch.clear();
            let mut w = 0;
            for i in 0..slice.len() {
                let r = slice[i];
                if self.goes_left[r as usize] {
                    slice[w] = r;
                    w += 1;
                } else {
                    self.scratch.push(r);
                }
            }
            slice[w..].copy_from_slice(&self.scratch);
            n_left = w;
        }
        let l = self.build(sorted, lo, lo + n_left, depth + 1);
        let r = self.build(sorted, lo + n_left, hi, depth + 1);
        self.nodes[id] = Node::Split { feature: split.feature, threshold: split.threshold, left: l, right: r };
        id
    }

    /// Largest reduction in squared error; ties keep the lowest feature,
    /// then the lowest threshold.
    fn best_split(&self, sorted: &[Vec<u32>], lo: usize, hi: usize) -> Option<BestSplit> {
        let n = hi - lo;
        let total: f64 = sorted[0][lo..hi].iter().map(|&r| self.residual[r as usize]).sum();
        let parent = total * total / n as f64;
        let mut best: Option<BestSplit> = None;
        for (feature, rows) in sorted.iter().enumerate() {
            let rows = &rows[lo..hi];
            let col = &self.cols[feature];
            let mut left_sum = 0.0;
            for i in 0..n - 1 {
                let r = rows[i] as usize;
                left_sum += self.residual[r];
                let n_left = i + 1;
                let n_right = n - n_left;
                if n_left < self.min_leaf || n_right < self.min_leaf {
                    continue;
                }
                let here = col[r];
                let next = col[rows[i + 1] as usize];
                if next <= here {
                    continue;
                }
                let right_sum = total - left_sum;
                let gain = left_sum * left_sum / n_left as f64 + right_sum * right_sum / n_right as f64
                    - parent;
                if gain > best.as_ref().map_or(0.0, |b| b.gain) {
                    let mut threshold = 0.5 * (here + next);
                    if threshold >= next {
                        threshold = here;
                    }
                    best = Some(BestSplit { gain, feature, threshold });
                }
            }
        }
        best
    }
}

/// Stagewise boosting of regression trees on log-loss residuals `y - p`.
///
/// Leaf values take one Newton step `sum(r) / sum(p(1-p))`. The shrunken
/// step is halved while it would increase the loss of the rows in that
/// leaf, so the training loss never increases from one stage to the next.
pub fn gbc_fit(x: ArrayView2<'_, f64>, y: &[bool], cfg: &GbcConfig) -> Result<GbcModel> {
    check_training(&x, y)?;
    if cfg.max_depth == 0 {
        return Err(Error::InvalidParameter("max_depth must be at least 1".into()));
    }
    if cfg.min_samples_leaf == 0 {
        return Err(Error::InvalidParameter("min_samples_leaf must be at least 1".into()));
    }
    let (n, p) = x.dim();
    let positives = y.iter().filter(|&&v| v).count() as f64;
    let prior = (positives / n as f64).clamp(PROBA_FLOOR, 1.0 - PROBA_FLOOR);
    let init = (prior / (1.0 - prior)).ln();

    let cols: Vec<Vec<f64>> = (0..p).map(|j| x.column(j).to_vec()).collect();
    let mut presorted: Vec<Vec<u32>> = Vec::with_capacity(p);
    for col in &cols {
        let mut idx: Vec<u32> = (0..n as u32).collect();
        idx.sort_by(|&a, &b| col[a as usize].total_cmp(&col[b as usize]).then(a.cmp(&b)));
        presorted.push(idx);
    }

    let mut score = vec![init; n];
    // per-row loss at the current scores
    let mut row_loss: Vec<f64> = y.iter().map(|&yi| logit_loss(init, yi)).collect();
    let mean_loss = |l: &[f64]| l.iter().sum::<f64>() / n as f64;
    let mut train_loss = vec![mean_loss(&row_loss)];
    let mut trees = Vec::with_capacity(cfg.n_estimators);
    let mut residual = vec![0.0; n];
    let mut hessian = vec![0.0; n];
    let mut sorted = presorted.clone();
    let mut candidate = Vec::with_capacity(n);

    for _ in 0..cfg.n_estimators {
        for i in 0..n {
            let pr = sigmoid(score[i]);
            residual[i] = if y[i] { 1.0 } else { 0.0 } - pr;
            hessian[i] = pr * (1.0 - pr);
        }
        for (s, p) in sorted.iter_mut().zip(&presorted) {
            s.copy_from_slice(p);
        }
        let mut builder = TreeBuilder {
            cols: &cols,
            residual: &residual,
            max_depth: cfg.max_depth,
            min_leaf: cfg.min_samples_leaf,
            nodes: Vec::new(),
            leaves: Vec::new(),
            goes_left: vec![false; n],
            scratch: Vec::with_capacity(n),
        };
        builder.build(&mut sorted, 0, n, 0);
        let TreeBuilder { mut nodes, leaves, .. } = builder;

        for (node, rows) in leaves {
            let (g, h) = rows
                .iter()
                .fold((0.0, 0.0), |(g, h), &r| (g + residual[r as usize], h + hessian[r as usize]));
            let newton = g / h.max(1e-12);
            let base: f64 = rows.iter().map(|&r| row_loss[r as usize]).sum();
            let mut delta = cfg.learning_rate * newton;
            let mut accepted = false;
            for _ in 0..60 {
                if delta.is_finite() {
                    candidate.clear();
                    candidate.extend(rows.iter().map(|&r| logit_loss(score[r as usize] + delta, y[r as usize])));
                    if candidate.iter().sum::<f64>() <= base {
                        accepted = true;
                        break;
                    }
                }
                delta *= 0.5;
            }
            if accepted {
                for (&r, &l) in rows.iter().zip(&candidate) {
                    score[r as usize] += delta;
                    row_loss[r as usize] = l;
                }
            }
            let delta = if accepted { delta } else { 0.0 };
            nodes[node] = Node::Leaf(if cfg.learning_rate > 0.0 { delta / cfg.learning_rate } else { 0.0 });
        }
        trees.push(Tree { nodes });
        train_loss.push(mean_loss(&row_loss));
    }

    Ok(GbcModel {
        initial_log_odds: init,
        trees,
        learning_rate: cfg.learning_rate,
        n_features: p,
        train_loss,
    })
}
