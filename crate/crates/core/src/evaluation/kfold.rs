use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::seeding;

/// Fold index in `0..n_folds` for every row.
///
/// Each class is shuffled and dealt round-robin over the folds, so per-class
/// counts differ by at most one between folds. The second class starts
/// dealing where the first stopped, which also keeps total fold sizes within
/// one of each other.
pub fn stratified_kfold(labels: &[bool], n_folds: usize, seed: u64) -> Result<Vec<usize>> {
    if n_folds < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 folds, got {n_folds}")));
    }
    let mut rng = seeding::stream(seed, &["stratified_kfold".into()]);
    let mut folds = vec![usize::MAX; labels.len()];
    let mut next = 0;
    for class in [true, false] {
        let mut idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        if idx.len() < n_folds {
            return Err(Error::InvalidParameter(format!(
                "class has {} rows, fewer than {n_folds} folds",
                idx.len()
            )));
        }
        idx.shuffle(&mut rng);
        for i in idx {
            folds[i] = next;
            next = (next + 1) % n_folds;
        }
    }
    Ok(folds)
}
