use ndarray::{concatenate, ArrayView2, Axis};
use rand::Rng;

use super::{minority_neighbor_table, row, Fallback, Provenance, SurfaceSource, SyntheticBatch};
use crate::error::{Error, Result};
use crate::neighbors::knn;
use crate::oversampling::interpolate;

/// Fraction of majority rows among the `k` nearest neighbors (both classes)
/// of every minority row.
pub fn adasyn_weights(
    majority: ArrayView2<'_, f64>,
    minority: ArrayView2<'_, f64>,
    k: usize,
) -> Result<Vec<f64>> {
    let n_min = minority.nrows();
    let all = if majority.nrows() == 0 {
        minority.to_owned()
    } else {
        concatenate(Axis(0), &[minority, majority]).map_err(|_| Error::DimensionMismatch {
            expected: minority.ncols(),
            actual: majority.ncols(),
        })?
    };
    (0..n_min)
        .map(|i| {
            let nb = knn(&row(minority, i), all.view(), k, Some(i))?;
            Ok(nb.indices.iter().filter(|&&j| j >= n_min).count() as f64 / k as f64)
        })
        .collect()
}

/// Split `n` into integer counts proportional to `weights` by the largest
/// remainder method. Remainder ties go to the lower index. An all-zero
/// weight vector is treated as uniform.
pub fn allocate(weights: &[f64], n: usize) -> Vec<usize> {
    if weights.is_empty() {
        return Vec::new();
    }
    let total: f64 = weights.iter().sum();
    let quotas: Vec<f64> = if total > 0.0 {
        weights.iter().map(|w| w / total * n as f64).collect()
    } else {
        vec![n as f64 / weights.len() as f64; weights.len()]
    };
    let mut counts: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
    let assigned: usize = counts.iter().sum();
    let mut by_remainder: Vec<usize> = (0..weights.len()).collect();
    by_remainder.sort_by(|&a, &b| {
        let ra = quotas[a] - quotas[a].floor();
        let rb = quotas[b] - quotas[b].floor();
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    for &i in by_remainder.iter().cycle().take(n.saturating_sub(assigned)) {
        counts[i] += 1;
    }
    counts
}

/// ADASYN: more samples around minority rows with more majority neighbors,
/// each interpolated towards a random one of its `k` minority neighbors.
pub fn adasyn_generate<R: Rng + ?Sized>(
    majority: ArrayView2<'_, f64>,
    minority: ArrayView2<'_, f64>,
    n: usize,
    k: usize,
    rng: &mut R,
) -> Result<SyntheticBatch> {
    let p = minority.ncols();
    if n == 0 {
        return Ok(SyntheticBatch::empty(p));
    }
    let weights = adasyn_weights(majority, minority, k)?;
    let table = minority_neighbor_table(minority, k)?;
    let fallback = if weights.iter().all(|&w| w == 0.0) {
        log::warn!("adasyn: no minority row has majority neighbors, allocating uniformly");
        Some(Fallback::ZeroAdasynWeights)
    } else {
        None
    };
    let counts = allocate(&weights, n);

    let mut rows = Vec::with_capacity(n);
    let mut provenance = Vec::with_capacity(n);
    for (c, &count) in counts.iter().enumerate() {
        let x = row(minority, c);
        let nb = &table[c];
        for _ in 0..count {
            let pick = rng.random_range(0..nb.indices.len());
            let step: f64 = rng.random();
            let partner = nb.indices[pick];
            rows.push(interpolate(&x, &row(minority, partner), step));
            provenance.push(Provenance {
                center: c,
                surface: Some((SurfaceSource::Minority, partner)),
                radius: nb.distances[pick],
            });
        }
    }
    let mut batch = SyntheticBatch::from_rows(p, rows, provenance);
    batch.fallback = fallback;
    Ok(batch)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn allocation_by_hand() {
        assert_eq!(allocate(&[0.75, 0.25], 4), vec![3, 1]);
        assert_eq!(allocate(&[0.5, 0.5, 0.5], 6), vec![2, 2, 2]);
        assert_eq!(allocate(&[0.2, 0.2, 0.2], 4), vec![2, 1, 1]);
        assert_eq!(allocate(&[0.0, 0.0], 3), vec![2, 1]);
    }

    #[test]
    fn weights_count_majority_neighbors() {
        let min = array![[0.0], [10.0], [10.5]];
        let maj = array![[1.0], [-1.0], [2.0]];
        let w = adasyn_weights(maj.view(), min.view(), 1).unwrap();
        assert_eq!(w, vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn zero_weights_fall_back_to_uniform() {
        let min = array![[0.0], [0.1], [0.2]];
        let maj = array![[10.0], [11.0]];
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let b = adasyn_generate(maj.view(), min.view(), 6, 2, &mut rng).unwrap();
        assert_eq!(b.fallback, Some(Fallback::ZeroAdasynWeights));
        for c in 0..3 {
            assert_eq!(b.provenance.iter().filter(|p| p.center == c).count(), 2);
        }
    }

    proptest! {
        #[test]
        fn allocation_sums_to_n(weights in prop::collection::vec(0.0f64..1.0, 1..30), n in 0usize..500) {
            let counts = allocate(&weights, n);
            prop_assert_eq!(counts.iter().sum::<usize>(), n);
            let total: f64 = weights.iter().sum();
            if total > 0.0 {
                for (c, w) in counts.iter().zip(&weights) {
                    let quota = w / total * n as f64;
                    prop_assert!((*c as f64 - quota).abs() < 1.0 + 1e-9);
                }
            }
        }
    }
}
