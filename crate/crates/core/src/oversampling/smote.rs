use ndarray::{concatenate, ArrayView2, Axis};
use rand::Rng;

use super::{
    center_order, minority_neighbor_table, row, Fallback, Provenance, SurfaceSource,
    SyntheticBatch,
};
use crate::error::{Error, Result};
use crate::neighbors::{knn, NeighborResult};

/// `x + step * (toward - x)`.
pub fn interpolate(x: &[f64], toward: &[f64], step: f64) -> Vec<f64> {
    x.iter().zip(toward).map(|(a, b)| a + step * (b - a)).collect()
}

/// Linear interpolation between each minority row and a random one of its
/// `k` nearest minority neighbors, with the step drawn from U(0, 1).
pub fn smote_generate<R: Rng + ?Sized>(
    minority: ArrayView2<'_, f64>,
    n: usize,
    k: usize,
    rng: &mut R,
) -> Result<SyntheticBatch> {
    let p = minority.ncols();
    if n == 0 {
        return Ok(SyntheticBatch::empty(p));
    }
    let table = minority_neighbor_table(minority, k)?;
    let order = center_order(minority.nrows(), rng);

    let mut rows = Vec::with_capacity(n);
    let mut provenance = Vec::with_capacity(n);
    for &c in order.iter().cycle().take(n) {
        let nb = &table[c];
        let pick = rng.random_range(0..nb.indices.len());
        let step: f64 = rng.random();
        let partner = nb.indices[pick];
        rows.push(interpolate(&row(minority, c), &row(minority, partner), step));
        provenance.push(Provenance {
            center: c,
            surface: Some((SurfaceSource::Minority, partner)),
            radius: nb.distances[pick],
        });
    }
    Ok(SyntheticBatch::from_rows(p, rows, provenance))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BorderlineVariant {
    /// Interpolate towards minority neighbors only.
    One,
    /// Interpolate towards any neighbor; steps towards majority rows are
    /// drawn from U(0, 0.5).
    Two,
}

/// Minority rows stacked above majority rows; row `i < n_min` is minority.
fn stack<'a>(minority: ArrayView2<'a, f64>, majority: ArrayView2<'a, f64>) -> Result<ndarray::Array2<f64>> {
    if majority.nrows() == 0 {
        return Ok(minority.to_owned());
    }
    concatenate(Axis(0), &[minority, majority]).map_err(|_| Error::DimensionMismatch {
        expected: minority.ncols(),
        actual: majority.ncols(),
    })
}

/// Indices of minority rows whose `m` nearest neighbors over both classes
/// are at least half but not all majority.
pub fn danger_set(
    majority: ArrayView2<'_, f64>,
    minority: ArrayView2<'_, f64>,
    m: usize,
) -> Result<Vec<usize>> {
    let all = stack(minority, majority)?;
    let n_min = minority.nrows();
    let mut danger = Vec::new();
    for i in 0..n_min {
        let nb = knn(&row(minority, i), all.view(), m, Some(i))?;
        let n_maj = nb.indices.iter().filter(|&&j| j >= n_min).count();
        if 2 * n_maj >= m && n_maj < m {
            danger.push(i);
        }
    }
    Ok(danger)
}

/// Borderline-SMOTE: SMOTE restricted to centers in the danger set, with the
/// danger neighborhood size tied to `k`. Falls back to plain SMOTE, flagged
/// in the batch, when the danger set is empty.
pub fn borderline_smote<R: Rng + ?Sized>(
    majority: ArrayView2<'_, f64>,
    minority: ArrayView2<'_, f64>,
    n: usize,
    k: usize,
    variant: BorderlineVariant,
    rng: &mut R,
) -> Result<SyntheticBatch> {
    let p = minority.ncols();
    if n == 0 {
        return Ok(SyntheticBatch::empty(p));
    }
    let danger = danger_set(majority, minority, k)?;
    if danger.is_empty() {
        log::warn!("borderline-smote: danger set is empty, falling back to smote");
        let mut batch = smote_generate(minority, n, k, rng)?;
        batch.fallback = Some(Fallback::EmptyDangerSet);
        return Ok(batch);
    }

    let n_min = minority.nrows();
    let all = stack(minority, majority)?;
    let neighbors: Vec<NeighborResult> = match variant {
        BorderlineVariant::One => minority_neighbor_table(minority, k)?,
        BorderlineVariant::Two => (0..n_min)
            .map(|i| knn(&row(minority, i), all.view(), k, Some(i)))
            .collect::<Result<_>>()?,
    };

    let order = center_order(danger.len(), rng);
    let mut rows = Vec::with_capacity(n);
    let mut provenance = Vec::with_capacity(n);
    for &slot in order.iter().cycle().take(n) {
        let c = danger[slot];
        let nb = &neighbors[c];
        let pick = rng.random_range(0..nb.indices.len());
        let j = nb.indices[pick];
        let (source, index, max_step) = if j < n_min {
            (SurfaceSource::Minority, j, 1.0)
        } else {
            (SurfaceSource::Majority, j - n_min, 0.5)
        };
        let step = rng.random::<f64>() * max_step;
        rows.push(interpolate(&row(minority, c), &all.row(j).to_vec(), step));
        provenance.push(Provenance {
            center: c,
            surface: Some((source, index)),
            radius: nb.distances[pick] * max_step,
        });
    }
    Ok(SyntheticBatch::from_rows(p, rows, provenance))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::neighbors::distance;
    use ndarray::array;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn interpolation_examples() {
        assert_eq!(interpolate(&[0.0, 0.0], &[2.0, 2.0], 0.5), vec![1.0, 1.0]);
        assert_eq!(interpolate(&[0.3, -1.0], &[2.0, 2.0], 0.0), vec![0.3, -1.0]);
        assert_eq!(interpolate(&[0.0, 0.0], &[2.0, 2.0], 1.0), vec![2.0, 2.0]);
    }

    #[test]
    fn smote_needs_k_plus_one_rows() {
        let min = array![[0.0], [1.0]];
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(
            smote_generate(min.view(), 3, 2, &mut rng),
            Err(Error::NotEnoughNeighbors { .. })
        ));
    }

    #[test]
    fn smote_samples_on_segments() {
        let min = array![[0.0, 0.0], [2.0, 0.0], [0.0, 2.0], [3.0, 3.0]];
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let b = smote_generate(min.view(), 40, 2, &mut rng).unwrap();
        assert_eq!(b.len(), 40);
        for (s, prov) in b.samples.outer_iter().zip(&b.provenance) {
            let (_, partner) = prov.surface.unwrap();
            let a = min.row(prov.center).to_vec();
            let c = min.row(partner).to_vec();
            let s = s.to_vec();
            let total = distance(&a, &c);
            assert!((distance(&a, &s) + distance(&s, &c) - total).abs() < 1e-12);
        }
    }

    #[test]
    fn isolated_minority_has_empty_danger_set_and_falls_back() {
        let min = array![[0.0, 0.0], [0.1, 0.0], [0.0, 0.1], [0.1, 0.1]];
        let maj = array![[10.0, 10.0], [10.1, 10.0], [10.0, 10.1], [10.1, 10.1], [9.9, 9.9]];
        assert!(danger_set(maj.view(), min.view(), 3).unwrap().is_empty());
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let b = borderline_smote(maj.view(), min.view(), 5, 3, BorderlineVariant::One, &mut rng)
            .unwrap();
        assert_eq!(b.fallback, Some(Fallback::EmptyDangerSet));
        assert_eq!(b.len(), 5);
    }

    #[test]
    fn mostly_majority_neighborhood_is_in_danger() {
        // Row 0 has neighbors {maj, maj, maj, min}: 3 of 4 majority.
        let min = array![[0.0, 0.0], [1.5, 0.0], [5.0, 5.0], [5.1, 5.0], [5.0, 5.1]];
        let maj = array![[0.5, 0.0], [0.0, 0.5], [-0.5, 0.0]];
        let danger = danger_set(maj.view(), min.view(), 4).unwrap();
        assert!(danger.contains(&0));
        assert!(!danger.contains(&2));
    }

    #[test]
    fn variant_two_steps_towards_majority_stay_below_half() {
        let min = array![[0.0, 0.0], [0.2, 0.0], [0.0, 0.2], [5.0, 5.0]];
        let maj = array![[0.5, 0.0], [0.0, 0.5], [-0.5, 0.0], [0.3, 0.3]];
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let b = borderline_smote(maj.view(), min.view(), 200, 4, BorderlineVariant::Two, &mut rng)
            .unwrap();
        assert!(b.fallback.is_none());
        let mut toward_majority = 0;
        for (s, prov) in b.samples.outer_iter().zip(&b.provenance) {
            if let Some((SurfaceSource::Majority, j)) = prov.surface {
                toward_majority += 1;
                let c = min.row(prov.center).to_vec();
                let m = maj.row(j).to_vec();
                let s = s.to_vec();
                assert!(distance(&s, &c) < distance(&s, &m));
            }
        }
        assert!(toward_majority > 0);
    }
}
