//! Exact Euclidean nearest-neighbor search by brute force.
//!
//! Results are ordered by distance, with ties resolved towards the lower
//! row index, so every query is deterministic.

use ndarray::ArrayView2;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct NeighborResult {
    pub indices: Vec<usize>,
    pub distances: Vec<f64>,
}

#[inline]
pub fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[inline]
pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    squared_distance(a, b).sqrt()
}

fn check_dim(query: &[f64], points: &ArrayView2<'_, f64>) -> Result<()> {
    if query.len() != points.ncols() {
        return Err(Error::DimensionMismatch { expected: points.ncols(), actual: query.len() });
    }
    Ok(())
}

/// The `k` rows of `points` closest to `query`, skipping row `exclude`.
pub fn knn(
    query: &[f64],
    points: ArrayView2<'_, f64>,
    k: usize,
    exclude: Option<usize>,
) -> Result<NeighborResult> {
    check_dim(query, &points)?;
    let usable = points.nrows() - usize::from(exclude.is_some_and(|e| e < points.nrows()));
    if k == 0 || k > usable {
        return Err(Error::NotEnoughNeighbors { k, available: usable });
    }

    let mut candidates: Vec<(f64, usize)> = points
        .outer_iter()
        .enumerate()
        .filter(|(i, _)| Some(*i) != exclude)
        .map(|(i, row)| {
            let d = match row.as_slice() {
                Some(s) => squared_distance(query, s),
                None => row.iter().zip(query).map(|(x, y)| (x - y) * (x - y)).sum(),
            };
            (d, i)
        })
        .collect();

    let by_distance = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
    if k < candidates.len() {
        candidates.select_nth_unstable_by(k - 1, by_distance);
        candidates.truncate(k);
    }
    candidates.sort_unstable_by(by_distance);

    Ok(NeighborResult {
        indices: candidates.iter().map(|c| c.1).collect(),
        distances: candidates.iter().map(|c| c.0.sqrt()).collect(),
    })
}

/// Index and distance of the row of `points` closest to `query`.
pub fn nearest(query: &[f64], points: ArrayView2<'_, f64>) -> Result<(usize, f64)> {
    if points.nrows() == 0 {
        return Err(Error::EmptyPointSet);
    }
    check_dim(query, &points)?;
    let mut best = (f64::INFINITY, usize::MAX);
    for (i, row) in points.outer_iter().enumerate() {
        let d: f64 = row.iter().zip(query).map(|(x, y)| (x - y) * (x - y)).sum();
        if d < best.0 {
            best = (d, i);
        }
    }
    Ok((best.1, best.0.sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array2};
    use proptest::prelude::*;

    #[test]
    fn two_nearest_by_hand() {
        let pts = array![[1.0, 0.0], [0.0, 2.0], [3.0, 3.0]];
        let r = knn(&[0.0, 0.0], pts.view(), 2, None).unwrap();
        assert_eq!(r.indices, vec![0, 1]);
        assert_eq!(r.distances, vec![1.0, 2.0]);
    }

    #[test]
    fn exclusion_skips_self() {
        let pts = array![[0.0, 0.0], [5.0, 0.0], [1.0, 1.0]];
        let r = knn(&[0.0, 0.0], pts.view(), 1, Some(0)).unwrap();
        assert_eq!(r.indices, vec![2]);
    }

    #[test]
    fn k_equal_to_set_size_with_exclusion_fails() {
        let pts = array![[0.0], [1.0], [2.0]];
        match knn(&[0.0], pts.view(), 3, Some(0)) {
            Err(Error::NotEnoughNeighbors { k: 3, available: 2 }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn nearest_cases() {
        assert_eq!(nearest(&[0.0, 0.0], array![[0.0, 2.0]].view()).unwrap(), (0, 2.0));
        let tie = array![[1.0, 0.0], [0.0, 1.0]];
        assert_eq!(nearest(&[0.0, 0.0], tie.view()).unwrap().0, 0);
        let empty = Array2::<f64>::zeros((0, 2));
        assert!(matches!(nearest(&[0.0, 0.0], empty.view()), Err(Error::EmptyPointSet)));
    }

    #[test]
    fn dimension_mismatch() {
        let pts = array![[0.0, 0.0]];
        assert!(matches!(knn(&[0.0], pts.view(), 1, None), Err(Error::DimensionMismatch { .. })));
    }

    fn naive(query: &[f64], pts: &Array2<f64>, k: usize, exclude: Option<usize>) -> Vec<usize> {
        let mut all: Vec<(f64, usize)> = (0..pts.nrows())
            .filter(|i| Some(*i) != exclude)
            .map(|i| {
                let d = pts.row(i).iter().zip(query).map(|(a, b)| (a - b).powi(2)).sum::<f64>();
                (d, i)
            })
            .collect();
        all.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
        all.into_iter().take(k).map(|x| x.1).collect()
    }

    fn point_set() -> impl Strategy<Value = (Array2<f64>, usize, usize)> {
        (prop::sample::select(vec![1usize, 2, 5, 20]), 2usize..40).prop_flat_map(|(p, n)| {
            (
                // small integer grid so exact ties actually occur
                prop::collection::vec(-3i32..4, n * p),
                1..n,
                0..n,
            )
                .prop_map(move |(v, k, q)| {
                    let pts = Array2::from_shape_vec((n, p), v.into_iter().map(f64::from).collect())
                        .unwrap();
                    (pts, k, q)
                })
        })
    }

    proptest! {
        #[test]
        fn matches_full_sort_oracle((pts, k, q) in point_set()) {
            let query = pts.row(q).to_vec();
            let got = knn(&query, pts.view(), k, Some(q)).unwrap();
            prop_assert_eq!(&got.indices, &naive(&query, &pts, k, Some(q)));
            prop_assert!(got.distances.windows(2).all(|w| w[0] <= w[1]));
            prop_assert!(!got.indices.contains(&q));

            let (ni, nd) = nearest(&query, pts.view()).unwrap();
            let head = knn(&query, pts.view(), 1, None).unwrap();
            prop_assert_eq!(ni, head.indices[0]);
            prop_assert_eq!(nd, head.distances[0]);
        }

        #[test]
        fn kth_distance_monotone_in_k((pts, k, q) in point_set()) {
            let query = pts.row(q).to_vec();
            let small = knn(&query, pts.view(), k, Some(q)).unwrap();
            if k + 1 < pts.nrows() {
                let large = knn(&query, pts.view(), k + 1, Some(q)).unwrap();
                prop_assert!(small.distances[k - 1] <= large.distances[k]);
            }
        }
    }
}
