use ndarray::ArrayView2;
use rand::Rng;

use super::{
    center_order, minority_neighbor_table, row, GSmoteConfig, Provenance, Selection,
    SurfaceSelection, SurfaceSource, SyntheticBatch,
};
use crate::error::{Error, Result};
use crate::geometry::{sample_unit_ball, transform};
use crate::neighbors::{nearest, NeighborResult};

/// Surface selection with the neighbor queries precomputed for every
/// minority row.
pub struct SurfaceSelector<'a> {
    minority: ArrayView2<'a, f64>,
    majority: ArrayView2<'a, f64>,
    selection: Selection,
    minority_neighbors: Vec<NeighborResult>,
    majority_nearest: Vec<(usize, f64)>,
}

impl<'a> SurfaceSelector<'a> {
    pub fn new(
        minority: ArrayView2<'a, f64>,
        majority: ArrayView2<'a, f64>,
        cfg: &GSmoteConfig,
    ) -> Result<Self> {
        cfg.validate()?;
        if majority.ncols() != minority.ncols() && majority.nrows() > 0 {
            return Err(Error::DimensionMismatch {
                expected: minority.ncols(),
                actual: majority.ncols(),
            });
        }
        let needs_minority = matches!(cfg.selection, Selection::Minority | Selection::Combined);
        let needs_majority = matches!(cfg.selection, Selection::Majority | Selection::Combined);

        let minority_neighbors =
            if needs_minority { minority_neighbor_table(minority, cfg.k)? } else { Vec::new() };
        let majority_nearest = if needs_majority {
            (0..minority.nrows())
                .map(|i| nearest(&row(minority, i), majority))
                .collect::<Result<_>>()?
        } else {
            Vec::new()
        };
        Ok(Self { minority, majority, selection: cfg.selection, minority_neighbors, majority_nearest })
    }

    /// Select the surface point of minority row `center`. Draws one
    /// neighbor rank from `rng` for the minority and combined strategies.
    pub fn select<R: Rng + ?Sized>(&self, center: usize, rng: &mut R) -> SurfaceSelection {
        let pick = match self.selection {
            Selection::Majority => 0,
            _ => rng.random_range(0..self.minority_neighbors[center].indices.len()),
        };
        self.resolve(center, pick)
    }

    /// Surface of `center` given the rank `pick` of the chosen minority
    /// neighbor (ignored by the majority strategy).
    pub fn resolve(&self, center: usize, pick: usize) -> SurfaceSelection {
        let from_minority = |s: &Self| {
            let nb = &s.minority_neighbors[center];
            SurfaceSelection {
                surface: row(s.minority, nb.indices[pick]),
                index: nb.indices[pick],
                radius: nb.distances[pick],
                source: SurfaceSource::Minority,
            }
        };
        let from_majority = |s: &Self| {
            let (idx, d) = s.majority_nearest[center];
            SurfaceSelection {
                surface: row(s.majority, idx),
                index: idx,
                radius: d,
                source: SurfaceSource::Majority,
            }
        };
        match self.selection {
            Selection::Minority => from_minority(self),
            Selection::Majority => from_majority(self),
            Selection::Combined => {
                let min = from_minority(self);
                if min.radius <= self.majority_nearest[center].1 {
                    min
                } else {
                    from_majority(self)
                }
            }
        }
    }
}

/// One-off surface selection for minority row `center_idx`.
pub fn select_surface<R: Rng + ?Sized>(
    center_idx: usize,
    minority: ArrayView2<'_, f64>,
    majority: ArrayView2<'_, f64>,
    cfg: &GSmoteConfig,
    rng: &mut R,
) -> Result<SurfaceSelection> {
    if center_idx >= minority.nrows() {
        return Err(Error::InvalidParameter(format!(
            "center {center_idx} out of range for {} minority rows",
            minority.nrows()
        )));
    }
    Ok(SurfaceSelector::new(minority, majority, cfg)?.select(center_idx, rng))
}

/// Generate `n` samples inside truncated, deformed hyper-spheroids around
/// minority rows.
pub fn gsmote_generate<R: Rng + ?Sized>(
    majority: ArrayView2<'_, f64>,
    minority: ArrayView2<'_, f64>,
    n: usize,
    cfg: &GSmoteConfig,
    rng: &mut R,
) -> Result<SyntheticBatch> {
    let p = minority.ncols();
    if n == 0 {
        return Ok(SyntheticBatch::empty(p));
    }
    if minority.nrows() == 0 {
        return Err(Error::EmptyPointSet);
    }
    let selector = SurfaceSelector::new(minority, majority, cfg)?;
    let order = center_order(minority.nrows(), rng);

    let mut rows = Vec::with_capacity(n);
    let mut provenance = Vec::with_capacity(n);
    for &center_idx in order.iter().cycle().take(n) {
        let center = row(minority, center_idx);
        let sel = selector.select(center_idx, rng);
        let x = sample_unit_ball(p, rng);
        rows.push(transform(&x, &center, &sel.surface, sel.radius, cfg.a_trunc, cfg.a_def));
        provenance.push(Provenance {
            center: center_idx,
            surface: Some((sel.source, sel.index)),
            radius: sel.radius,
        });
    }
    Ok(SyntheticBatch::from_rows(p, rows, provenance))
}
