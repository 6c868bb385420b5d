use ndarray::ArrayView2;
use rand::Rng;

use super::{row, Provenance, SyntheticBatch};
use crate::error::{Error, Result};

/// `n` minority rows drawn uniformly with replacement and copied verbatim.
pub fn random_oversample<R: Rng + ?Sized>(
    minority: ArrayView2<'_, f64>,
    n: usize,
    rng: &mut R,
) -> Result<SyntheticBatch> {
    let p = minority.ncols();
    if n == 0 {
        return Ok(SyntheticBatch::empty(p));
    }
    if minority.nrows() == 0 {
        return Err(Error::EmptyPointSet);
    }
    let (rows, provenance) = (0..n)
        .map(|_| {
            let c = rng.random_range(0..minority.nrows());
            (row(minority, c), Provenance { center: c, surface: None, radius: 0.0 })
        })
        .unzip();
    Ok(SyntheticBatch::from_rows(p, rows, provenance))
}
