//! The geometric kernel of G-SMOTE.
//!
//! A point is drawn uniformly from the unit ball, reflected across the
//! hyper-plane through the origin perpendicular to the center-to-surface
//! direction when it falls in the truncated cap, squeezed towards that
//! direction, and finally scaled by the radius and moved to the center.

use rand::Rng;
use rand_distr::StandardNormal;

/// Tolerance used when checking that a direction has unit norm.
pub const UNIT_TOLERANCE: f64 = 1e-9;

/// A point in unit-ball coordinates, before translation.
#[derive(Debug, Clone, PartialEq)]
pub struct GenPoint(pub Vec<f64>);

impl GenPoint {
    pub fn norm(&self) -> f64 {
        norm(&self.0)
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }
}

/// Unit vector from a center towards its surface point.
#[derive(Debug, Clone, PartialEq)]
pub struct Direction(Vec<f64>);

impl Direction {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Uniform draw from the closed unit ball in `p` dimensions.
///
/// Consumes `p` standard normals followed by one uniform. An all-zero normal
/// vector is re-drawn.
pub fn sample_unit_ball<R: Rng + ?Sized>(p: usize, rng: &mut R) -> GenPoint {
    assert!(p >= 1, "dimension must be at least 1");
    loop {
        let v: Vec<f64> = (0..p).map(|_| rng.sample(StandardNormal)).collect();
        let len = norm(&v);
        if len == 0.0 {
            continue;
        }
        let r: f64 = rng.random();
        let scale = r.powf(1.0 / p as f64) / len;
        return GenPoint(v.into_iter().map(|x| x * scale).collect());
    }
}

/// Unit vector `(surface - center) / |surface - center|`, or `None` when the
/// two points coincide.
pub fn make_direction(center: &[f64], surface: &[f64]) -> Option<Direction> {
    let diff: Vec<f64> = surface.iter().zip(center).map(|(s, c)| s - c).collect();
    let len = norm(&diff);
    if len == 0.0 || !len.is_finite() {
        return None;
    }
    Some(Direction(diff.into_iter().map(|x| x / len).collect()))
}

/// Reflects `x` across the hyper-plane perpendicular to `dir` when
/// `|a_trunc - x·dir| > 1`. The norm is preserved.
pub fn truncate(x: &GenPoint, dir: &Direction, a_trunc: f64) -> GenPoint {
    let e = dir.as_slice();
    let par = dot(&x.0, e);
    if (a_trunc - par).abs() > 1.0 {
        GenPoint(x.0.iter().zip(e).map(|(xi, ei)| xi - 2.0 * par * ei).collect())
    } else {
        x.clone()
    }
}

/// Shrinks the component of `x` perpendicular to `dir` by the factor
/// `1 - a_def`, leaving the parallel component unchanged.
pub fn deform(x: &GenPoint, dir: &Direction, a_def: f64) -> GenPoint {
    let e = dir.as_slice();
    let par = dot(&x.0, e);
    GenPoint(
        x.0.iter()
            .zip(e)
            .map(|(xi, ei)| {
                let perp = xi - par * ei;
                xi - a_def * perp
            })
            .collect(),
    )
}

/// `center + radius * x`.
pub fn translate(x: &GenPoint, center: &[f64], radius: f64) -> Vec<f64> {
    center.iter().zip(&x.0).map(|(c, xi)| c + radius * xi).collect()
}

/// Full transform of a unit-ball draw into data space. When the surface
/// coincides with the center the draw is only translated, which for a zero
/// radius returns the center itself.
pub fn transform(
    x: &GenPoint,
    center: &[f64],
    surface: &[f64],
    radius: f64,
    a_trunc: f64,
    a_def: f64,
) -> Vec<f64> {
    match make_direction(center, surface) {
        Some(dir) => {
            let x = truncate(x, &dir, a_trunc);
            let x = deform(&x, &dir, a_def);
            translate(&x, center, radius)
        }
        None => translate(x, center, radius),
    }
}
