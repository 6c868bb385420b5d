//! Synthetic two-feature datasets with a chosen imbalance ratio.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use anyhow::{bail, ensure, Result};
use gsmote::seeding::stream;
use gsmote::Dataset;
use ndarray::Array2;
use rand::seq::index::sample;
use rand::Rng;
use rand_distr::{Distribution, Normal};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FixtureKind {
    /// Two overlapping isotropic Gaussians.
    TwoGaussians,
    /// Interleaved half circles with Gaussian jitter; the minority is the
    /// lower moon.
    NoisyMoons,
    /// A few tight minority clusters scattered inside a uniform majority.
    SparseClusters,
}

impl FixtureKind {
    pub const ALL: [FixtureKind; 3] = [Self::TwoGaussians, Self::NoisyMoons, Self::SparseClusters];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::TwoGaussians => "two_gaussians",
            Self::NoisyMoons => "noisy_moons",
            Self::SparseClusters => "sparse_clusters",
        }
    }
}

impl fmt::Display for FixtureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FixtureKind {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match Self::ALL.into_iter().find(|k| k.as_str() == s) {
            Some(k) => Ok(k),
            None => bail!(
                "unknown fixture kind '{s}' (expected one of {})",
                Self::ALL.map(|k| k.as_str()).join(", ")
            ),
        }
    }
}

/// Minority count for `n` rows at imbalance ratio `ir`.
pub fn minority_size(n: usize, ir: f64) -> usize {
    ((n as f64 / (ir + 1.0)).round() as usize).clamp(1, n / 2)
}

/// Generate a fixture. `noise` is the fraction of minority rows whose label
/// is exchanged with a majority row, so class counts are unchanged.
pub fn make_fixture(kind: FixtureKind, ir: f64, n: usize, seed: u64, noise: f64) -> Result<Dataset> {
    ensure!(ir.is_finite() && ir >= 1.0, "imbalance ratio must be at least 1, got {ir}");
    ensure!(n >= 4, "need at least 4 rows, got {n}");
    ensure!((0.0..=1.0).contains(&noise), "noise must lie in [0, 1], got {noise}");

    let n_min = minority_size(n, ir);
    let n_maj = n - n_min;
    let mut rng = stream(seed, &[kind.as_str().into()]);
    let std = Normal::new(0.0, 1.0).expect("valid normal");
    let mut points: Vec<[f64; 2]> = Vec::with_capacity(n);

    match kind {
        FixtureKind::TwoGaussians => {
            for _ in 0..n_maj {
                points.push([std.sample(&mut rng), std.sample(&mut rng)]);
            }
            for _ in 0..n_min {
                points.push([1.5 + std.sample(&mut rng), 1.5 + std.sample(&mut rng)]);
            }
        }
        FixtureKind::NoisyMoons => {
            let jitter = 0.2;
            for _ in 0..n_maj {
                let t = rng.random_range(0.0..PI);
                points.push([t.cos() + jitter * std.sample(&mut rng), t.sin() + jitter * std.sample(&mut rng)]);
            }
            for _ in 0..n_min {
                let t = rng.random_range(0.0..PI);
                points.push([
                    1.0 - t.cos() + jitter * std.sample(&mut rng),
                    0.5 - t.sin() + jitter * std.sample(&mut rng),
                ]);
            }
        }
        FixtureKind::SparseClusters => {
            let n_clusters = 4;
            let centers: Vec<[f64; 2]> =
                (0..n_clusters).map(|_| [rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)]).collect();
            for _ in 0..n_maj {
                points.push([rng.random_range(-4.0..4.0), rng.random_range(-4.0..4.0)]);
            }
            for i in 0..n_min {
                let c = centers[i % n_clusters];
                points.push([c[0] + 0.35 * std.sample(&mut rng), c[1] + 0.35 * std.sample(&mut rng)]);
            }
        }
    }

    let mut minority: Vec<bool> = (0..n).map(|i| i >= n_maj).collect();
    let flips = (noise * n_min as f64).round() as usize;
    if flips > 0 {
        let maj = sample(&mut rng, n_maj, flips);
        let min = sample(&mut rng, n_min, flips);
        for (a, b) in maj.iter().zip(min.iter()) {
            minority[a] = true;
            minority[n_maj + b] = false;
        }
    }

    let features = Array2::from_shape_fn((n, 2), |(i, j)| points[i][j]);
    let labels = minority.iter().map(|&m| if m { "1" } else { "0" }.to_string()).collect();
    let data = Dataset::new(kind.as_str(), vec!["x0".into(), "x1".into()], "label", features, labels)?;
    Ok(data)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn class_counts() {
        let d = make_fixture(FixtureKind::TwoGaussians, 9.0, 200, 1, 0.0).unwrap();
        assert_eq!((d.majority_count(), d.minority_count()), (180, 20));
        assert_eq!(d.minority_label(), "1");
        let d = make_fixture(FixtureKind::NoisyMoons, 1.0, 100, 1, 0.0).unwrap();
        assert_eq!((d.majority_count(), d.minority_count()), (50, 50));
        let d = make_fixture(FixtureKind::SparseClusters, 20.0, 1000, 1, 0.05).unwrap();
        assert_eq!(d.minority_count(), 48);
    }

    #[test]
    fn noise_preserves_counts_and_moves_labels() {
        let clean = make_fixture(FixtureKind::TwoGaussians, 4.0, 100, 3, 0.0).unwrap();
        let noisy = make_fixture(FixtureKind::TwoGaussians, 4.0, 100, 3, 0.25).unwrap();
        assert_eq!(clean.minority_count(), noisy.minority_count());
        let changed = clean.is_minority().iter().zip(noisy.is_minority()).filter(|(a, b)| a != b).count();
        assert_eq!(changed, 2 * 5);
    }

    #[test]
    fn same_seed_same_bytes() {
        let bytes = |seed| {
            let mut buf = Vec::new();
            make_fixture(FixtureKind::SparseClusters, 5.0, 120, seed, 0.1).unwrap().write_csv(&mut buf).unwrap();
            buf
        };
        assert_eq!(bytes(8), bytes(8));
        assert_ne!(bytes(8), bytes(9));
    }

    #[test]
    fn preconditions() {
        assert!(make_fixture(FixtureKind::TwoGaussians, 0.5, 100, 0, 0.0).is_err());
        assert!(make_fixture(FixtureKind::TwoGaussians, 2.0, 3, 0, 0.0).is_err());
        assert!("moons".parse::<FixtureKind>().is_err());
    }
}
