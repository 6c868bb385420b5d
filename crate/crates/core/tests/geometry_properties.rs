use gsmote::geometry::{deform, make_direction, sample_unit_ball, transform, truncate, GenPoint};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Random unit-ball point, direction and factors in dimension `p`.
fn case() -> impl Strategy<Value = (usize, u64, f64, f64)> {
    (prop::sample::select(vec![1usize, 2, 5, 20]), any::<u64>(), -1.0f64..=1.0, 0.0f64..=1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn truncate_preserves_norm_and_deform_shrinks((p, seed, a_trunc, a_def) in case()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = sample_unit_ball(p, &mut rng);
        let surface = sample_unit_ball(p, &mut rng);
        let Some(dir) = make_direction(&vec![0.0; p], &surface.0) else { return Ok(()) };
        prop_assert!((norm(dir.as_slice()) - 1.0).abs() < 1e-9);

        let t = truncate(&x, &dir, a_trunc);
        prop_assert!((t.norm() - x.norm()).abs() < 1e-12);
        let d = deform(&t, &dir, a_def);
        prop_assert!(d.norm() <= t.norm() + 1e-12);
        // parallel part is kept
        prop_assert!((dot(&d.0, dir.as_slice()) - dot(&t.0, dir.as_slice())).abs() < 1e-12);
    }

    #[test]
    fn extreme_truncation_selects_half_space((p, seed, _a, _d) in case()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = sample_unit_ball(p, &mut rng);
        let surface = sample_unit_ball(p, &mut rng);
        let Some(dir) = make_direction(&vec![0.0; p], &surface.0) else { return Ok(()) };
        prop_assert!(dot(&truncate(&x, &dir, 1.0).0, dir.as_slice()) >= 0.0);
        prop_assert!(dot(&truncate(&x, &dir, -1.0).0, dir.as_slice()) <= 0.0);
    }

    #[test]
    fn full_truncation_and_deformation_lands_on_segment(
        p in prop::sample::select(vec![1usize, 2, 5, 20]),
        seed in any::<u64>(),
        scale in 0.01f64..10.0,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let center: Vec<f64> = sample_unit_ball(p, &mut rng).0;
        let surface: Vec<f64> = sample_unit_ball(p, &mut rng).0.iter().map(|v| v * scale).collect();
        let radius = norm(&center.iter().zip(&surface).map(|(c, s)| s - c).collect::<Vec<_>>());
        prop_assume!(radius > 0.0);
        let x = sample_unit_ball(p, &mut rng);
        let out = transform(&x, &center, &surface, radius, 1.0, 1.0);

        let axis: Vec<f64> = surface.iter().zip(&center).map(|(s, c)| s - c).collect();
        let rel: Vec<f64> = out.iter().zip(&center).map(|(o, c)| o - c).collect();
        let t = dot(&rel, &axis) / dot(&axis, &axis);
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&t));
        let residual = norm(&rel.iter().zip(&axis).map(|(r, a)| r - t * a).collect::<Vec<_>>());
        prop_assert!(residual < 1e-9);
    }
}

#[test]
fn zero_deformation_keeps_ball_shape() {
    let dir = make_direction(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
    let x = GenPoint(vec![0.1, -0.7]);
    assert_eq!(deform(&x, &dir, 0.0), x);
}
