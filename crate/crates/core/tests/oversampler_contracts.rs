use gsmote::neighbors::{distance, nearest};
use gsmote::oversampling::{
    gsmote_generate, BorderlineVariant, GSmoteConfig, Oversampler, Selection, SurfaceSource,
};
use ndarray::Array2;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn blobs(seed: u64, n_min: usize, n_maj: usize, p: usize) -> (Array2<f64>, Array2<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let min = Array2::from_shape_fn((n_min, p), |_| rng.random::<f64>() * 0.6);
    let maj = Array2::from_shape_fn((n_maj, p), |_| 0.3 + rng.random::<f64>() * 0.7);
    (min, maj)
}

fn all_oversamplers() -> Vec<Oversampler> {
    let mut v = vec![
        Oversampler::Random,
        Oversampler::Smote { k: 3 },
        Oversampler::Borderline { k: 3, variant: BorderlineVariant::One },
        Oversampler::Borderline { k: 4, variant: BorderlineVariant::Two },
        Oversampler::Adasyn { k: 3 },
    ];
    for selection in Selection::ALL {
        v.push(Oversampler::GSmote(GSmoteConfig::new(3, 0.5, 0.5, selection).unwrap()));
    }
    v
}

#[test]
fn count_contract_and_determinism() {
    let (min, maj) = blobs(1, 12, 60, 3);
    for o in all_oversamplers() {
        for n in [0, 1, 7, 48] {
            let a = o.generate(min.view(), maj.view(), n, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
            let b = o.generate(min.view(), maj.view(), n, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
            assert_eq!(a.samples.dim(), (n, 3), "{}", o.id());
            assert_eq!(a.provenance.len(), n);
            assert_eq!(a, b, "{} not deterministic", o.id());
            assert!(a.samples.iter().all(|v| v.is_finite()));
        }
    }
    let none = Oversampler::None.generate(min.view(), maj.view(), 10, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
    assert!(none.is_empty());
}

#[test]
fn different_seeds_differ() {
    let (min, maj) = blobs(2, 10, 30, 2);
    let cfg = GSmoteConfig::new(3, 0.0, 0.0, Selection::Combined).unwrap();
    let a = gsmote_generate(maj.view(), min.view(), 20, &cfg, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
    let b = gsmote_generate(maj.view(), min.view(), 20, &cfg, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
    assert_ne!(a.samples, b.samples);
}

#[test]
fn minority_degenerate_configuration_stays_on_neighbor_segments() {
    let (min, maj) = blobs(3, 15, 40, 4);
    let cfg = GSmoteConfig::new(4, 1.0, 1.0, Selection::Minority).unwrap();
    let b = gsmote_generate(maj.view(), min.view(), 200, &cfg, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
    for (s, prov) in b.samples.outer_iter().zip(&b.provenance) {
        let (source, j) = prov.surface.unwrap();
        assert_eq!(source, SurfaceSource::Minority);
        let c = min.row(prov.center).to_vec();
        let e = min.row(j).to_vec();
        let s = s.to_vec();
        assert!((distance(&c, &s) + distance(&s, &e) - distance(&c, &e)).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gsmote_samples_stay_within_radius_and_majority_distance(
        seed in any::<u64>(),
        p in 1usize..6,
        a_trunc in -1.0f64..=1.0,
        a_def in 0.0f64..=1.0,
    ) {
        let (min, maj) = blobs(seed, 8, 25, p);
        for selection in Selection::ALL {
            let cfg = GSmoteConfig::new(3, a_trunc, a_def, selection).unwrap();
            let b = gsmote_generate(maj.view(), min.view(), 40, &cfg, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
            for (s, prov) in b.samples.outer_iter().zip(&b.provenance) {
                let c = min.row(prov.center).to_vec();
                let d = distance(&s.to_vec(), &c);
                prop_assert!(d <= prov.radius + 1e-9);
                if selection == Selection::Combined {
                    let (_, d_maj) = nearest(&c, maj.view()).unwrap();
                    prop_assert!(d <= d_maj + 1e-9);
                }
            }
        }
    }
}
