use gsmote::classifiers::{gbc_fit, lr_objective, GbcConfig};
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn lr_gradient_matches_central_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let (n, p) = (30, 4);
        let x = Array2::from_shape_fn((n, p), |_| rng.random::<f64>());
        let y: Vec<bool> = (0..n).map(|_| rng.random_bool(0.4)).collect();
        let w: Vec<f64> = (0..p).map(|_| rng.random::<f64>() * 4.0 - 2.0).collect();
        let b = rng.random::<f64>() - 0.5;
        let (_, grad, grad_b) = lr_objective(&w, b, x.view(), &y, 1e-2);
        let h = 1e-5;
        for j in 0..p {
            let mut up = w.clone();
            up[j] += h;
            let mut down = w.clone();
            down[j] -= h;
            let fd = (lr_objective(&up, b, x.view(), &y, 1e-2).0 - lr_objective(&down, b, x.view(), &y, 1e-2).0) / (2.0 * h);
            assert!((fd - grad[j]).abs() <= 1e-6 * grad[j].abs().max(1e-3), "{fd} vs {}", grad[j]);
        }
        let fd_b = (lr_objective(&w, b + h, x.view(), &y, 1e-2).0 - lr_objective(&w, b - h, x.view(), &y, 1e-2).0) / (2.0 * h);
        assert!((fd_b - grad_b).abs() <= 1e-6 * grad_b.abs().max(1e-3));
    }
}

#[test]
fn gbc_stage_loss_matches_recomputation() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let x = Array2::from_shape_fn((80, 3), |_| rng.random::<f64>());
    let y: Vec<bool> = (0..80).map(|i| x[[i, 0]] + 0.3 * rng.random::<f64>() > 0.6).collect();
    let cfg = GbcConfig { n_estimators: 15, max_depth: 3, ..Default::default() };
    let m = gbc_fit(x.view(), &y, &cfg).unwrap();
    for t in 0..=15 {
        let z = m.staged_decision(x.view(), t).unwrap();
        let loss: f64 = z
            .iter()
            .zip(&y)
            .map(|(&z, &y)| (1.0 + f64::exp(z)).ln() - if y { z } else { 0.0 })
            .sum::<f64>()
            / 80.0;
        assert!((loss - m.train_loss[t]).abs() < 1e-9);
    }
    assert!(m.train_loss.windows(2).all(|w| w[1] <= w[0]));
    assert!(m.trees.iter().all(|t| t.depth() <= 3));
}
