use crate::error::{Error, Result};

/// Significance level for the Friedman decision.
pub const SIGNIFICANCE: f64 = 0.05;

/// Ranks 1..=K with 1 for the best score; tied scores share their average
/// rank.
pub fn rank_row(scores: &[f64], higher_better: bool) -> Vec<f64> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| {
        let c = scores[a].total_cmp(&scores[b]);
        if higher_better {
            c.reverse()
        } else {
            c
        }
    });
    let mut ranks = vec![0.0; scores.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = avg;
        }
        i = j + 1;
    }
    ranks
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FriedmanResult {
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
    /// Whether equal mean ranks are rejected at [`SIGNIFICANCE`].
    pub significant: bool,
}

/// Friedman chi-square test on an N x K matrix of within-row ranks.
pub fn friedman(ranks: &[Vec<f64>]) -> Result<FriedmanResult> {
    let n = ranks.len();
    if n < 2 {
        return Err(Error::InvalidParameter(format!("friedman test needs at least 2 rows, got {n}")));
    }
    let k = ranks[0].len();
    if k < 2 {
        return Err(Error::InvalidParameter(format!("friedman test needs at least 2 columns, got {k}")));
    }
    let expected_sum = (k * (k + 1)) as f64 / 2.0;
    let mut column_sums = vec![0.0; k];
    for (i, row) in ranks.iter().enumerate() {
        if row.len() != k {
            return Err(Error::DimensionMismatch { expected: k, actual: row.len() });
        }
        let sum: f64 = row.iter().sum();
        if (sum - expected_sum).abs() > 1e-9 || row.iter().any(|&r| !(1.0..=k as f64).contains(&r)) {
            return Err(Error::InvalidParameter(format!("row {i} is not a rank vector: {row:?}")));
        }
        for (c, r) in column_sums.iter_mut().zip(row) {
            *c += r;
        }
    }
    let (nf, kf) = (n as f64, k as f64);
    let sum_sq: f64 = column_sums.iter().map(|r| r * r).sum();
    let statistic = (12.0 / (nf * kf * (kf + 1.0)) * sum_sq - 3.0 * nf * (kf + 1.0)).max(0.0);
    let df = k - 1;
    let p_value = chi_square_sf(statistic, df as f64);
    Ok(FriedmanResult { statistic, df, p_value, significant: p_value < SIGNIFICANCE })
}

/// Upper tail `P(X > x)` of a chi-square distribution with `df` degrees of
/// freedom.
pub fn chi_square_sf(x: f64, df: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    gamma_q(df / 2.0, x / 2.0)
}

/// Natural log of the gamma function (Lanczos, g = 7, n = 9).
pub fn ln_gamma(x: f64) -> f64 {
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let t = x + 7.5;
    let a = COEF[1..]
        .iter()
        .enumerate()
        .fold(COEF[0], |acc, (i, c)| acc + c / (x + i as f64 + 1.0));
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

/// Regularized upper incomplete gamma function `Q(a, x)`.
///
/// Series expansion of `P` below `x = a + 1`, modified Lentz continued
/// fraction for `Q` above.
pub fn gamma_q(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    let log_prefactor = a * x.ln() - x - ln_gamma(a);
    if x < a + 1.0 {
        let mut term = 1.0 / a;
        let mut sum = term;
        let mut ap = a;
        for _ in 0..1000 {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if term.abs() < sum.abs() * 1e-16 {
                break;
            }
        }
        1.0 - sum * log_prefactor.exp()
    } else {
        const TINY: f64 = 1e-300;
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / TINY;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..1000 {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < TINY {
                d = TINY;
            }
            c = b + an / c;
            if c.abs() < TINY {
                c = TINY;
            }
            d = 1.0 / d;
            let delta = d * c;
            h *= delta;
            if (delta - 1.0).abs() < 1e-16 {
                break;
            }
        }
        log_prefactor.exp() * h
    }
}
