//! One-sample Kolmogorov-Smirnov test with asymptotic critical values.

use libm::erfc;
use serde::{Deserialize, Serialize};

/// `P(K <= x)` for the Kolmogorov distribution.
pub fn kolmogorov_cdf(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x < 1.0 {
        // theta-function form, fast for small x
        let c = std::f64::consts::PI.powi(2) / (8.0 * x * x);
        let s: f64 = (1..=20)
            .map(|k| {
                let m = (2 * k - 1) as f64;
                (-m * m * c).exp()
            })
            .sum();
        (2.0 * std::f64::consts::PI).sqrt() / x * s
    } else {
        let s: f64 = (1..=100)
            .map(|k| {
                let kf = k as f64;
                let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                sign * (-2.0 * kf * kf * x * x).exp()
            })
            .sum();
        1.0 - 2.0 * s
    }
}

/// `x` with `kolmogorov_cdf(x) = p`, by bisection.
pub fn kolmogorov_quantile(p: f64) -> f64 {
    let (mut lo, mut hi) = (0.0, 10.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if kolmogorov_cdf(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

pub fn normal_cdf(x: f64, mean: f64, variance: f64) -> f64 {
    0.5 * erfc(-(x - mean) / (2.0 * variance).sqrt())
}

/// `sup_x |F_m(x) - F(x)|` for the empirical law of `samples`.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(|a, b| a.total_cmp(b));
    let m = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / m).max((i + 1) as f64 / m - f)
        })
        .fold(0.0, f64::max)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub statistic: f64,
    pub level: f64,
    pub critical_value: f64,
    pub p_value: f64,
    pub reject: bool,
}

/// KS test against a Gaussian with the given mean and variance at `level`.
pub fn ks_normal(samples: &[f64], mean: f64, variance: f64, level: f64) -> KsResult {
    let statistic = ks_statistic(samples, |x| normal_cdf(x, mean, variance));
    let sqrt_m = (samples.len() as f64).sqrt();
    let critical_value = kolmogorov_quantile(1.0 - level) / sqrt_m;
    KsResult {
        statistic,
        level,
        critical_value,
        p_value: 1.0 - kolmogorov_cdf(sqrt_m * statistic),
        reject: statistic >= critical_value,
    }
}
