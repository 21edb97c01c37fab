//! Confidence intervals used by the Monte Carlo estimators.
//!
//! Means use the normal approximation `x̄ ± z·s/√n`; proportions use the
//! Wilson score interval. Both default to 99% two-sided coverage.

use serde::Serialize;

/// Two-sided 99% standard normal quantile.
pub const Z99: f64 = 2.575_829_303_548_901;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Interval {
    pub lower: f64,
    pub upper: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MeanEstimate {
    pub mean: f64,
    pub std_err: f64,
    pub interval: Interval,
    pub samples: usize,
}

/// Sample mean with a normal-approximation interval at quantile `z`.
pub fn mean_interval(values: &[f64], z: f64) -> MeanEstimate {
    let n = values.len();
    assert!(n > 0, "mean of an empty sample");
    let mean = values.iter().sum::<f64>() / n as f64;
    let var = if n > 1 {
        values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64
    } else {
        0.0
    };
    let std_err = (var / n as f64).sqrt();
    MeanEstimate {
        mean,
        std_err,
        interval: Interval {
            lower: mean - z * std_err,
            upper: mean + z * std_err,
        },
        samples: n,
    }
}

/// Wilson score interval for `successes` out of `trials`.
pub fn wilson_interval(successes: usize, trials: usize, z: f64) -> Interval {
    assert!(trials > 0 && successes <= trials);
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    Interval {
        lower: (center - half).max(0.0),
        upper: (center + half).min(1.0),
    }
}
