//! Summary statistics of per-run accuracies.

use serde::{Deserialize, Serialize};

/// Per-(config, fraction) statistics of test accuracy.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AggregateStats {
    pub config: String,
    pub test_fraction: f64,
    pub runs: usize,
    pub mean: f64,
    /// Population standard deviation.
    pub std: f64,
    pub q25: f64,
    pub q75: f64,
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub fn std_dev(xs: &[f64]) -> f64 {
    let m = mean(xs);
    (xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / xs.len() as f64).sqrt()
}

/// Linearly interpolated quantile of the sorted sample at position
/// `p * (n - 1)`.
pub fn quantile(xs: &[f64], p: f64) -> f64 {
    let mut s = xs.to_vec();
    s.sort_by(f64::total_cmp);
    let pos = p * (s.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    s[lo] + (pos - lo as f64) * (s[hi] - s[lo])
}

/// Returns `None` for an empty sample.
pub fn aggregate(config: &str, test_fraction: f64, xs: &[f64]) -> Option<AggregateStats> {
    if xs.is_empty() {
        return None;
    }
    Some(AggregateStats {
        config: config.to_string(),
        test_fraction,
        runs: xs.len(),
        mean: mean(xs),
        std: std_dev(xs),
        q25: quantile(xs, 0.25),
        q75: quantile(xs, 0.75),
    })
}
