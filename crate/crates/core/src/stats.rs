//! Binomial confidence intervals.

use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Standard normal quantile.
pub fn normal_quantile(p: f64) -> f64 {
    Normal::standard().inverse_cdf(p)
}

pub fn check_level(level: f64) -> Result<f64> {
    if level > 0.0 && level < 1.0 {
        Ok(level)
    } else {
        Err(Error::invalid("ci_level", level, "confidence level must lie in (0, 1)"))
    }
}

/// Two-sided Wilson score interval for `hits` successes in `trials`.
pub fn wilson(hits: u64, trials: u64, level: f64) -> (f64, f64) {
    let z = normal_quantile(0.5 + 0.5 * level);
    wilson_with_z(hits, trials, z)
}

fn wilson_with_z(hits: u64, trials: u64, z: f64) -> (f64, f64) {
    let n = trials as f64;
    let p = hits as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if hits == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if hits == trials { 1.0 } else { (centre + half).min(1.0) };
    (lo, hi)
}

/// One-sided Wilson upper bound at `level` for zero observed hits,
/// `z²/(n + z²)`.
pub fn wilson_upper_zero(trials: u64, level: f64) -> f64 {
    let z = normal_quantile(level);
    let n = trials as f64;
    z * z / (n + z * z)
}
