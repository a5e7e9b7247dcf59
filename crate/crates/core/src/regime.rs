//! Scaling ratios for the large-deviation regime and default thresholds.
//!
//! The three ratios
//!
//! - `r1 = n·x^{-α}`
//! - `r2 = n·x^{-α} / c^{2α}`
//! - `r3 = n·x^{-α} / (b²·c^{α-2})`
//!
//! must all be small for the one-big-jump approximation to hold.
//! [`default_cb`] picks `c = b = r1^{1/(4α)}`, which makes
//! `r2 = r1^{1/2}` and `r3 = r1^{3/4}`, so a single number indexes the
//! regime.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::events::EventParams;

pub const DEFAULT_VALIDITY_THRESHOLD: f64 = 0.2;
pub const MAX_DEFAULT_C: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegimeRatios {
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
}

impl RegimeRatios {
    pub fn max(&self) -> f64 {
        self.r1.max(self.r2).max(self.r3)
    }

    pub fn is_valid(&self, threshold: f64) -> bool {
        self.max() < threshold
    }
}

pub fn r1(alpha: f64, n: u64, x: f64) -> f64 {
    n as f64 * x.powf(-alpha)
}

pub fn ratios(alpha: f64, params: &EventParams) -> RegimeRatios {
    let r1 = r1(alpha, params.n(), params.x());
    let (c, b) = (params.c(), params.b());
    RegimeRatios {
        r1,
        r2: r1 / c.powf(2.0 * alpha),
        r3: r1 / (b * b * c.powf(alpha - 2.0)),
    }
}

/// `c = b = min(r1^{1/(4α)}, 0.9)`.
pub fn default_cb(alpha: f64, n: u64, x: f64) -> Result<(f64, f64)> {
    let r1 = r1(alpha, n, x);
    if !(r1 < 1.0) {
        return Err(Error::Regime { n, x, r1 });
    }
    let c = r1.powf(0.25 / alpha).min(MAX_DEFAULT_C);
    if !(c > 0.0) {
        return Err(Error::Domain(format!(
            "default threshold underflows at n={n}, x={x}, alpha={alpha}"
        )));
    }
    Ok((c, c))
}

/// Parameters at one sweep point, `(c, b)` defaulted where not given.
pub fn point(alpha: f64, n: u64, x: f64, c: Option<f64>, b: Option<f64>) -> Result<EventParams> {
    let (c, b) = match (c, b) {
        (Some(c), Some(b)) => (c, b),
        _ => {
            let (dc, db) = default_cb(alpha, n, x)?;
            (c.unwrap_or(dc), b.unwrap_or(db))
        }
    };
    EventParams::new(n, x, c, b)
}

/// Fixed-`n` sequence over an increasing `x` grid with default `(c, b)`.
pub fn sequence(alpha: f64, n: u64, x_grid: &[f64]) -> Result<Vec<(EventParams, RegimeRatios)>> {
    sequence_with(alpha, |_| n, x_grid, None, None)
}

/// General sequence: `n` may depend on `x`, and `(c, b)` may be fixed.
pub fn sequence_with(
    alpha: f64,
    n_of_x: impl Fn(f64) -> u64,
    x_grid: &[f64],
    c: Option<f64>,
    b: Option<f64>,
) -> Result<Vec<(EventParams, RegimeRatios)>> {
    if x_grid.is_empty() {
        return Err(Error::invalid("x_grid", "[]", "need at least one point"));
    }
    if let Some(w) = x_grid.windows(2).find(|w| !(w[1] > w[0])) {
        return Err(Error::invalid(
            "x_grid",
            format!("{} then {}", w[0], w[1]),
            "grid must be strictly increasing",
        ));
    }
    x_grid
        .iter()
        .map(|&x| {
            let n = n_of_x(x);
            let p = point(alpha, n, x, c, b)?;
            let r = ratios(alpha, &p);
            if !(r.r1 < 1.0) {
                return Err(Error::Regime { n, x, r1: r.r1 });
            }
            Ok((p, r))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn ratio_examples() {
        let p = EventParams::new(10, 1000.0, 0.3, 0.3).unwrap();
        let r = ratios(1.0, &p);
        assert!(rel(r.r1, 0.01) < 1e-14);
        assert!(rel(r.r2, 0.01 / 0.09) < 1e-14);
        assert!(rel(r.r3, 0.01 / (0.09 / 0.3)) < 1e-14);

        let p = EventParams::new(1, 1.0, 0.5, 0.5).unwrap();
        let r = ratios(1.0, &p);
        assert_eq!(r.r1, 1.0);
        assert!(!r.is_valid(DEFAULT_VALIDITY_THRESHOLD));
    }

    #[test]
    fn b_equals_c_identity() {
        for alpha in [0.5, 1.0, 1.7] {
            let p = EventParams::new(7, 300.0, 0.41, 0.41).unwrap();
            let r = ratios(alpha, &p);
            assert!(rel(r.r3, (r.r1 * r.r2).sqrt()) < 1e-12);
        }
    }

    #[test]
    fn default_cb_example() {
        let (c, b) = default_cb(1.2, 10, 1e3).unwrap();
        let r1 = 10.0 * 1e3f64.powf(-1.2);
        assert!(rel(r1, 2.512e-3) < 1e-3);
        assert!((c - 0.287).abs() < 5e-4, "{c}");
        assert_eq!(c, b);
        let r = ratios(1.2, &EventParams::new(10, 1e3, c, b).unwrap());
        assert!((r.r2 - 0.0501).abs() < 1e-4);
        assert!((r.r3 - 0.0112).abs() < 1e-4);
    }

    #[test]
    fn default_cb_clips_and_rejects() {
        // r1 just below 1
        let (c, _) = default_cb(1.0, 99, 100.0).unwrap();
        assert_eq!(c, MAX_DEFAULT_C);
        assert!(matches!(default_cb(1.0, 100, 100.0), Err(Error::Regime { .. })));
        assert!(default_cb(1.0, 1000, 100.0).is_err());
    }

    #[test]
    fn sequence_example() {
        let xs = [1e2, 10f64.powf(2.5), 1e3];
        let seq = sequence(1.0, 5, &xs).unwrap();
        let r1: Vec<f64> = seq.iter().map(|(_, r)| r.r1).collect();
        assert!(rel(r1[0], 0.05) < 1e-12);
        assert!(rel(r1[1], 5.0 / 10f64.powf(2.5)) < 1e-12);
        assert!(rel(r1[2], 0.005) < 1e-12);
        for w in seq.windows(2) {
            assert!(w[1].1.r1 < w[0].1.r1);
            assert!(w[1].1.r2 < w[0].1.r2);
            assert!(w[1].1.r3 < w[0].1.r3);
        }
    }

    #[test]
    fn sequence_rejections() {
        assert!(sequence(1.0, 5, &[10.0, 5.0]).is_err());
        assert!(sequence(1.0, 5, &[]).is_err());
        // growing n at fixed-ish x crosses r1 = 1
        let r = sequence_with(1.0, |x| (x as u64) * 2, &[10.0, 20.0], None, None);
        assert!(matches!(r, Err(Error::Regime { .. })));
    }

    #[test]
    fn explicit_cb_kept() {
        let p = point(1.0, 3, 100.0, Some(0.2), Some(0.1)).unwrap();
        assert_eq!((p.c(), p.b()), (0.2, 0.1));
        let p = point(1.0, 3, 100.0, Some(0.2), None).unwrap();
        assert_eq!(p.c(), 0.2);
        assert!(rel(p.b(), 0.03f64.powf(0.25)) < 1e-14);
    }
}
