//! Monte Carlo estimators for `P(S_n > x)` and its decomposition terms.
//!
//! Three families:
//!
//! - **Crude**: the indicator mean of `{S_n > x}`.
//! - **Decomposition**: the same batch, with each exceedance classified
//!   into one of the five [`Class`]es. Counts are kept as integers and the
//!   per-class values share the total's denominator.
//! - **Conditional**: the designated coordinate `X_1` is drawn from its
//!   conditional law (`X | X > x`, its mirror image, or `X | cx < |X| <= x`)
//!   and the indicator of the remaining event is weighted by `n` times the
//!   conditioning probability. For `c < 1` the `n` one-big events are
//!   disjoint, so by exchangeability the union probability is exactly `n`
//!   times the first-coordinate probability.
//!
//! All estimators are pure functions of `(model, params, config)`; see
//! [`crate::rng`] for how chunks map to random streams.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dist::TailModel;
use crate::error::{Error, Result};
use crate::events::{Class, EventParams, PartitionCounts};
use crate::rng;
use crate::stats;

pub const MIN_SAMPLES: u64 = 1_000;
pub const DEFAULT_CI_LEVEL: f64 = 0.99;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    Crude,
    Decomposition,
    ConditionalBigJump,
    ConditionalMid,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        std::fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McConfig {
    pub samples: u64,
    pub seed: u64,
    pub ci_level: f64,
}

impl McConfig {
    pub fn new(samples: u64, seed: u64) -> Self {
        Self {
            samples,
            seed,
            ci_level: DEFAULT_CI_LEVEL,
        }
    }

    pub fn with_ci_level(mut self, level: f64) -> Self {
        self.ci_level = level;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.samples < MIN_SAMPLES {
            return Err(Error::invalid("samples", self.samples, "need at least 1000 samples"));
        }
        stats::check_level(self.ci_level)?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub samples: u64,
    pub seed: u64,
    pub method: Method,
    /// Indicator hits; `value = weight·hits/samples`.
    pub hits: u64,
    pub weight: f64,
    /// No hits were observed; `ci_hi` is a one-sided upper bound.
    pub degenerate: bool,
}

impl Estimate {
    /// Weighted indicator mean with a Wilson interval scaled by `weight`.
    pub fn from_hits(hits: u64, cfg: &McConfig, weight: f64, method: Method) -> Self {
        let n = cfg.samples;
        let p = hits as f64 / n as f64;
        let stderr = weight * (p * (1.0 - p) / n as f64).sqrt();
        let degenerate = hits == 0;
        let (lo, hi) = if degenerate {
            (0.0, stats::wilson_upper_zero(n, cfg.ci_level))
        } else {
            stats::wilson(hits, n, cfg.ci_level)
        };
        Self {
            value: weight * p,
            stderr,
            ci_lo: (weight * lo).min(weight * p),
            ci_hi: (weight * hi).max(weight * p),
            samples: n,
            seed: cfg.seed,
            method,
            hits,
            weight,
            degenerate,
        }
    }

    fn degenerate_zero(cfg: &McConfig, method: Method) -> Self {
        Self {
            value: 0.0,
            stderr: 0.0,
            ci_lo: 0.0,
            ci_hi: 0.0,
            samples: cfg.samples,
            seed: cfg.seed,
            method,
            hits: 0,
            weight: 0.0,
            degenerate: true,
        }
    }

    /// `|self - other| <= k·sqrt(se1² + se2²)`.
    pub fn agrees_with(&self, other: &Estimate, k: f64) -> bool {
        let se = self.stderr.hypot(other.stderr);
        (self.value - other.value).abs() <= k * se
    }
}

/// Fills `buf` with i.i.d. draws and returns their sum in index order.
#[inline]
fn fill<R: Rng + ?Sized>(model: &TailModel, rng: &mut R, buf: &mut [f64]) -> f64 {
    let mut s = 0.0;
    for v in buf.iter_mut() {
        *v = model.draw(rng);
        s += *v;
    }
    s
}

fn batch_counts(model: &TailModel, params: &EventParams, cfg: &McConfig) -> PartitionCounts {
    let n = params.n() as usize;
    let [zero, multi, mid, neg, pos, refined, exceed, total] =
        rng::tally(cfg.seed, cfg.samples, |r, len| {
            let mut c = PartitionCounts::default();
            let mut buf = vec![0.0; n];
            for _ in 0..len {
                fill(model, r, &mut buf);
                c.record(&buf, params);
            }
            let [a, b, d, e, f] = c.by_class;
            [a, b, d, e, f, c.refined, c.exceedances, c.total]
        });
    PartitionCounts {
        by_class: [zero, multi, mid, neg, pos],
        refined,
        exceedances: exceed,
        total,
    }
}

/// Indicator mean of `{S_n > x}`.
pub fn estimate_crude(model: &TailModel, params: &EventParams, cfg: &McConfig) -> Result<Estimate> {
    cfg.validate()?;
    let n = params.n() as usize;
    let x = params.x();
    let [hits] = rng::tally(cfg.seed, cfg.samples, |r, len| {
        let mut buf = vec![0.0; n];
        let mut hits = 0;
        for _ in 0..len {
            hits += (fill(model, r, &mut buf) > x) as u64;
        }
        [hits]
    });
    Ok(Estimate::from_hits(hits, cfg, 1.0, Method::Crude))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Decomposition {
    pub total: Estimate,
    /// Indexed by [`Class::index`].
    pub terms: [Estimate; 5],
    /// Raw-batch estimate of the refined one-big event on `{S_n > x}`.
    pub refined: Estimate,
    pub counts: PartitionCounts,
}

impl Decomposition {
    pub fn term(&self, class: Class) -> &Estimate {
        &self.terms[class.index()]
    }

    /// Sum of the five terms, accumulated as integer counts and divided
    /// once; equals `total.value` bit-for-bit.
    pub fn sum_of_terms(&self) -> f64 {
        let hits: u64 = self.counts.by_class.iter().sum();
        hits as f64 / self.counts.total as f64
    }
}

/// One classified batch yielding the total and all five terms.
pub fn estimate_decomposition(
    model: &TailModel,
    params: &EventParams,
    cfg: &McConfig,
) -> Result<Decomposition> {
    cfg.validate()?;
    let counts = batch_counts(model, params, cfg);
    debug_assert_eq!(counts.by_class.iter().sum::<u64>(), counts.exceedances);
    let m = Method::Decomposition;
    let terms = Class::ALL.map(|c| Estimate::from_hits(counts.count(c), cfg, 1.0, m));
    Ok(Decomposition {
        total: Estimate::from_hits(counts.exceedances, cfg, 1.0, m),
        terms,
        refined: Estimate::from_hits(counts.refined, cfg, 1.0, m),
        counts,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

/// Conditional estimates of the one-big term and of the refined event,
/// from one shared batch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OneBig {
    pub one_big: Estimate,
    /// Only meaningful for [`Sign::Plus`]; zero hits for `Minus`.
    pub refined: Estimate,
}

/// Conditional estimator for `p_{1,1,+}` / `p_{1,1,-}` and the refined
/// event, from one batch.
pub fn estimate_one_big_pair(
    model: &TailModel,
    params: &EventParams,
    sign: Sign,
    cfg: &McConfig,
) -> Result<OneBig> {
    cfg.validate()?;
    let x = params.x();
    // for PurePareto with x < u0, {X > x} = {X >= u0} up to a null set
    let t = x.max(model.conditional_floor());
    let tail_x = model.tail(t);
    let m = Method::ConditionalBigJump;
    if !(tail_x > 0.0) {
        let z = Estimate::degenerate_zero(cfg, m);
        return Ok(OneBig {
            one_big: z,
            refined: z,
        });
    }
    let n = params.n() as usize;
    let (cx, bx) = (params.cx(), params.bx());
    let flip = match sign {
        Sign::Plus => 1.0,
        Sign::Minus => -1.0,
    };
    let [hits, refined] = rng::tally(cfg.seed, cfg.samples, |r, len| {
        let mut hits = 0;
        let mut refined = 0;
        for _ in 0..len {
            let big = flip * model.draw_above(r, t, tail_x);
            let mut s = big;
            let mut rest = 0.0;
            let mut small = true;
            for _ in 1..n {
                let v = model.draw(r);
                s += v;
                rest += v;
                small &= v.abs() <= cx;
            }
            if s > x && small {
                hits += 1;
                if sign == Sign::Plus && rest.abs() <= bx {
                    refined += 1;
                }
            }
        }
        [hits, refined]
    });
    let weight = params.n() as f64 * tail_x;
    Ok(OneBig {
        one_big: Estimate::from_hits(hits, cfg, weight, m),
        refined: Estimate::from_hits(refined, cfg, weight, m),
    })
}

pub fn estimate_one_big(
    model: &TailModel,
    params: &EventParams,
    sign: Sign,
    cfg: &McConfig,
) -> Result<Estimate> {
    Ok(estimate_one_big_pair(model, params, sign, cfg)?.one_big)
}

/// Conditional estimate of `n·P(X_1 > x, |S_n - X_1| <= bx, max_{j>1} |X_j| <= cx, S_n > x)`.
///
/// Uses the same batch as [`estimate_one_big`] with [`Sign::Plus`] for
/// the same config, so the two are ordered sample by sample.
pub fn estimate_refined(model: &TailModel, params: &EventParams, cfg: &McConfig) -> Result<Estimate> {
    Ok(estimate_one_big_pair(model, params, Sign::Plus, cfg)?.refined)
}

/// Conditional estimate of `p_{1,0}`: `X_1` drawn from `X | cx < |X| <= x`,
/// weight `2n·(tail(cx) - tail(x))`.
pub fn estimate_one_mid(model: &TailModel, params: &EventParams, cfg: &McConfig) -> Result<Estimate> {
    cfg.validate()?;
    let (x, cx) = (params.x(), params.cx());
    let (tail_lo, tail_hi) = (model.tail(cx), model.tail(x));
    let stratum = 2.0 * (tail_lo - tail_hi);
    let m = Method::ConditionalMid;
    if !(stratum > 0.0) {
        return Ok(Estimate::degenerate_zero(cfg, m));
    }
    let n = params.n() as usize;
    let [hits] = rng::tally(cfg.seed, cfg.samples, |r, len| {
        let mut hits = 0;
        for _ in 0..len {
            let mut s = model.draw_in_shell(r, (cx, x), (tail_lo, tail_hi));
            let mut small = true;
            for _ in 1..n {
                let v = model.draw(r);
                s += v;
                small &= v.abs() <= cx;
            }
            hits += (s > x && small) as u64;
        }
        [hits]
    });
    Ok(Estimate::from_hits(hits, cfg, params.n() as f64 * stratum, m))
}
