//! Symmetric power-law distributions with closed-form tails.
//!
//! Two exact families are provided, both with density decaying like
//! `|u|^{-1-alpha}`:
//!
//! - [`Variant::PurePareto`]: `f(u) = (alpha/2)·u0^alpha·|u|^{-1-alpha}` on `|u| >= u0`.
//! - [`Variant::SmoothPareto`]: `f(u) = (alpha/2)·u0^alpha·(u0+|u|)^{-1-alpha}` on all of R.
//!
//! Both have `P(X > u) ~ ½·u0^alpha·u^{-alpha}`. Every sampler works by
//! inversion, so each draw is a function of the uniforms consumed from the
//! stream and nothing else.

use std::fmt;
use std::str::FromStr;

use rand::distr::Open01;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{self, QuadOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    PurePareto,
    SmoothPareto,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::PurePareto => "PurePareto",
            Variant::SmoothPareto => "SmoothPareto",
        })
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "purepareto" | "pure" => Ok(Variant::PurePareto),
            "smoothpareto" | "smooth" => Ok(Variant::SmoothPareto),
            _ => Err(Error::invalid(
                "variant",
                s,
                "expected PurePareto or SmoothPareto",
            )),
        }
    }
}

/// A symmetric heavy-tailed law with tail index `alpha` in (0, 2).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailModel {
    alpha: f64,
    u0: f64,
    variant: Variant,
}

impl TailModel {
    pub fn new(alpha: f64, u0: f64, variant: Variant) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 2.0) {
            return Err(Error::invalid("alpha", alpha, "tail index must lie in (0, 2)"));
        }
        if !(u0 > 0.0 && u0.is_finite()) {
            return Err(Error::invalid("u0", u0, "scale must be positive and finite"));
        }
        Ok(Self { alpha, u0, variant })
    }

    pub fn pure(alpha: f64) -> Result<Self> {
        Self::new(alpha, 1.0, Variant::PurePareto)
    }

    pub fn smooth(alpha: f64) -> Result<Self> {
        Self::new(alpha, 1.0, Variant::SmoothPareto)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn u0(&self) -> f64 {
        self.u0
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    /// Smallest level `t` for which the conditional law `X | X > t` is
    /// supported by [`TailModel::sample_tail_conditional`].
    pub fn conditional_floor(&self) -> f64 {
        match self.variant {
            Variant::PurePareto => self.u0,
            Variant::SmoothPareto => 0.0,
        }
    }

    pub fn pdf(&self, u: f64) -> f64 {
        let a = u.abs();
        let c = 0.5 * self.alpha * self.u0.powf(self.alpha);
        match self.variant {
            Variant::PurePareto => {
                if a >= self.u0 {
                    c * a.powf(-1.0 - self.alpha)
                } else {
                    0.0
                }
            }
            Variant::SmoothPareto => c * (self.u0 + a).powf(-1.0 - self.alpha),
        }
    }

    /// `P(X > u)`.
    pub fn tail(&self, u: f64) -> f64 {
        if u < 0.0 {
            return 1.0 - self.tail(-u);
        }
        match self.variant {
            Variant::PurePareto => {
                if u >= self.u0 {
                    0.5 * (u / self.u0).powf(-self.alpha)
                } else {
                    0.5
                }
            }
            Variant::SmoothPareto => 0.5 * (self.u0 / (self.u0 + u)).powf(self.alpha),
        }
    }

    pub fn cdf(&self, u: f64) -> f64 {
        if u >= 0.0 {
            1.0 - self.tail(u)
        } else {
            self.tail(-u)
        }
    }

    /// Inverse of [`TailModel::tail`] on `(0, ½]`.
    pub fn quantile_tail(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p <= 0.5) {
            return Err(Error::Domain(format!("tail probability {p} not in (0, 0.5]")));
        }
        Ok(self.quantile_tail_unchecked(p))
    }

    #[inline]
    fn quantile_tail_unchecked(&self, p: f64) -> f64 {
        let scaled = (2.0 * p).powf(-1.0 / self.alpha);
        match self.variant {
            Variant::PurePareto => self.u0 * scaled,
            Variant::SmoothPareto => self.u0 * (scaled - 1.0),
        }
    }

    /// One draw by inversion from a single uniform: the lower half of the
    /// unit interval maps to the positive half-line.
    #[inline]
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let v: f64 = rng.random();
        if v < 0.5 {
            self.quantile_tail_unchecked(0.5 - v)
        } else {
            -self.quantile_tail_unchecked(1.0 - v)
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, count: usize) -> Vec<f64> {
        (0..count).map(|_| self.draw(rng)).collect()
    }

    /// Draw from `X | X > t` given the precomputed `tail(t)`.
    #[inline]
    pub(crate) fn draw_above<R: Rng + ?Sized>(&self, rng: &mut R, t: f64, tail_t: f64) -> f64 {
        let v: f64 = rng.sample(Open01);
        // rounding in the inversion can land exactly on t
        self.quantile_tail_unchecked(tail_t * v).max(t.next_up())
    }

    pub fn sample_tail_conditional<R: Rng + ?Sized>(
        &self,
        t: f64,
        rng: &mut R,
        count: usize,
    ) -> Result<Vec<f64>> {
        if !(t >= self.conditional_floor()) || !t.is_finite() {
            return Err(Error::Domain(format!(
                "conditioning level {t} below {} for {}",
                self.conditional_floor(),
                self.variant
            )));
        }
        let tail_t = self.tail(t);
        Ok((0..count).map(|_| self.draw_above(rng, t, tail_t)).collect())
    }

    /// Draw from `X | lo < |X| <= hi` with a symmetric sign, given
    /// `tail(lo)` and `tail(hi)`. The magnitude is obtained by inverting the
    /// tail on `[tail(hi), tail(lo))`.
    #[inline]
    pub(crate) fn draw_in_shell<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        (lo, hi): (f64, f64),
        (tail_lo, tail_hi): (f64, f64),
    ) -> f64 {
        let v: f64 = rng.random();
        let (sign, w) = if v < 0.5 {
            (1.0, 2.0 * v)
        } else {
            (-1.0, 2.0 * v - 1.0)
        };
        let p = tail_hi + (tail_lo - tail_hi) * w;
        let m = self.quantile_tail_unchecked(p.min(0.5)).clamp(lo.next_up(), hi);
        sign * m
    }

    /// `E[X²·1(|X| <= t)]`.
    ///
    /// PurePareto uses the closed form. SmoothPareto uses the closed form
    /// for `t >= u0` and adaptive quadrature below `u0`, where the closed
    /// form loses precision to cancellation.
    pub fn truncated_second_moment(&self, t: f64) -> f64 {
        let (alpha, u0) = (self.alpha, self.u0);
        if !(t > 0.0) {
            return 0.0;
        }
        match self.variant {
            Variant::PurePareto => {
                if t <= u0 {
                    return 0.0;
                }
                // α·u0^α·(t^{2-α} - u0^{2-α})/(2-α), written as u0²·α·∫_1^{t/u0} v^{1-α} dv
                let l = (t / u0).ln();
                u0 * u0 * alpha * power_integral(2.0 - alpha, l)
            }
            Variant::SmoothPareto => {
                if t < u0 {
                    return quad::integrate(
                        |u| 2.0 * u * u * self.pdf(u),
                        0.0,
                        t,
                        QuadOptions::with_rel_tol(1e-13),
                    )
                    .value;
                }
                // α·u0^α·∫_{u0}^{u0+t} (v-u0)² v^{-1-α} dv, expanded in powers of v
                let l = ((u0 + t) / u0).ln();
                let a = power_integral(2.0 - alpha, l);
                let b = power_integral(1.0 - alpha, l);
                let c = power_integral(-alpha, l);
                alpha * u0 * u0 * (a - 2.0 * b + c)
            }
        }
    }

    /// Reference `E[X²·1(|X| <= t)]` by quadrature of the density.
    pub fn truncated_second_moment_quadrature(&self, t: f64) -> f64 {
        let lo = match self.variant {
            Variant::PurePareto => self.u0,
            Variant::SmoothPareto => 0.0,
        };
        if t <= lo {
            return 0.0;
        }
        quad::integrate(
            |u| 2.0 * u * u * self.pdf(u),
            lo,
            t,
            QuadOptions::with_rel_tol(1e-13),
        )
        .value
    }
}

/// `∫_1^{e^l} v^{s-1} dv = (e^{s l} - 1)/s`, stable as `s -> 0`.
fn power_integral(s: f64, l: f64) -> f64 {
    let z = s * l;
    if z == 0.0 {
        l
    } else {
        l * z.exp_m1() / z
    }
}
