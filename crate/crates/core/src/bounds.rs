//! Computable upper and lower bounds on `P(S_n > x)` and its
//! decomposition terms.
//!
//! Every bound here is the explicit side of an inequality: Chebyshev on
//! the truncated sum `T_n = Σ X_i·1(|X_i| <= cx)`, the pairwise union bound
//! for two big coordinates, and a quadrature of the integrand `g` that
//! controls the one-mid term. None of them hide constants, so each can be
//! compared directly against Monte Carlo estimates.

use serde::Serialize;

use crate::dist::{TailModel, Variant};
use crate::error::{Error, Result};
use crate::events::EventParams;
use crate::quad::{self, QuadOptions};

pub const P10_REL_TOL: f64 = 1e-8;
pub const ORACLE_REL_TOL: f64 = 1e-8;

/// `¼·(1 - exp(-2n·P(X > x)))`, a lower bound on `P(S_n > x)` for
/// symmetric summands.
pub fn feller_lower_bound(model: &TailModel, n: u64, x: f64) -> f64 {
    feller_from_mass(n as f64 * model.tail(x))
}

/// [`feller_lower_bound`] as a function of `n·P(X > x)`.
pub fn feller_from_mass(mass: f64) -> f64 {
    -0.25 * (-2.0 * mass).exp_m1()
}

/// `min(1, n·E[Y²]/x²)` with `Y = X·1(|X| <= cx)`; bounds the no-big-jump
/// term through `P(T_n > x)`.
pub fn p0_chebyshev_bound(model: &TailModel, params: &EventParams) -> f64 {
    let (n, x) = (params.n() as f64, params.x());
    (n * model.truncated_second_moment(params.cx()) / (x * x)).min(1.0)
}

/// `min(1, C(n,2)·P(|X| > cx)²)`.
pub fn pge2_bound(model: &TailModel, params: &EventParams) -> f64 {
    let n = params.n() as f64;
    if params.n() < 2 {
        return 0.0;
    }
    let two_sided = 2.0 * model.tail(params.cx());
    (0.5 * n * (n - 1.0) * two_sided * two_sided).min(1.0)
}

/// Pieces of `I = ∫_{cx}^{x} g(u) du` with
/// `g(u) = n·u^{-1-α}·min(1, n(cx)^{2-α}/(x-u)²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct P10Integral {
    /// `x - sqrt(n)·(cx)^{1-α/2}`; the `min` in `g` switches to 1 here.
    pub u_x: f64,
    /// Over `[cx, max(cx, x/2)]`.
    pub i1: f64,
    /// Over `[max(cx, x/2), u_x]`; zero when `u_x` does not exceed the left end.
    pub i2: f64,
    /// Over `[max(cx, x/2, u_x), x]`.
    pub i3: f64,
    pub i: f64,
    /// `n²(cx)^{2-α}/(x/2)² · (cx)^{-α}/α`, the `[cx, ∞)` relaxation of `I1`.
    pub i1_relaxed: f64,
    /// `n²(x/2)^{-1-α}(cx)^{2-α}/(x - u_x)`, the `(-∞, u_x]` relaxation of `I2`.
    pub i2_relaxed: f64,
    /// `(x - u_x)·n·u_x^{-1-α}`; infinite when `u_x <= 0`.
    pub i3_relaxed: f64,
    /// `u_x <= x/2`: the middle piece is empty.
    pub collapsed: bool,
    /// Model-explicit upper bound on `p_{1,0}` (see [`p10_model_bound`]).
    pub upper: f64,
}

pub fn p10_integral(model: &TailModel, params: &EventParams) -> P10Integral {
    p10_integral_with_tol(model, params, P10_REL_TOL)
}

pub fn p10_integral_with_tol(model: &TailModel, params: &EventParams, rel_tol: f64) -> P10Integral {
    let alpha = model.alpha();
    let n = params.n() as f64;
    let (x, cx) = (params.x(), params.cx());
    let spread = n * cx.powf(2.0 - alpha);
    let u_x = x - spread.sqrt();
    let g = |u: f64| {
        let d = x - u;
        let damp = if d > 0.0 { (spread / (d * d)).min(1.0) } else { 1.0 };
        n * u.powf(-1.0 - alpha) * damp
    };
    let opts = QuadOptions::with_rel_tol(rel_tol);

    let left = cx.max(0.5 * x);
    let mid = u_x.clamp(left, x);
    let i1 = quad::integrate(g, cx, left, opts).value;
    let i2 = quad::integrate(g, left, mid, opts).value;
    let i3 = quad::integrate(g, mid, x, opts).value;

    let i1_relaxed = n * spread / (0.25 * x * x) * cx.powf(-alpha) / alpha;
    let i2_relaxed = n * (0.5 * x).powf(-1.0 - alpha) * spread / (x - u_x);
    let i3_relaxed = if u_x > 0.0 {
        (x - u_x) * n * u_x.powf(-1.0 - alpha)
    } else {
        f64::INFINITY
    };

    P10Integral {
        u_x,
        i1,
        i2,
        i3,
        i: i1 + i2 + i3,
        i1_relaxed,
        i2_relaxed,
        i3_relaxed,
        collapsed: u_x <= 0.5 * x,
        upper: p10_model_bound(model, params, rel_tol),
    }
}

/// Upper bound on `p_{1,0}` with the model's own constants:
///
/// `n·∫_{cx}^{x} f(u)·[m(x-u) + m(x+u)] du`, `m(s) = min(1, (n-1)E[Y²]/s²)`,
///
/// where `m(x∓u)` bounds `P(Y_2 + … + Y_n > x ∓ u)` for a big coordinate at `±u`.
pub fn p10_model_bound(model: &TailModel, params: &EventParams, rel_tol: f64) -> f64 {
    let (x, cx) = (params.x(), params.cx());
    let nm1 = params.n() as f64 - 1.0;
    let var = nm1 * model.truncated_second_moment(cx);
    if var <= 0.0 {
        return 0.0;
    }
    let m = |s: f64| if s > 0.0 { (var / (s * s)).min(1.0) } else { 1.0 };
    let h = |u: f64| model.pdf(u) * (m(x - u) + m(x + u));
    let breaks = [model.u0(), x - var.sqrt()];
    let r = quad::integrate_split(h, cx, x, &breaks, QuadOptions::with_rel_tol(rel_tol));
    (params.n() as f64 * r.value).min(1.0)
}

/// `n·P(X > x)·min(1, (n-1)·E[Y²]/x²)`; zero for `n = 1`.
pub fn p11m_bound(model: &TailModel, params: &EventParams) -> f64 {
    if params.n() < 2 {
        return 0.0;
    }
    let (n, x) = (params.n() as f64, params.x());
    let cheb = ((n - 1.0) * model.truncated_second_moment(params.cx()) / (x * x)).min(1.0);
    (n * model.tail(x) * cheb).min(1.0)
}

/// `n·P(X > x)·min(1, (n-1)·E[Y²]/(bx)²)`: how far the refined one-big
/// event can fall below `p_{1,1,+}`.
pub fn diff_bound(model: &TailModel, params: &EventParams) -> f64 {
    if params.n() < 2 {
        return 0.0;
    }
    let n = params.n() as f64;
    let bx = params.bx();
    let cheb = ((n - 1.0) * model.truncated_second_moment(params.cx()) / (bx * bx)).min(1.0);
    (n * model.tail(params.x()) * cheb).min(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LemmaBounds {
    pub feller_lower: f64,
    pub p0_upper: f64,
    pub pge2_upper: f64,
    pub p10: P10Integral,
    pub p11m_upper: f64,
    pub diff_upper: f64,
}

impl LemmaBounds {
    pub fn compute(model: &TailModel, params: &EventParams) -> Self {
        Self {
            feller_lower: feller_lower_bound(model, params.n(), params.x()),
            p0_upper: p0_chebyshev_bound(model, params),
            pge2_upper: pge2_bound(model, params),
            p10: p10_integral(model, params),
            p11m_upper: p11m_bound(model, params),
            diff_upper: diff_bound(model, params),
        }
    }
}

/// `P(S_n > x)` for `n ∈ {1, 2}` without sampling: the closed-form tail,
/// or `∫ f(u)·P(X > x - u) du` by adaptive quadrature.
pub fn convolution_oracle(model: &TailModel, n: u64, x: f64) -> Result<f64> {
    match n {
        1 => Ok(model.tail(x)),
        2 => Ok(two_fold(model, x)),
        _ => Err(Error::Unsupported(format!(
            "convolution oracle covers n = 1 and n = 2, got n = {n}"
        ))),
    }
}

fn two_fold(model: &TailModel, x: f64) -> f64 {
    let opts = QuadOptions::with_rel_tol(ORACLE_REL_TOL * 1e-2);
    let u0 = model.u0();
    let h = |u: f64| model.pdf(u) * model.tail(x - u);
    // kinks of f at ±u0 (PurePareto) and of tail(x-u) at x ∓ u0 and x
    let mut pts = vec![-u0, u0, x - u0, x, x + u0];
    if model.variant() == Variant::SmoothPareto {
        pts.push(0.0);
    }
    pts.sort_by(f64::total_cmp);
    let lo = pts[0] - u0;
    let hi = pts[pts.len() - 1] + u0;
    let body = quad::integrate_split(h, lo, hi, &pts, opts).value;
    // lo <= -2u0 and hi >= 2u0, so both tails start away from the origin
    let right = quad::integrate_to_infinity(h, hi, opts).value;
    let left = quad::integrate_to_infinity(|v| h(-v), -lo, opts).value;
    left + body + right
}
