//! Globally adaptive Gauss–Kronrod (7/15) quadrature.
//!
//! Finite intervals are bisected where the Kronrod error estimate is
//! largest. Semi-infinite power-law tails are handled by integrating in
//! log-space over geometrically growing panels until a panel contributes
//! nothing at the requested tolerance.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

// Gauss weights for the odd Kronrod nodes (1, 3, 5) and the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error: f64,
    pub intervals: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 0.0,
            max_intervals: 4000,
        }
    }
}

impl QuadOptions {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (j, (&node, &wk)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * node;
        let pair = f(centre - dx) + f(centre + dx);
        kronrod += wk * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    let value = kronrod * half;
    let err = ((kronrod - gauss) * half).abs();
    (value, err)
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Integrates `f` over the finite interval `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, opts: QuadOptions) -> QuadResult {
    if a == b {
        return QuadResult {
            value: 0.0,
            abs_error: 0.0,
            intervals: 0,
            converged: true,
        };
    }
    if a > b {
        let r = integrate(f, b, a, opts);
        return QuadResult {
            value: -r.value,
            ..r
        };
    }

    let (v, e) = gk15(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Panel { a, b, value: v, err: e });
    let mut total = v;
    let mut total_err = e;

    loop {
        let tol = opts.abs_tol.max(opts.rel_tol * total.abs());
        if total_err <= tol {
            break;
        }
        if heap.len() >= opts.max_intervals {
            break;
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval cannot be split further in floating point
            heap.push(Panel { err: 0.0, ..worst });
            total_err -= worst.err;
            continue;
        }
        let (lv, le) = gk15(&f, worst.a, mid);
        let (rv, re) = gk15(&f, mid, worst.b);
        total += lv + rv - worst.value;
        total_err += le + re - worst.err;
        heap.push(Panel {
            a: worst.a,
            b: mid,
            value: lv,
            err: le,
        });
        heap.push(Panel {
            a: mid,
            b: worst.b,
            value: rv,
            err: re,
        });
    }

    // re-sum from the panels to shed accumulated update rounding
    let (mut value, mut err) = (0.0, 0.0);
    let intervals = heap.len();
    for p in heap.into_vec() {
        value += p.value;
        err += p.err;
    }
    let tol = opts.abs_tol.max(opts.rel_tol * value.abs());
    QuadResult {
        value,
        abs_error: err,
        intervals,
        converged: err <= tol.max(f64::EPSILON * value.abs()),
    }
}

/// Integrates `f` over `[a, ∞)` for `a > 0`, assuming `f` decays at least
/// like a power law.
///
/// Substitutes `u = a·e^s`; the transformed integrand `f(a e^s)·a e^s` decays
/// exponentially in `s`. Panels of width `PANEL` in `s` are added until one
/// falls below the tolerance relative to the running total.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(f: F, a: f64, opts: QuadOptions) -> QuadResult {
    assert!(a > 0.0, "log-space tail integration needs a positive lower limit");
    const PANEL: f64 = 4.0;
    const MAX_PANELS: usize = 200;
    let g = |s: f64| {
        let u = a * s.exp();
        if u.is_finite() {
            f(u) * u
        } else {
            0.0
        }
    };
    let mut value = 0.0;
    let mut abs_error = 0.0;
    let mut intervals = 0;
    let mut converged = true;
    let mut quiet = 0;
    for k in 0..MAX_PANELS {
        let lo = k as f64 * PANEL;
        let r = integrate(&g, lo, lo + PANEL, opts);
        value += r.value;
        abs_error += r.abs_error;
        intervals += r.intervals;
        converged &= r.converged;
        if r.value.abs() <= 1e-3 * opts.rel_tol * value.abs() {
            quiet += 1;
            if quiet >= 2 {
                break;
            }
        } else {
            quiet = 0;
        }
        if (a * (lo + PANEL).exp()).is_infinite() {
            break;
        }
    }
    QuadResult {
        value,
        abs_error,
        intervals,
        converged,
    }
}

/// Integrates over `[a, b]` after splitting at the given interior points.
/// Points outside `(a, b)` are ignored.
pub fn integrate_split<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    opts: QuadOptions,
) -> QuadResult {
    let mut pts: Vec<f64> = breaks.iter().copied().filter(|&p| p > a && p < b).collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let mut edges = Vec::with_capacity(pts.len() + 2);
    edges.push(a);
    edges.extend(pts);
    edges.push(b);
    let mut out = QuadResult {
        value: 0.0,
        abs_error: 0.0,
        intervals: 0,
        converged: true,
    };
    for w in edges.windows(2) {
        let r = integrate(&f, w[0], w[1], opts);
        out.value += r.value;
        out.abs_error += r.abs_error;
        out.intervals += r.intervals;
        out.converged &= r.converged;
    }
    out
}
