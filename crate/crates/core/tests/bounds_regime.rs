use bigjump::bounds::{
    convolution_oracle, diff_bound, p0_chebyshev_bound, p10_integral, p10_integral_with_tol,
    p11m_bound, pge2_bound, LemmaBounds, P10_REL_TOL,
};
use bigjump::quad::{self, QuadOptions};
use bigjump::{regime, EventParams, TailModel, Variant};
use proptest::prelude::*;

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn scale(alpha: f64, p: &EventParams) -> f64 {
    regime::r1(alpha, p.n(), p.x())
}

#[test]
fn all_bounds_vanish_along_long_regime_sequences() {
    // p0 decays like c^{2-α} ∝ r1^{(2-α)/(4α)}, the slowest of the five, so
    // the grid has to reach far out before every ratio drops below 0.05
    for (alpha, n, xs) in [
        (1.0, 10u64, [1e2, 1e3, 1e4, 1e5, 1e7]),
        (1.2, 10, [1e2, 1e4, 1e6, 1e8, 1e10]),
        (0.8, 5, [1e3, 1e5, 1e8, 1e11, 1e14]),
    ] {
        let m = TailModel::pure(alpha).unwrap();
        let seq = regime::sequence(alpha, n, &xs).unwrap();
        let ratios: Vec<[f64; 5]> = seq
            .iter()
            .map(|(p, _)| {
                let s = scale(alpha, p);
                let lb = LemmaBounds::compute(&m, p);
                [lb.p0_upper, lb.pge2_upper, lb.p10.i, lb.p11m_upper, lb.diff_upper].map(|v| v / s)
            })
            .collect();
        for k in 0..5 {
            let col: Vec<f64> = ratios.iter().map(|r| r[k]).collect();
            assert!(col.windows(2).all(|w| w[1] < w[0]), "alpha={alpha} bound {k}: {col:?}");
            assert!(*col.last().unwrap() < 0.05, "alpha={alpha} bound {k}: {col:?}");
        }
    }
}

#[test]
fn p0_bound_scales_like_c_power() {
    // n·E[Y²]/x² = α/(2-α)·c^{2-α}·n·x^{-α}·(1 - (cx)^{α-2}) for u0 = 1
    for alpha in [0.5, 1.0, 1.5] {
        let m = TailModel::pure(alpha).unwrap();
        for e in 2..6 {
            let x = 10f64.powi(e);
            for c in [0.05, 0.2, 0.6] {
                let p = EventParams::new(3, x, c, 0.5).unwrap();
                let lhs = p0_chebyshev_bound(&m, &p);
                let rhs = alpha / (2.0 - alpha)
                    * c.powf(2.0 - alpha)
                    * scale(alpha, &p)
                    * (1.0 - (c * x).powf(alpha - 2.0));
                if lhs < 1.0 {
                    assert!(rel(lhs, rhs) < 1e-10, "alpha={alpha} x={x} c={c}");
                }
            }
        }
    }
}

#[test]
fn i1_order_ratio_is_bounded() {
    // I1 ≲ (n x^{-α})² c^{2-2α}; report the empirical constant across a sweep
    let mut ratios = Vec::new();
    for alpha in [0.8, 1.2, 1.5] {
        let m = TailModel::pure(alpha).unwrap();
        for (p, _) in regime::sequence(alpha, 5, &[1e3, 1e4, 1e5, 1e6]).unwrap() {
            let r = p10_integral(&m, &p);
            if p.c() >= 0.5 {
                continue;
            }
            let order = scale(alpha, &p).powi(2) * p.c().powf(2.0 - 2.0 * alpha);
            ratios.push(r.i1 / order);
            assert!(r.i1 <= r.i1_relaxed);
        }
    }
    let hi = ratios.iter().cloned().fold(0.0, f64::max);
    let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(lo > 0.0 && hi < 10.0, "{ratios:?}");
}

#[test]
fn p10_relaxations_dominate_pieces() {
    for alpha in [0.8, 1.2, 1.5] {
        let m = TailModel::pure(alpha).unwrap();
        for (p, _) in regime::sequence(alpha, 10, &[1e3, 1e5, 1e7]).unwrap() {
            let r = p10_integral(&m, &p);
            assert!(!r.collapsed);
            assert!(r.i1 <= r.i1_relaxed * (1.0 + 1e-9));
            assert!(r.i2 <= r.i2_relaxed * (1.0 + 1e-9));
            assert!(r.i3 <= r.i3_relaxed * (1.0 + 1e-9));
            assert_eq!(r.i, r.i1 + r.i2 + r.i3);
        }
    }
}

#[test]
fn p10_tolerance_self_consistency_on_regime() {
    for alpha in [0.8, 1.2, 1.5] {
        let m = TailModel::pure(alpha).unwrap();
        for (p, _) in regime::sequence(alpha, 10, &[1e2, 1e3, 1e5]).unwrap() {
            let a = p10_integral_with_tol(&m, &p, P10_REL_TOL).i;
            let b = p10_integral_with_tol(&m, &p, 0.5 * P10_REL_TOL).i;
            assert!(rel(a, b) < 1e-6);
        }
    }
}

#[test]
fn bounds_nonnegative_and_capped() {
    for v in [Variant::PurePareto, Variant::SmoothPareto] {
        for alpha in [0.3, 1.0, 1.9] {
            let m = TailModel::new(alpha, 1.0, v).unwrap();
            for n in [1u64, 2, 50, 10_000] {
                for x in [0.5, 5.0, 500.0] {
                    for c in [0.1, 0.9] {
                        let p = EventParams::new(n, x, c, 0.3).unwrap();
                        let lb = LemmaBounds::compute(&m, &p);
                        for v in [
                            lb.feller_lower,
                            lb.p0_upper,
                            lb.pge2_upper,
                            lb.p11m_upper,
                            lb.diff_upper,
                            lb.p10.upper,
                        ] {
                            assert!((0.0..=1.0).contains(&v), "{m:?} {p:?} {lb:?}");
                        }
                        assert!(lb.p10.i >= 0.0 && lb.p10.i1 >= 0.0 && lb.p10.i2 >= 0.0);
                        assert!(lb.feller_lower <= 0.25);
                        assert!(lb.p10.u_x < x);
                    }
                }
            }
        }
    }
}

#[test]
fn single_summand_bounds() {
    let m = TailModel::pure(1.0).unwrap();
    let p = EventParams::new(1, 100.0, 0.3, 0.3).unwrap();
    assert_eq!(pge2_bound(&m, &p), 0.0);
    assert_eq!(p11m_bound(&m, &p), 0.0);
    assert_eq!(diff_bound(&m, &p), 0.0);
}

#[test]
fn two_fold_oracle_against_brute_force() {
    // P(S_2 > x) = E[tail(x - X_1)]: trapezoid in the quantile variable
    // q ∈ (0, ½) on each half-line, a route independent of the oracle's
    // breakpoints and log-space tails
    for (alpha, x) in [(0.8, 20.0), (1.5, 100.0), (1.0, 7.0)] {
        let m = TailModel::pure(alpha).unwrap();
        let oracle = convolution_oracle(&m, 2, x).unwrap();
        let k = 2_000_000;
        let mut acc = 0.0;
        for i in 0..k {
            let q = 0.5 * (i as f64 + 0.5) / k as f64;
            let u = m.quantile_tail(q).unwrap();
            acc += m.tail(x - u) + m.tail(x + u);
        }
        let brute = acc * 0.5 / k as f64;
        assert!(rel(oracle, brute) < 2e-4, "alpha={alpha} x={x}: {oracle} vs {brute}");
    }
}

#[test]
fn two_fold_oracle_smooth_variant() {
    let m = TailModel::smooth(1.3).unwrap();
    let x = 15.0;
    let oracle = convolution_oracle(&m, 2, x).unwrap();
    let direct = quad::integrate(
        |u: f64| m.pdf(u) * m.tail(x - u),
        -1e7,
        1e7,
        QuadOptions {
            rel_tol: 1e-11,
            abs_tol: 0.0,
            max_intervals: 20_000,
        },
    )
    .value;
    // mass outside ±1e7 is below 1e-9
    assert!((oracle - direct).abs() < 1e-8, "{oracle} vs {direct}");
}

proptest! {
    #[test]
    fn r1_invariant_under_joint_scaling(alpha in 0.1f64..1.9, n in 1u64..50, x in 10.0f64..1e4, lambda in 1.0f64..50.0) {
        let a = regime::r1(alpha, n, x);
        // x ↦ λx with n ↦ λ^α n
        let scaled_n = n as f64 * lambda.powf(alpha);
        let b = scaled_n * (lambda * x).powf(-alpha);
        prop_assert!(rel(a, b) < 1e-12);
    }

    #[test]
    fn default_cb_identities(alpha in 0.1f64..1.9, n in 1u64..100, e in 0.0f64..1.0) {
        // choose x so that r1 = 10^{-(1 + 7e)} < 1
        let r1 = 10f64.powf(-(1.0 + 7.0 * e));
        let x = (n as f64 / r1).powf(1.0 / alpha);
        let (c, b) = regime::default_cb(alpha, n, x).unwrap();
        prop_assert!(c > 0.0 && c <= 0.9 && c == b);
        let p = EventParams::new(n, x, c, b).unwrap();
        let r = regime::ratios(alpha, &p);
        if c < 0.9 {
            prop_assert!(rel(r.r2, r.r1.sqrt()) < 1e-12);
            prop_assert!(rel(r.r3, r.r1.powf(0.75)) < 1e-12);
        }
    }
}
