use bigjump::quad::{self, QuadOptions};
use bigjump::rng::chunk_rng;
use bigjump::{TailModel, Variant};
use proptest::prelude::*;

fn models() -> Vec<TailModel> {
    let mut out = Vec::new();
    for alpha in [0.3, 0.8, 1.0, 1.2, 1.5, 1.9] {
        for u0 in [0.5, 1.0, 3.0] {
            for v in [Variant::PurePareto, Variant::SmoothPareto] {
                out.push(TailModel::new(alpha, u0, v).unwrap());
            }
        }
    }
    out
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

#[test]
fn density_integrates_to_one() {
    let opts = QuadOptions::with_rel_tol(1e-12);
    for m in models() {
        // twice the positive half: [0, u0] plus [u0, ∞)
        let inner = quad::integrate(|u| m.pdf(u), 0.0, m.u0(), opts).value;
        let outer = quad::integrate_to_infinity(|u| m.pdf(u), m.u0(), opts).value;
        let total = 2.0 * (inner + outer);
        assert!((total - 1.0).abs() < 1e-9, "{m:?}: {total}");
    }
}

#[test]
fn tail_matches_quadrature_of_density() {
    let opts = QuadOptions::with_rel_tol(1e-12);
    for m in models() {
        for u in [0.7, 2.0, 50.0, 1e4] {
            if u < m.u0() {
                continue;
            }
            let q = quad::integrate_to_infinity(|v| m.pdf(v), u, opts).value;
            assert!(rel(q, m.tail(u)) < 1e-9, "{m:?} u={u}");
        }
    }
}

#[test]
fn power_tail_law() {
    for m in models() {
        let (a, u0) = (m.alpha(), m.u0());
        let limit = 0.5 * u0.powf(a);
        let u = 1e6 * u0;
        let scaled = m.tail(u) * u.powf(a);
        match m.variant() {
            Variant::PurePareto => {
                for v in [u0, 10.0 * u0, u] {
                    assert!(rel(m.tail(v) * v.powf(a), limit) < 1e-12);
                }
            }
            // (1 + u0/u)^{-α} - 1 ≈ -α·1e-6
            Variant::SmoothPareto => assert!(rel(scaled, limit) < 2.0 * a * 1e-6, "{m:?}"),
        }
    }
}

#[test]
fn quantile_roundtrip_on_log_grid() {
    for m in models() {
        for k in 0..=110 {
            let p = 0.5 * 10f64.powf(-(k as f64) / 10.0);
            if p <= 1e-12 {
                continue;
            }
            let u = m.quantile_tail(p).unwrap();
            assert!(rel(m.tail(u), p) < 1e-12, "{m:?} p={p}");
        }
    }
}

#[test]
fn sampler_support_and_frequencies() {
    let m = TailModel::pure(1.0).unwrap();
    let draws = m.sample(&mut chunk_rng(17, 0), 1_000_000);
    assert!(draws.iter().all(|v| v.abs() >= 1.0));
    let n = draws.len() as f64;

    let big = draws.iter().filter(|&&v| v > 4.0).count() as f64 / n;
    let se = (0.125f64 * 0.875 / n).sqrt();
    assert!((big - 0.125).abs() <= 4.0 * se, "{big}");

    let pos = draws.iter().filter(|&&v| v > 0.0).count() as f64 / n;
    assert!((pos - 0.5).abs() <= 4.0 * (0.25 / n).sqrt(), "{pos}");

    for alpha in [0.4, 1.7] {
        let m = TailModel::new(alpha, 2.5, Variant::PurePareto).unwrap();
        assert!(m.sample(&mut chunk_rng(3, 1), 10_000).iter().all(|v| v.abs() >= 2.5));
    }
}

fn ks_statistic(model: &TailModel, mut draws: Vec<f64>) -> f64 {
    draws.sort_by(f64::total_cmp);
    let n = draws.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &v) in draws.iter().enumerate() {
        let f = model.cdf(v);
        d = d.max((f - i as f64 / n).abs()).max(((i + 1) as f64 / n - f).abs());
    }
    d
}

#[test]
fn sampler_passes_ks_check() {
    let samples = 1_000_000;
    let limit = 2.0 / (samples as f64).sqrt() * 1.95;
    for (k, m) in [
        TailModel::pure(1.0).unwrap(),
        TailModel::smooth(1.5).unwrap(),
        TailModel::new(0.6, 2.0, Variant::SmoothPareto).unwrap(),
    ]
    .into_iter()
    .enumerate()
    {
        let d = ks_statistic(&m, m.sample(&mut chunk_rng(100 + k as u64, 0), samples));
        assert!(d < limit, "{m:?}: D = {d}, limit {limit}");
    }
}

#[test]
fn conditional_sampler_law() {
    let m = TailModel::pure(1.0).unwrap();
    let draws = m.sample_tail_conditional(10.0, &mut chunk_rng(5, 0), 1_000_000).unwrap();
    assert!(draws.iter().all(|&v| v > 10.0));
    let n = draws.len() as f64;
    let frac = draws.iter().filter(|&&v| v > 20.0).count() as f64 / n;
    assert!((frac - 0.5).abs() <= 4.0 * (0.25 / n).sqrt(), "{frac}");
}

#[test]
fn conditioning_at_cutoff_gives_absolute_value_law() {
    // X | X > u0 has the law of |X|: compare CDFs through a KS check
    let m = TailModel::pure(1.3).unwrap();
    let samples = 400_000;
    let mut draws = m.sample_tail_conditional(1.0, &mut chunk_rng(6, 0), samples).unwrap();
    draws.sort_by(f64::total_cmp);
    let n = samples as f64;
    let mut d: f64 = 0.0;
    for (i, &v) in draws.iter().enumerate() {
        let f = 1.0 - 2.0 * m.tail(v);
        d = d.max((f - i as f64 / n).abs()).max(((i + 1) as f64 / n - f).abs());
    }
    assert!(d < 1.95 * 2.0 / n.sqrt(), "D = {d}");
}

#[test]
fn truncated_moment_against_quadrature_grid() {
    for alpha in [0.2, 0.7, 1.0, 1.3, 1.5, 1.95] {
        for v in [Variant::PurePareto, Variant::SmoothPareto] {
            let m = TailModel::new(alpha, 1.0, v).unwrap();
            let mut prev = 0.0;
            for t in [0.1, 0.5, 1.0, 1.5, 3.0, 10.0, 100.0, 1e3, 1e5] {
                let exact = m.truncated_second_moment(t);
                let q = m.truncated_second_moment_quadrature(t);
                assert!(exact >= prev, "{m:?} not monotone at {t}");
                prev = exact;
                if q == 0.0 {
                    assert_eq!(exact, 0.0);
                } else {
                    assert!(rel(exact, q) < 1e-9, "{m:?} t={t}: {exact} vs {q}");
                }
            }
        }
    }
}

// below alpha ≈ 0.05 the quantile of p = 1e-12 exceeds f64::MAX
fn any_model() -> impl Strategy<Value = TailModel> {
    (0.1f64..1.99, 0.1f64..10.0, any::<bool>()).prop_map(|(a, u0, smooth)| {
        let v = if smooth {
            Variant::SmoothPareto
        } else {
            Variant::PurePareto
        };
        TailModel::new(a, u0, v).unwrap()
    })
}

proptest! {
    #[test]
    fn symmetry(m in any_model(), u in -1e6f64..1e6) {
        prop_assert_eq!(m.pdf(u), m.pdf(-u));
        // negative arguments are defined through the positive ones
        let a = u.abs();
        prop_assert_eq!(m.tail(-a), 1.0 - m.tail(a));
    }

    #[test]
    fn quantile_inverts_tail(m in any_model(), e in 0.0f64..12.0) {
        let p = 0.5 * 10f64.powf(-e);
        let u = m.quantile_tail(p).unwrap();
        prop_assert!(rel(m.tail(u), p) < 1e-12);
    }

    #[test]
    fn tail_is_nonincreasing(m in any_model(), a in -1e3f64..1e3, d in 0.0f64..1e3) {
        prop_assert!(m.tail(a + d) <= m.tail(a));
    }
}
