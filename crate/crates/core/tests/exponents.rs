use trunclap::exponents::*;
use trunclap::quad::gamma::gamma;
use trunclap::{FractionalOrder, NormalizationConstants, QuadratureConfig};

fn order(s: f64) -> (FractionalOrder, NormalizationConstants) {
    let s = FractionalOrder::new(s).unwrap();
    (s, NormalizationConstants::new(s))
}

fn cfg() -> QuadratureConfig {
    QuadratureConfig::default()
}

// Γ-function forms of ĉ and c⊥, valid for γ in (0, 1).
fn c_hat_oracle(g: f64, s: f64) -> f64 {
    -(4f64.powf(s)) * gamma((g + 2.0 * s) / 2.0) * gamma((1.0 - g) / 2.0)
        / (gamma((1.0 - g - 2.0 * s) / 2.0) * gamma(g / 2.0))
}

fn c_perp_oracle(g: f64, s: f64, c1: f64) -> f64 {
    -c1 * (g / (2.0 * s)) * gamma(1.0 - s) * gamma(g / 2.0 + s) / gamma(1.0 + g / 2.0)
}

fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let fa = f(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if (f(m) < 0.0) == (fa < 0.0) {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

// Simpson in y = ln τ on [τ₀, ∞) plus the quadratic head a₂τ² on (0, τ₀).
fn c_tilde_oracle(g: f64, n: usize, s: f64) -> f64 {
    let c = 1.0 / (n as f64).sqrt();
    let (lo, hi, m) = (-12.0f64, 50.0, 40_000);
    let dy = (hi - lo) / m as f64;
    let f = |y: f64| {
        let t = y.exp();
        let a = (-0.5 * g * (t * (t + 2.0 * c)).ln_1p()).exp_m1();
        let b = (-0.5 * g * (t * (t - 2.0 * c)).ln_1p()).exp_m1();
        (a + b) * t.powf(-2.0 * s)
    };
    let body: f64 = (0..=m)
        .map(|i| {
            let w = if i == 0 || i == m {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            w * f(lo + dy * i as f64)
        })
        .sum::<f64>()
        * dy
        / 3.0;
    let a2 = -g + g * (g + 2.0) * c * c;
    body + a2 * lo.exp().powf(2.0 - 2.0 * s) / (2.0 - 2.0 * s)
}

#[test]
fn critical_identities() {
    for s in [0.6, 0.75, 0.9] {
        let (so, c) = order(s);
        let g = 2.0 * (1.0 - s);
        let hat = c_hat(g, so, &c, &cfg()).unwrap().value;
        let perp = c_perp(g, so, &c, &cfg()).unwrap().value;
        assert!((hat / (c.c_1s / (s * (2.0 * s - 1.0))) - 1.0).abs() < 1e-9);
        assert!((perp / (-c.c_1s / s) - 1.0).abs() < 1e-9);
        let c2 = c_k_fun(g, 2, so, &c, &cfg()).unwrap().value;
        assert!((c2 - c.c_1s * 2.0 * (1.0 - s) / (s * (2.0 * s - 1.0))).abs() < 1e-9 * c2);
    }
}

#[test]
fn one_dimensional_constants_against_gamma_forms() {
    for (g, s) in [(0.1, 0.6), (0.4, 0.75), (0.5, 0.8), (0.9, 0.6), (0.7, 0.95)] {
        let (so, c) = order(s);
        let hat = c_hat(g, so, &c, &cfg()).unwrap();
        let perp = c_perp(g, so, &c, &cfg()).unwrap();
        assert!(hat.value > 0.0 && perp.value < 0.0);
        let (wh, wp) = (c_hat_oracle(g, s), c_perp_oracle(g, s, c.c_1s));
        assert!(
            (hat.value - wh).abs() <= 1e-8 * wh.abs(),
            "ĉ({g}, {s}) = {} vs {wh}",
            hat.value
        );
        assert!(
            (perp.value - wp).abs() <= 1e-8 * wp.abs(),
            "c⊥({g}, {s}) = {} vs {wp}",
            perp.value
        );
    }
}

#[test]
fn small_exponent_limits() {
    let (so, c) = order(0.75);
    assert!(c_hat(1e-4, so, &c, &cfg()).unwrap().value.abs() < 1e-3 * c.c_1s);
    assert!(c_perp(1e-4, so, &c, &cfg()).unwrap().value.abs() < 1e-3 * c.c_1s);
    assert!(c_tilde_fun(1e-4, 3, so, &cfg()).unwrap().value.abs() < 1e-3);
    assert!(c_k_prime(1e-4, 2, so, &c, &cfg()).unwrap().value < 0.0);
    assert!(c_k_prime(1e-4, 3, so, &c, &cfg()).unwrap().value < 0.0);
}

#[test]
fn derivatives_match_finite_differences() {
    let (so, c) = order(0.7);
    let h = 1e-4;
    for k in [2, 3] {
        for g in [0.2, 0.4, 0.6, 0.8] {
            let f = |x: f64| c_k_fun(x, k, so, &c, &cfg()).unwrap().value;
            let d = |x: f64| c_k_prime(x, k, so, &c, &cfg()).unwrap().value;
            let fd1 = (f(g + h) - f(g - h)) / (2.0 * h);
            let fd2 = (d(g + h) - d(g - h)) / (2.0 * h);
            let p = d(g);
            let q = c_k_second(g, k, so, &c, &cfg()).unwrap().value;
            assert!(
                (p - fd1).abs() <= 1e-5 * p.abs(),
                "k={k} γ={g}: {p} vs {fd1}"
            );
            assert!(
                (q - fd2).abs() <= 1e-5 * q.abs(),
                "k={k} γ={g}: {q} vs {fd2}"
            );
            assert!(q > 0.0);
        }
    }
}

#[test]
fn c_k_is_convex_on_a_grid() {
    let (so, c) = order(0.75);
    for k in [2, 4] {
        let grid: Vec<f64> = (1..=32).map(|i| 0.95 * i as f64 / 32.0).collect();
        let v: Vec<f64> = grid
            .iter()
            .map(|&g| c_k_fun(g, k, so, &c, &cfg()).unwrap().value)
            .collect();
        for w in v.windows(3) {
            assert!(w[0] - 2.0 * w[1] + w[2] > 0.0, "k={k}");
        }
    }
}

#[test]
fn c2_slope_at_origin() {
    for s in [0.6, 0.75, 0.9] {
        let (so, c) = order(s);
        let closed = c2_prime_at_zero(so, &c, &cfg()).unwrap();
        let direct = c_k_prime(1e-5, 2, so, &c, &cfg()).unwrap().value;
        assert!(closed < 0.0);
        assert!(
            (closed - direct).abs() <= 1e-3 * closed.abs(),
            "{closed} vs {direct}"
        );
    }
}

#[test]
fn f_of_s_values() {
    assert!(f_of_s(1.0, &cfg()).unwrap().value.abs() < 1e-7);
    for s in [0.55, 0.75, 0.95] {
        assert!(f_of_s(s, &cfg()).unwrap().value > 0.0);
    }
    // Reference value from a 30-digit quadrature: F(1/2) = 2π.
    assert!((f_of_s(0.5, &cfg()).unwrap().value - 2.0 * std::f64::consts::PI).abs() < 1e-8);
    assert!(f_of_s(0.4, &cfg()).is_err());
}

#[test]
fn power_constant_trichotomy() {
    for s in [0.6, 0.75, 0.9] {
        let (so, c) = order(s);
        assert!(c_power(2.0 * s - 1.0, so, &c, &cfg()).unwrap().value.abs() < 1e-8);
    }
    let (so, c) = order(0.75);
    assert!(c_power(0.1, so, &c, &cfg()).unwrap().value < 0.0);
    let (so, c) = order(0.6);
    assert!(c_power(0.9, so, &c, &cfg()).unwrap().value > 0.0);
    assert!(c_power(1.1, so, &c, &cfg()).unwrap().value > 0.0);
    assert!(c_power(1.2, so, &c, &cfg()).is_err());
}

#[test]
fn c_tilde_against_log_trapezoid() {
    for (g, n, s) in [(0.5, 2, 0.75), (1.0, 3, 0.75), (2.5, 4, 0.8)] {
        let (so, _) = order(s);
        let v = c_tilde_fun(g, n, so, &cfg()).unwrap().value;
        let w = c_tilde_oracle(g, n, s);
        assert!(
            (v - w).abs() <= 1e-8 * w.abs().max(1e-3),
            "c({g}; {n}, {s}) = {v} vs {w}"
        );
    }
    let (so, _) = order(0.75);
    assert!(c_tilde_fun(1.0, 3, so, &cfg()).unwrap().value < 0.0);
    let grid: Vec<f64> = (0..24).map(|i| 0.25 * i as f64).collect();
    let v: Vec<f64> = grid
        .iter()
        .map(|&g| c_tilde_fun(g, 3, so, &cfg()).unwrap().value)
        .collect();
    for w in v.windows(3) {
        assert!(w[0] - 2.0 * w[1] + w[2] > 0.0);
    }
}

#[test]
fn gamma_bar_roots() {
    let scfg = SolveConfig::default();
    // Exact roots: c_k(2(1-s)) vanishes when (k-1)(2s-1) = 1.
    for (k, s, want) in [(3, 0.75, 0.5), (4, 2.0 / 3.0, 2.0 / 3.0)] {
        let (so, c) = order(s);
        let r = solve_gamma_bar(k, so, &c, &cfg(), &scfg).unwrap();
        assert!((r.root - want).abs() < 1e-10, "k={k}: {}", r.root);
        assert!(r.certified);
    }
    let (so, c) = order(0.75);
    let oracle = bisect(
        |g| c_hat_oracle(g, 0.75) + c_perp_oracle(g, 0.75, c.c_1s),
        1e-3,
        0.5,
    );
    let r = solve_gamma_bar(2, so, &c, &cfg(), &scfg).unwrap();
    assert!((r.root - oracle).abs() < 1e-10, "{} vs {oracle}", r.root);
    assert!((r.root - 0.155_150_765_83).abs() < 1e-9);
    assert!(r.root < 0.5 && r.residual <= 1e-10 * r.residual_scale);
    assert!((r.p_star().unwrap() - (1.0 + 1.5 / r.root)).abs() < 1e-12);
    let below = c_k_fun(0.5 * r.root, 2, so, &c, &cfg()).unwrap().value;
    let above = c_k_fun(0.5 * (r.root + 1.0), 2, so, &c, &cfg())
        .unwrap()
        .value;
    assert!(below < 0.0 && above > 0.0);
}

#[test]
fn gamma_bar_increases_with_k_and_vanishes_as_s_grows() {
    let scfg = SolveConfig::default();
    let (so, c) = order(0.75);
    let roots: Vec<f64> = (2..=4)
        .map(|k| solve_gamma_bar(k, so, &c, &cfg(), &scfg).unwrap().root)
        .collect();
    assert!(roots[0] < roots[1] && roots[1] < roots[2]);
    let (so, c) = order(0.99);
    assert!(solve_gamma_bar(2, so, &c, &cfg(), &scfg).unwrap().root < 0.02);
    assert!(solve_gamma_bar(1, so, &c, &cfg(), &scfg).is_err());
}

#[test]
fn gamma_tilde_roots_and_trend() {
    let scfg = SolveConfig::default();
    let (so, _) = order(0.75);
    let r = solve_gamma_tilde(3, so, &cfg(), &scfg).unwrap();
    assert!(r.root > 1.0 && r.certified);
    let oracle = bisect(|g| c_tilde_oracle(g, 3, 0.75), 1.0, 4.0);
    assert!((r.root - oracle).abs() < 1e-8, "{} vs {oracle}", r.root);
    for n in [3usize, 4] {
        let roots: Vec<f64> = [0.8, 0.9, 0.95, 0.99]
            .iter()
            .map(|&s| {
                solve_gamma_tilde(n, order(s).0, &cfg(), &scfg)
                    .unwrap()
                    .root
            })
            .collect();
        let target = n as f64 - 2.0;
        for w in roots.windows(2) {
            assert!(
                (w[1] - target).abs() < (w[0] - target).abs() && w[1] > target,
                "N={n}: {roots:?}"
            );
        }
    }
    let small = solve_gamma_tilde(2, order(0.99).0, &cfg(), &scfg)
        .unwrap()
        .root;
    assert!(
        small
            < solve_gamma_tilde(2, order(0.9).0, &cfg(), &scfg)
                .unwrap()
                .root
    );
}

#[test]
fn gamma_tilde_cap_is_enforced() {
    let scfg = SolveConfig {
        tilde_cap_factor: 0.5,
        ..SolveConfig::default()
    };
    assert!(matches!(
        solve_gamma_tilde(4, order(0.75).0, &cfg(), &scfg),
        Err(trunclap::Error::BracketNotFound(_))
    ));
}

#[test]
fn f_of_beta_closed_form_and_scaling() {
    for s in [0.6, 0.75, 0.9] {
        let (so, c) = order(s);
        for b in [1e-3, 0.3, 1.0, 7.0] {
            let v = f_of_beta(b, so, &c, &cfg()).unwrap().value;
            let w = c.c_1s * b.powf(s) * gamma(1.0 - s) / s;
            assert!((v - w).abs() <= 1e-9 * w, "F({b}) = {v} vs {w}");
        }
    }
    let (so, c) = order(0.75);
    assert!(f_of_beta(1e-6, so, &c, &cfg()).unwrap().value < 1e-3 * c.c_1s);
}

#[test]
fn beta_bar_roots() {
    let scfg = SolveConfig::default();
    let (so, c) = order(0.75);
    let b1 = solve_beta_bar(1, so, &c, &cfg(), &scfg).unwrap().root;
    let r2 = solve_beta_bar(2, so, &c, &cfg(), &scfg).unwrap();
    assert!(r2.certified);
    assert!((r2.root - b1 * 2f64.powf(-1.0 / 0.75)).abs() < 1e-12 * b1);
    let f = |b: f64| f_of_beta_closed(b, &c) - 0.25;
    let oracle = bisect(f, 1e-6, 10.0);
    assert!((r2.root - oracle).abs() < 1e-10 * oracle);
    let v = f_of_beta(r2.root, so, &c, &cfg()).unwrap().value;
    assert!((v - 0.25).abs() < 1e-9);
}

#[test]
fn plane_thresholds() {
    let (so, _) = order(0.8);
    assert!((plane_threshold(3, so).unwrap() - 3.0 / 1.4).abs() < 1e-14);
    assert!(plane_threshold(1, so).is_err());
}
