//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Criterion 8 carries a clause that the shipped literal-β̄ gaussian is a
//! supersolution. It is a subsolution (I u + u = u/2 > 0), so 8 fails and 11
//! fails with it. The run exits non-zero unless exactly this known set fails.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::time::{Duration, Instant};

use trunclap::exponents::{
    c2_prime_at_zero, c_hat, c_k_fun, c_perp, f_of_s, solve_gamma_bar, solve_gamma_tilde,
    SolveConfig,
};
use trunclap::operators::{
    angular_profile_monotonicity, directional, extremal_i_optimize, extremal_i_repr, plane_j,
    two_direction_report, OptimizerConfig, PlaneMode, RadialField, Sign,
};
use trunclap::profiles::{
    make_bump_power, make_gaussian, make_glued, make_positive_power, make_power,
    make_shifted_power, RadialProfile,
};
use trunclap::quad::gamma::gamma;
use trunclap::verify::{
    asymptotics_sweep, check_fundamental_j_plus, gaussian_literal_beta_bar, paper_core_suite,
    run_scenario, run_suite, Claim, SweepParams, SweepTarget, Verdict,
};
use trunclap::{FractionalOrder, NormalizationConstants, QuadratureConfig};

type Outcome = Result<(bool, String), String>;

fn order(s: f64) -> (FractionalOrder, NormalizationConstants) {
    let so = FractionalOrder::new(s).unwrap();
    (so, NormalizationConstants::new(so))
}

fn c_s(s: f64) -> f64 {
    4f64.powf(s) * gamma(0.5 + s) / (PI.sqrt() * gamma(-s).abs())
}

fn c_ks(k: usize, s: f64) -> f64 {
    let h = k as f64 / 2.0;
    4f64.powf(s) * gamma(h + s) / (PI.powf(h) * gamma(-s).abs())
}

fn sphere(k: usize) -> f64 {
    let h = k as f64 / 2.0;
    2.0 * PI.powf(h) / gamma(h)
}

fn e<E: std::fmt::Display>(x: E) -> String {
    x.to_string()
}

fn timed(limit: Duration, t: Instant, ok: bool, detail: String) -> (bool, String) {
    let el = t.elapsed();
    (
        ok && el < limit,
        format!(
            "{detail}; {:.2}s (limit {}s)",
            el.as_secs_f64(),
            limit.as_secs()
        ),
    )
}

fn closed_forms(cfg: &QuadratureConfig) -> Outcome {
    let t = Instant::now();
    let mut worst = 0.0f64;
    for s in [0.6, 0.75, 0.9] {
        let (so, c) = order(s);
        let g = 2.0 * (1.0 - s);
        let cs = c_s(s);
        let hat = c_hat(g, so, &c, cfg).map_err(e)?.value;
        let perp = c_perp(g, so, &c, cfg).map_err(e)?.value;
        worst = worst.max((hat / (cs / (s * (2.0 * s - 1.0))) - 1.0).abs());
        worst = worst.max((perp / (-cs / s) - 1.0).abs());
    }
    Ok(timed(
        Duration::from_secs(5),
        t,
        worst <= 1e-6,
        format!("worst relative error {worst:.2e}"),
    ))
}

fn power_annihilation(cfg: &QuadratureConfig) -> Outcome {
    let mut worst = 0.0f64;
    for s in [0.6, 0.75, 0.9] {
        let (so, c) = order(s);
        let p = make_positive_power(2.0 * s - 1.0, s).map_err(e)?;
        for r in [0.5, 1.0, 4.0] {
            let v = directional(&p, r, 0.0, so, &c, cfg).map_err(e)?.value;
            worst = worst.max(v.abs() * r / 1e-8);
        }
    }
    Ok((
        worst <= 1.0,
        format!("worst |value|·r = {:.2e}", worst * 1e-8),
    ))
}

fn gamma_bar(cfg: &QuadratureConfig) -> Outcome {
    let t = Instant::now();
    let s = 0.75;
    let (so, c) = order(s);
    let mut roots = Vec::new();
    let mut ok = true;
    let mut worst = 0.0f64;
    for k in 2..=4 {
        let r = solve_gamma_bar(k, so, &c, cfg, &SolveConfig::default()).map_err(e)?;
        let g = 2.0 * (1.0 - s);
        let literal = c_k_fun(g, k, so, &c, cfg).map_err(e)?.value.abs();
        // c_3 vanishes at 2(1-s) when s = 3/4; fall back to the size of its terms.
        let terms = c_hat(g, so, &c, cfg).map_err(e)?.value.abs()
            + (k - 1) as f64 * c_perp(g, so, &c, cfg).map_err(e)?.value.abs();
        let scale = if literal > 1e-8 * terms {
            literal
        } else {
            terms
        };
        let res = c_k_fun(r.root, k, so, &c, cfg).map_err(e)?.value.abs();
        worst = worst.max(res / scale);
        ok &= res <= 1e-10 * scale;
        roots.push(r.root);
    }
    ok &= roots[0] > 0.0 && roots[0] < 2.0 * (1.0 - s);
    ok &= roots.windows(2).all(|w| w[0] < w[1]);
    Ok(timed(
        Duration::from_secs(30),
        t,
        ok,
        format!("roots k=2,3,4: {roots:.10?}; worst scaled residual {worst:.1e}"),
    ))
}

fn gamma_tilde(cfg: &QuadratureConfig) -> Outcome {
    let scfg = SolveConfig::default();
    let g3 = solve_gamma_tilde(3, order(0.75).0, cfg, &scfg)
        .map_err(e)?
        .root;
    let mut ok = g3 > 1.0;
    let mut detail = format!("γ̃(3, 0.75) = {g3:.10}");
    for n in [3usize, 4] {
        let roots = [0.8, 0.9, 0.95, 0.99]
            .iter()
            .map(|&s| solve_gamma_tilde(n, order(s).0, cfg, &scfg).map(|r| r.root))
            .collect::<Result<Vec<_>, _>>()
            .map_err(e)?;
        let target = n as f64 - 2.0;
        ok &= roots
            .windows(2)
            .all(|w| (w[1] - target).abs() < (w[0] - target).abs());
        detail += &format!("; N={n}: {roots:.6?}");
    }
    Ok((ok, detail))
}

fn repr_vs_optimizer(cfg: &QuadratureConfig) -> Outcome {
    let ocfg = OptimizerConfig::default();
    let (so, c) = order(0.75);
    let n = 3;
    let profiles = [
        make_power(0.4).map_err(e)?,
        make_gaussian(1.0).map_err(e)?,
        make_shifted_power(1.0, 0.75).map_err(e)?,
    ];
    let target = (1.0 / (n as f64).sqrt()).acos();
    let (mut worst, mut worst_angle) = (0.0f64, 0.0f64);
    for p in &profiles {
        let field = RadialField {
            profile: p.clone(),
            n,
        };
        for r in [1.0, 3.0] {
            let x = [r, 0.0, 0.0];
            for k in 1..=3 {
                for sign in [Sign::Plus, Sign::Minus] {
                    let a = extremal_i_repr(p, r, sign, k, n, so, &c, false, cfg)
                        .map_err(e)?
                        .result
                        .value;
                    let o =
                        extremal_i_optimize(&field, &x, k, sign, so, &c, cfg, &ocfg).map_err(e)?;
                    worst = worst.max((a - o.value).abs() / a.abs().max(1e-300));
                    if k == n && sign == Sign::Minus {
                        for v in o.frame.vectors() {
                            worst_angle =
                                worst_angle.max((v[0].abs().min(1.0).acos() - target).abs());
                        }
                    }
                }
            }
        }
    }
    Ok((
        worst <= 1e-5 && worst_angle <= 1e-3,
        format!("worst relative gap {worst:.2e}; worst I_N^- frame angle offset {worst_angle:.2e}"),
    ))
}

fn certified_catalog() -> Vec<RadialProfile> {
    vec![
        make_power(0.5).unwrap(),
        make_power(0.3).unwrap(),
        make_positive_power(0.5, 0.75).unwrap(),
        make_shifted_power(1.0, 0.75).unwrap(),
        make_bump_power(2.0, 0.75).unwrap(),
        make_gaussian(1.0).unwrap(),
        make_gaussian(0.2).unwrap(),
        make_glued(1.4, 0.5f64.sqrt(), false).unwrap(),
    ]
}

fn angular_monotonicity(cfg: &QuadratureConfig) -> Outcome {
    let (so, c) = order(0.75);
    let (mut single, mut pair, mut asym) = (0.0f64, 0.0f64, 0.0f64);
    let (mut n1, mut n2) = (0, 0);
    for p in certified_catalog() {
        for r in [0.5, 1.0, 2.0] {
            if p.flags.single_direction() {
                let m = angular_profile_monotonicity(&p, r, so, &c, 17, 1e-8, cfg).map_err(e)?;
                single = single.max(m.worst_violation);
                n1 += 1;
            }
            if p.flags.two_direction() {
                for tilt in [0.0, PI / 6.0, PI / 3.0] {
                    let t = two_direction_report(&p, r, tilt, so, &c, 9, 1e-8, cfg).map_err(e)?;
                    pair = pair.max(t.worst_increase);
                    asym = asym.max(t.worst_asymmetry);
                    n2 += 1;
                }
            }
        }
    }
    Ok((
        n1 > 0 && n2 > 0 && single <= 1e-8 && pair <= 1e-8 && asym <= 1e-8,
        format!("{n1} single / {n2} pair sweeps; violations {single:.1e}, {pair:.1e}; asymmetry {asym:.1e}"),
    ))
}

fn j_fundamental(cfg: &QuadratureConfig) -> Outcome {
    let mut ok = true;
    let mut detail = String::new();
    for (k, s) in [(2usize, 0.75), (3, 0.8)] {
        let r = check_fundamental_j_plus(k, order(s).0, cfg).map_err(e)?;
        ok &= r.verdict == Verdict::Pass && r.worst_margin >= -1e-6;
        detail += &format!("k={k} s={s}: worst margin {:.1e}; ", r.worst_margin);
    }
    let (so, c) = order(0.75);
    let p = make_gaussian(1.0).map_err(e)?;
    let mut gap = 0.0f64;
    for r in [0.5, 1.0, 2.0] {
        let a = plane_j(&p, r, PlaneMode::PlusRadialPlane, 2, 2, so, &c, cfg)
            .map_err(e)?
            .value;
        let b = plane_j(&p, r, PlaneMode::MinusOrthoPlane, 2, 2, so, &c, cfg)
            .map_err(e)?
            .value;
        gap = gap.max((a - b).abs() / a.abs().max(1.0));
    }
    ok &= gap <= 1e-6;
    Ok((ok, format!("{detail}J_2^± gap {gap:.1e}")))
}

fn liouville(cfg: &QuadratureConfig) -> Outcome {
    let t = Instant::now();
    let rep = run_suite("paper-core", &paper_core_suite(), cfg, &[]);
    let failing: Vec<_> = rep
        .results
        .iter()
        .filter(|r| !r.passed())
        .map(|r| r.name.clone())
        .collect();
    let worst = rep
        .results
        .iter()
        .filter(|r| r.expectation == trunclap::verify::Expectation::Holds)
        .map(|r| r.worst_margin)
        .fold(f64::INFINITY, f64::min);
    let sc = gaussian_literal_beta_bar(Claim::Supersolution, cfg).map_err(e)?;
    let lit = run_scenario(&sc, cfg).map_err(e)?;
    let lit_ok = lit.verdict == Verdict::Pass;
    let mut detail = format!(
        "{} scenarios, failing {failing:?}, worst held margin {worst:.1e}; literal β̄ gaussian as supersolution: {:?} \
         (worst margin {:.3})",
        rep.results.len(),
        lit.verdict,
        lit.worst_margin
    );
    if !lit_ok {
        detail += " because I_k^- u + u = u/2 > 0 there, a subsolution; the F = 1/k gaussian is exact and passes";
    }
    Ok(timed(
        Duration::from_secs(120),
        t,
        rep.passed && !rep.nonconvergent && lit_ok,
        detail,
    ))
}

fn s_to_one(cfg: &QuadratureConfig) -> Outcome {
    let tab = asymptotics_sweep(
        SweepTarget::OperatorConvergence,
        &SweepParams::default(),
        &[0.6, 0.75, 0.9, 0.95],
        cfg,
    )
    .map_err(e)?;
    let gaps: Vec<f64> = tab
        .rows
        .iter()
        .map(|r| (r.value - r.reference).abs())
        .collect();
    let mut ok = gaps.windows(2).all(|w| w[1] < w[0]);
    let s = 0.99;
    let one = c_s(s) / (2.0 * (1.0 - s));
    let two = c_ks(2, s) * sphere(2) / (8.0 * (1.0 - s));
    let c = order(s).1;
    ok &= (one - 1.0).abs() <= 0.05 && (two - 1.0).abs() <= 0.05;
    ok &= (c.one_dim_ratio() - one).abs() < 1e-12 && (c.plane_ratio(2) - two).abs() < 1e-12;
    Ok((
        ok,
        format!("|I-P| = {gaps:.3?}; ratios at 0.99: {one:.4}, {two:.4}"),
    ))
}

fn f_properties(cfg: &QuadratureConfig) -> Outcome {
    let f1 = f_of_s(1.0, cfg).map_err(e)?.value;
    let mut ok = f1.abs() <= 1e-7;
    let mut detail = format!("F(1) = {f1:.1e}");
    for s in [0.55, 0.75, 0.95] {
        let v = f_of_s(s, cfg).map_err(e)?.value;
        ok &= v > 0.0;
        detail += &format!("; F({s}) = {v:.4}");
    }
    for s in [0.6, 0.75, 0.9] {
        let (so, c) = order(s);
        let d = c2_prime_at_zero(so, &c, cfg).map_err(e)?;
        ok &= d < 0.0;
        detail += &format!("; c2'(0+; {s}) = {d:.4}");
    }
    Ok((ok, detail))
}

type Check = fn(&QuadratureConfig) -> Outcome;

const CRITERIA: [(u32, &str, Check); 10] = [
    (1, "closed-form identities", closed_forms),
    (2, "power annihilation", power_annihilation),
    (3, "gamma_bar solve", gamma_bar),
    (4, "gamma_tilde solve", gamma_tilde),
    (5, "representation vs optimization", repr_vs_optimizer),
    (6, "angular monotonicity", angular_monotonicity),
    (7, "J fundamental solution", j_fundamental),
    (8, "Liouville scenario suite", liouville),
    (9, "s -> 1 convergence", s_to_one),
    (10, "F(s) properties", f_properties),
];

fn run(cfg: &QuadratureConfig) -> Vec<(bool, String)> {
    CRITERIA
        .iter()
        .map(|(_, _, f)| f(cfg).unwrap_or_else(|m| (false, format!("error: {m}"))))
        .collect()
}

fn main() {
    let base = QuadratureConfig::default();
    let first = run(&base);
    let tight = run(&base.tightened(10.0));
    let mut failed = BTreeSet::new();
    for ((id, name, _), (ok, detail)) in CRITERIA.iter().zip(&first) {
        println!(
            "[{}] {id:>2} {name}: {detail}",
            if *ok { "PASS" } else { "FAIL" }
        );
        if !ok {
            failed.insert(*id);
        }
    }
    let flips: Vec<u32> = CRITERIA
        .iter()
        .zip(first.iter().zip(&tight))
        .filter(|(_, (a, b))| a.0 != b.0)
        .map(|(c, _)| c.0)
        .collect();
    let tight_fail: Vec<u32> = CRITERIA
        .iter()
        .zip(&tight)
        .filter(|(_, r)| !r.0)
        .map(|(c, _)| c.0)
        .collect();
    let gate = flips.is_empty() && tight_fail.is_empty();
    println!(
        "[{}] 11 robustness gate (10x tighter): verdict flips {flips:?}; failing at 10x {tight_fail:?}",
        if gate { "PASS" } else { "FAIL" }
    );
    if !gate {
        failed.insert(11);
    }
    for ((id, _, _), (ok, detail)) in CRITERIA.iter().zip(&tight) {
        if !ok {
            println!("       at 10x, {id}: {detail}");
        }
    }
    let known = BTreeSet::from([8, 11]);
    if !flips.is_empty() || failed != known {
        eprintln!("unexpected outcome: failing {failed:?}, known {known:?}, flips {flips:?}");
        std::process::exit(1);
    }
    println!("failing set {failed:?} matches the documented known failures");
}
