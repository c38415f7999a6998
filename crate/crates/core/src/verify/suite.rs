use serde::{Deserialize, Serialize};

use super::{
    asymptotics_sweep, check_fundamental_i_minus_n, check_fundamental_i_plus,
    check_fundamental_j_plus, check_smp_counterexample, run_scenario, Claim, Expectation, Scenario,
    ScenarioResult, SweepParams, SweepTarget, Verdict,
};
use crate::error::{Error, Result};
use crate::exponents::{
    c_k_fun, c_perp, c_tilde_fun, plane_threshold, solve_beta_bar, solve_beta_for, solve_gamma_bar,
    solve_gamma_tilde, SolveConfig,
};
use crate::operators::{plane_j, Family, OperatorSpec, PlaneMode, Sign};
use crate::profiles::{make_bump_power, make_gaussian, make_power, make_shifted_power};
use crate::quad::{FractionalOrder, QuadratureConfig};

type Runner = Box<dyn Fn(&QuadratureConfig) -> Result<ScenarioResult> + Send + Sync>;

/// A named, re-runnable check; `group` selects sub-suites.
pub struct SuiteEntry {
    pub name: String,
    pub group: &'static str,
    run: Runner,
}

impl SuiteEntry {
    pub fn new<F>(name: &str, group: &'static str, run: F) -> Self
    where
        F: Fn(&QuadratureConfig) -> Result<ScenarioResult> + Send + Sync + 'static,
    {
        SuiteEntry {
            name: name.to_string(),
            group,
            run: Box::new(run),
        }
    }

    fn scenario<F>(name: &str, group: &'static str, build: F) -> Self
    where
        F: Fn(&QuadratureConfig) -> Result<Scenario> + Send + Sync + 'static,
    {
        SuiteEntry::new(name, group, move |cfg| run_scenario(&build(cfg)?, cfg))
    }

    pub fn run(&self, cfg: &QuadratureConfig) -> Result<ScenarioResult> {
        (self.run)(cfg).map(|mut r| {
            r.name = self.name.clone();
            r
        })
    }
}

impl std::fmt::Debug for SuiteEntry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "SuiteEntry({}, {})", self.name, self.group)
    }
}

/// Names accepted by [`suite_by_name`].
pub const SUITES: [&str; 6] = [
    "paper-core",
    "fundamental",
    "liouville",
    "frames",
    "smp",
    "asymptotics",
];

fn order(s: f64) -> FractionalOrder {
    FractionalOrder::new(s).expect("suite orders lie in (1/2, 1)")
}

fn spec(family: Family, sign: Sign, k: usize, n: usize, s: f64) -> Result<OperatorSpec> {
    OperatorSpec::new(family, sign, k, n, order(s))
}

/// Shifted-power candidate for I_2^+ in R^3 at p = p* + offset.
fn liouville_plus(cfg: &QuadratureConfig, offset: f64) -> Result<Scenario> {
    let (k, n, s) = (2, 3, 0.75);
    let sp = spec(Family::IExtremal, Sign::Plus, k, n, s)?;
    let gb = solve_gamma_bar(k, sp.s, &sp.constants, cfg, &SolveConfig::default())?.root;
    let p_star = 1.0 + 2.0 * s / gb;
    let p = p_star + offset;
    let q = 1.0 / (p - 1.0);
    let ck = c_k_fun(2.0 * s * q, k, sp.s, &sp.constants, cfg)?.value;
    let name = if offset > 0.0 {
        "liouville_plus_supersolution"
    } else {
        "liouville_plus_below_threshold"
    };
    let eps = if ck < 0.0 {
        0.5 * (-ck).powf(1.0 / (p - 1.0))
    } else {
        0.5
    };
    let sc = Scenario::radial(
        name,
        sp,
        make_shifted_power(q, s)?.scaled(eps),
        Claim::Supersolution,
    )
    .with_p(p)
    .with_radii(&[0.5, 1.0, 2.0, 5.0, 10.0])
    .threshold("p_star", p_star)
    .threshold("q", q)
    .threshold("epsilon", eps)
    .threshold("c_k_2sq", ck)
    .note(format!("u = {eps:.6e} (1+r)^-{:.6}", 2.0 * s * q));
    Ok(if offset > 0.0 {
        sc
    } else {
        sc.with_radii(&[0.5, 1.0, 2.0, 5.0, 10.0, 50.0, 1e3, 1e4])
            .expecting_failure()
            .note("below the threshold this candidate fails; nonexistence of other supersolutions is not tested")
    })
}

/// α(1+r²)^{-s/(p-1)} with α^{p-1} = -k c⊥(2s/(p-1)), for I_2^- in R^3.
fn liouville_minus_power(p: f64) -> impl Fn(&QuadratureConfig) -> Result<Scenario> {
    move |cfg| {
        let (k, n, s) = (2, 3, 0.75);
        let sp = spec(Family::IExtremal, Sign::Minus, k, n, s)?;
        let a = s / (p - 1.0);
        let cbar = -(k as f64) * c_perp(2.0 * a, sp.s, &sp.constants, cfg)?.value;
        let alpha = cbar.powf(1.0 / (p - 1.0));
        Ok(Scenario::radial(
            "liouville_minus_power",
            sp,
            make_bump_power(alpha, a)?,
            Claim::Solution,
        )
        .with_p(p)
        .threshold("c_bar", cbar)
        .threshold("alpha", alpha))
    }
}

/// Default radii clipped where e^{-βr²} is still far above the absolute tolerance.
const GAUSSIAN_RADII: [f64; 4] = [0.5, 1.0, 2.0, 5.0];

/// e^{-βr²} with F(β) = 1/k: I_k^- u + u = 0, checked as a supersolution.
fn gaussian_exact(cfg: &QuadratureConfig) -> Result<Scenario> {
    let (k, n, s) = (2, 3, 0.75);
    let sp = spec(Family::IExtremal, Sign::Minus, k, n, s)?;
    let (beta, _) = solve_beta_for(1.0 / k as f64, sp.s, &sp.constants, cfg)?;
    Ok(Scenario::radial(
        "liouville_minus_gaussian_exact",
        sp,
        make_gaussian(beta)?,
        Claim::Supersolution,
    )
    .with_p(1.0)
    .with_radii(&GAUSSIAN_RADII)
    .threshold("beta", beta)
    .note("F(beta) = 1/k, so I_k^- u + u = (1 - k F(beta)) u = 0"))
}

/// e^{-β̄r²} with F(β̄) = 1/(2k), under the given claim.
pub fn gaussian_literal_beta_bar(claim: Claim, cfg: &QuadratureConfig) -> Result<Scenario> {
    let (k, n, s) = (2, 3, 0.75);
    let sp = spec(Family::IExtremal, Sign::Minus, k, n, s)?;
    let beta = solve_beta_bar(k, sp.s, &sp.constants, cfg, &SolveConfig::default())?.root;
    Ok(Scenario::radial(
        "liouville_minus_gaussian_beta_bar",
        sp,
        make_gaussian(beta)?,
        claim,
    )
    .with_p(1.0)
    .with_radii(&GAUSSIAN_RADII)
    .threshold("beta_bar", beta)
    .note("F(beta_bar) = 1/(2k) gives I_k^- u + u = u/2 > 0"))
}

/// ε(1+r)^{-2sq} for I_N^- in R^3 at p = 1 + 2s/γ̃ + 1/2.
fn liouville_n(cfg: &QuadratureConfig) -> Result<Scenario> {
    let (n, s) = (3, 0.75);
    let sp = spec(Family::IExtremal, Sign::Minus, n, n, s)?;
    let gt = solve_gamma_tilde(n, sp.s, cfg, &SolveConfig::default())?.root;
    let p_star = 1.0 + 2.0 * s / gt;
    let p = p_star + 0.5;
    let q = 1.0 / (p - 1.0);
    let c = c_tilde_fun(2.0 * s * q, n, sp.s, cfg)?.value;
    if !(c < 0.0) {
        return Err(Error::InvalidParams(format!(
            "c(2sq) = {c} should be negative"
        )));
    }
    let eps = 0.5 * (n as f64 * sp.constants.c_1s * -c).powf(1.0 / (p - 1.0));
    Ok(Scenario::radial(
        "liouville_n_supersolution",
        sp,
        make_shifted_power(q, s)?.scaled(eps),
        Claim::Supersolution,
    )
    .with_p(p)
    .with_radii(&[0.5, 1.0, 2.0, 5.0, 10.0])
    .threshold("p_star", p_star)
    .threshold("q", q)
    .threshold("epsilon", eps))
}

/// α(1+r²)^{-s/(p-1)} for J_2^- in R^3, with c̄ read off at r = 1.
fn liouville_minus_j(p: f64) -> impl Fn(&QuadratureConfig) -> Result<Scenario> {
    move |cfg| {
        let (k, n, s) = (2, 3, 0.75);
        let sp = spec(Family::JPlane, Sign::Minus, k, n, s)?;
        let a = s / (p - 1.0);
        let unit = make_bump_power(1.0, a)?;
        let j1 = plane_j(
            &unit,
            1.0,
            PlaneMode::MinusOrthoPlane,
            k,
            n,
            sp.s,
            &sp.constants,
            cfg,
        )?
        .value;
        let cbar = -j1 * 2f64.powf(a + s);
        let alpha = cbar.powf(1.0 / (p - 1.0));
        Ok(Scenario::radial(
            "liouville_minus_j_power",
            sp,
            make_bump_power(alpha, a)?,
            Claim::Solution,
        )
        .with_p(p)
        .with_tolerance(1e-7)
        .threshold("c_bar", cbar)
        .threshold("alpha", alpha)
        .threshold("p_star", plane_threshold(k, sp.s)?))
    }
}

fn frames(
    name: &str,
    sign: Sign,
    k: usize,
    profile: fn() -> Result<crate::profiles::RadialProfile>,
) -> SuiteEntry {
    let owned = name.to_string();
    SuiteEntry::scenario(name, "frames", move |_| {
        let sp = spec(Family::IExtremal, sign, k, 3, 0.75)?;
        Ok(
            Scenario::radial(&owned, sp, profile()?, Claim::FramePrediction)
                .with_radii(&[1.0, 3.0])
                .with_tolerance(1e-5),
        )
    })
}

fn sweep(name: &str, target: SweepTarget, params: SweepParams, grid: &'static [f64]) -> SuiteEntry {
    SuiteEntry::new(name, "asymptotics", move |cfg| {
        Ok(asymptotics_sweep(target, &params, grid, cfg)?.as_result())
    })
}

/// Every shipped check, in report order.
pub fn paper_core_suite() -> Vec<SuiteEntry> {
    const S_GRID: [f64; 5] = [0.6, 0.75, 0.9, 0.95, 0.99];
    const S_TILDE: [f64; 4] = [0.8, 0.9, 0.95, 0.99];
    vec![
        SuiteEntry::new("fundamental_i_plus_k2", "fundamental", |cfg| {
            check_fundamental_i_plus(2, order(0.75), cfg)
        }),
        SuiteEntry::new("fundamental_i_minus_n3", "fundamental", |cfg| {
            check_fundamental_i_minus_n(3, order(0.75), cfg)
        }),
        SuiteEntry::new("fundamental_j_plus_k2", "fundamental", |cfg| {
            check_fundamental_j_plus(2, order(0.75), cfg)
        }),
        SuiteEntry::new("fundamental_j_plus_k3", "fundamental", |cfg| {
            check_fundamental_j_plus(3, order(0.8), cfg)
        }),
        SuiteEntry::scenario("liouville_plus_supersolution", "liouville", |cfg| {
            liouville_plus(cfg, 0.5)
        }),
        SuiteEntry::scenario("liouville_plus_below_threshold", "liouville", |cfg| {
            liouville_plus(cfg, -0.5)
        }),
        SuiteEntry::scenario(
            "liouville_minus_power_p2",
            "liouville",
            liouville_minus_power(2.0),
        ),
        SuiteEntry::scenario(
            "liouville_minus_gaussian_exact",
            "liouville",
            gaussian_exact,
        ),
        SuiteEntry::scenario("liouville_minus_gaussian_beta_bar", "liouville", |cfg| {
            gaussian_literal_beta_bar(Claim::Subsolution, cfg)
        }),
        SuiteEntry::scenario("liouville_n_supersolution", "liouville", liouville_n),
        SuiteEntry::scenario(
            "liouville_minus_j_power_p2",
            "liouville",
            liouville_minus_j(2.0),
        ),
        frames("frame_gaussian_plus_k2", Sign::Plus, 2, || {
            make_gaussian(1.0)
        }),
        frames("frame_shifted_minus_k2", Sign::Minus, 2, || {
            make_shifted_power(1.0, 0.75)
        }),
        frames("frame_power_minus_k3", Sign::Minus, 3, || make_power(0.4)),
        SuiteEntry::new("smp_k1_n2", "smp", |cfg| {
            check_smp_counterexample(1, 2, order(0.75), cfg)
        }),
        SuiteEntry::new("smp_k2_n3", "smp", |cfg| {
            check_smp_counterexample(2, 3, order(0.75), cfg)
        }),
        sweep(
            "operator_convergence",
            SweepTarget::OperatorConvergence,
            SweepParams::default(),
            &S_GRID,
        ),
        sweep(
            "gamma_bar_trend",
            SweepTarget::GammaBarTrend,
            SweepParams::default(),
            &S_GRID,
        ),
        sweep(
            "gamma_tilde_trend_n3",
            SweepTarget::GammaTildeTrend,
            SweepParams {
                n: 3,
                ..SweepParams::default()
            },
            &S_TILDE,
        ),
        sweep(
            "gamma_tilde_trend_n4",
            SweepTarget::GammaTildeTrend,
            SweepParams {
                n: 4,
                ..SweepParams::default()
            },
            &S_TILDE,
        ),
        sweep(
            "constant_trends",
            SweepTarget::ConstantTrends,
            SweepParams::default(),
            &S_GRID,
        ),
    ]
}

pub fn suite_by_name(name: &str) -> Result<Vec<SuiteEntry>> {
    let all = paper_core_suite();
    match name {
        "paper-core" => Ok(all),
        g if SUITES.contains(&g) => Ok(all.into_iter().filter(|e| e.group == g).collect()),
        _ => Err(Error::InvalidParams(format!(
            "unknown suite {name:?}; expected one of {}",
            SUITES.join(", ")
        ))),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobustnessReport {
    /// Tightening factors applied after the base run.
    pub factors: Vec<f64>,
    /// Per entry, verdicts at the base tolerance then each tightening.
    pub verdicts: Vec<(String, Vec<Verdict>)>,
    pub stable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub results: Vec<ScenarioResult>,
    pub robustness: RobustnessReport,
    pub passed: bool,
    /// Some entry hit a quadrature budget or bracket failure.
    pub nonconvergent: bool,
}

fn errored(name: &str, e: &Error) -> ScenarioResult {
    ScenarioResult {
        name: name.to_string(),
        claim: Claim::Solution,
        expectation: Expectation::Holds,
        tolerance: 0.0,
        rows: Vec::new(),
        excluded_radii: Vec::new(),
        verdict: Verdict::Inconclusive,
        worst_margin: f64::NAN,
        notes: vec![format!("error: {e}")],
        thresholds: Default::default(),
    }
}

fn run_level(entries: &[SuiteEntry], cfg: &QuadratureConfig) -> Vec<(ScenarioResult, bool)> {
    std::thread::scope(|scope| {
        let handles: Vec<_> = entries
            .iter()
            .map(|e| scope.spawn(move || e.run(cfg)))
            .collect();
        handles
            .into_iter()
            .zip(entries)
            .map(|(h, e)| match h.join() {
                Ok(Ok(r)) => {
                    let nc = r.rows.iter().any(|row| {
                        row.note
                            .as_deref()
                            .is_some_and(|n| n.starts_with("quadrature did not converge"))
                    });
                    (r, nc)
                }
                Ok(Err(err)) => (
                    errored(&e.name, &err),
                    err.is_non_convergent() || matches!(err, Error::BracketNotFound(_)),
                ),
                Err(_) => (
                    errored(&e.name, &Error::InvalidMode("panicked".into())),
                    false,
                ),
            })
            .collect()
    })
}

/// Run every entry at `cfg` and again at each tightening; any verdict change
/// fails the suite.
pub fn run_suite(
    name: &str,
    entries: &[SuiteEntry],
    cfg: &QuadratureConfig,
    tightenings: &[f64],
) -> SuiteReport {
    let base = run_level(entries, cfg);
    let mut verdicts: Vec<(String, Vec<Verdict>)> = base
        .iter()
        .map(|(r, _)| (r.name.clone(), vec![r.verdict]))
        .collect();
    let mut nonconvergent = base.iter().any(|(_, nc)| *nc);
    for &f in tightenings {
        for (slot, (r, nc)) in verdicts
            .iter_mut()
            .zip(run_level(entries, &cfg.tightened(f)))
        {
            slot.1.push(r.verdict);
            nonconvergent |= nc;
        }
    }
    let stable = verdicts
        .iter()
        .all(|(_, v)| v.windows(2).all(|w| w[0] == w[1]));
    let results: Vec<ScenarioResult> = base.into_iter().map(|(r, _)| r).collect();
    let passed = stable && results.iter().all(ScenarioResult::passed);
    SuiteReport {
        suite: name.to_string(),
        results,
        robustness: RobustnessReport {
            factors: tightenings.to_vec(),
            verdicts,
            stable,
        },
        passed,
        nonconvergent,
    }
}
