#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod output;

use std::process::ExitCode;

use clap::Parser;
use serde::Serialize;
use trunclap::exponents::{
    c2_prime_at_zero, c_hat, c_k_at_critical, c_k_fun, c_k_prime, c_k_second, c_perp, c_power,
    c_tilde_fun, f_of_beta, f_of_s, solve_beta_bar, solve_gamma_bar, solve_gamma_tilde,
    ConstantValue, SolveConfig,
};
use trunclap::operators::{
    evaluate_radial, EvalPoint, Family, OperatorSpec, OptimizerConfig, Sign,
};
use trunclap::profiles::parse_profile;
use trunclap::verify::{
    asymptotics_sweep, run_scenario, run_suite, suite_by_name, Claim, Expected, Scenario,
    SuiteEntry, SweepParams, SweepTarget,
};
use trunclap::{Error, FractionalOrder, NormalizationConstants, QuadratureConfig};

use args::{
    Cli, Command, ConfigFile, ConstantsArgs, EvalArgs, Format, Global, ScenarioEntry, SolveArgs,
    SweepArgs, VerifyArgs,
};
use output::{num, opt_int, opt_num, Report};

const EXIT_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_NONCONVERGENT: u8 = 3;

enum Failure {
    Usage(String),
    Numeric(String),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_non_convergent() || matches!(e, Error::BracketNotFound(_)) {
            Failure::Numeric(e.to_string())
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn need<T>(v: Option<T>, flag: &str) -> Result<T, Failure> {
    v.ok_or_else(|| usage(format!("missing --{flag}")))
}

fn order(s: Option<f64>) -> Result<FractionalOrder, Failure> {
    Ok(FractionalOrder::new(need(s, "s")?)?)
}

/// Whether a run passed, failed its claims, or hit a numerical wall.
enum Outcome {
    Ok,
    Failed,
    NonConvergent,
}

struct Ctx {
    quad: QuadratureConfig,
    seed: u64,
    file: ConfigFile,
}

fn quadrature(global: &Global) -> Result<QuadratureConfig, Failure> {
    let mut q = QuadratureConfig::default();
    if let Ok(v) = std::env::var("TRUNCLAP_QUAD_TOL") {
        let t: f64 = v
            .trim()
            .parse()
            .map_err(|_| usage(format!("TRUNCLAP_QUAD_TOL = {v:?} is not a number")))?;
        q.rel_tol = t;
        q.abs_tol = 1e-2 * t;
    }
    if let Some(v) = global.abs_tol {
        q.abs_tol = v;
    }
    if let Some(v) = global.rel_tol {
        q.rel_tol = v;
    }
    if let Some(v) = global.max_subdivisions {
        q.max_subdivisions = v;
    }
    q.validate()?;
    Ok(q)
}

/// A `[[profile]]` id from the config file, or `name:p1,p2,...`.
fn profile(text: &str, file: &ConfigFile) -> Result<trunclap::profiles::RadialProfile, Failure> {
    match file.profile.iter().find(|p| p.id == text) {
        Some(p) => Ok(p.spec().build()?),
        None => Ok(parse_profile(text)?),
    }
}

fn parse_op(op: &str) -> Result<(Family, Sign), Failure> {
    Ok(match op {
        "I+" => (Family::IExtremal, Sign::Plus),
        "I-" => (Family::IExtremal, Sign::Minus),
        "J+" => (Family::JPlane, Sign::Plus),
        "J-" => (Family::JPlane, Sign::Minus),
        "P+" => (Family::PLocal, Sign::Plus),
        "P-" => (Family::PLocal, Sign::Minus),
        "dir" => (Family::IDirectional, Sign::Plus),
        _ => {
            return Err(usage(format!(
                "unknown operator {op:?}; expected I+, I-, J+, J-, P+, P- or dir"
            )))
        }
    })
}

fn optimizer(seed: u64) -> OptimizerConfig {
    OptimizerConfig {
        seed,
        ..OptimizerConfig::default()
    }
}

fn eval(mut a: EvalArgs, ctx: &Ctx) -> Result<(Report, Outcome), Failure> {
    a.merge(&ctx.file.eval);
    let op = need(a.op, "op")?;
    let (family, sign) = parse_op(&op)?;
    let s = order(a.s)?;
    let n = need(a.n, "N")?;
    let k = if family == Family::IDirectional {
        a.k.unwrap_or(1)
    } else {
        need(a.k, "k")?
    };
    let spec = OperatorSpec::new(family, sign, k, n, s)?;
    let text = need(a.profile, "profile")?;
    let profile = profile(&text, &ctx.file)?;
    let radii = need(a.r, "r")?;
    if family == Family::IDirectional && a.theta.is_none() {
        return Err(usage("dir needs --theta"));
    }
    let results = radii
        .iter()
        .map(|&r| {
            evaluate_radial(
                &profile,
                EvalPoint {
                    radius: r,
                    theta: a.theta,
                },
                &spec,
                &ctx.quad,
                &optimizer(ctx.seed),
            )
        })
        .collect::<Result<Vec<_>, Error>>()?;
    #[derive(Serialize)]
    struct Doc<'a> {
        op: &'a str,
        k: usize,
        #[serde(rename = "N")]
        n: usize,
        s: f64,
        profile: &'a str,
        results: &'a [trunclap::operators::Evaluation],
    }
    let rows = results
        .iter()
        .map(|e| {
            vec![
                num(e.r),
                num(e.value),
                num(e.error_estimate),
                e.method.clone(),
            ]
        })
        .collect();
    let doc = Doc {
        op: &op,
        k,
        n,
        s: s.value(),
        profile: &text,
        results: &results,
    };
    Ok((
        Report::new(&doc, vec!["r", "value", "error_estimate", "method"], rows),
        Outcome::Ok,
    ))
}

#[derive(Serialize)]
struct ConstRow {
    name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    k: Option<usize>,
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    n: Option<usize>,
    s: f64,
    value: f64,
    error_estimate: f64,
    certified: bool,
}

impl ConstRow {
    fn exact(name: &str, s: f64, value: f64) -> Self {
        ConstRow {
            name: name.into(),
            gamma: None,
            beta: None,
            k: None,
            n: None,
            s,
            value,
            error_estimate: 0.0,
            certified: true,
        }
    }

    fn from_value(name: &str, v: ConstantValue) -> Self {
        ConstRow {
            name: name.into(),
            gamma: v.params.gamma,
            beta: v.params.beta,
            k: v.params.k,
            n: v.params.n,
            s: v.params.s,
            value: v.value,
            error_estimate: v.error_estimate,
            certified: v.certified,
        }
    }
}

fn constants(mut a: ConstantsArgs, ctx: &Ctx) -> Result<(Report, Outcome), Failure> {
    a.merge(&ctx.file.constants);
    let name = need(a.name, "name")?;
    let q = &ctx.quad;
    let sraw = need(a.s, "s")?;
    let mut out = Vec::new();
    if name == "f_s" {
        out.push(ConstRow::from_value(&name, f_of_s(sraw, q)?));
    } else {
        let s = FractionalOrder::new(sraw)?;
        let c = NormalizationConstants::new(s);
        let gammas = || need(a.gamma.clone(), "gamma");
        match name.as_str() {
            "c_hat" | "c_perp" | "c_k" | "c_k_prime" | "c_k_second" | "c_power" | "c_tilde" => {
                for g in gammas()? {
                    let v = match name.as_str() {
                        "c_hat" => c_hat(g, s, &c, q)?,
                        "c_perp" => c_perp(g, s, &c, q)?,
                        "c_k" => c_k_fun(g, need(a.k, "k")?, s, &c, q)?,
                        "c_k_prime" => c_k_prime(g, need(a.k, "k")?, s, &c, q)?,
                        "c_k_second" => c_k_second(g, need(a.k, "k")?, s, &c, q)?,
                        "c_power" => c_power(g, s, &c, q)?,
                        _ => c_tilde_fun(g, need(a.n, "N")?, s, q)?,
                    };
                    out.push(ConstRow::from_value(&name, v));
                }
            }
            "f_beta" => {
                for b in need(a.beta.clone(), "beta")? {
                    out.push(ConstRow::from_value(&name, f_of_beta(b, s, &c, q)?));
                }
            }
            "c2_prime_zero" => out.push(ConstRow::exact(&name, sraw, c2_prime_at_zero(s, &c, q)?)),
            "c_k_critical" => {
                let k = need(a.k, "k")?;
                let mut row = ConstRow::exact(&name, sraw, c_k_at_critical(k, &c));
                row.k = Some(k);
                row.gamma = Some(2.0 * (1.0 - sraw));
                out.push(row);
            }
            "normalization" => {
                let k = a.k.unwrap_or(1);
                out.push(ConstRow::exact("c_1s", sraw, c.c_1s));
                let mut cks = ConstRow::exact("c_ks", sraw, c.c_ks(k));
                cks.k = Some(k);
                out.push(cks);
                out.push(ConstRow::exact("one_dim_ratio", sraw, c.one_dim_ratio()));
                let mut pr = ConstRow::exact("plane_ratio", sraw, c.plane_ratio(k));
                pr.k = Some(k);
                out.push(pr);
            }
            other => return Err(usage(format!("unknown constant {other:?}"))),
        }
    }
    let rows = out
        .iter()
        .map(|r| {
            vec![
                r.name.clone(),
                opt_num(r.gamma),
                opt_num(r.beta),
                opt_int(r.k),
                opt_int(r.n),
                num(r.s),
                num(r.value),
                num(r.error_estimate),
                r.certified.to_string(),
            ]
        })
        .collect();
    let headers = vec![
        "name",
        "gamma",
        "beta",
        "k",
        "N",
        "s",
        "value",
        "error_estimate",
        "certified",
    ];
    Ok((Report::new(&out, headers, rows), Outcome::Ok))
}

fn solve(mut a: SolveArgs, ctx: &Ctx) -> Result<(Report, Outcome), Failure> {
    a.merge(&ctx.file.solve);
    let kind = need(a.exponent, "exponent")?;
    let s = order(a.s)?;
    let c = NormalizationConstants::new(s);
    let mut scfg = SolveConfig::default();
    if let Some(f) = a.cap_factor {
        scfg.tilde_cap_factor = f;
    }
    let rep = match kind.as_str() {
        "gamma_bar" => solve_gamma_bar(need(a.k, "k")?, s, &c, &ctx.quad, &scfg)?,
        "gamma_tilde" => solve_gamma_tilde(need(a.n, "N")?, s, &ctx.quad, &scfg)?,
        "beta_bar" => solve_beta_bar(need(a.k, "k")?, s, &c, &ctx.quad, &scfg)?,
        other => return Err(usage(format!("unknown exponent {other:?}"))),
    };
    let mut doc = serde_json::to_value(&rep).expect("report serializes");
    doc["p_star"] = serde_json::to_value(rep.p_star()).expect("f64");
    let rows = vec![vec![
        kind.clone(),
        opt_int(rep.k),
        opt_int(rep.n),
        num(rep.s),
        num(rep.root),
        num(rep.residual),
        opt_num(rep.p_star()),
        rep.certified.to_string(),
    ]];
    let headers = vec![
        "kind",
        "k",
        "N",
        "s",
        "root",
        "residual",
        "p_star",
        "certified",
    ];
    let outcome = if rep.certified {
        Outcome::Ok
    } else {
        Outcome::NonConvergent
    };
    Ok((Report::new(&doc, headers, rows), outcome))
}

fn parse_claim(c: &str) -> Result<Claim, Failure> {
    Ok(match c {
        "supersolution" => Claim::Supersolution,
        "subsolution" => Claim::Subsolution,
        "solution" => Claim::Solution,
        "nonpositive" => Claim::OperatorSign(Expected::Nonpositive),
        "nonnegative" => Claim::OperatorSign(Expected::Nonnegative),
        "frame_prediction" => Claim::FramePrediction,
        _ => return Err(usage(format!("unknown claim {c:?}"))),
    })
}

fn config_entry(e: &ScenarioEntry, seed: u64, file: &ConfigFile) -> Result<SuiteEntry, Failure> {
    let (family, sign) = parse_op(&e.op)?;
    let spec = OperatorSpec::new(family, sign, e.k, e.n, FractionalOrder::new(e.s)?)?;
    let mut sc = Scenario::radial(
        &e.name,
        spec,
        profile(&e.profile, file)?,
        parse_claim(&e.claim)?,
    );
    sc.optimizer.seed = seed;
    if let Some(p) = e.p {
        sc = sc.with_p(p);
    }
    if let Some(r) = &e.radii {
        sc = sc.with_radii(r);
    }
    if let Some(t) = e.tolerance {
        sc = sc.with_tolerance(t);
    }
    if let Some(t) = e.theta {
        sc = sc.with_theta(t);
    }
    if e.expect_failure {
        sc = sc.expecting_failure();
    }
    sc.validate()?;
    Ok(SuiteEntry::new(&e.name, "config", move |cfg| {
        run_scenario(&sc, cfg)
    }))
}

fn verify(mut a: VerifyArgs, ctx: &Ctx) -> Result<(Report, Outcome), Failure> {
    a.merge(&ctx.file.verify);
    let suite = a.suite.unwrap_or_else(|| "paper-core".into());
    let entries = if suite == "config" {
        if ctx.file.scenario.is_empty() {
            return Err(usage(
                "suite `config` needs [[scenario]] entries in --config",
            ));
        }
        ctx.file
            .scenario
            .iter()
            .map(|e| config_entry(e, ctx.seed, &ctx.file))
            .collect::<Result<Vec<_>, _>>()?
    } else {
        suite_by_name(&suite)?
    };
    let tighten = a.tighten.unwrap_or_else(|| vec![10.0]);
    if tighten.iter().any(|f| !(*f >= 1.0)) {
        return Err(usage("tightening factors must be at least 1"));
    }
    let rep = run_suite(&suite, &entries, &ctx.quad, &tighten);
    let rows = rep
        .results
        .iter()
        .zip(&rep.robustness.verdicts)
        .map(|(r, (_, v))| {
            vec![
                r.name.clone(),
                format!("{:?}", r.verdict).to_lowercase(),
                if r.passed() { "yes" } else { "no" }.into(),
                num(r.worst_margin),
                r.rows.len().to_string(),
                v.iter()
                    .map(|x| format!("{x:?}").to_lowercase())
                    .collect::<Vec<_>>()
                    .join("/"),
            ]
        })
        .collect();
    let headers = vec![
        "scenario",
        "verdict",
        "passed",
        "worst_margin",
        "rows",
        "verdicts_by_tolerance",
    ];
    let outcome = if rep.passed {
        Outcome::Ok
    } else if rep.nonconvergent {
        Outcome::NonConvergent
    } else {
        Outcome::Failed
    };
    Ok((Report::new(&rep, headers, rows), outcome))
}

fn sweep(mut a: SweepArgs, ctx: &Ctx) -> Result<(Report, Outcome), Failure> {
    a.merge(&ctx.file.sweep);
    let target = match need(a.target, "target")?.as_str() {
        "operator_convergence" => SweepTarget::OperatorConvergence,
        "gamma_bar_trend" => SweepTarget::GammaBarTrend,
        "gamma_tilde_trend" => SweepTarget::GammaTildeTrend,
        "constant_trends" => SweepTarget::ConstantTrends,
        other => return Err(usage(format!("unknown sweep target {other:?}"))),
    };
    let d = SweepParams::default();
    let params = SweepParams {
        k: a.k.unwrap_or(d.k),
        n: a.n.unwrap_or(d.n),
        r: a.r.unwrap_or(d.r),
        beta: a.beta.unwrap_or(d.beta),
    };
    let grid = a.s_grid.unwrap_or_else(|| vec![0.6, 0.75, 0.9, 0.95, 0.99]);
    let table = asymptotics_sweep(target, &params, &grid, &ctx.quad)?;
    let rows = table
        .rows
        .iter()
        .map(|r| {
            vec![
                r.kind.clone(),
                opt_int(r.k),
                opt_int(r.n),
                num(r.s),
                num(r.value),
                num(r.residual),
                opt_num(r.p_star),
            ]
        })
        .collect();
    let headers = vec!["kind", "k", "N", "s", "value", "residual", "p_star"];
    let outcome = if table.rows.iter().any(|r| r.error.is_some()) {
        Outcome::NonConvergent
    } else {
        Outcome::Ok
    };
    Ok((Report::new(&table, headers, rows), outcome))
}

fn run(cli: Cli) -> Result<(Report, Outcome, Format, Option<std::path::PathBuf>), Failure> {
    let mut global = cli.global;
    let file = match &global.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| usage(format!("{}: {e}", path.display())))?;
            toml::from_str::<ConfigFile>(&text)
                .map_err(|e| usage(format!("{}: {e}", path.display())))?
        }
        None => ConfigFile::default(),
    };
    global.merge(&file);
    let ctx = Ctx {
        quad: quadrature(&global)?,
        seed: global.seed.unwrap_or(OptimizerConfig::default().seed),
        file,
    };
    let (report, outcome) = match cli.command {
        Command::Eval(a) => eval(a, &ctx)?,
        Command::Constants(a) => constants(a, &ctx)?,
        Command::Solve(a) => solve(a, &ctx)?,
        Command::Verify(a) => verify(a, &ctx)?,
        Command::Sweep(a) => sweep(a, &ctx)?,
    };
    Ok((
        report,
        outcome,
        global.format.unwrap_or(Format::Table),
        global.output,
    ))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (report, outcome, format, path) = match run(cli) {
        Ok(x) => x,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            return ExitCode::from(EXIT_USAGE);
        }
        Err(Failure::Numeric(m)) => {
            eprintln!("error: {m}");
            return ExitCode::from(EXIT_NONCONVERGENT);
        }
        Err(Failure::Io(m)) => {
            eprintln!("error: {m}");
            return ExitCode::from(EXIT_FAILED);
        }
    };
    let text = report.render(format);
    let written = match &path {
        Some(p) => {
            std::fs::write(p, text).map_err(|e| Failure::Io(format!("{}: {e}", p.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    };
    if let Err(Failure::Io(m)) = written {
        eprintln!("error: {m}");
        return ExitCode::from(EXIT_FAILED);
    }
    match outcome {
        Outcome::Ok => ExitCode::SUCCESS,
        Outcome::Failed => {
            eprintln!("error: some scenarios failed");
            ExitCode::from(EXIT_FAILED)
        }
        Outcome::NonConvergent => {
            eprintln!("error: numerical non-convergence");
            ExitCode::from(EXIT_NONCONVERGENT)
        }
    }
}
