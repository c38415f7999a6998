//! Executable scenario suites: residual signs, representation cross-checks,
//! fundamental solutions, Liouville candidates and s → 1 sweeps.

mod checks;
mod suite;
mod sweep;

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use checks::{
    check_fundamental_i_minus_n, check_fundamental_i_plus, check_fundamental_j_plus,
    check_smp_counterexample, smp_profile,
};
pub use suite::{
    gaussian_literal_beta_bar, paper_core_suite, run_suite, suite_by_name, RobustnessReport,
    SuiteEntry, SuiteReport, SUITES,
};
pub use sweep::{asymptotics_sweep, SweepParams, SweepRow, SweepTable, SweepTarget};

use crate::error::{Error, Result};
use crate::operators::{
    evaluate_radial, extremal_i_optimize, extremal_i_repr, EvalPoint, Family, Field, OperatorSpec,
    OptimizerConfig, RadialField,
};
use crate::profiles::RadialProfile;
use crate::quad::QuadratureConfig;

/// Log-spaced default radii.
pub const DEFAULT_RADII: [f64; 6] = [0.5, 1.0, 2.0, 5.0, 10.0, 50.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expected {
    Nonpositive,
    Nonnegative,
}

/// What a scenario asserts about L u + u^p (or L u alone when p is absent).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Claim {
    /// L u + u^p ≤ 0.
    Supersolution,
    /// L u + u^p ≥ 0.
    Subsolution,
    /// L u + u^p = 0.
    Solution,
    OperatorSign(Expected),
    /// Representation formula equals the frame optimizer.
    FramePrediction,
    /// Monotone approach to a local limit as s → 1; produced by [`asymptotics_sweep`].
    LimitTrend,
}

/// Whether the claim is expected to hold, or the scenario only demonstrates
/// that a specific candidate fails.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expectation {
    Holds,
    CandidateFails,
}

/// Denominator for margins.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Scale {
    /// max(|L u|, u^p).
    Dominant,
    /// coef · r^-exponent.
    PowerLaw {
        coef: f64,
        exponent: f64,
    },
    Fixed {
        value: f64,
    },
}

#[derive(Clone)]
pub enum ScenarioProfile {
    Radial(RadialProfile),
    /// A general field, sampled at x = r e₁.
    Field(Arc<dyn Field>),
}

impl std::fmt::Debug for ScenarioProfile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ScenarioProfile::Radial(p) => f.debug_tuple("Radial").field(p).finish(),
            ScenarioProfile::Field(u) => write!(f, "Field(dim = {})", u.dim()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub operator: OperatorSpec,
    pub profile: ScenarioProfile,
    pub claim: Claim,
    pub exponent_p: Option<f64>,
    pub sample_radii: Vec<f64>,
    pub tolerance: f64,
    pub scale: Scale,
    /// Angle between ξ and x for directional operators.
    pub theta: Option<f64>,
    /// Radii below this are reported as excluded.
    pub min_radius: f64,
    pub expectation: Expectation,
    pub optimizer: OptimizerConfig,
    pub notes: Vec<String>,
    pub thresholds: BTreeMap<String, f64>,
}

impl Scenario {
    pub fn new(name: &str, operator: OperatorSpec, profile: ScenarioProfile, claim: Claim) -> Self {
        let min_radius = match &profile {
            ScenarioProfile::Radial(p) => p.min_radius,
            ScenarioProfile::Field(_) => 0.0,
        };
        Scenario {
            name: name.to_string(),
            operator,
            profile,
            claim,
            exponent_p: None,
            sample_radii: DEFAULT_RADII.to_vec(),
            tolerance: 1e-8,
            scale: Scale::Dominant,
            theta: None,
            min_radius,
            expectation: Expectation::Holds,
            optimizer: OptimizerConfig::default(),
            notes: Vec::new(),
            thresholds: BTreeMap::new(),
        }
    }

    pub fn radial(
        name: &str,
        operator: OperatorSpec,
        profile: RadialProfile,
        claim: Claim,
    ) -> Self {
        Scenario::new(name, operator, ScenarioProfile::Radial(profile), claim)
    }

    pub fn with_p(mut self, p: f64) -> Self {
        self.exponent_p = Some(p);
        self
    }

    pub fn with_radii(mut self, radii: &[f64]) -> Self {
        self.sample_radii = radii.to_vec();
        self
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tolerance = tol;
        self
    }

    pub fn with_scale(mut self, scale: Scale) -> Self {
        self.scale = scale;
        self
    }

    pub fn with_theta(mut self, theta: f64) -> Self {
        self.theta = Some(theta);
        self
    }

    pub fn with_min_radius(mut self, r: f64) -> Self {
        self.min_radius = r;
        self
    }

    pub fn expecting_failure(mut self) -> Self {
        self.expectation = Expectation::CandidateFails;
        self
    }

    pub fn note(mut self, text: impl Into<String>) -> Self {
        self.notes.push(text.into());
        self
    }

    pub fn threshold(mut self, key: &str, value: f64) -> Self {
        self.thresholds.insert(key.to_string(), value);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParams(format!("scenario {}: {m}", self.name)));
        if self.sample_radii.is_empty() {
            return bad("no sample radii".into());
        }
        if self
            .sample_radii
            .iter()
            .any(|r| !(*r > 0.0 && r.is_finite()))
        {
            return bad("sample radii must be positive".into());
        }
        if self.sample_radii.windows(2).any(|w| w[0] >= w[1]) {
            return bad("sample radii must be strictly increasing".into());
        }
        if !(self.tolerance >= 0.0) {
            return bad(format!("tolerance {} must be nonnegative", self.tolerance));
        }
        if self.claim == Claim::LimitTrend {
            return Err(Error::InvalidMode(
                "limit trends are produced by asymptotics_sweep".into(),
            ));
        }
        if let ScenarioProfile::Field(u) = &self.profile {
            if self.operator.family != Family::IExtremal || self.claim == Claim::FramePrediction {
                return bad("general fields support the extremal I operators only".into());
            }
            if u.dim() != self.operator.n {
                return bad(format!(
                    "field dimension {} differs from N = {}",
                    u.dim(),
                    self.operator.n
                ));
            }
        }
        if self.claim == Claim::FramePrediction && self.operator.family != Family::IExtremal {
            return bad("frame predictions apply to the extremal I operators".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowStatus {
    Ok,
    Violated,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    /// Sample radius; s for limit-trend rows.
    pub r: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    /// L u alone (the repr value for frame predictions).
    pub operator: f64,
    /// u^p, zero when p is absent.
    pub source: f64,
    pub scale: f64,
    pub error_estimate: f64,
    pub status: RowStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub part: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Row {
    fn inconclusive(r: f64, note: String) -> Self {
        Row {
            r,
            lhs: f64::NAN,
            rhs: f64::NAN,
            margin: f64::NAN,
            operator: f64::NAN,
            source: f64::NAN,
            scale: f64::NAN,
            error_estimate: f64::NAN,
            status: RowStatus::Inconclusive,
            part: None,
            note: Some(note),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioResult {
    pub name: String,
    pub claim: Claim,
    pub expectation: Expectation,
    pub tolerance: f64,
    pub rows: Vec<Row>,
    pub excluded_radii: Vec<f64>,
    pub verdict: Verdict,
    pub worst_margin: f64,
    pub notes: Vec<String>,
    pub thresholds: BTreeMap<String, f64>,
}

impl ScenarioResult {
    /// The verdict matches the expectation.
    pub fn passed(&self) -> bool {
        match self.expectation {
            Expectation::Holds => self.verdict == Verdict::Pass,
            Expectation::CandidateFails => self.verdict == Verdict::Fail,
        }
    }

    fn finish(mut self) -> Self {
        let judged: Vec<&Row> = self
            .rows
            .iter()
            .filter(|r| r.status != RowStatus::Inconclusive)
            .collect();
        self.worst_margin = judged
            .iter()
            .map(|r| r.margin)
            .fold(f64::INFINITY, f64::min);
        if judged.is_empty() {
            self.worst_margin = f64::NAN;
        }
        self.verdict = if self
            .rows
            .iter()
            .any(|r| r.status == RowStatus::Inconclusive)
        {
            Verdict::Inconclusive
        } else if judged.iter().any(|r| r.status == RowStatus::Violated) {
            Verdict::Fail
        } else {
            Verdict::Pass
        };
        self
    }

    /// One result from several sub-scenarios; rows are tagged with the part name.
    pub fn combine(name: &str, parts: Vec<ScenarioResult>) -> ScenarioResult {
        let first = &parts[0];
        let mut out = ScenarioResult {
            name: name.to_string(),
            claim: first.claim,
            expectation: first.expectation,
            tolerance: first.tolerance,
            rows: Vec::new(),
            excluded_radii: Vec::new(),
            verdict: Verdict::Pass,
            worst_margin: f64::NAN,
            notes: Vec::new(),
            thresholds: BTreeMap::new(),
        };
        for p in parts {
            out.rows.extend(p.rows.into_iter().map(|mut r| {
                r.part.get_or_insert_with(|| p.name.clone());
                r
            }));
            out.excluded_radii.extend(p.excluded_radii);
            out.notes
                .extend(p.notes.into_iter().map(|n| format!("{}: {n}", p.name)));
            out.thresholds.extend(p.thresholds);
        }
        out.finish()
    }
}

fn margin(claim: Claim, lhs: f64, rhs: f64, scale: f64) -> f64 {
    let d = (lhs - rhs) / scale;
    match claim {
        Claim::Supersolution | Claim::OperatorSign(Expected::Nonpositive) => -d,
        Claim::Subsolution | Claim::OperatorSign(Expected::Nonnegative) => d,
        Claim::Solution | Claim::FramePrediction | Claim::LimitTrend => -d.abs(),
    }
}

fn first_axis(r: f64, n: usize) -> Vec<f64> {
    let mut x = vec![0.0; n];
    x[0] = r;
    x
}

/// (operator value, comparison value, u(r), error estimate) at one radius.
fn evaluate_row(
    sc: &Scenario,
    r: f64,
    cfg: &QuadratureConfig,
) -> Result<(f64, Option<f64>, f64, f64)> {
    let op = &sc.operator;
    match &sc.profile {
        ScenarioProfile::Radial(p) if sc.claim == Claim::FramePrediction => {
            let repr = extremal_i_repr(p, r, op.sign, op.k, op.n, op.s, &op.constants, false, cfg)?;
            let field = RadialField {
                profile: p.clone(),
                n: op.n,
            };
            let x = first_axis(r, op.n);
            let o = extremal_i_optimize(
                &field,
                &x,
                op.k,
                op.sign,
                op.s,
                &op.constants,
                cfg,
                &sc.optimizer,
            )?;
            Ok((
                repr.result.value,
                Some(o.value),
                p.eval(r),
                repr.result.uncertainty(),
            ))
        }
        ScenarioProfile::Radial(p) => {
            let e = evaluate_radial(
                p,
                EvalPoint {
                    radius: r,
                    theta: sc.theta,
                },
                op,
                cfg,
                &sc.optimizer,
            )?;
            Ok((e.value, None, p.eval(r), e.error_estimate))
        }
        ScenarioProfile::Field(u) => {
            let x = first_axis(r, op.n);
            let o = extremal_i_optimize(
                u.as_ref(),
                &x,
                op.k,
                op.sign,
                op.s,
                &op.constants,
                cfg,
                &sc.optimizer,
            )?;
            Ok((o.value, None, u.value(&x), f64::NAN))
        }
    }
}

/// Evaluate the claim at every admissible sample radius.
///
/// Radii where evaluation fails are kept as inconclusive rows.
pub fn run_scenario(sc: &Scenario, cfg: &QuadratureConfig) -> Result<ScenarioResult> {
    sc.validate()?;
    cfg.validate()?;
    let mut rows = Vec::new();
    let mut excluded = Vec::new();
    for &r in &sc.sample_radii {
        if r < sc.min_radius {
            excluded.push(r);
            continue;
        }
        let row = match evaluate_row(sc, r, cfg) {
            Ok((opv, cmp, u, err)) => {
                let source = sc.exponent_p.map_or(0.0, |p| u.powf(p));
                let (lhs, rhs) = match cmp {
                    Some(c) => (opv, c),
                    None => (opv + source, 0.0),
                };
                let scale = match sc.scale {
                    Scale::Dominant if cmp.is_some() => lhs.abs().max(rhs.abs()),
                    Scale::Dominant => opv.abs().max(source.abs()),
                    Scale::PowerLaw { coef, exponent } => coef * r.powf(-exponent),
                    Scale::Fixed { value } => value,
                }
                .max(f64::MIN_POSITIVE);
                let m = margin(sc.claim, lhs, rhs, scale);
                Row {
                    r,
                    lhs,
                    rhs,
                    margin: m,
                    operator: opv,
                    source,
                    scale,
                    error_estimate: err,
                    status: if m >= -sc.tolerance {
                        RowStatus::Ok
                    } else {
                        RowStatus::Violated
                    },
                    part: None,
                    note: None,
                }
            }
            Err(e) => Row::inconclusive(r, e.to_string()),
        };
        rows.push(row);
    }
    let mut notes = sc.notes.clone();
    if !excluded.is_empty() {
        notes.push(format!("radii below {} excluded", sc.min_radius));
    }
    Ok(ScenarioResult {
        name: sc.name.clone(),
        claim: sc.claim,
        expectation: sc.expectation,
        tolerance: sc.tolerance,
        rows,
        excluded_radii: excluded,
        verdict: Verdict::Pass,
        worst_margin: f64::NAN,
        notes,
        thresholds: sc.thresholds.clone(),
    }
    .finish())
}

/// Run scenarios concurrently; results come back in input order.
pub fn run_all(scenarios: &[Scenario], cfg: &QuadratureConfig) -> Vec<Result<ScenarioResult>> {
    std::thread::scope(|scope| {
        let handles: Vec<_> = scenarios
            .iter()
            .map(|sc| scope.spawn(move || run_scenario(sc, cfg)))
            .collect();
        handles
            .into_iter()
            .map(|h| {
                h.join()
                    .unwrap_or_else(|_| Err(Error::InvalidMode("scenario thread panicked".into())))
            })
            .collect()
    })
}
