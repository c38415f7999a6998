use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Claim, Expectation, Row, RowStatus, ScenarioResult, Verdict};
use crate::error::{Error, Result};
use crate::exponents::{solve_gamma_bar, solve_gamma_tilde, SolveConfig};
use crate::operators::{extremal_i_repr, local_radial, Sign};
use crate::profiles::make_gaussian;
use crate::quad::{FractionalOrder, NormalizationConstants, QuadratureConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepTarget {
    /// I_k^+ e^{-β|x|²} against P_k^+ at |x| = r.
    OperatorConvergence,
    /// γ̄(k, s) → 0.
    GammaBarTrend,
    /// γ̃(N, s) → N - 2.
    GammaTildeTrend,
    /// C_s/(2(1-s)) and C_{k,s}|S^{k-1}|/(4k(1-s)) → 1.
    ConstantTrends,
}

impl SweepTarget {
    pub fn name(self) -> &'static str {
        match self {
            SweepTarget::OperatorConvergence => "operator_convergence",
            SweepTarget::GammaBarTrend => "gamma_bar_trend",
            SweepTarget::GammaTildeTrend => "gamma_tilde_trend",
            SweepTarget::ConstantTrends => "constant_trends",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepParams {
    pub k: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub r: f64,
    pub beta: f64,
}

impl Default for SweepParams {
    fn default() -> Self {
        SweepParams {
            k: 2,
            n: 3,
            r: 1.0,
            beta: 1.0,
        }
    }
}

/// One row; `residual` is the solver residual for exponent rows and
/// |value - reference| otherwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub kind: String,
    pub k: Option<usize>,
    #[serde(rename = "N")]
    pub n: Option<usize>,
    pub s: f64,
    pub value: f64,
    pub residual: f64,
    pub p_star: Option<f64>,
    pub reference: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl SweepRow {
    pub fn distance(&self) -> f64 {
        (self.value - self.reference).abs()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub target: SweepTarget,
    pub params: SweepParams,
    pub rows: Vec<SweepRow>,
    /// |value - reference| strictly decreases along s within every kind.
    pub monotone: bool,
}

impl SweepTable {
    /// Rows as a limit-trend scenario result; `r` holds s and the margin is
    /// the relative decrease of |value - reference| from the previous s.
    pub fn as_result(&self) -> ScenarioResult {
        let mut rows = Vec::new();
        let mut prev: BTreeMap<&str, f64> = BTreeMap::new();
        for row in &self.rows {
            let d = row.distance();
            let (m, first) = match prev.insert(&row.kind, d) {
                Some(p) => ((p - d) / p.max(f64::MIN_POSITIVE), false),
                None => (0.0, true),
            };
            let status = if row.error.is_some() || !d.is_finite() {
                RowStatus::Inconclusive
            } else if first || m > 0.0 {
                RowStatus::Ok
            } else {
                RowStatus::Violated
            };
            rows.push(Row {
                r: row.s,
                lhs: row.value,
                rhs: row.reference,
                margin: m,
                operator: row.value,
                source: 0.0,
                scale: 1.0,
                error_estimate: row.residual,
                status,
                part: Some(row.kind.clone()),
                note: row.error.clone(),
            });
        }
        ScenarioResult {
            name: self.target.name().to_string(),
            claim: Claim::LimitTrend,
            expectation: Expectation::Holds,
            tolerance: 0.0,
            rows,
            excluded_radii: Vec::new(),
            verdict: Verdict::Pass,
            worst_margin: f64::NAN,
            notes: Vec::new(),
            thresholds: BTreeMap::new(),
        }
        .finish()
    }
}

fn failed(
    kind: &str,
    k: Option<usize>,
    n: Option<usize>,
    s: f64,
    reference: f64,
    e: Error,
) -> SweepRow {
    SweepRow {
        kind: kind.to_string(),
        k,
        n,
        s,
        value: f64::NAN,
        residual: f64::NAN,
        p_star: None,
        reference,
        error: Some(e.to_string()),
    }
}

/// Per-s rows of the targeted quantity and its local limit.
pub fn asymptotics_sweep(
    target: SweepTarget,
    params: &SweepParams,
    s_grid: &[f64],
    cfg: &QuadratureConfig,
) -> Result<SweepTable> {
    if s_grid.is_empty() || s_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParams(
            "s grid must be nonempty and strictly increasing".into(),
        ));
    }
    let orders = s_grid
        .iter()
        .map(|&s| FractionalOrder::new(s))
        .collect::<Result<Vec<_>>>()?;
    let (k, n) = (params.k, params.n);
    if k == 0 || k > n {
        return Err(Error::InvalidParams(format!(
            "need 1 <= k <= N, got k = {k}, N = {n}"
        )));
    }
    let scfg = SolveConfig::default();
    let mut rows = Vec::new();
    for s in orders {
        let sv = s.value();
        let c = NormalizationConstants::new(s);
        match target {
            SweepTarget::OperatorConvergence => {
                let kind = "operator_convergence";
                let p = make_gaussian(params.beta)?;
                let reference = local_radial(&p, params.r, n, k, Sign::Plus)?;
                rows.push(
                    match extremal_i_repr(&p, params.r, Sign::Plus, k, n, s, &c, false, cfg) {
                        Ok(v) => SweepRow {
                            kind: kind.into(),
                            k: Some(k),
                            n: Some(n),
                            s: sv,
                            value: v.result.value,
                            residual: (v.result.value - reference).abs(),
                            p_star: None,
                            reference,
                            error: None,
                        },
                        Err(e) => failed(kind, Some(k), Some(n), sv, reference, e),
                    },
                );
            }
            SweepTarget::GammaBarTrend => {
                let kind = "gamma_bar";
                rows.push(match solve_gamma_bar(k, s, &c, cfg, &scfg) {
                    Ok(r) => SweepRow {
                        kind: kind.into(),
                        k: Some(k),
                        n: None,
                        s: sv,
                        value: r.root,
                        residual: r.residual,
                        p_star: r.p_star(),
                        reference: 0.0,
                        error: None,
                    },
                    Err(e) => failed(kind, Some(k), None, sv, 0.0, e),
                });
            }
            SweepTarget::GammaTildeTrend => {
                let kind = "gamma_tilde";
                let reference = n as f64 - 2.0;
                rows.push(match solve_gamma_tilde(n, s, cfg, &scfg) {
                    Ok(r) => SweepRow {
                        kind: kind.into(),
                        k: None,
                        n: Some(n),
                        s: sv,
                        value: r.root,
                        residual: r.residual,
                        p_star: r.p_star(),
                        reference,
                        error: None,
                    },
                    Err(e) => failed(kind, None, Some(n), sv, reference, e),
                });
            }
            SweepTarget::ConstantTrends => {
                for (kind, kk, v) in [
                    ("one_dim_ratio", None, c.one_dim_ratio()),
                    ("plane_ratio", Some(k), c.plane_ratio(k)),
                ] {
                    rows.push(SweepRow {
                        kind: kind.into(),
                        k: kk,
                        n: None,
                        s: sv,
                        value: v,
                        residual: (v - 1.0).abs(),
                        p_star: None,
                        reference: 1.0,
                        error: None,
                    });
                }
            }
        }
    }
    let mut table = SweepTable {
        target,
        params: *params,
        rows,
        monotone: false,
    };
    table.monotone = table.as_result().verdict == Verdict::Pass;
    Ok(table)
}
