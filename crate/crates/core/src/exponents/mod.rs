//! Scalar constants and critical exponents.

mod brent;
mod constants;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use brent::brent;
pub use constants::{
    c2_prime_at_zero, c_hat, c_hat_at_critical, c_k_at_critical, c_k_fun, c_k_prime, c_k_second,
    c_perp, c_perp_at_critical, c_power, c_tilde_fun, f_of_beta, f_of_beta_closed, f_of_s,
    ConstantParams, ConstantValue, Definition,
};

use crate::error::{Error, Result};
use crate::quad::{FractionalOrder, NormalizationConstants, QuadratureConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExponentKind {
    GammaBar,
    GammaTilde,
    BetaBar,
}

impl ExponentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExponentKind::GammaBar => "gamma_bar",
            ExponentKind::GammaTilde => "gamma_tilde",
            ExponentKind::BetaBar => "beta_bar",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentReport {
    pub kind: ExponentKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    pub s: f64,
    pub root: f64,
    pub bracket: (f64, f64),
    /// |constant(root)| re-evaluated with tightened quadrature.
    pub residual: f64,
    pub residual_scale: f64,
    pub certified: bool,
    pub thresholds: BTreeMap<String, f64>,
}

impl ExponentReport {
    pub fn p_star(&self) -> Option<f64> {
        self.thresholds.get("supercritical_p").copied()
    }
}

/// Solver knobs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveConfig {
    /// Residual target relative to the constant's natural scale.
    pub residual_rel: f64,
    /// Upper cap of the expanding bracket for γ̃, as a multiple of N.
    pub tilde_cap_factor: f64,
    pub max_iter: usize,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            residual_rel: 1e-10,
            tilde_cap_factor: 4.0,
            max_iter: 200,
        }
    }
}

/// p* = k/(k - 2s) for the plane operators.
pub fn plane_threshold(k: usize, s: FractionalOrder) -> Result<f64> {
    let d = k as f64 - 2.0 * s.value();
    if d <= 0.0 {
        return Err(Error::InvalidParams(format!("k = {k} must exceed 2s")));
    }
    Ok(k as f64 / d)
}

fn threshold(p: f64) -> BTreeMap<String, f64> {
    BTreeMap::from([("supercritical_p".to_string(), p)])
}

/// Residual scale for γ̄: |c_k(2(1-s))| when k = 2, else |ĉ| + (k-1)|c⊥| at that point.
pub fn gamma_bar_scale(k: usize, constants: &NormalizationConstants) -> f64 {
    if k == 2 {
        c_k_at_critical(2, constants).abs()
    } else {
        c_hat_at_critical(constants).abs() + (k as f64 - 1.0) * c_perp_at_critical(constants).abs()
    }
}

/// Zero of c_k on (0, 1).
pub fn solve_gamma_bar(
    k: usize,
    s: FractionalOrder,
    constants: &NormalizationConstants,
    cfg: &QuadratureConfig,
    scfg: &SolveConfig,
) -> Result<ExponentReport> {
    if k < 2 {
        return Err(Error::InvalidParams(format!("γ̄ needs k >= 2, got {k}")));
    }
    let f = |g: f64| c_k_fun(g, k, s, constants, cfg).map(|c| c.value);
    let mut lo = 1e-3;
    while f(lo)? >= 0.0 {
        lo *= 0.125;
        if lo < 1e-14 {
            return Err(Error::BracketNotFound(format!("c_{k} not negative near 0")));
        }
    }
    let mut hi = 0.5f64.max(2.0 * lo);
    while f(hi)? <= 0.0 {
        hi = 1.0 - 0.25 * (1.0 - hi);
        if 1.0 - hi < 1e-10 {
            return Err(Error::BracketNotFound(format!("c_{k} not positive near 1")));
        }
    }
    let (root, _) = brent(f, lo, hi, 1e-15, scfg.max_iter)?;
    let tight = cfg.tightened(10.0);
    let residual = c_k_fun(root, k, s, constants, &tight)?.value.abs();
    let scale = gamma_bar_scale(k, constants);
    Ok(ExponentReport {
        kind: ExponentKind::GammaBar,
        k: Some(k),
        n: None,
        s: s.value(),
        root,
        bracket: (lo, hi),
        residual,
        residual_scale: scale,
        certified: residual <= scfg.residual_rel * scale,
        thresholds: threshold(1.0 + 2.0 * s.value() / root),
    })
}

/// Zero of c(γ) for I_N^-, bracketed by expansion up to `tilde_cap_factor`·N.
pub fn solve_gamma_tilde(
    n: usize,
    s: FractionalOrder,
    cfg: &QuadratureConfig,
    scfg: &SolveConfig,
) -> Result<ExponentReport> {
    let f = |g: f64| c_tilde_fun(g, n, s, cfg).map(|c| c.value);
    let cap = scfg.tilde_cap_factor * n as f64;
    let mut lo = 0.5;
    while f(lo)? >= 0.0 {
        lo *= 0.125;
        if lo < 1e-14 {
            return Err(Error::BracketNotFound(format!(
                "c(γ) not negative near 0 for N = {n}"
            )));
        }
    }
    let mut hi = 1.0f64.max(2.0 * lo);
    while f(hi)? <= 0.0 {
        lo = hi;
        hi *= 2.0;
        if hi > cap {
            return Err(Error::BracketNotFound(format!(
                "c(γ) still negative at the cap {cap}"
            )));
        }
    }
    let (root, _) = brent(f, lo, hi, 1e-15, scfg.max_iter)?;
    let tight = cfg.tightened(10.0);
    let residual = c_tilde_fun(root, n, s, &tight)?.value.abs();
    let scale = c_tilde_fun(0.5 * root, n, s, &tight)?.value.abs();
    Ok(ExponentReport {
        kind: ExponentKind::GammaTilde,
        k: None,
        n: Some(n),
        s: s.value(),
        root,
        bracket: (lo, hi),
        residual,
        residual_scale: scale,
        certified: residual <= scfg.residual_rel * scale,
        thresholds: threshold(1.0 + 2.0 * s.value() / root),
    })
}

/// β with F(β) = target, from F(β) = β^s F(1).
pub fn solve_beta_for(
    target: f64,
    s: FractionalOrder,
    constants: &NormalizationConstants,
    cfg: &QuadratureConfig,
) -> Result<(f64, f64)> {
    if !(target > 0.0) {
        return Err(Error::InvalidParams(format!(
            "target {target} must be positive"
        )));
    }
    let f1 = f_of_beta(1.0, s, constants, cfg)?.value;
    let beta = (target / f1).powf(1.0 / s.value());
    let residual = (f_of_beta(beta, s, constants, &cfg.tightened(10.0))?.value - target).abs();
    Ok((beta, residual))
}

/// β̄ with F(β̄) = 1/(2k).
pub fn solve_beta_bar(
    k: usize,
    s: FractionalOrder,
    constants: &NormalizationConstants,
    cfg: &QuadratureConfig,
    scfg: &SolveConfig,
) -> Result<ExponentReport> {
    if k == 0 {
        return Err(Error::InvalidParams("k must be at least 1".into()));
    }
    let target = 0.5 / k as f64;
    let (root, residual) = solve_beta_for(target, s, constants, cfg)?;
    Ok(ExponentReport {
        kind: ExponentKind::BetaBar,
        k: Some(k),
        n: None,
        s: s.value(),
        root,
        bracket: (root, root),
        residual,
        residual_scale: target,
        certified: residual <= scfg.residual_rel * target,
        thresholds: BTreeMap::new(),
    })
}
