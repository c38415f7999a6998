use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::gamma::gamma;
use crate::quad::{
    integrate_power_kernel, Abscissa, Feature, FractionalOrder, Growth, NormalizationConstants,
    QuadratureConfig, QuadratureResult,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Definition {
    CHat,
    CPerp,
    CK,
    CKPrime,
    CKSecond,
    CPowerGamma,
    CNTilde,
    FOfS,
    FOfBeta,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ConstantParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    pub s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantValue {
    pub value: f64,
    pub error_estimate: f64,
    pub definition: Definition,
    pub params: ConstantParams,
    /// The quadrature met its tolerance.
    pub certified: bool,
}

impl ConstantValue {
    fn from_quad(q: QuadratureResult, definition: Definition, params: ConstantParams) -> Self {
        ConstantValue {
            value: q.value,
            error_estimate: q.uncertainty(),
            definition,
            params,
            certified: q.converged,
        }
    }
}

fn check_gamma_unit(g: f64) -> Result<()> {
    if (0.0..1.0).contains(&g) {
        Ok(())
    } else {
        Err(Error::InvalidExponent(format!("γ = {g} outside [0, 1)")))
    }
}

// |ln x|^n ≤ (n/(eε))^n x^ε with ε = s, and x ≤ 2τ in the tail.
fn log_growth(n: u32, s: f64, terms: f64) -> Growth {
    if n == 0 {
        return Growth::bounded(terms);
    }
    let c = (n as f64 / (std::f64::consts::E * s)).powi(n as i32);
    Growth::power(terms * c * 2f64.powf(s), s)
}

// n-th γ-derivative of ∫[|1+τ|^-γ + |1-τ|^-γ - 2]τ^-(1+2s) dτ.
fn c_hat_raw(g: f64, n: u32, s: f64, cfg: &QuadratureConfig) -> Result<QuadratureResult> {
    // ln b for b = 1 + τ and b = |1 - τ|, accurate near τ = 0.
    let term = |lb: f64| match n {
        0 => (-g * lb).exp_m1(),
        1 => -lb * (-g * lb).exp(),
        _ => lb * lb * (-g * lb).exp(),
    };
    let h = |x: Abscissa| {
        let t = x.tau;
        let lm = if t < 0.5 {
            (-t).ln_1p()
        } else {
            x.minus(1.0).abs().ln()
        };
        term(t.ln_1p()) + term(lm)
    };
    let e = if n == 0 { g } else { 0.5 * (1.0 + g) };
    let feats = [Feature::Singular {
        at: 1.0,
        exponent: e,
    }];
    integrate_power_kernel(h, 2.0 * s, &feats, log_growth(n, s, 2.0), cfg)
}

// n-th γ-derivative of 2∫[(1+τ²)^-γ/2 - 1]τ^-(1+2s) dτ.
fn c_perp_raw(g: f64, n: u32, s: f64, cfg: &QuadratureConfig) -> Result<QuadratureResult> {
    let h = |x: Abscissa| {
        let lb = 0.5 * (x.tau * x.tau).ln_1p();
        2.0 * match n {
            0 => (-g * lb).exp_m1(),
            1 => -lb * (-g * lb).exp(),
            _ => lb * lb * (-g * lb).exp(),
        }
    };
    integrate_power_kernel(h, 2.0 * s, &[], log_growth(n, s, 2.0), cfg)
}

fn params_gk(g: f64, k: Option<usize>, s: f64) -> ConstantParams {
    ConstantParams {
        gamma: Some(g),
        k,
        s,
        ..Default::default()
    }
}

/// ĉ(γ) = C_s ∫[|1+τ|^-γ + |1-τ|^-γ - 2] τ^-(1+2s) dτ, positive on (0, 1).
pub fn c_hat(
    g: f64,
    s: FractionalOrder,
    constants: &NormalizationConstants,
    cfg: &QuadratureConfig,
) -> Result<ConstantValue> {
    check_gamma_unit(g)?;
    let q = c_hat_raw(g, 0, s.value(), cfg)?.scaled(constants.c_1s);
    Ok(ConstantValue::from_quad(
        q,
        Definition::CHat,
        params_gk(g, None, s.value()),
    ))
}

/// c⊥(γ) = 2C_s ∫[(1+τ²)^-γ/2 - 1] τ^-(1+2s) dτ, negative for γ > 0.
pub fn c_perp(
    g: f64,
    s: FractionalOrder,
    constants: &NormalizationConstants,
    cfg: &QuadratureConfig,
) -> Result<ConstantValue> {
    if !(g >= 0.0 && g.is_finite()) {
        return Err(Error::InvalidExponent(format!(
            "γ = {g} must be nonnegative"
        )));
    }
    let q = c_perp_raw(g, 0, s.value(), cfg)?.scaled(constants.c_1s);
    Ok(ConstantValue::from_quad(
        q,
        Definition::CPerp,
        params_gk(g, None, s.value()),
    ))
}

fn c_k_order(
    g: f64,
    k: usize,
    n: u32,
    s: FractionalOrder,
    constants: &NormalizationConstants,
    cfg: &QuadratureConfig,
) -> Result<ConstantValue> {
    check_gamma_unit(g)?;
    if k == 0 {
        return Err(Error::InvalidParams("k must be at least 1".into()));
    }
    let hat = c_hat_raw(g, n, s.value(), cfg)?;
    let q = if k > 1 {
        hat.plus(c_perp_raw(g, n, s.value(), cfg)?.scaled((k - 1) as f64))
    } else {
        hat
    };
    let def = [Definition::CK, Definition::CKPrime, Definition::CKSecond][n as usize];
    Ok(ConstantValue::from_quad(
        q.scaled(constants.c_1s),
        def,
        params_gk(g, Some(k), s.value()),
    ))
}

/// c_k(γ) = ĉ(γ) + (k-1)c⊥(γ).
pub fn c_k_fun(
    g: f64,
    k: usize,
    s: FractionalOrder,
    constants: &NormalizationConstants,
    cfg: &QuadratureConfig,
) -> Result<ConstantValue> {
    c_k_order(g, k, 0, s, constants, cfg)
}

/// c_k'(γ) from the ln-weighted integrands.
pub fn c_k_prime(
    g: f64,
    k: usize,
    s: FractionalOrder,
    constants: &NormalizationConstants,
    cfg: &QuadratureConfig,
) -> Result<ConstantValue> {
    c_k_order(g, k, 1, s, constants, cfg)
}

/// c_k''(γ) from the ln²-weighted integrands; positive.
pub fn c_k_second(
    g: f64,
    k: usize,
    s: FractionalOrder,
    constants: &NormalizationConstants,
    cfg: &QuadratureConfig,
) -> Result<ConstantValue> {
    c_k_order(g, k, 2, s, constants, cfg)
}

/// ĉ(2(1-s)) = C_s/(s(2s-1)).
pub fn c_hat_at_critical(constants: &NormalizationConstants) -> f64 {
    let s = constants.s;
    constants.c_1s / (s * (2.0 * s - 1.0))
}

/// c⊥(2(1-s)) = -C_s/s.
pub fn c_perp_at_critical(constants: &NormalizationConstants) -> f64 {
    -constants.c_1s / constants.s
}

/// c_k(2(1-s)) from the two closed forms.
pub fn c_k_at_critical(k: usize, constants: &NormalizationConstants) -> f64 {
    c_hat_at_critical(constants) + (k as f64 - 1.0) * c_perp_at_critical(constants)
}

/// c_γ with I_x̂ |x|^γ = c_γ |x|^(γ-2s), γ in (0, 2s).
pub fn c_power(
    g: f64,
    s: FractionalOrder,
    constants: &NormalizationConstants,
    cfg: &QuadratureConfig,
) -> Result<ConstantValue> {
    let sv = s.value();
    if !(g > 0.0 && g < 2.0 * sv) {
        return Err(Error::InvalidExponent(format!(
            "γ = {g} outside (0, {})",
            2.0 * sv
        )));
    }
    let h = |x: Abscissa| {
        let t = x.tau;
        let lm = if t < 0.5 {
            (-t).ln_1p()
        } else {
            x.minus(1.0).abs().ln()
        };
        (g * t.ln_1p()).exp_m1() + (g * lm).exp_m1()
    };
    let feats = [Feature::Singular {
        at: 1.0,
        exponent: -g,
    }];
    let growth = Growth::power(2f64.powf(g) + 3.0, g);
    let q = integrate_power_kernel(h, 2.0 * sv, &feats, growth, cfg)?.scaled(constants.c_1s);
    Ok(ConstantValue::from_quad(
        q,
        Definition::CPowerGamma,
        params_gk(g, None, sv),
    ))
}

/// c(γ) = ∫[(1+τ²+2τ/√N)^-γ/2 + (1+τ²-2τ/√N)^-γ/2 - 2] τ^-(1+2s) dτ (no C_s factor).
pub fn c_tilde_fun(
    g: f64,
    n: usize,
    s: FractionalOrder,
    cfg: &QuadratureConfig,
) -> Result<ConstantValue> {
    if n < 2 {
        return Err(Error::InvalidParams(format!("N = {n} must be at least 2")));
    }
    if !(g >= 0.0 && g.is_finite()) {
        return Err(Error::InvalidExponent(format!(
            "γ = {g} must be nonnegative"
        )));
    }
    let c = 1.0 / (n as f64).sqrt();
    let h = |x: Abscissa| {
        let t = x.tau;
        let a = (-0.5 * g * (t * (t + 2.0 * c)).ln_1p()).exp_m1();
        let b = (-0.5 * g * (t * (t - 2.0 * c)).ln_1p()).exp_m1();
        a + b
    };
    let q = integrate_power_kernel(h, 2.0 * s.value(), &[], Growth::bounded(2.0), cfg)?;
    let params = ConstantParams {
        gamma: Some(g),
        n: Some(n),
        s: s.value(),
        ..Default::default()
    };
    Ok(ConstantValue::from_quad(q, Definition::CNTilde, params))
}

/// F(σ) = ∫ ln|1-τ²| τ^-(1+σ) dτ for σ in [1/2, 1].
pub fn f_of_s(sigma: f64, cfg: &QuadratureConfig) -> Result<ConstantValue> {
    if !(0.5..=1.0).contains(&sigma) {
        return Err(Error::InvalidParams(format!(
            "F(s) needs s in [1/2, 1], got {sigma}"
        )));
    }
    let h = |x: Abscissa| {
        let t = x.tau;
        if t < 0.5 {
            (-t * t).ln_1p()
        } else {
            t.ln_1p() + x.minus(1.0).abs().ln()
        }
    };
    let feats = [Feature::Singular {
        at: 1.0,
        exponent: 0.5,
    }];
    let growth = Growth::power(4.0 / (std::f64::consts::E * sigma), 0.5 * sigma);
    let q = integrate_power_kernel(h, sigma, &feats, growth, cfg)?;
    let params = ConstantParams {
        s: sigma,
        ..Default::default()
    };
    Ok(ConstantValue::from_quad(q, Definition::FOfS, params))
}

/// c₂'(0⁺) = -(C_s/2) F(s).
pub fn c2_prime_at_zero(
    s: FractionalOrder,
    constants: &NormalizationConstants,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    Ok(-0.5 * constants.c_1s * f_of_s(s.value(), cfg)?.value)
}

/// F(β) = 2C_s ∫(1 - e^{-βτ²}) τ^-(1+2s) dτ.
pub fn f_of_beta(
    beta: f64,
    s: FractionalOrder,
    constants: &NormalizationConstants,
    cfg: &QuadratureConfig,
) -> Result<ConstantValue> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::InvalidParams(format!("β = {beta} must be positive")));
    }
    let h = |x: Abscissa| -2.0 * (-beta * x.tau * x.tau).exp_m1();
    // Push the tail out past the Gaussian scale.
    let mut c = *cfg;
    c.tail_cut = cfg.tail_cut.max(8.0 / beta.sqrt());
    c.near_zero_cut = cfg.near_zero_cut.min(0.5 / beta.sqrt());
    let q = integrate_power_kernel(h, 2.0 * s.value(), &[], Growth::bounded(2.0), &c)?
        .scaled(constants.c_1s);
    let params = ConstantParams {
        beta: Some(beta),
        s: s.value(),
        ..Default::default()
    };
    Ok(ConstantValue::from_quad(q, Definition::FOfBeta, params))
}

/// F(β) = C_s β^s Γ(1-s)/s.
pub fn f_of_beta_closed(beta: f64, constants: &NormalizationConstants) -> f64 {
    let s = constants.s;
    constants.c_1s * beta.powf(s) * gamma(1.0 - s) / s
}
