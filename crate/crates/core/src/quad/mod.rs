//! Adaptive quadrature for the kernels τ^-(1+2s) on (0, ∞).

mod angular;
mod engine;
pub mod gamma;
pub mod rules;

use serde::{Deserialize, Serialize};

pub use angular::{integrate_angular, integrate_angular_with, Polar};
pub use engine::{
    integrate_power_kernel, integrate_power_kernel_with_curvature, Abscissa, Feature, Growth,
};

use crate::error::{Error, Result};
use gamma::{fractional_laplacian_constant, sphere_area};

/// Fractional order s in (1/2, 1).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct FractionalOrder(f64);

impl FractionalOrder {
    pub fn new(s: f64) -> Result<Self> {
        if s > 0.5 && s < 1.0 {
            Ok(FractionalOrder(s))
        } else {
            Err(Error::InvalidOrder(s))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for FractionalOrder {
    type Error = Error;
    fn try_from(s: f64) -> Result<Self> {
        FractionalOrder::new(s)
    }
}

impl From<FractionalOrder> for f64 {
    fn from(s: FractionalOrder) -> f64 {
        s.0
    }
}

/// C_s for one-dimensional operators and C_{k,s} for k-plane operators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalizationConstants {
    pub s: f64,
    pub c_1s: f64,
}

impl NormalizationConstants {
    pub fn new(s: FractionalOrder) -> Self {
        NormalizationConstants {
            s: s.value(),
            c_1s: fractional_laplacian_constant(1, s.value()),
        }
    }

    pub fn c_ks(&self, k: usize) -> f64 {
        fractional_laplacian_constant(k, self.s)
    }

    /// C_s / (2(1-s)), which tends to 1 as s → 1.
    pub fn one_dim_ratio(&self) -> f64 {
        self.c_1s / (2.0 * (1.0 - self.s))
    }

    /// C_{k,s}|S^{k-1}| / (4k(1-s)), which tends to 1 as s → 1.
    pub fn plane_ratio(&self, k: usize) -> f64 {
        self.c_ks(k) * sphere_area(k) / (4.0 * k as f64 * (1.0 - self.s))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    pub tail_cut: f64,
    pub near_zero_cut: f64,
    /// Return an unconverged result instead of an error.
    #[serde(default)]
    pub allow_unconverged: bool,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_subdivisions: 4000,
            tail_cut: 8.0,
            near_zero_cut: 0.1,
            allow_unconverged: false,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.abs_tol > 0.0
            && self.rel_tol > 0.0
            && self.max_subdivisions >= 1
            && self.near_zero_cut > 0.0
            && self.tail_cut > self.near_zero_cut
            && self.tail_cut.is_finite();
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParams(format!(
                "bad quadrature config {self:?}"
            )))
        }
    }

    /// Both tolerances divided by `factor`, with a proportionally larger budget.
    pub fn tightened(&self, factor: f64) -> Self {
        let extra = factor.max(1.0).log2().ceil() as usize + 1;
        QuadratureConfig {
            abs_tol: self.abs_tol / factor,
            rel_tol: self.rel_tol / factor,
            max_subdivisions: self.max_subdivisions * extra,
            ..*self
        }
    }

    pub fn with_tolerance(&self, abs_tol: f64, rel_tol: f64) -> Self {
        QuadratureConfig {
            abs_tol,
            rel_tol,
            ..*self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub error_estimate: f64,
    pub subdivisions_used: usize,
    pub tail_bound: f64,
    pub converged: bool,
}

impl QuadratureResult {
    pub fn exact(value: f64) -> Self {
        QuadratureResult {
            value,
            error_estimate: 0.0,
            subdivisions_used: 0,
            tail_bound: 0.0,
            converged: true,
        }
    }

    pub fn scaled(self, c: f64) -> Self {
        QuadratureResult {
            value: c * self.value,
            error_estimate: c.abs() * self.error_estimate,
            tail_bound: c.abs() * self.tail_bound,
            ..self
        }
    }

    pub fn plus(self, o: QuadratureResult) -> Self {
        QuadratureResult {
            value: self.value + o.value,
            error_estimate: self.error_estimate + o.error_estimate,
            subdivisions_used: self.subdivisions_used + o.subdivisions_used,
            tail_bound: self.tail_bound + o.tail_bound,
            converged: self.converged && o.converged,
        }
    }

    /// Total certified uncertainty.
    pub fn uncertainty(&self) -> f64 {
        self.error_estimate + self.tail_bound
    }
}

/// ∫₀^∞ h(τ) τ^-(1+2s) dτ for a second difference h vanishing like τ² at 0.
pub fn integrate_second_difference<F: Fn(f64) -> f64>(
    h: F,
    s: FractionalOrder,
    features: &[Feature],
    growth: Growth,
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult> {
    integrate_power_kernel(
        |x: Abscissa| h(x.tau),
        2.0 * s.value(),
        features,
        growth,
        cfg,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: f64) -> FractionalOrder {
        FractionalOrder::new(v).unwrap()
    }

    #[test]
    fn order_range() {
        assert!(FractionalOrder::new(0.5).is_err());
        assert!(FractionalOrder::new(1.0).is_err());
        assert!(FractionalOrder::new(0.75).is_ok());
    }

    #[test]
    fn zero_integrand() {
        let r = integrate_second_difference(
            |_| 0.0,
            s(0.75),
            &[],
            Growth::bounded(0.0),
            &QuadratureConfig::default(),
        )
        .unwrap();
        assert_eq!(r.value, 0.0);
        assert!(r.converged);
    }

    #[test]
    fn piecewise_power() {
        let h = |t: f64| if t <= 1.0 { t * t } else { 1.0 };
        let r = integrate_second_difference(
            h,
            s(0.75),
            &[Feature::Kink(1.0)],
            Growth::bounded(1.0),
            &QuadratureConfig::default(),
        )
        .unwrap();
        assert!((r.value - 8.0 / 3.0).abs() < 1e-11, "{r:?}");
    }

    #[test]
    fn divergence_errors() {
        let cfg = QuadratureConfig::default();
        let e = integrate_second_difference(|t| t, s(0.75), &[], Growth::power(1.0, 1.5), &cfg);
        assert!(matches!(e, Err(Error::DivergentTail { .. })));
        let e = integrate_second_difference(
            |t| t,
            s(0.75),
            &[Feature::Singular {
                at: 1.0,
                exponent: 1.2,
            }],
            Growth::bounded(1.0),
            &cfg,
        );
        assert!(matches!(e, Err(Error::DivergentSingularity { .. })));
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let cfg = QuadratureConfig {
            max_subdivisions: 1,
            abs_tol: 1e-15,
            rel_tol: 1e-15,
            ..Default::default()
        };
        let e = integrate_second_difference(
            |t| (t * 40.0).sin().powi(2),
            s(0.75),
            &[],
            Growth::bounded(1.0),
            &cfg,
        );
        assert!(matches!(e, Err(Error::NonConvergent { .. })));
    }

    #[test]
    fn interior_singularity_with_exact_offset() {
        // ∫ [|1+τ|^-γ + |1-τ|^-γ - 2] τ^-(1+2s): closed form at γ = 2(1-s) is 1/(s(2s-1)).
        let sv = 0.75;
        let g = 2.0 * (1.0 - sv);
        let h = |x: Abscissa| (1.0 + x.tau).powf(-g) + x.minus(1.0).abs().powf(-g) - 2.0;
        let r = integrate_power_kernel(
            h,
            2.0 * sv,
            &[Feature::Singular {
                at: 1.0,
                exponent: g,
            }],
            Growth::bounded(2.0),
            &QuadratureConfig::default(),
        )
        .unwrap();
        let exact = 1.0 / (sv * (2.0 * sv - 1.0));
        assert!(
            (r.value - exact).abs() < 1e-9 * exact,
            "{} vs {}",
            r.value,
            exact
        );
    }

    #[test]
    fn separable_angular() {
        let h2 = |rho: f64, _th: f64| if rho <= 1.0 { rho * rho } else { 0.0 };
        let r = integrate_angular(
            h2,
            s(0.75),
            3,
            &[Feature::Kink(1.0)],
            Growth::bounded(0.0),
            &QuadratureConfig::default(),
        )
        .unwrap();
        // 2 · ∫₀¹ ρ^-1/2 dρ
        assert!((r.value - 4.0).abs() < 1e-10, "{r:?}");
    }

    #[test]
    fn plane_ratio_trend() {
        let c = NormalizationConstants::new(s(0.99));
        assert!((c.one_dim_ratio() - 1.0).abs() < 0.05);
        for k in 1..=4 {
            assert!((c.plane_ratio(k) - 1.0).abs() < 0.05, "k = {k}");
        }
    }
}
