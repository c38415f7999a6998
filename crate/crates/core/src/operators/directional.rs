use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profiles::{OriginBehavior, RadialProfile};
use crate::quad::rules::GaussJacobi;
use crate::quad::{
    integrate_power_kernel, integrate_power_kernel_with_curvature, Abscissa, Feature,
    FractionalOrder, Growth, NormalizationConstants, QuadratureConfig, QuadratureResult,
};

/// Map any angle to [0, π/2] using I_ξ = I_{-ξ} and the reflection θ ↦ π - θ.
pub fn reduce_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(PI);
    if t > FRAC_PI_2 {
        PI - t
    } else {
        t
    }
}

/// Tail bound for second differences of g along a line at distance r from the origin.
pub(crate) fn line_growth(p: &RadialProfile, r: f64, cfg: &QuadratureConfig) -> Growth {
    let g_r = p.eval(r).abs();
    let env = p.decay;
    if env.sigma < 0.0 {
        let e = -env.sigma;
        Growth::power(2.0 * env.c * (1.0 + 2.0 * r).powf(e) + 2.0 * g_r, e)
    } else {
        let t0 = r * (cfg.tail_cut - 1.0).max(0.0);
        Growth::bounded(2.0 * env.sup_beyond(t0) + 2.0 * g_r)
    }
}

/// Positive roots of τ² ± 2cτ + 1 - (b/r)² = 0, where a line crosses radius b.
pub(crate) fn crossing_points(b: f64, r: f64, c: f64) -> Vec<f64> {
    let disc = c * c - 1.0 + (b / r).powi(2);
    if disc < 0.0 {
        return Vec::new();
    }
    let q = disc.sqrt();
    [-c - q, -c + q, c - q, c + q]
        .into_iter()
        .filter(|&t| t > 1e-12)
        .collect()
}

/// ∫₀^∞ [g(r|x̂+τξ|) + g(r|x̂-τξ|) - 2g(r)] τ^-(1+2s) dτ for cos∠(ξ, x̂) = c.
///
/// `c` in [0, 1]; `sn` is the matching sine.
pub(crate) fn directional_raw(
    p: &RadialProfile,
    r: f64,
    c: f64,
    sn: f64,
    s: FractionalOrder,
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult> {
    if !(r > 0.0) {
        return Err(Error::InvalidParams(format!("radius {r} must be positive")));
    }
    let mut features = Vec::new();
    let on_axis = sn == 0.0;
    match p.origin_behavior() {
        OriginBehavior::Singular(e) if on_axis => {
            if e >= 1.0 {
                return Err(Error::DivergentSingularity { at: r, exponent: e });
            }
            features.push(Feature::Singular {
                at: 1.0,
                exponent: e,
            });
        }
        // The line passes within r·sn of the origin; grade only when that is close.
        OriginBehavior::Singular(e) if c > 0.0 && sn < 0.5 => {
            features.push(Feature::Singular {
                at: c,
                exponent: e.min(0.9),
            });
        }
        _ => {}
    }
    for &b in &p.breakpoints {
        for t in crossing_points(b, r, c) {
            features.push(Feature::Kink(t));
        }
    }
    let g_r = p.eval(r);
    let h = |x: Abscissa| {
        let t = x.tau;
        let plus = r * ((t + c).powi(2) + sn * sn).sqrt();
        let minus = if on_axis {
            r * x.minus(1.0).abs()
        } else {
            r * (x.minus(c).powi(2) + sn * sn).sqrt()
        };
        p.eval(plus) + p.eval(minus) - 2.0 * g_r
    };
    let sigma = 2.0 * s.value();
    let growth = line_growth(p, r, cfg);
    if !p.has_analytic_derivatives() {
        return integrate_power_kernel(h, sigma, &features, growth, cfg);
    }
    // f''(t) for f(t) = g(r|x̂ + tξ|), with a = t + c the component along ξ.
    let second = |a: f64| {
        let rho2 = a * a + sn * sn;
        let rho = rho2.sqrt();
        r * r * p.d2(r * rho) * a * a / rho2 + r * p.d1(r * rho) * sn * sn / (rho2 * rho)
    };
    // h(τ)/τ² = ∫₀¹ (1 - w)[f''(τw) + f''(-τw)] dw.
    let curvature = |tau: f64| {
        legendre()
            .nodes
            .iter()
            .zip(&legendre().weights)
            .map(|(&w, &wt)| wt * (1.0 - w) * (second(tau * w + c) + second(tau * w - c)))
            .sum::<f64>()
    };
    integrate_power_kernel_with_curvature(h, curvature, sigma, &features, growth, cfg)
}

fn legendre() -> &'static GaussJacobi {
    static RULE: OnceLock<GaussJacobi> = OnceLock::new();
    RULE.get_or_init(|| GaussJacobi::new(12, 0.0))
}

/// I_ξ u(x) for u = g(|x|), |x| = r, and ∠(ξ, x) = θ.
pub fn directional(
    p: &RadialProfile,
    r: f64,
    theta: f64,
    s: FractionalOrder,
    constants: &NormalizationConstants,
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult> {
    let th = reduce_angle(theta);
    let (c, sn) = if th == 0.0 {
        (1.0, 0.0)
    } else if th == FRAC_PI_2 {
        (0.0, 1.0)
    } else {
        (th.cos(), th.sin())
    };
    directional_cos(p, r, c, sn, s, constants, cfg)
}

/// Same as [`directional`], parametrised by (cos θ, sin θ).
pub fn directional_cos(
    p: &RadialProfile,
    r: f64,
    c: f64,
    sn: f64,
    s: FractionalOrder,
    constants: &NormalizationConstants,
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult> {
    let raw = directional_raw(p, r, c.abs(), sn.abs(), s, cfg)?;
    Ok(raw.scaled(constants.c_1s * r.powf(-2.0 * s.value())))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityReport {
    pub thetas: Vec<f64>,
    pub values: Vec<f64>,
    /// Largest increase between consecutive samples, relative to max |value|.
    pub worst_violation: f64,
    pub nonincreasing: bool,
}

/// Samples θ ↦ I_ξ u on [0, π/2] and measures departures from monotone decrease.
pub fn angular_profile_monotonicity(
    p: &RadialProfile,
    r: f64,
    s: FractionalOrder,
    constants: &NormalizationConstants,
    grid: usize,
    tol: f64,
    cfg: &QuadratureConfig,
) -> Result<MonotonicityReport> {
    let n = grid.max(2);
    let thetas: Vec<f64> = (0..n)
        .map(|i| FRAC_PI_2 * i as f64 / (n - 1) as f64)
        .collect();
    let values = thetas
        .iter()
        .map(|&t| directional(p, r, t, s, constants, cfg).map(|q| q.value))
        .collect::<Result<Vec<f64>>>()?;
    let worst_violation = increase(&values);
    Ok(MonotonicityReport {
        thetas,
        values,
        worst_violation,
        nonincreasing: worst_violation <= tol,
    })
}

fn increase(values: &[f64]) -> f64 {
    let scale = values
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()))
        .max(f64::MIN_POSITIVE);
    values
        .windows(2)
        .map(|w| (w[1] - w[0]).max(0.0) / scale)
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoDirectionReport {
    pub phis: Vec<f64>,
    pub values: Vec<f64>,
    pub worst_increase: f64,
    pub worst_asymmetry: f64,
    pub pass: bool,
}

/// I_{η₁(φ)} + I_{η₂(φ)} in a plane V whose angle with x is `tilt`.
pub fn two_direction_sum(
    p: &RadialProfile,
    r: f64,
    tilt: f64,
    phi: f64,
    s: FractionalOrder,
    constants: &NormalizationConstants,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let ct = tilt.cos();
    let one = |c: f64| {
        let c = c.abs().min(1.0);
        let sn = ((1.0 - c) * (1.0 + c)).sqrt();
        directional_cos(p, r, c, sn, s, constants, cfg).map(|q| q.value)
    };
    Ok(one(phi.cos() * ct)? + one(phi.sin() * ct)?)
}

/// Samples the two-direction sum on [0, π/4] and its mirror on [π/4, π/2].
pub fn two_direction_report(
    p: &RadialProfile,
    r: f64,
    tilt: f64,
    s: FractionalOrder,
    constants: &NormalizationConstants,
    grid: usize,
    tol: f64,
    cfg: &QuadratureConfig,
) -> Result<TwoDirectionReport> {
    let n = grid.max(2);
    let quarter = 0.5 * FRAC_PI_2;
    let phis: Vec<f64> = (0..n)
        .map(|i| quarter * i as f64 / (n - 1) as f64)
        .collect();
    let mut values = Vec::with_capacity(n);
    let mut asym = 0.0f64;
    for &ph in &phis {
        let a = two_direction_sum(p, r, tilt, ph, s, constants, cfg)?;
        let b = two_direction_sum(p, r, tilt, FRAC_PI_2 - ph, s, constants, cfg)?;
        asym = asym.max((a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE));
        values.push(a);
    }
    let worst_increase = increase(&values);
    Ok(TwoDirectionReport {
        phis,
        values,
        worst_increase,
        worst_asymmetry: asym,
        pass: worst_increase <= tol && asym <= tol,
    })
}
