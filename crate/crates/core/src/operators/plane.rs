use std::cell::Cell;
use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use super::directional::{directional_raw, line_growth};
use crate::error::{Error, Result};
use crate::profiles::{OriginBehavior, RadialProfile};
use crate::quad::gamma::{gamma, sphere_area};
use crate::quad::rules::adaptive_gk21;
use crate::quad::{
    integrate_angular_with, integrate_power_kernel, Abscissa, Feature, FractionalOrder, Growth,
    NormalizationConstants, Polar, QuadratureConfig, QuadratureResult,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlaneMode {
    /// k-plane through x: the k-dimensional fractional Laplacian of the radial extension.
    PlusRadialPlane,
    /// k-plane orthogonal to x.
    MinusOrthoPlane,
}

/// J_V u(x) on the extremal k-plane for u = g(|x|), |x| = r, in R^N.
#[allow(clippy::too_many_arguments)]
pub fn plane_j(
    p: &RadialProfile,
    r: f64,
    mode: PlaneMode,
    k: usize,
    n: usize,
    s: FractionalOrder,
    constants: &NormalizationConstants,
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult> {
    if k < 2 || k > n {
        return Err(Error::InvalidMode(format!(
            "plane operator needs 2 <= k <= N, got k = {k}, N = {n}"
        )));
    }
    if !(r > 0.0) {
        return Err(Error::InvalidParams(format!("radius {r} must be positive")));
    }
    match mode {
        PlaneMode::PlusRadialPlane => radial_plane(p, r, k, s, constants, cfg),
        PlaneMode::MinusOrthoPlane if k < n => ortho_plane(p, r, k, s, constants, cfg),
        PlaneMode::MinusOrthoPlane => sphere_average(p, r, k, s, constants, cfg),
    }
}

fn radial_plane(
    p: &RadialProfile,
    r: f64,
    k: usize,
    s: FractionalOrder,
    constants: &NormalizationConstants,
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult> {
    let mut features = Vec::new();
    if let OriginBehavior::Singular(e) = p.origin_behavior() {
        let ex = e - (k as f64 - 1.0);
        if ex >= 1.0 {
            return Err(Error::DivergentSingularity { at: r, exponent: e });
        }
        features.push(Feature::Singular {
            at: 1.0,
            exponent: ex,
        });
    }
    for &b in &p.breakpoints {
        for t in [(1.0 - b / r).abs(), 1.0 + b / r] {
            if t > 1e-12 && (t - 1.0).abs() > 1e-12 {
                features.push(Feature::Kink(t));
            }
        }
    }
    let breaks = p.breakpoints.clone();
    let theta_breaks = move |x: &Abscissa| {
        let rho = x.tau;
        let mut out = Vec::new();
        for &b in &breaks {
            let c = ((b / r).powi(2) - 1.0 - rho * rho) / (2.0 * rho);
            if c.abs() < 1.0 {
                out.push(c.acos());
                out.push((-c).acos());
            }
        }
        out
    };
    let g_r = p.eval(r);
    let h2 = |x: Abscissa, th: Polar| {
        let rho = x.tau;
        let d = x.minus(1.0);
        let sh = th.sin_half();
        let ch = th.cos_half();
        let minus = r * (d * d + 4.0 * rho * sh * sh).sqrt();
        let plus = r * (d * d + 4.0 * rho * ch * ch).sqrt();
        p.eval(plus) + p.eval(minus) - 2.0 * g_r
    };
    let lg = line_growth(p, r, cfg);
    let kf = k as f64;
    let w = PI.sqrt() * gamma((kf - 1.0) / 2.0) / gamma(kf / 2.0);
    let growth = Growth::power(lg.bound * w, lg.exponent);
    let raw = integrate_angular_with(h2, 2.0 * s.value(), k, &features, growth, theta_breaks, cfg)?;
    let pre = 0.5 * constants.c_ks(k) * sphere_area(k - 1) * r.powf(-2.0 * s.value());
    Ok(raw.scaled(pre))
}

fn ortho_plane(
    p: &RadialProfile,
    r: f64,
    k: usize,
    s: FractionalOrder,
    constants: &NormalizationConstants,
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult> {
    let features: Vec<Feature> = p
        .breakpoints
        .iter()
        .filter(|&&b| b > r)
        .map(|&b| Feature::Kink(((b / r).powi(2) - 1.0).sqrt()))
        .collect();
    let g_r = p.eval(r);
    let h = |x: Abscissa| p.eval(r * (1.0 + x.tau * x.tau).sqrt()) - g_r;
    let env = p.decay;
    let growth = if env.sigma < 0.0 {
        Growth::power(
            env.c * (1.0 + 2.0 * r).powf(-env.sigma) + g_r.abs(),
            -env.sigma,
        )
    } else {
        Growth::bounded(env.sup_beyond(r * cfg.tail_cut) + g_r.abs())
    };
    let raw = integrate_power_kernel(h, 2.0 * s.value(), &features, growth, cfg)?;
    let pre = constants.c_ks(k) * sphere_area(k) * r.powf(-2.0 * s.value());
    Ok(raw.scaled(pre))
}

// Δ^s u = C_{N,s}/(2C_s) ∫_{S^{N-1}} I_ω u dω, reduced to the polar angle.
fn sphere_average(
    p: &RadialProfile,
    r: f64,
    n: usize,
    s: FractionalOrder,
    constants: &NormalizationConstants,
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult> {
    let failure: Cell<Option<Error>> = Cell::new(None);
    let worst = Cell::new(0.0f64);
    let subdiv = Cell::new(0usize);
    let pw = (n - 2) as i32;
    let f = |th: f64| {
        let (c, sn) = (th.cos(), th.sin());
        match directional_raw(p, r, c, sn, s, cfg) {
            Ok(q) => {
                worst.set(worst.get().max(q.uncertainty()));
                subdiv.set(subdiv.get() + q.subdivisions_used);
                q.value * sn.powi(pw)
            }
            Err(e) => {
                failure.set(Some(e));
                0.0
            }
        }
    };
    let (v, e, ok) = adaptive_gk21(f, 0.0, FRAC_PI_2, &[], cfg.abs_tol, cfg.rel_tol * 10.0, 200);
    if let Some(err) = failure.take() {
        return Err(err);
    }
    if !ok && !cfg.allow_unconverged {
        return Err(Error::NonConvergent {
            value: v,
            error_estimate: e,
            subdivisions: subdiv.get(),
        });
    }
    let raw = QuadratureResult {
        value: v,
        error_estimate: e + FRAC_PI_2 * worst.get(),
        subdivisions_used: subdiv.get(),
        tail_bound: 0.0,
        converged: ok,
    };
    let pre = constants.c_ks(n) * sphere_area(n - 1) * r.powf(-2.0 * s.value());
    Ok(raw.scaled(pre))
}
