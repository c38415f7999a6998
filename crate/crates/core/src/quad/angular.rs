use std::cell::Cell;
use std::f64::consts::PI;

use super::engine::{integrate_power_kernel, Abscissa, Feature, Growth};
use super::rules::adaptive_gk21;
use super::{FractionalOrder, QuadratureConfig, QuadratureResult};
use crate::error::{Error, Result};

// θ = π·u²(3 - 2u) grades both poles of the half circle.
fn theta_of(u: f64) -> f64 {
    PI * u * u * (3.0 - 2.0 * u)
}

fn dtheta(u: f64) -> f64 {
    6.0 * PI * u * (1.0 - u)
}

// π - θ(u), computed without cancellation near u = 1.
fn theta_c_of(u: f64) -> f64 {
    let w = 1.0 - u;
    PI * w * w * (1.0 + 2.0 * u)
}

/// Polar angle on (0, π) together with its exact complement π - θ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Polar {
    pub theta: f64,
    pub complement: f64,
}

impl Polar {
    pub fn sin(&self) -> f64 {
        self.theta.min(self.complement).sin()
    }

    /// sin(θ/2)
    pub fn sin_half(&self) -> f64 {
        (0.5 * self.theta).sin()
    }

    /// cos(θ/2) = sin((π - θ)/2)
    pub fn cos_half(&self) -> f64 {
        (0.5 * self.complement).sin()
    }
}

fn u_of(theta: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..64 {
        let mid = 0.5 * (lo + hi);
        if theta_of(mid) < theta {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// ∬ h2(ρ, θ) sin^(k-2)θ dθ ρ^-(1+2s) dρ over (0, ∞) × (0, π).
pub fn integrate_angular<H: Fn(f64, f64) -> f64>(
    h2: H,
    s: FractionalOrder,
    k: usize,
    features: &[Feature],
    growth: Growth,
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult> {
    integrate_angular_with(
        |x: Abscissa, th: Polar| h2(x.tau, th.theta),
        2.0 * s.value(),
        k,
        features,
        growth,
        |_| Vec::new(),
        cfg,
    )
}

/// General form: kernel exponent `sigma`, exact radial offsets, and
/// ρ-dependent angular breakpoints.
pub fn integrate_angular_with<H, B>(
    h2: H,
    sigma: f64,
    k: usize,
    features: &[Feature],
    growth: Growth,
    theta_breaks: B,
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult>
where
    H: Fn(Abscissa, Polar) -> f64,
    B: Fn(&Abscissa) -> Vec<f64>,
{
    if k < 2 {
        return Err(Error::InvalidParams(format!(
            "angular reduction needs k >= 2, got {k}"
        )));
    }
    let pw = (k - 2) as i32;
    let abs_in = cfg.abs_tol * 1e-3;
    let rel_in = (cfg.rel_tol * 1e-2).min(1e-12);
    let inner_failed = Cell::new(false);
    let inner = |x: Abscissa| {
        let breaks: Vec<f64> = theta_breaks(&x)
            .into_iter()
            .filter(|&t| t > 0.0 && t < PI)
            .map(u_of)
            .collect();
        let f = |u: f64| {
            let th = Polar {
                theta: theta_of(u),
                complement: theta_c_of(u),
            };
            let w = dtheta(u) * th.sin().powi(pw);
            if w == 0.0 {
                return 0.0;
            }
            let y = h2(x, th) * w;
            if y.is_finite() {
                y
            } else {
                0.0
            }
        };
        let (v, _, ok) = adaptive_gk21(f, 0.0, 1.0, &breaks, abs_in, rel_in, 2000);
        if !ok {
            inner_failed.set(true);
        }
        v
    };
    let mut res = integrate_power_kernel(inner, sigma, features, growth, cfg)?;
    if inner_failed.get() {
        res.converged = false;
        if !cfg.allow_unconverged {
            return Err(Error::NonConvergent {
                value: res.value,
                error_estimate: res.error_estimate,
                subdivisions: res.subdivisions_used,
            });
        }
    }
    Ok(res)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theta_map_roundtrip() {
        for &t in &[1e-6, 0.3, 1.0, 2.0, 3.1] {
            assert!((theta_of(u_of(t)) - t).abs() < 1e-12);
            let u = u_of(t);
            assert!((theta_c_of(u) - (PI - theta_of(u))).abs() < 1e-14);
        }
    }
}
