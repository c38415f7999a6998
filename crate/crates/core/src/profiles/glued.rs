use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::gamma::pochhammer;

/// C² radial profile: a power (or log-power) outside `match_radius`, and
/// inside a cubic in ρ = t² whose second derivative is the tangent line of
/// the outer second derivative at ρ₀ = match_radius².
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GluedProfile {
    pub gamma: f64,
    pub match_radius: f64,
    pub log_factor: bool,
    /// Inner coefficients of (ρ - ρ₀)^j, j = 0..3.
    pub inner_poly: [f64; 4],
}

/// Smallest admissible squared match radius for the log variant.
pub fn log_glue_threshold(gamma: f64) -> f64 {
    (2.0 / gamma + 2.0 / (gamma + 2.0) + 2.0 / (gamma + 4.0) + 2.0 / (gamma + 6.0)).exp()
}

// n-th derivative of the outer function G at ρ (in the ρ = t² variable).
fn outer_derivative(gamma: f64, log_factor: bool, rho: f64, n: usize) -> f64 {
    let a = 0.5 * gamma;
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    let base = sign * pochhammer(a, n) * rho.powf(-a - n as f64);
    if !log_factor {
        return base;
    }
    if a == 0.0 {
        // ½ ln ρ
        return match n {
            0 => 0.5 * rho.ln(),
            _ => 0.5 * sign * -pochhammer(1.0, n - 1) * rho.powi(-(n as i32)),
        };
    }
    let harmonic: f64 = (0..n).map(|j| 1.0 / (a + j as f64)).sum();
    0.5 * base * (rho.ln() - harmonic)
}

pub fn build_glued_profile(
    gamma: f64,
    match_radius: f64,
    log_factor: bool,
) -> Result<GluedProfile> {
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidParams(format!(
            "glued exponent {gamma} must be >= 0"
        )));
    }
    if !(match_radius > 0.0 && match_radius.is_finite()) {
        return Err(Error::InvalidMatchRadius(format!(
            "{match_radius} is not positive"
        )));
    }
    if log_factor {
        if gamma == 0.0 {
            return Err(Error::InvalidParams(
                "log gluing needs a positive exponent".into(),
            ));
        }
        let r0 = log_glue_threshold(gamma);
        if match_radius * match_radius < r0 {
            return Err(Error::InvalidMatchRadius(format!(
                "squared radius {} below {r0}",
                match_radius * match_radius
            )));
        }
    }
    let rho0 = match_radius * match_radius;
    let mut inner_poly = [0.0; 4];
    let mut fact = 1.0;
    for (j, c) in inner_poly.iter_mut().enumerate() {
        if j > 0 {
            fact *= j as f64;
        }
        *c = outer_derivative(gamma, log_factor, rho0, j) / fact;
    }
    Ok(GluedProfile {
        gamma,
        match_radius,
        log_factor,
        inner_poly,
    })
}

impl GluedProfile {
    fn rho0(&self) -> f64 {
        self.match_radius * self.match_radius
    }

    /// (f̃, f̃', f̃'') in the ρ variable.
    pub fn tilde(&self, rho: f64) -> (f64, f64, f64) {
        if rho <= self.rho0() {
            let x = rho - self.rho0();
            let c = &self.inner_poly;
            (
                c[0] + x * (c[1] + x * (c[2] + x * c[3])),
                c[1] + x * (2.0 * c[2] + 3.0 * x * c[3]),
                2.0 * c[2] + 6.0 * x * c[3],
            )
        } else {
            (
                outer_derivative(self.gamma, self.log_factor, rho, 0),
                outer_derivative(self.gamma, self.log_factor, rho, 1),
                outer_derivative(self.gamma, self.log_factor, rho, 2),
            )
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        self.tilde(t * t).0
    }

    pub fn d1(&self, t: f64) -> f64 {
        2.0 * t * self.tilde(t * t).1
    }

    pub fn d2(&self, t: f64) -> f64 {
        let (_, a, b) = self.tilde(t * t);
        2.0 * a + 4.0 * t * t * b
    }

    /// Value at the origin.
    pub fn at_origin(&self) -> f64 {
        self.tilde(0.0).0
    }

    /// Jumps of (g, g', g'') across the match radius, relative to the outer values.
    pub fn joint_residuals(&self) -> [f64; 3] {
        let rho0 = self.rho0();
        let inside = {
            let c = &self.inner_poly;
            [c[0], c[1], 2.0 * c[2]]
        };
        let mut out = [0.0; 3];
        for (n, slot) in out.iter_mut().enumerate() {
            let o = outer_derivative(self.gamma, self.log_factor, rho0, n);
            *slot = (inside[n] - o).abs() / o.abs().max(f64::MIN_POSITIVE);
        }
        out
    }
}
