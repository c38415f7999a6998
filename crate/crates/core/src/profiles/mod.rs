//! Radial profiles g(t) and the metadata that drives quadrature and
//! representation-formula eligibility.

mod glued;
mod hypotheses;
mod spec;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use glued::{build_glued_profile, log_glue_threshold, GluedProfile};
pub use hypotheses::{check_hypotheses, FlagCheck, HypothesisReport};
pub use spec::{parse_profile, ProfileSpec};

use crate::error::{Error, Result};

/// |g(t)| ≤ c·(1+t)^(-sigma)·(1 + ln(1+t))^[log_factor] for t ≥ from.
///
/// A negative `sigma` declares polynomial growth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayEnvelope {
    pub c: f64,
    pub sigma: f64,
    pub log_factor: bool,
    pub from: f64,
}

impl DecayEnvelope {
    pub fn power(c: f64, sigma: f64) -> Self {
        DecayEnvelope {
            c,
            sigma,
            log_factor: false,
            from: 0.0,
        }
    }

    pub fn bound(&self, t: f64) -> f64 {
        let l = if self.log_factor {
            1.0 + t.ln_1p()
        } else {
            1.0
        };
        self.c * (1.0 + t).powf(-self.sigma) * l
    }

    /// Upper bound of |g| on [t0, ∞); infinite when the envelope does not
    /// cover t0 or the profile grows.
    pub fn sup_beyond(&self, t0: f64) -> f64 {
        if t0 < self.from || self.sigma < 0.0 {
            return f64::INFINITY;
        }
        if !self.log_factor {
            return self.bound(t0);
        }
        if self.sigma == 0.0 {
            return f64::INFINITY;
        }
        let peak = (1.0 / self.sigma - 1.0).exp() - 1.0;
        self.bound(t0.max(peak))
    }
}

/// Monotonicity certificates on g̃(t) = g(√t).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileFlags {
    pub gtilde_prime_nondecreasing: bool,
    pub gtilde_prime_l1: bool,
    pub gtilde_second_convex: bool,
}

impl ProfileFlags {
    pub const ALL: ProfileFlags = ProfileFlags {
        gtilde_prime_nondecreasing: true,
        gtilde_prime_l1: true,
        gtilde_second_convex: true,
    };
    pub const NONE: ProfileFlags = ProfileFlags {
        gtilde_prime_nondecreasing: false,
        gtilde_prime_l1: false,
        gtilde_second_convex: false,
    };

    /// Hypotheses for the single-direction formulas.
    pub fn single_direction(&self) -> bool {
        self.gtilde_prime_nondecreasing && self.gtilde_prime_l1
    }

    /// Hypotheses for the two-direction rotation argument.
    pub fn two_direction(&self) -> bool {
        self.gtilde_second_convex && self.gtilde_prime_l1
    }
}

/// Local behaviour of t ↦ g(|t|) at t = 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OriginBehavior {
    /// Even and smooth.
    Smooth,
    /// Like |t|^-e; e ≤ 0 is a cusp or kink.
    Singular(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProfileKind {
    /// t^-γ
    Power {
        gamma: f64,
    },
    /// -t^γ
    PositivePower {
        gamma: f64,
    },
    /// (1+t)^-(2sq)
    ShiftedPower {
        q: f64,
        s: f64,
    },
    /// α(1+t²)^-e
    BumpPower {
        alpha: f64,
        exponent: f64,
    },
    /// e^-βt²
    Gaussian {
        beta: f64,
    },
    /// min(ε^-γ, t^-γ)
    CappedPower {
        gamma: f64,
        eps: f64,
    },
    Glued(GluedProfile),
    Custom {
        name: String,
    },
}

type Func = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
struct CustomFns {
    g: Func,
    d1: Option<Func>,
    d2: Option<Func>,
}

#[derive(Clone)]
pub struct RadialProfile {
    pub kind: ProfileKind,
    /// Multiplies every value.
    pub scale: f64,
    /// γ with g(t) ~ t^-γ at 0⁺; 0 when bounded there.
    pub origin_exponent: f64,
    pub decay: DecayEnvelope,
    pub flags: ProfileFlags,
    /// Points where g is not smooth (or not C³).
    pub breakpoints: Vec<f64>,
    /// Evaluations below this radius fall outside the profile's intended use.
    pub min_radius: f64,
    custom: Option<CustomFns>,
}

impl fmt::Debug for RadialProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialProfile")
            .field("kind", &self.kind)
            .field("scale", &self.scale)
            .field("origin_exponent", &self.origin_exponent)
            .field("decay", &self.decay)
            .field("flags", &self.flags)
            .field("breakpoints", &self.breakpoints)
            .finish()
    }
}

fn check_pos(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!(
            "{name} = {v} must be positive"
        )))
    }
}

impl RadialProfile {
    fn base(kind: ProfileKind, decay: DecayEnvelope) -> Self {
        RadialProfile {
            kind,
            scale: 1.0,
            origin_exponent: 0.0,
            decay,
            flags: ProfileFlags::ALL,
            breakpoints: Vec::new(),
            min_radius: 0.0,
            custom: None,
        }
    }

    /// Multiply the profile by `a`; flags are kept only for a > 0.
    pub fn scaled(mut self, a: f64) -> Self {
        self.scale *= a;
        self.decay.c *= a.abs();
        if a < 0.0 {
            self.flags = ProfileFlags::NONE;
        }
        self
    }

    pub fn with_flags(mut self, flags: ProfileFlags) -> Self {
        self.flags = flags;
        self
    }

    pub fn custom<F>(
        name: &str,
        g: F,
        origin_exponent: f64,
        decay: DecayEnvelope,
        flags: ProfileFlags,
        breakpoints: Vec<f64>,
    ) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let mut p = Self::base(
            ProfileKind::Custom {
                name: name.to_string(),
            },
            decay,
        );
        p.origin_exponent = origin_exponent;
        p.flags = flags;
        p.breakpoints = breakpoints;
        p.custom = Some(CustomFns {
            g: Arc::new(g),
            d1: None,
            d2: None,
        });
        p
    }

    /// Attach analytic derivatives to a custom profile.
    pub fn with_derivatives<F1, F2>(mut self, d1: F1, d2: F2) -> Self
    where
        F1: Fn(f64) -> f64 + Send + Sync + 'static,
        F2: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if let Some(c) = self.custom.as_mut() {
            c.d1 = Some(Arc::new(d1));
            c.d2 = Some(Arc::new(d2));
        }
        self
    }

    pub fn name(&self) -> String {
        match &self.kind {
            ProfileKind::Power { gamma } => format!("power:{gamma}"),
            ProfileKind::PositivePower { gamma } => format!("positive_power:{gamma}"),
            ProfileKind::ShiftedPower { q, s } => format!("shifted_power:{q},{s}"),
            ProfileKind::BumpPower { alpha, exponent } => format!("bump_power:{alpha},{exponent}"),
            ProfileKind::Gaussian { beta } => format!("gaussian:{beta}"),
            ProfileKind::CappedPower { gamma, eps } => format!("capped_power:{gamma},{eps}"),
            ProfileKind::Glued(gp) if gp.log_factor => {
                format!("glued_log:{},{}", gp.gamma, gp.match_radius)
            }
            ProfileKind::Glued(gp) => format!("glued_power:{},{}", gp.gamma, gp.match_radius),
            ProfileKind::Custom { name } => name.clone(),
        }
    }

    pub fn origin_behavior(&self) -> OriginBehavior {
        match &self.kind {
            ProfileKind::Power { gamma } => OriginBehavior::Singular(*gamma),
            ProfileKind::PositivePower { gamma } => OriginBehavior::Singular(-gamma),
            ProfileKind::ShiftedPower { .. } => OriginBehavior::Singular(-1.0),
            ProfileKind::Custom { .. } if self.origin_exponent > 0.0 => {
                OriginBehavior::Singular(self.origin_exponent)
            }
            ProfileKind::Custom { .. } => OriginBehavior::Singular(-1.0),
            _ => OriginBehavior::Smooth,
        }
    }

    /// g(t) for t > 0 (t = 0 allowed when the profile is bounded there).
    pub fn eval(&self, t: f64) -> f64 {
        self.scale * self.raw(t, 0)
    }

    pub fn d1(&self, t: f64) -> f64 {
        self.scale * self.raw(t, 1)
    }

    pub fn d2(&self, t: f64) -> f64 {
        self.scale * self.raw(t, 2)
    }

    /// False for custom profiles whose derivatives are finite differences.
    pub fn has_analytic_derivatives(&self) -> bool {
        match &self.custom {
            Some(c) => c.d1.is_some() && c.d2.is_some(),
            None => true,
        }
    }

    /// g̃'(ρ) and g̃''(ρ) for g̃(ρ) = g(√ρ).
    pub fn gtilde_derivatives(&self, rho: f64) -> (f64, f64) {
        let t = rho.sqrt();
        let a = self.d1(t);
        let b = self.d2(t);
        (a / (2.0 * t), (b - a / t) / (4.0 * rho))
    }

    fn raw(&self, t: f64, n: usize) -> f64 {
        match &self.kind {
            ProfileKind::Power { gamma } => {
                let g = *gamma;
                match n {
                    0 => t.powf(-g),
                    1 => -g * t.powf(-g - 1.0),
                    _ => g * (g + 1.0) * t.powf(-g - 2.0),
                }
            }
            ProfileKind::PositivePower { gamma } => {
                let g = *gamma;
                match n {
                    0 => -t.powf(g),
                    1 => -g * t.powf(g - 1.0),
                    _ => -g * (g - 1.0) * t.powf(g - 2.0),
                }
            }
            ProfileKind::ShiftedPower { q, s } => {
                let e = 2.0 * s * q;
                match n {
                    0 => (1.0 + t).powf(-e),
                    1 => -e * (1.0 + t).powf(-e - 1.0),
                    _ => e * (e + 1.0) * (1.0 + t).powf(-e - 2.0),
                }
            }
            ProfileKind::BumpPower { alpha, exponent } => {
                let (a, e) = (*alpha, *exponent);
                let w = 1.0 + t * t;
                match n {
                    0 => a * w.powf(-e),
                    1 => -2.0 * e * a * t * w.powf(-e - 1.0),
                    _ => {
                        a * (-2.0 * e * w.powf(-e - 1.0)
                            + 4.0 * e * (e + 1.0) * t * t * w.powf(-e - 2.0))
                    }
                }
            }
            ProfileKind::Gaussian { beta } => {
                let b = *beta;
                let e = (-b * t * t).exp();
                match n {
                    0 => e,
                    1 => -2.0 * b * t * e,
                    _ => (4.0 * b * b * t * t - 2.0 * b) * e,
                }
            }
            ProfileKind::CappedPower { gamma, eps } => {
                let g = *gamma;
                if t <= *eps {
                    if n == 0 {
                        eps.powf(-g)
                    } else {
                        0.0
                    }
                } else {
                    match n {
                        0 => t.powf(-g),
                        1 => -g * t.powf(-g - 1.0),
                        _ => g * (g + 1.0) * t.powf(-g - 2.0),
                    }
                }
            }
            ProfileKind::Glued(gp) => match n {
                0 => gp.value(t),
                1 => gp.d1(t),
                _ => gp.d2(t),
            },
            ProfileKind::Custom { .. } => {
                let c = self
                    .custom
                    .as_ref()
                    .expect("custom profile without function");
                match n {
                    0 => (c.g)(t),
                    1 => match &c.d1 {
                        Some(f) => f(t),
                        None => {
                            let h = 1e-5 * t.max(1e-3);
                            ((c.g)(t + h) - (c.g)(t - h)) / (2.0 * h)
                        }
                    },
                    _ => match &c.d2 {
                        Some(f) => f(t),
                        None => {
                            let h = 1e-4 * t.max(1e-3);
                            ((c.g)(t + h) - 2.0 * (c.g)(t) + (c.g)(t - h)) / (h * h)
                        }
                    },
                }
            }
        }
    }
}

/// g(t) = t^-γ.
pub fn make_power(gamma: f64) -> Result<RadialProfile> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidExponent(format!(
            "power exponent {gamma} must be positive"
        )));
    }
    let mut p = RadialProfile::base(
        ProfileKind::Power { gamma },
        DecayEnvelope {
            c: 2f64.powf(gamma),
            sigma: gamma,
            log_factor: false,
            from: 1.0,
        },
    );
    p.origin_exponent = gamma;
    Ok(p)
}

/// g(t) = -t^γ with γ in (0, 2s).
pub fn make_positive_power(gamma: f64, s: f64) -> Result<RadialProfile> {
    if !(gamma > 0.0 && gamma < 2.0 * s) {
        return Err(Error::InvalidExponent(format!(
            "{gamma} not in (0, {})",
            2.0 * s
        )));
    }
    Ok(RadialProfile::base(
        ProfileKind::PositivePower { gamma },
        DecayEnvelope::power(1.0, -gamma),
    ))
}

pub fn make_shifted_power(q: f64, s: f64) -> Result<RadialProfile> {
    check_pos("q", q)?;
    check_pos("s", s)?;
    Ok(RadialProfile::base(
        ProfileKind::ShiftedPower { q, s },
        DecayEnvelope::power(1.0, 2.0 * s * q),
    ))
}

pub fn make_bump_power(alpha: f64, exponent: f64) -> Result<RadialProfile> {
    check_pos("alpha", alpha)?;
    check_pos("exponent", exponent)?;
    Ok(RadialProfile::base(
        ProfileKind::BumpPower { alpha, exponent },
        DecayEnvelope::power(alpha * 2f64.powf(exponent), 2.0 * exponent),
    ))
}

pub fn make_gaussian(beta: f64) -> Result<RadialProfile> {
    check_pos("beta", beta)?;
    let sigma = 4.0;
    let t = 0.5 * (-1.0 + (1.0 + 8.0 / beta).sqrt());
    let c = (1.0 + t).powf(sigma) * (-beta * t * t).exp();
    Ok(RadialProfile::base(
        ProfileKind::Gaussian { beta },
        DecayEnvelope::power(c * (1.0 + 1e-12), sigma),
    ))
}

/// min(ε^-γ, t^-γ); continuous, with a kink at ε.
pub fn make_capped_power(gamma: f64, eps: f64) -> Result<RadialProfile> {
    check_pos("gamma", gamma)?;
    check_pos("eps", eps)?;
    let mut p = RadialProfile::base(
        ProfileKind::CappedPower { gamma, eps },
        DecayEnvelope::power(((1.0 + eps) / eps).powf(gamma), gamma),
    );
    p.flags = ProfileFlags::NONE;
    p.breakpoints = vec![eps];
    Ok(p)
}

pub fn make_glued(gamma: f64, match_radius: f64, log_factor: bool) -> Result<RadialProfile> {
    let gp = build_glued_profile(gamma, match_radius, log_factor)?;
    let r = match_radius;
    let out_c = ((1.0 + r) / r).powf(gamma);
    let inner_max = (0..=256)
        .map(|i| gp.value(r * i as f64 / 256.0).abs())
        .fold(0.0, f64::max)
        * 1.01;
    let decay = DecayEnvelope {
        c: out_c.max(inner_max * (1.0 + r).powf(gamma)),
        sigma: gamma,
        log_factor,
        from: 0.0,
    };
    let mut p = RadialProfile::base(ProfileKind::Glued(gp), decay);
    p.breakpoints = vec![r];
    p.min_radius = r;
    Ok(p)
}

/// Named family constructor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    ShiftedPower,
    BumpPower,
    Gaussian,
    CappedPower,
    GluedPower,
    GluedLog,
}

pub fn make_liouville_family(family: Family, params: &[f64]) -> Result<RadialProfile> {
    let need = |n: usize| -> Result<()> {
        if params.len() == n {
            Ok(())
        } else {
            Err(Error::InvalidParams(format!(
                "{family:?} takes {n} parameters, got {}",
                params.len()
            )))
        }
    };
    match family {
        Family::ShiftedPower => {
            need(2)?;
            make_shifted_power(params[0], params[1])
        }
        Family::BumpPower => {
            need(2)?;
            make_bump_power(params[0], params[1])
        }
        Family::Gaussian => {
            need(1)?;
            make_gaussian(params[0])
        }
        Family::CappedPower => match params.len() {
            1 => make_capped_power(params[0], 1.0),
            _ => {
                need(2)?;
                make_capped_power(params[0], params[1])
            }
        },
        Family::GluedPower => {
            need(2)?;
            make_glued(params[0], params[1], false)
        }
        Family::GluedLog => {
            need(2)?;
            make_glued(params[0], params[1], true)
        }
    }
}
