use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::rules::{gk21, GaussJacobi};
use super::{QuadratureConfig, QuadratureResult};
use crate::error::{Error, Result};

/// A point of reduced regularity of the integrand on (0, ∞).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Feature {
    /// Continuous but not smooth; panels are split exactly here.
    Kink(f64),
    /// Integrable singularity behaving like |τ - at|^(-exponent).
    ///
    /// Exponent 0 stands for a logarithmic singularity; a negative exponent
    /// marks a Hölder cusp that still benefits from graded panels.
    Singular { at: f64, exponent: f64 },
}

impl Feature {
    pub fn position(&self) -> f64 {
        match *self {
            Feature::Kink(p) => p,
            Feature::Singular { at, .. } => at,
        }
    }

    fn singular_exponent(&self) -> Option<f64> {
        match *self {
            Feature::Kink(_) => None,
            Feature::Singular { exponent, .. } => Some(exponent),
        }
    }
}

/// Declared tail behaviour: |h(τ)| ≤ bound·τ^exponent beyond the tail cut.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Growth {
    pub bound: f64,
    pub exponent: f64,
}

impl Growth {
    pub fn bounded(bound: f64) -> Self {
        Growth {
            bound,
            exponent: 0.0,
        }
    }

    pub fn power(bound: f64, exponent: f64) -> Self {
        Growth { bound, exponent }
    }
}

/// Quadrature abscissa.
///
/// Near a singular feature the offset from that feature is carried
/// exactly, so integrands can form |τ - p| without cancellation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Abscissa {
    pub tau: f64,
    anchor: f64,
    offset: f64,
}

impl Abscissa {
    pub fn plain(tau: f64) -> Self {
        Abscissa {
            tau,
            anchor: tau,
            offset: 0.0,
        }
    }

    /// τ - p, exact when p is the singular feature this node was graded toward.
    pub fn minus(&self, p: f64) -> f64 {
        if self.anchor == p {
            self.offset
        } else {
            self.tau - p
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Map {
    NearZero { delta: f64 },
    Linear,
    FromPoint { p: f64, len: f64, m: f64, dir: f64 },
    Tail { t: f64, m: f64 },
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    map: Map,
    u0: f64,
    u1: f64,
    value: f64,
    err: f64,
    /// Rounding floor: cancellation in h is amplified by the kernel near 0.
    noise: f64,
}

struct Key(f64, usize);

impl PartialEq for Key {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl Eq for Key {}
impl PartialOrd for Key {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Key {
    fn cmp(&self, o: &Self) -> Ordering {
        self.0.total_cmp(&o.0).then(o.1.cmp(&self.1))
    }
}

struct Engine<'a, F> {
    h: &'a F,
    /// Exact h(τ)/τ² near the origin, when the caller can supply it.
    curvature: Option<&'a dyn Fn(f64) -> f64>,
    sigma: f64,
    gj12: GaussJacobi,
    gj16: GaussJacobi,
    noise_unit: f64,
    // Σ w_i/v_i of the origin rules: amplification of rounding in h/τ².
    origin_gain: f64,
}

impl<'a, F: Fn(Abscissa) -> f64> Engine<'a, F> {
    fn kernel(&self, tau: f64) -> f64 {
        tau.powf(-1.0 - self.sigma)
    }

    fn eval(&self, map: Map, u0: f64, u1: f64) -> (f64, f64) {
        let h = self.h;
        match map {
            Map::NearZero { delta } => {
                let q = |v: f64| {
                    let tau = delta * v.sqrt();
                    let y = match self.curvature {
                        Some(c) => c(tau),
                        None => h(Abscissa::plain(tau)) / (tau * tau),
                    };
                    if y.is_finite() {
                        y
                    } else {
                        0.0
                    }
                };
                let pre = 0.5 * delta.powf(2.0 - self.sigma);
                let a = self.gj16.apply(q);
                let b = self.gj12.apply(q);
                (pre * a, (pre * (a - b)).abs())
            }
            Map::Linear => gk21(
                |tau| finite(h(Abscissa::plain(tau)) * self.kernel(tau)),
                u0,
                u1,
            ),
            Map::FromPoint { p, len, m, dir } => gk21(
                |u| {
                    let jac = len * m * u.powf(m - 1.0);
                    if jac == 0.0 {
                        return 0.0;
                    }
                    let d = dir * len * u.powf(m);
                    let tau = p + d;
                    let x = Abscissa {
                        tau,
                        anchor: p,
                        offset: d,
                    };
                    finite(h(x) * self.kernel(tau) * jac)
                },
                u0,
                u1,
            ),
            Map::Tail { t, m } => {
                let pre = t.powf(-self.sigma) / self.sigma;
                gk21(
                    |u| {
                        let jac = m * u.powf(m - 1.0);
                        if jac == 0.0 {
                            return 0.0;
                        }
                        let w = u.powf(m);
                        let tau = t * w.powf(-1.0 / self.sigma);
                        finite(pre * h(Abscissa::plain(tau)) * jac)
                    },
                    u0,
                    u1,
                )
            }
        }
    }

    fn panel(&self, map: Map, u0: f64, u1: f64) -> Panel {
        let (value, err) = self.eval(map, u0, u1);
        let noise = match map {
            Map::NearZero { .. } if self.curvature.is_some() => 64.0 * f64::EPSILON * value.abs(),
            _ => self.noise(map, u0, u1),
        };
        Panel {
            map,
            u0,
            u1,
            value,
            err,
            noise,
        }
    }

    fn noise(&self, map: Map, u0: f64, u1: f64) -> f64 {
        let s = self.sigma;
        let between = |a: f64, b: f64| {
            let (a, b) = (a.min(b), a.max(b));
            self.noise_unit * (a.powf(-s) - b.powf(-s)) / s
        };
        match map {
            Map::NearZero { delta } => 0.5 * self.noise_unit * delta.powf(-s) * self.origin_gain,
            Map::Linear => between(u0, u1),
            Map::FromPoint { p, len, m, dir } => {
                between(p + dir * len * u0.powf(m), p + dir * len * u1.powf(m))
            }
            Map::Tail { t, .. } => self.noise_unit * t.powf(-s) / s,
        }
    }

    fn split(&self, p: &Panel) -> Option<(Panel, Panel)> {
        match p.map {
            Map::NearZero { delta } => {
                if delta < 1e-150 {
                    return None;
                }
                let half = 0.5 * delta;
                Some((
                    self.panel(Map::NearZero { delta: half }, 0.0, 0.0),
                    self.panel(Map::Linear, half, delta),
                ))
            }
            _ => {
                let mid = 0.5 * (p.u0 + p.u1);
                let scale = p.u0.abs().max(p.u1.abs()).max(f64::MIN_POSITIVE);
                if p.u1 - p.u0 <= 64.0 * f64::EPSILON * scale || mid <= p.u0 || mid >= p.u1 {
                    return None;
                }
                Some((self.panel(p.map, p.u0, mid), self.panel(p.map, mid, p.u1)))
            }
        }
    }
}

fn finite(x: f64) -> f64 {
    if x.is_finite() {
        x
    } else {
        0.0
    }
}

/// ∫₀^∞ h(τ) τ^-(1+σ) dτ for σ in (0, 2), with h(τ) = O(τ²) at 0.
pub fn integrate_power_kernel<F: Fn(Abscissa) -> f64>(
    h: F,
    sigma: f64,
    features: &[Feature],
    growth: Growth,
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult> {
    integrate(h, None, sigma, features, growth, cfg)
}

/// As [`integrate_power_kernel`], with `curvature(τ)` = h(τ)/τ² computed
/// without cancellation. It is only used below the first feature.
pub fn integrate_power_kernel_with_curvature<F: Fn(Abscissa) -> f64, C: Fn(f64) -> f64>(
    h: F,
    curvature: C,
    sigma: f64,
    features: &[Feature],
    growth: Growth,
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult> {
    integrate(h, Some(&curvature), sigma, features, growth, cfg)
}

fn integrate<F: Fn(Abscissa) -> f64>(
    h: F,
    curvature: Option<&dyn Fn(f64) -> f64>,
    sigma: f64,
    features: &[Feature],
    growth: Growth,
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult> {
    cfg.validate()?;
    if !(sigma > 0.0 && sigma < 2.0) {
        return Err(Error::InvalidParams(format!(
            "kernel exponent {sigma} outside (0, 2)"
        )));
    }
    if !(growth.exponent < sigma) || !(growth.bound >= 0.0) {
        return Err(Error::DivergentTail {
            exponent: growth.exponent,
            sigma,
        });
    }
    let mut feats: Vec<Feature> = Vec::with_capacity(features.len());
    for f in features {
        let p = f.position();
        if !(p > 0.0 && p.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "feature position {p} not in (0, ∞)"
            )));
        }
        if let Some(e) = f.singular_exponent() {
            if !(e < 1.0) {
                return Err(Error::DivergentSingularity { at: p, exponent: e });
            }
        }
        feats.push(*f);
    }
    feats.sort_by(|a, b| a.position().total_cmp(&b.position()));
    feats.dedup_by(|later, kept| {
        if later.position() != kept.position() {
            return false;
        }
        let e = match (kept.singular_exponent(), later.singular_exponent()) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        };
        if let Some(exponent) = e {
            *kept = Feature::Singular {
                at: kept.position(),
                exponent,
            };
        }
        true
    });

    let b = -0.5 * sigma;
    let gj12 = GaussJacobi::new(12, b);
    let gj16 = GaussJacobi::new(16, b);
    let origin_gain = gj12.apply(|v| 1.0 / v).max(gj16.apply(|v| 1.0 / v));
    let engine = Engine {
        h: &h,
        curvature,
        sigma,
        gj12,
        gj16,
        noise_unit: f64::EPSILON * growth.bound,
        origin_gain,
    };

    let delta0 = match feats.first() {
        Some(f) => cfg.near_zero_cut.min(0.5 * f.position()),
        None => cfg.near_zero_cut,
    };
    let t_cut = match feats.last() {
        Some(f) => cfg.tail_cut.max(2.0 * f.position()),
        None => cfg.tail_cut,
    };

    let mut panels: Vec<Panel> = Vec::new();
    panels.push(engine.panel(Map::NearZero { delta: delta0 }, 0.0, 0.0));

    let mut pts: Vec<(f64, Option<f64>)> = vec![(delta0, None)];
    pts.extend(feats.iter().map(|f| (f.position(), f.singular_exponent())));
    pts.push((t_cut, None));
    let grade = |e: f64| 2.0 / (1.0 - e.max(0.0));
    for w in pts.windows(2) {
        let (a, ea) = w[0];
        let (bb, eb) = w[1];
        match (ea, eb) {
            (Some(x), Some(y)) => {
                let mid = 0.5 * (a + bb);
                let m1 = Map::FromPoint {
                    p: a,
                    len: mid - a,
                    m: grade(x),
                    dir: 1.0,
                };
                let m2 = Map::FromPoint {
                    p: bb,
                    len: bb - mid,
                    m: grade(y),
                    dir: -1.0,
                };
                panels.push(engine.panel(m1, 0.0, 1.0));
                panels.push(engine.panel(m2, 0.0, 1.0));
            }
            (Some(x), None) => {
                let m = Map::FromPoint {
                    p: a,
                    len: bb - a,
                    m: grade(x),
                    dir: 1.0,
                };
                panels.push(engine.panel(m, 0.0, 1.0));
            }
            (None, Some(y)) => {
                let m = Map::FromPoint {
                    p: bb,
                    len: bb - a,
                    m: grade(y),
                    dir: -1.0,
                };
                panels.push(engine.panel(m, 0.0, 1.0));
            }
            (None, None) => panels.push(engine.panel(Map::Linear, a, bb)),
        }
    }

    let tail_m = 2.0 / (1.0 - growth.exponent.max(0.0) / sigma);
    let (u_min, tail_bound) = if growth.bound == 0.0 {
        (0.0, 0.0)
    } else {
        let gap = sigma - growth.exponent;
        let target = 0.25 * cfg.abs_tol * gap / growth.bound;
        let tau_max = target.powf(-1.0 / gap).max(4.0 * t_cut);
        let bound = growth.bound * tau_max.powf(-gap) / gap;
        let w_min = (t_cut / tau_max).powf(sigma);
        (w_min.powf(1.0 / tail_m), bound)
    };
    panels.push(engine.panel(
        Map::Tail {
            t: t_cut,
            m: tail_m,
        },
        u_min,
        1.0,
    ));

    let mut alive = vec![true; panels.len()];
    let mut heap: BinaryHeap<Key> = panels
        .iter()
        .enumerate()
        .map(|(i, p)| Key(p.err, i))
        .collect();
    let mut value: f64 = panels.iter().map(|p| p.value).sum();
    let mut err: f64 = panels.iter().map(|p| p.err).sum();
    let mut noise: f64 = panels.iter().map(|p| p.noise).sum();
    let mut subdivisions = 0usize;

    let done = |value: f64, err: f64, noise: f64| {
        err + tail_bound
            <= cfg
                .abs_tol
                .max(cfg.rel_tol * value.abs())
                .max(noise + tail_bound)
    };
    let mut converged = done(value, err, noise);
    while !converged {
        if subdivisions >= cfg.max_subdivisions {
            break;
        }
        let Some(Key(_, i)) = heap.pop() else { break };
        let parent = panels[i];
        if parent.err <= parent.noise {
            continue;
        }
        let Some((l, r)) = engine.split(&parent) else {
            continue;
        };
        // Halving the origin panel only trades truncation for rounding once the estimate stops shrinking.
        if matches!(parent.map, Map::NearZero { .. }) && l.err + r.err >= parent.err {
            noise += parent.err - parent.noise;
            panels[i].noise = parent.err;
            converged = done(value, err, noise);
            continue;
        }
        alive[i] = false;
        value += l.value + r.value - parent.value;
        err += l.err + r.err - parent.err;
        noise += l.noise + r.noise - parent.noise;
        for c in [l, r] {
            heap.push(Key(c.err, panels.len()));
            panels.push(c);
            alive.push(true);
        }
        subdivisions += 1;
        // Re-sum periodically so the running totals do not drift.
        if subdivisions.is_multiple_of(64) {
            value = sum_alive(&panels, &alive, |p| p.value);
            err = sum_alive(&panels, &alive, |p| p.err);
            noise = sum_alive(&panels, &alive, |p| p.noise);
        }
        converged = done(value, err, noise);
    }
    let value = sum_alive(&panels, &alive, |p| p.value);
    let err = sum_alive(&panels, &alive, |p| p.err);
    let noise = sum_alive(&panels, &alive, |p| p.noise);
    let converged = done(value, err, noise);
    if !converged && !cfg.allow_unconverged {
        return Err(Error::NonConvergent {
            value,
            error_estimate: err + tail_bound,
            subdivisions,
        });
    }
    Ok(QuadratureResult {
        value,
        error_estimate: err.max(noise),
        subdivisions_used: subdivisions,
        tail_bound,
        converged,
    })
}

fn sum_alive(panels: &[Panel], alive: &[bool], f: impl Fn(&Panel) -> f64) -> f64 {
    panels
        .iter()
        .zip(alive)
        .filter(|(_, &a)| a)
        .map(|(p, _)| f(p))
        .sum()
}
