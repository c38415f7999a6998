use std::cmp::Ordering;
use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Arc;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::directional::directional_cos;
use super::Sign;
use crate::error::{Error, Result};
use crate::profiles::RadialProfile;
use crate::quad::{
    integrate_second_difference, FractionalOrder, Growth, NormalizationConstants, QuadratureConfig,
    QuadratureResult,
};

/// Orthonormal k-frame in R^N.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    vectors: Vec<Vec<f64>>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

impl Frame {
    pub fn new(vectors: Vec<Vec<f64>>) -> Result<Self> {
        let n = vectors.first().map_or(0, |v| v.len());
        if vectors.is_empty() || vectors.len() > n || vectors.iter().any(|v| v.len() != n) {
            return Err(Error::InvalidParams(
                "frame needs 1 <= k <= N vectors of length N".into(),
            ));
        }
        for (i, a) in vectors.iter().enumerate() {
            for (j, b) in vectors.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                let d = (dot(a, b) - want).abs();
                if d > 1e-12 {
                    return Err(Error::InvalidParams(format!(
                        "frame vectors {i}, {j} not orthonormal (defect {d:e})"
                    )));
                }
            }
        }
        Ok(Frame { vectors })
    }

    /// First k coordinate vectors of R^N.
    pub fn coordinate(k: usize, n: usize) -> Result<Self> {
        Frame::new(
            (0..k)
                .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
                .collect(),
        )
    }

    pub fn k(&self) -> usize {
        self.vectors.len()
    }

    pub fn n(&self) -> usize {
        self.vectors[0].len()
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    /// Angles in [0, π/2] between each line of the frame and x.
    pub fn angles_to(&self, x: &[f64]) -> Vec<f64> {
        let r = norm(x);
        self.vectors
            .iter()
            .map(|v| {
                let c = (dot(v, x) / r).abs().min(1.0);
                let perp: Vec<f64> = v
                    .iter()
                    .zip(x)
                    .map(|(a, b)| a - dot(v, x) / (r * r) * b)
                    .collect();
                norm(&perp).atan2(c)
            })
            .collect()
    }
}

/// A function on R^N that directional operators can act on.
pub trait Field: Send + Sync {
    fn dim(&self) -> usize;
    fn value(&self, y: &[f64]) -> f64;
    /// sup |u|, used to bound quadrature tails.
    fn sup_abs(&self) -> f64;
    fn as_radial(&self) -> Option<&RadialProfile> {
        None
    }
}

/// u(x) = g(|x|).
#[derive(Debug, Clone)]
pub struct RadialField {
    pub profile: RadialProfile,
    pub n: usize,
}

impl Field for RadialField {
    fn dim(&self) -> usize {
        self.n
    }
    fn value(&self, y: &[f64]) -> f64 {
        self.profile.eval(norm(y))
    }
    fn sup_abs(&self) -> f64 {
        self.profile.decay.sup_beyond(0.0)
    }
    fn as_radial(&self) -> Option<&RadialProfile> {
        Some(&self.profile)
    }
}

/// u(x) = φ(x_axis).
#[derive(Clone)]
pub struct PlanarField {
    pub phi: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub axis: usize,
    pub n: usize,
    pub sup: f64,
}

impl Field for PlanarField {
    fn dim(&self) -> usize {
        self.n
    }
    fn value(&self, y: &[f64]) -> f64 {
        (self.phi)(y[self.axis])
    }
    fn sup_abs(&self) -> f64 {
        self.sup
    }
}

/// I_ξ u(x) for a general field; radial fields use the reduced formula.
pub fn directional_field(
    u: &dyn Field,
    x: &[f64],
    xi: &[f64],
    s: FractionalOrder,
    constants: &NormalizationConstants,
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult> {
    if let Some(p) = u.as_radial() {
        let r = norm(x);
        let c = (dot(xi, x) / r).abs().min(1.0);
        let perp: Vec<f64> = xi
            .iter()
            .zip(x)
            .map(|(a, b)| a - dot(xi, x) / (r * r) * b)
            .collect();
        return directional_cos(p, r, c, norm(&perp).min(1.0), s, constants, cfg);
    }
    let u0 = u.value(x);
    let h = |t: f64| {
        let bp: Vec<f64> = x.iter().zip(xi).map(|(a, b)| a + t * b).collect();
        let bm: Vec<f64> = x.iter().zip(xi).map(|(a, b)| a - t * b).collect();
        u.value(&bp) + u.value(&bm) - 2.0 * u0
    };
    let res = integrate_second_difference(h, s, &[], Growth::bounded(4.0 * u.sup_abs()), cfg)?;
    Ok(res.scaled(constants.c_1s))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub multistarts: usize,
    pub seed: u64,
    pub max_sweeps: usize,
    /// Samples per rotation period before golden-section refinement.
    pub scan_points: usize,
    pub angle_tol: f64,
    /// Relative improvement below which a sweep counts as converged.
    pub value_tol: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            multistarts: 4,
            seed: 0x5eed,
            max_sweeps: 40,
            scan_points: 12,
            angle_tol: 1e-9,
            value_tol: 1e-12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizeResult {
    pub value: f64,
    pub frame: Frame,
    /// Sweep budget ran out before the improvement test was met.
    pub stalled: bool,
    pub evaluations: usize,
    pub start_values: Vec<f64>,
}

fn random_orthogonal(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let a = DMatrix::<f64>::from_fn(n, n, |_, _| StandardNormal.sample(rng));
    let qr = a.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            for i in 0..n {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    q
}

struct Objective<'a> {
    u: &'a dyn Field,
    x: &'a [f64],
    s: FractionalOrder,
    constants: &'a NormalizationConstants,
    cfg: &'a QuadratureConfig,
    mult: f64,
    evals: std::cell::Cell<usize>,
}

impl Objective<'_> {
    fn one(&self, v: &[f64]) -> Result<f64> {
        self.evals.set(self.evals.get() + 1);
        Ok(self.mult
            * directional_field(self.u, self.x, v, self.s, self.constants, self.cfg)?.value)
    }
}

fn rotate(a: &[f64], b: &[f64], phi: f64) -> (Vec<f64>, Vec<f64>) {
    let (sn, c) = phi.sin_cos();
    (
        a.iter().zip(b).map(|(x, y)| c * x + sn * y).collect(),
        a.iter().zip(b).map(|(x, y)| -sn * x + c * y).collect(),
    )
}

fn golden<F: FnMut(f64) -> Result<f64>>(
    mut f: F,
    mut a: f64,
    mut b: f64,
    tol: f64,
) -> Result<(f64, f64)> {
    let inv = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - inv * (b - a);
    let mut d = a + inv * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while (b - a).abs() > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc >= fd { (c, fc) } else { (d, fd) })
}

// Coordinate ascent over Givens rotations from one start; returns (value, Q, converged).
fn ascend(
    obj: &Objective<'_>,
    mut q: DMatrix<f64>,
    k: usize,
    ocfg: &OptimizerConfig,
) -> Result<(f64, DMatrix<f64>, bool)> {
    let n = q.nrows();
    let col = |q: &DMatrix<f64>, j: usize| -> Vec<f64> { q.column(j).iter().copied().collect() };
    let mut vals: Vec<f64> = (0..k)
        .map(|i| obj.one(&col(&q, i)))
        .collect::<Result<_>>()?;
    let mut converged = false;
    for _ in 0..ocfg.max_sweeps {
        let before: f64 = vals.iter().sum();
        for i in 0..k {
            for j in (i + 1)..n {
                let inside = j < k;
                let period = if inside { FRAC_PI_2 } else { PI };
                let (qi, qj) = (col(&q, i), col(&q, j));
                let current = if inside { vals[i] + vals[j] } else { vals[i] };
                let eval = |phi: f64| -> Result<f64> {
                    let (a, b) = rotate(&qi, &qj, phi);
                    if inside {
                        Ok(obj.one(&a)? + obj.one(&b)?)
                    } else {
                        obj.one(&a)
                    }
                };
                let m = ocfg.scan_points.max(3);
                let step = period / m as f64;
                let mut best = (0.0, current);
                for t in 1..m {
                    let phi = step * t as f64;
                    let v = eval(phi)?;
                    if v > best.1 {
                        best = (phi, v);
                    }
                }
                let (phi, v) = golden(eval, best.0 - step, best.0 + step, ocfg.angle_tol)?;
                let scale = current.abs().max(1e-300);
                if v > current + ocfg.value_tol * scale {
                    let (a, b) = rotate(&qi, &qj, phi);
                    for r in 0..n {
                        q[(r, i)] = a[r];
                        q[(r, j)] = b[r];
                    }
                    vals[i] = obj.one(&a)?;
                    if inside {
                        vals[j] = obj.one(&b)?;
                    }
                }
            }
        }
        let after: f64 = vals.iter().sum();
        if after - before <= ocfg.value_tol * after.abs().max(1e-300) {
            converged = true;
            break;
        }
    }
    Ok((vals.iter().sum(), q, converged))
}

fn canonical(vectors: Vec<Vec<f64>>, xhat: &[f64]) -> Vec<Vec<f64>> {
    let mut vs: Vec<Vec<f64>> = vectors
        .into_iter()
        .map(|v| {
            let d = dot(&v, xhat);
            let flip = if d.abs() > 1e-12 {
                d < 0.0
            } else {
                v.iter().find(|c| c.abs() > 1e-12).is_some_and(|c| *c < 0.0)
            };
            if flip {
                v.iter().map(|c| -c).collect()
            } else {
                v
            }
        })
        .collect();
    vs.sort_by(|a, b| {
        dot(b, xhat)
            .abs()
            .partial_cmp(&dot(a, xhat).abs())
            .unwrap_or(Ordering::Equal)
            .then_with(|| lex(a, b))
    });
    vs
}

fn lex(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

/// Max (plus) or min (minus) over orthonormal k-frames of Σ I_{ξ_i} u(x).
#[allow(clippy::too_many_arguments)]
pub fn extremal_i_optimize(
    u: &dyn Field,
    x: &[f64],
    k: usize,
    sign: Sign,
    s: FractionalOrder,
    constants: &NormalizationConstants,
    cfg: &QuadratureConfig,
    ocfg: &OptimizerConfig,
) -> Result<OptimizeResult> {
    let n = u.dim();
    if x.len() != n || k == 0 || k > n {
        return Err(Error::InvalidParams(format!(
            "need 1 <= k <= N = {n} and x in R^N"
        )));
    }
    let r = norm(x);
    let xhat: Vec<f64> = if r > 0.0 {
        x.iter().map(|v| v / r).collect()
    } else {
        (0..n).map(|i| if i == 0 { 1.0 } else { 0.0 }).collect()
    };
    let obj = Objective {
        u,
        x,
        s,
        constants,
        cfg,
        mult: match sign {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        },
        evals: std::cell::Cell::new(0),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(ocfg.seed);
    let mut runs = Vec::new();
    for _ in 0..ocfg.multistarts.max(1) {
        let q0 = random_orthogonal(n, &mut rng);
        runs.push(ascend(&obj, q0, k, ocfg)?);
    }
    let best = runs.iter().map(|r| r.0).fold(f64::NEG_INFINITY, f64::max);
    let tie = 1e-9 * best.abs().max(1e-300);
    let mut candidates: Vec<(Vec<Vec<f64>>, bool)> = runs
        .iter()
        .filter(|r| r.0 >= best - tie)
        .map(|r| {
            let vs = (0..k)
                .map(|j| r.1.column(j).iter().copied().collect())
                .collect();
            (canonical(vs, &xhat), r.2)
        })
        .collect();
    candidates.sort_by(|a, b| {
        dot(&b.0[0], &xhat)
            .abs()
            .partial_cmp(&dot(&a.0[0], &xhat).abs())
            .unwrap_or(Ordering::Equal)
            .then_with(|| lex(&a.0.concat(), &b.0.concat()))
    });
    let (vectors, conv) = candidates.swap_remove(0);
    // Re-orthonormalise against drift from repeated rotations.
    let frame = Frame::new(gram_schmidt(vectors))?;
    let value: f64 = frame
        .vectors()
        .iter()
        .map(|v| directional_field(u, x, v, s, constants, cfg).map(|q| q.value))
        .sum::<Result<f64>>()?;
    Ok(OptimizeResult {
        value,
        frame,
        stalled: !conv,
        evaluations: obj.evals.get(),
        start_values: runs.iter().map(|r| obj.mult * r.0).collect(),
    })
}

fn gram_schmidt(mut vs: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    for i in 0..vs.len() {
        for j in 0..i {
            let d = dot(&vs[i], &vs[j]);
            let vj = vs[j].clone();
            for (a, b) in vs[i].iter_mut().zip(&vj) {
                *a -= d * b;
            }
        }
        let nv = norm(&vs[i]);
        for a in vs[i].iter_mut() {
            *a /= nv;
        }
    }
    vs
}

/// Σ I_{ξ_i} u(x) for a given frame.
pub fn frame_sum(
    u: &dyn Field,
    x: &[f64],
    frame: &Frame,
    s: FractionalOrder,
    constants: &NormalizationConstants,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    frame
        .vectors()
        .iter()
        .map(|v| directional_field(u, x, v, s, constants, cfg).map(|q| q.value))
        .sum()
}

/// Uniformly random k-frame (seeded).
pub fn random_frame(k: usize, n: usize, rng: &mut ChaCha8Rng) -> Result<Frame> {
    let q = random_orthogonal(n, rng);
    Frame::new(gram_schmidt(
        (0..k)
            .map(|j| q.column(j).iter().copied().collect())
            .collect(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frame_validation() {
        assert!(Frame::new(vec![vec![1.0, 0.0], vec![1.0, 0.0]]).is_err());
        assert!(Frame::new(vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]]).is_ok());
        let f = Frame::coordinate(2, 3).unwrap();
        let a = f.angles_to(&[1.0, 0.0, 0.0]);
        assert!(a[0].abs() < 1e-15 && (a[1] - FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn random_frames_are_orthonormal() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            assert!(random_frame(2, 4, &mut rng).is_ok());
        }
    }

    #[test]
    fn golden_finds_parabola_peak() {
        let (x, _) = golden(|t| Ok(-(t - 0.3) * (t - 0.3)), 0.0, 1.0, 1e-10).unwrap();
        assert!((x - 0.3).abs() < 1e-8);
    }
}
