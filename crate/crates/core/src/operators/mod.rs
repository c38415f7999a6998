//! Directional, extremal, plane and local truncated operators.

mod directional;
mod frame;
mod local;
mod plane;
mod repr;

use serde::{Deserialize, Serialize};

pub use directional::{
    angular_profile_monotonicity, directional, directional_cos, reduce_angle, two_direction_report,
    two_direction_sum, MonotonicityReport, TwoDirectionReport,
};
pub use frame::{
    directional_field, extremal_i_optimize, frame_sum, random_frame, Field, Frame, OptimizeResult,
    OptimizerConfig, PlanarField, RadialField,
};
pub use local::{local_radial, local_truncated, radial_hessian, radial_hessian_eigs};
pub use plane::{plane_j, PlaneMode};
pub use repr::{extremal_i_repr, ReprBranch, ReprResult};

use crate::error::{Error, Result};
use crate::profiles::RadialProfile;
use crate::quad::{FractionalOrder, NormalizationConstants, QuadratureConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    IDirectional,
    IExtremal,
    JPlane,
    JExtremal,
    PLocal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatorSpec {
    pub family: Family,
    pub sign: Sign,
    pub k: usize,
    pub n: usize,
    pub s: FractionalOrder,
    pub constants: NormalizationConstants,
}

impl OperatorSpec {
    pub fn new(family: Family, sign: Sign, k: usize, n: usize, s: FractionalOrder) -> Result<Self> {
        if k == 0 || k > n {
            return Err(Error::InvalidParams(format!(
                "need 1 <= k <= N, got k = {k}, N = {n}"
            )));
        }
        Ok(OperatorSpec {
            family,
            sign,
            k,
            n,
            s,
            constants: NormalizationConstants::new(s),
        })
    }
}

/// Radial evaluation point; `theta` is the angle between ξ and x for directional operators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalPoint {
    pub radius: f64,
    pub theta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub r: f64,
    pub value: f64,
    pub error_estimate: f64,
    pub method: String,
}

/// Evaluate an operator on u = g(|x|) at |x| = r.
///
/// Extremal I operators use the representation formula when the profile is
/// certified and fall back to the frame optimizer otherwise.
pub fn evaluate_radial(
    p: &RadialProfile,
    point: EvalPoint,
    spec: &OperatorSpec,
    cfg: &QuadratureConfig,
    ocfg: &OptimizerConfig,
) -> Result<Evaluation> {
    let r = point.radius;
    if !(r > 0.0) {
        return Err(Error::InvalidParams(format!("radius {r} must be positive")));
    }
    let (s, c) = (spec.s, &spec.constants);
    let done = |value: f64, err: f64, method: String| Evaluation {
        r,
        value,
        error_estimate: err,
        method,
    };
    match spec.family {
        Family::IDirectional => {
            let th = point.theta.unwrap_or(0.0);
            let q = directional(p, r, th, s, c, cfg)?;
            Ok(done(
                q.value,
                q.uncertainty(),
                format!("directional(theta={})", reduce_angle(th)),
            ))
        }
        Family::IExtremal => {
            match extremal_i_repr(p, r, spec.sign, spec.k, spec.n, s, c, false, cfg) {
                Ok(rr) => Ok(done(
                    rr.result.value,
                    rr.result.uncertainty(),
                    rr.branch.label(),
                )),
                Err(Error::IneligibleProfile(_)) => {
                    let field = RadialField {
                        profile: p.clone(),
                        n: spec.n,
                    };
                    let mut x = vec![0.0; spec.n];
                    x[0] = r;
                    let o = extremal_i_optimize(&field, &x, spec.k, spec.sign, s, c, cfg, ocfg)?;
                    Ok(done(o.value, f64::NAN, "frame_optimizer".into()))
                }
                Err(e) => Err(e),
            }
        }
        Family::JPlane | Family::JExtremal => {
            let mode = match spec.sign {
                Sign::Plus => PlaneMode::PlusRadialPlane,
                Sign::Minus => PlaneMode::MinusOrthoPlane,
            };
            let q = plane_j(p, r, mode, spec.k, spec.n, s, c, cfg)?;
            let tag = serde_json::to_string(&mode).unwrap_or_default();
            Ok(done(
                q.value,
                q.uncertainty(),
                tag.trim_matches('"').to_string(),
            ))
        }
        Family::PLocal => {
            let v = local_radial(p, r, spec.n, spec.k, spec.sign)?;
            Ok(done(v, 0.0, "radial_hessian".into()))
        }
    }
}
