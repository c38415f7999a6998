use serde::{Deserialize, Serialize};

use super::directional::directional_cos;
use super::Sign;
use crate::error::{Error, Result};
use crate::profiles::RadialProfile;
use crate::quad::{FractionalOrder, NormalizationConstants, QuadratureConfig, QuadratureResult};

/// Which closed representation produced an extremal value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "branch", rename_all = "snake_case")]
pub enum ReprBranch {
    /// I_x̂ alone (k = 1, plus).
    Radial,
    /// I_x̂ + (k-1) I_x⊥.
    RadialPlusPerp { k: usize },
    /// k I_x⊥ (minus, k < N).
    Perp { k: usize },
    /// N I_ξ* with ⟨x̂, ξ*⟩ = 1/√N.
    Symmetric { n: usize, theta_star: f64 },
}

impl ReprBranch {
    pub fn label(&self) -> String {
        match self {
            ReprBranch::Radial => "repr:radial".into(),
            ReprBranch::RadialPlusPerp { k } => format!("repr:radial+perp(k={k})"),
            ReprBranch::Perp { k } => format!("repr:perp(k={k})"),
            ReprBranch::Symmetric { n, .. } => format!("repr:symmetric(N={n})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReprResult {
    pub result: QuadratureResult,
    pub branch: ReprBranch,
    /// Declared flags satisfy the hypotheses of the branch.
    pub eligible: bool,
}

/// I_k^± u(x), |x| = r, from the representation formulas for radial profiles.
///
/// With `override_flags` the formula is applied even when the declared
/// flags do not certify it; `eligible` then reports the mismatch.
#[allow(clippy::too_many_arguments)]
pub fn extremal_i_repr(
    p: &RadialProfile,
    r: f64,
    sign: Sign,
    k: usize,
    n: usize,
    s: FractionalOrder,
    constants: &NormalizationConstants,
    override_flags: bool,
    cfg: &QuadratureConfig,
) -> Result<ReprResult> {
    if k == 0 || k > n {
        return Err(Error::InvalidParams(format!("k = {k} outside 1..={n}")));
    }
    let d = |c: f64, sn: f64| directional_cos(p, r, c, sn, s, constants, cfg);
    let (branch, eligible) = match (sign, k) {
        (Sign::Plus, 1) => (ReprBranch::Radial, p.flags.single_direction()),
        (Sign::Plus, _) => (ReprBranch::RadialPlusPerp { k }, p.flags.two_direction()),
        (Sign::Minus, k) if k < n => (ReprBranch::Perp { k }, p.flags.single_direction()),
        (Sign::Minus, _) => {
            let c = 1.0 / (n as f64).sqrt();
            (
                ReprBranch::Symmetric {
                    n,
                    theta_star: c.acos(),
                },
                p.flags.two_direction(),
            )
        }
    };
    if !eligible && !override_flags {
        let which = match branch {
            ReprBranch::Radial | ReprBranch::Perp { .. } => "single-direction",
            _ => "two-direction",
        };
        return Err(Error::IneligibleProfile(which.to_string()));
    }
    let result = match branch {
        ReprBranch::Radial => d(1.0, 0.0)?,
        ReprBranch::RadialPlusPerp { k } => d(1.0, 0.0)?.plus(d(0.0, 1.0)?.scaled((k - 1) as f64)),
        ReprBranch::Perp { k } => d(0.0, 1.0)?.scaled(k as f64),
        ReprBranch::Symmetric { n, .. } => {
            let nf = n as f64;
            let c = 1.0 / nf.sqrt();
            let sn = ((nf - 1.0) / nf).sqrt();
            d(c, sn)?.scaled(nf)
        }
    };
    Ok(ReprResult {
        result,
        branch,
        eligible,
    })
}
