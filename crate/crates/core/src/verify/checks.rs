use std::collections::BTreeMap;
use std::sync::Arc;

use super::{
    run_scenario, Claim, Expectation, Expected, Row, RowStatus, Scale, Scenario, ScenarioProfile,
    ScenarioResult, Verdict,
};
use crate::error::{Error, Result};
use crate::exponents::{
    c_hat, c_perp, plane_threshold, solve_gamma_bar, solve_gamma_tilde, SolveConfig,
};
use crate::operators::{
    directional_field, frame_sum, Family, Field, Frame, OperatorSpec, PlanarField, Sign,
};
use crate::profiles::{make_capped_power, make_glued, make_positive_power, make_power};
use crate::quad::gamma::sphere_area;
use crate::quad::{FractionalOrder, QuadratureConfig};

/// I_k^+ |x|^-γ̄ ≈ 0 in R^{k+1}, the capped profile min(1, r^-γ̄/2) has I_k^+ ≤ 0
/// for r > 1, and I_1^+(-|x|^γ) ≥ 0 for r > 1 with γ = s - 1/2.
pub fn check_fundamental_i_plus(
    k: usize,
    s: FractionalOrder,
    cfg: &QuadratureConfig,
) -> Result<ScenarioResult> {
    if k < 2 {
        return Err(Error::InvalidParams(format!("need k >= 2, got {k}")));
    }
    let n = k + 1;
    let sv = s.value();
    let spec = OperatorSpec::new(Family::IExtremal, Sign::Plus, k, n, s)?;
    let c = &spec.constants;
    let rep = solve_gamma_bar(k, s, c, cfg, &SolveConfig::default())?;
    let g = rep.root;
    let coef =
        c_hat(g, s, c, cfg)?.value.abs() + (k as f64 - 1.0) * c_perp(g, s, c, cfg)?.value.abs();

    let fundamental = Scenario::radial("w_gamma_bar", spec, make_power(g)?, Claim::Solution)
        .with_scale(Scale::PowerLaw {
            coef,
            exponent: g + 2.0 * sv,
        })
        .with_tolerance(1e-8)
        .threshold("gamma_bar", g)
        .threshold("p_star", 1.0 + 2.0 * sv / g)
        .note(format!("solver residual {:.3e}", rep.residual));
    let capped = Scenario::radial(
        "capped_half_gamma_bar",
        spec,
        make_capped_power(0.5 * g, 1.0)?,
        Claim::OperatorSign(Expected::Nonpositive),
    )
    .with_radii(&[1.5, 3.0, 10.0]);
    let gc = sv - 0.5;
    let contrast = Scenario::radial(
        "k1_contrast",
        OperatorSpec::new(Family::IExtremal, Sign::Plus, 1, 2, s)?,
        make_positive_power(gc, sv)?,
        Claim::OperatorSign(Expected::Nonnegative),
    )
    .with_radii(&[1.5, 3.0, 10.0])
    .note(format!("profile -|x|^{gc}"));
    let parts = [fundamental, capped, contrast]
        .iter()
        .map(|sc| run_scenario(sc, cfg))
        .collect::<Result<Vec<_>>>()?;
    Ok(ScenarioResult::combine(
        &format!("fundamental_i_plus_k{k}"),
        parts,
    ))
}

/// I_N^- of the glued γ̃ profile vanishes for |x| ≥ 1.
pub fn check_fundamental_i_minus_n(
    n: usize,
    s: FractionalOrder,
    cfg: &QuadratureConfig,
) -> Result<ScenarioResult> {
    if n < 2 {
        return Err(Error::InvalidParams(format!("need N >= 2, got {n}")));
    }
    let sv = s.value();
    let spec = OperatorSpec::new(Family::IExtremal, Sign::Minus, n, n, s)?;
    let rep = solve_gamma_tilde(n, s, cfg, &SolveConfig::default())?;
    let g = rep.root;
    let theta_star = (1.0 / (n as f64).sqrt()).acos();
    let coef = n as f64 * spec.constants.c_1s * rep.residual_scale;
    let sc = Scenario::radial(
        &format!("fundamental_i_minus_n{n}"),
        spec,
        make_glued(g, std::f64::consts::FRAC_1_SQRT_2, false)?,
        Claim::Solution,
    )
    .with_radii(&[0.5, 1.0, 2.0, 5.0])
    .with_min_radius(1.0)
    .with_scale(Scale::PowerLaw {
        coef,
        exponent: g + 2.0 * sv,
    })
    .with_tolerance(1e-7)
    .threshold("gamma_tilde", g)
    .threshold("theta_star", theta_star)
    .threshold("p_star", 1.0 + 2.0 * sv / g)
    .note(format!(
        "profile glued inside r = 1/sqrt(2); directions at theta* = {theta_star:.7} rad"
    ));
    run_scenario(&sc, cfg)
}

/// J_k^+ |x|^-(k-2s) = 0 on the radial k-plane, in R^{k+1}.
pub fn check_fundamental_j_plus(
    k: usize,
    s: FractionalOrder,
    cfg: &QuadratureConfig,
) -> Result<ScenarioResult> {
    if k < 2 {
        return Err(Error::InvalidParams(format!("need k >= 2, got {k}")));
    }
    let sv = s.value();
    let spec = OperatorSpec::new(Family::JPlane, Sign::Plus, k, k + 1, s)?;
    // Far-field term u(x) C_{k,s} ∫_{|y|>r} |y|^-(k+2s) dy.
    let coef = spec.constants.c_ks(k) * sphere_area(k) / (2.0 * sv);
    let sc = Scenario::radial(
        &format!("fundamental_j_plus_k{k}"),
        spec,
        make_power(k as f64 - 2.0 * sv)?,
        Claim::Solution,
    )
    .with_radii(&[0.5, 1.0, 4.0])
    .with_scale(Scale::PowerLaw {
        coef,
        exponent: k as f64,
    })
    .with_tolerance(1e-6)
    .threshold("p_star", plane_threshold(k, s)?);
    run_scenario(&sc, cfg)
}

/// u(x) = -1/(1 + x_N²) on R^N.
pub fn smp_profile(n: usize, sign: f64) -> PlanarField {
    PlanarField {
        phi: Arc::new(move |t: f64| -sign / (1.0 + t * t)),
        axis: n - 1,
        n,
        sup: 1.0,
    }
}

/// At minimisers x = r e₁ of u = φ(x_N): I_k^- u ≤ 0, the coordinate frame
/// gives exactly 0, and I_k^+(-u) ≥ 0.
pub fn check_smp_counterexample(
    k: usize,
    n: usize,
    s: FractionalOrder,
    cfg: &QuadratureConfig,
) -> Result<ScenarioResult> {
    if k == 0 || k >= n {
        return Err(Error::InvalidParams(format!(
            "need 1 <= k < N, got k = {k}, N = {n}"
        )));
    }
    let radii = [0.5, 1.0, 2.0];
    let u: Arc<dyn Field> = Arc::new(smp_profile(n, 1.0));
    let minus_u: Arc<dyn Field> = Arc::new(smp_profile(n, -1.0));
    let spec = |sign| OperatorSpec::new(Family::IExtremal, sign, k, n, s);
    let mut en = vec![0.0; n];
    en[n - 1] = 1.0;
    let x1 = {
        let mut x = vec![0.0; n];
        x[0] = 1.0;
        x
    };
    let normal =
        directional_field(u.as_ref(), &x1, &en, s, &spec(Sign::Minus)?.constants, cfg)?.value;
    if !(normal > 0.0) {
        return Err(Error::InvalidParams(format!(
            "I_eN u = {normal} should be positive"
        )));
    }
    let scale = Scale::Fixed { value: normal };
    let minus = Scenario::new(
        "minus_at_minimiser",
        spec(Sign::Minus)?,
        ScenarioProfile::Field(u.clone()),
        Claim::OperatorSign(Expected::Nonpositive),
    )
    .with_radii(&radii)
    .with_scale(scale);
    let dual = Scenario::new(
        "dual_plus_at_maximiser",
        spec(Sign::Plus)?,
        ScenarioProfile::Field(minus_u),
        Claim::OperatorSign(Expected::Nonnegative),
    )
    .with_radii(&radii)
    .with_scale(scale);
    let mut parts = vec![run_scenario(&minus, cfg)?, run_scenario(&dual, cfg)?];

    let frame = Frame::coordinate(k, n)?;
    let c = spec(Sign::Minus)?.constants;
    let rows = radii
        .iter()
        .map(|&r| {
            let mut x = vec![0.0; n];
            x[0] = r;
            let v = frame_sum(u.as_ref(), &x, &frame, s, &c, cfg)?;
            Ok(Row {
                r,
                lhs: v,
                rhs: 0.0,
                margin: -v.abs() / normal,
                operator: v,
                source: 0.0,
                scale: normal,
                error_estimate: 0.0,
                status: if v == 0.0 {
                    RowStatus::Ok
                } else {
                    RowStatus::Violated
                },
                part: None,
                note: None,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    parts.push(
        ScenarioResult {
            name: "coordinate_frame".into(),
            claim: Claim::Solution,
            expectation: Expectation::Holds,
            tolerance: 0.0,
            rows,
            excluded_radii: Vec::new(),
            verdict: Verdict::Pass,
            worst_margin: f64::NAN,
            notes: Vec::new(),
            thresholds: BTreeMap::new(),
        }
        .finish(),
    );
    let mut out = ScenarioResult::combine(&format!("smp_counterexample_k{k}_n{n}"), parts);
    out.notes.push(format!(
        "I_eN u = {normal:.6e} > 0 at the minimisers, so u is not constant"
    ));
    Ok(out)
}
