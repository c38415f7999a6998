use trunclap::profiles::*;

fn catalog() -> Vec<RadialProfile> {
    vec![
        make_power(0.5).unwrap(),
        make_power(0.3).unwrap(),
        make_positive_power(0.5, 0.75).unwrap(),
        make_shifted_power(1.0, 0.75).unwrap(),
        make_bump_power(2.0, 0.75).unwrap(),
        make_gaussian(1.0).unwrap(),
        make_gaussian(0.2).unwrap(),
        make_glued(1.4, 0.5f64.sqrt(), false).unwrap(),
        make_glued(1.1, 5.0, true).unwrap(),
    ]
}

#[test]
fn certified_catalog_passes_sampled_hypotheses() {
    for p in catalog() {
        let rep = check_hypotheses(&p, 200);
        assert!(rep.all_pass(), "{}: {:?}", p.name(), rep);
        assert!(rep.mismatches.is_empty());
    }
}

#[test]
fn adversarial_profile_fails_monotonicity() {
    let p = RadialProfile::custom(
        "sin_over_cubic",
        |t: f64| t.sin() / (1.0 + t.powi(3)),
        0.0,
        DecayEnvelope::power(2.0, 3.0),
        ProfileFlags::ALL,
        vec![],
    );
    let rep = check_hypotheses(&p, 128);
    assert!(!rep.gtilde_prime_nondecreasing.pass);
    assert!(rep.gtilde_prime_nondecreasing.worst_violation > 1e-3);
    assert!(rep
        .mismatches
        .contains(&"gtilde_prime_nondecreasing".to_string()));
}

#[test]
fn envelopes_bound_catalog_on_log_grid() {
    let mut all = catalog();
    all.push(make_capped_power(0.2, 1.0).unwrap());
    all.push(make_capped_power(0.6, 0.3).unwrap());
    for p in all {
        let lo = p.decay.from.max(1e-3);
        for i in 0..64 {
            let t = (lo.ln() + (1e6f64.ln() - lo.ln()) * i as f64 / 63.0).exp();
            let g = p.eval(t).abs();
            assert!(
                g <= p.decay.bound(t) * (1.0 + 1e-12),
                "{} at t = {t}: {g} > {}",
                p.name(),
                p.decay.bound(t)
            );
        }
    }
}

#[test]
fn glued_joints_are_c2() {
    for &g in &[0.2, 0.7, 1.0, 1.35, 2.0, 3.5] {
        for &r in &[0.3, 0.5f64.sqrt(), 1.0, 2.5] {
            let p = build_glued_profile(g, r, false).unwrap();
            assert!(p.joint_residuals().iter().all(|&x| x < 1e-9), "g={g} r={r}");
            // one-sided differences across the joint agree with the analytic slopes
            let h = 1e-7 * r;
            let left = (p.value(r) - p.value(r - h)) / h;
            let right = (p.value(r + h) - p.value(r)) / h;
            assert!((left - right).abs() < 1e-5 * left.abs().max(1.0));
        }
    }
    for &g in &[0.8, 1.2, 2.0] {
        let r = log_glue_threshold(g).sqrt() * 1.05;
        let p = build_glued_profile(g, r, true).unwrap();
        assert!(p.joint_residuals().iter().all(|&x| x < 1e-9));
    }
}

#[test]
fn glued_inner_second_derivative_is_convex() {
    let p = make_glued(1.3, 0.5f64.sqrt(), false).unwrap();
    let rep = check_hypotheses(&p, 400);
    assert!(rep.gtilde_second_convex.pass, "{rep:?}");
}

// Inner cubic at R = 1/√2: Taylor coefficients of ρ^(-γ/2) about ρ = ½, in powers of (r² - ½).
#[test]
fn glued_inner_matches_symbolic_coefficients() {
    let g: f64 = 1.37;
    let p = build_glued_profile(g, 0.5f64.sqrt(), false).unwrap();
    let a = 2f64.powf(g / 2.0);
    let expect = [
        a,
        -a * g,
        a * g * (g + 2.0) / 2.0,
        -a * g * (g + 2.0) * (g + 4.0) / 6.0,
    ];
    for (c, e) in p.inner_poly.iter().zip(expect) {
        assert!((c - e).abs() < 1e-12 * e.abs(), "{c} vs {e}");
    }
}

#[test]
fn capped_power_is_continuous_and_flagged_off() {
    let p = make_capped_power(0.4, 1.0).unwrap();
    assert_eq!(p.breakpoints, vec![1.0]);
    assert!(!p.flags.single_direction());
    assert!((p.eval(1.0 - 1e-12) - p.eval(1.0 + 1e-12)).abs() < 1e-11);
}
