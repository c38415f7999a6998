use serde::{Deserialize, Serialize};

use super::{ProfileFlags, RadialProfile};

const THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlagCheck {
    pub pass: bool,
    /// Worst relative violation found on the grid (0 when none).
    pub worst_violation: f64,
    /// ρ = t² where the worst violation occurred.
    pub at: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub gtilde_prime_nondecreasing: FlagCheck,
    pub gtilde_prime_l1: FlagCheck,
    pub gtilde_second_convex: FlagCheck,
    pub declared: ProfileFlags,
    /// Flags declared true that sampling contradicts.
    pub mismatches: Vec<String>,
}

impl HypothesisReport {
    pub fn all_pass(&self) -> bool {
        self.gtilde_prime_nondecreasing.pass
            && self.gtilde_prime_l1.pass
            && self.gtilde_second_convex.pass
    }
}

fn worst(violations: impl Iterator<Item = (f64, f64)>) -> FlagCheck {
    let (v, at) = violations.fold((0.0, f64::NAN), |acc, x| if x.0 > acc.0 { x } else { acc });
    FlagCheck {
        pass: v <= THRESHOLD,
        worst_violation: v,
        at,
    }
}

/// Sampled check of the g̃ hypotheses on a log grid of ρ in [1e-4, 1e4].
///
/// Advisory: the declared flags still govern dispatch.
pub fn check_hypotheses(p: &RadialProfile, n_samples: usize) -> HypothesisReport {
    let n = n_samples.max(16);
    let lo = 1e-4f64;
    let hi = 1e4f64;
    let rho: Vec<f64> = (0..n)
        .map(|i| (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (n - 1) as f64).exp())
        .collect();
    let d: Vec<(f64, f64)> = rho.iter().map(|&r| p.gtilde_derivatives(r)).collect();
    let g1: Vec<f64> = d.iter().map(|x| x.0).collect();
    let g2: Vec<f64> = d.iter().map(|x| x.1).collect();

    let mono = worst((0..n - 1).map(|i| {
        let drop = (g1[i] - g1[i + 1]).max(0.0);
        let scale = g1[i].abs().max(g1[i + 1].abs()).max(f64::MIN_POSITIVE);
        (drop / scale, rho[i])
    }));

    let convex = worst((1..n - 1).map(|i| {
        let s1 = (g2[i] - g2[i - 1]) / (rho[i] - rho[i - 1]);
        let s2 = (g2[i + 1] - g2[i]) / (rho[i + 1] - rho[i]);
        let dd = s2 - s1;
        let scale = (g2[i - 1].abs() + g2[i].abs() + g2[i + 1].abs()) / (rho[i + 1] - rho[i - 1]);
        ((-dd).max(0.0) / scale.max(f64::MIN_POSITIVE), rho[i])
    }));

    // Integrability of g̃' against (1+ρ^(s+1/2))^-1 for every s > 1/2 holds
    // when |g̃'| decays at the end of the grid.
    let m = n - 1;
    let (a, b) = (g1[m - 4].abs(), g1[m].abs());
    let slope = if a == 0.0 && b == 0.0 {
        -1.0
    } else {
        (b.max(f64::MIN_POSITIVE) / a.max(f64::MIN_POSITIVE)).ln() / (rho[m] / rho[m - 4]).ln()
    };
    let l1 = FlagCheck {
        pass: slope < 0.0,
        worst_violation: slope.max(0.0),
        at: rho[m],
    };

    let declared = p.flags;
    let mut mismatches = Vec::new();
    if declared.gtilde_prime_nondecreasing && !mono.pass {
        mismatches.push("gtilde_prime_nondecreasing".to_string());
    }
    if declared.gtilde_prime_l1 && !l1.pass {
        mismatches.push("gtilde_prime_l1".to_string());
    }
    if declared.gtilde_second_convex && !convex.pass {
        mismatches.push("gtilde_second_convex".to_string());
    }
    HypothesisReport {
        gtilde_prime_nondecreasing: mono,
        gtilde_prime_l1: l1,
        gtilde_second_convex: convex,
        declared,
        mismatches,
    }
}
