use nalgebra::{DMatrix, SymmetricEigen};

use super::gamma::gamma;

// Gauss-Kronrod 21-point abscissae on [-1, 1], positive half; the last is the centre.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_1,
    0.973_906_528_517_171_7,
    0.930_157_491_355_708_2,
    0.865_063_366_688_984_5,
    0.780_817_726_586_416_9,
    0.679_409_568_299_024_4,
    0.562_757_134_668_604_7,
    0.433_395_394_129_247_2,
    0.294_392_862_701_460_2,
    0.148_874_338_981_631_22,
    0.0,
];

// 10-point Gauss weights at XGK[1], XGK[3], ..., XGK[9].
const WG: [f64; 5] = [
    0.066_671_344_308_688_14,
    0.149_451_349_150_580_6,
    0.219_086_362_515_982_04,
    0.269_266_719_309_996_35,
    0.295_524_224_714_752_87,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874,
    0.032_558_162_307_964_725,
    0.054_755_896_574_351_995,
    0.075_039_674_810_919_96,
    0.093_125_454_583_697_6,
    0.109_387_158_802_297_64,
    0.123_491_976_262_065_84,
    0.134_709_217_311_473_34,
    0.142_775_938_577_060_09,
    0.147_739_104_901_338_49,
    0.149_445_554_002_916_9,
];

/// One Gauss-Kronrod 21 panel on [a, b]: (Kronrod value, |K21 - G10|).
pub fn gk21<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[10] * fc;
    let mut g = 0.0;
    for j in 0..10 {
        let dx = h * XGK[j];
        let pair = f(c - dx) + f(c + dx);
        k += WGK[j] * pair;
        if j % 2 == 1 {
            g += WG[j / 2] * pair;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Globally adaptive GK21 on [a, b] with interior breakpoints.
///
/// Returns (value, error estimate, converged).
pub fn adaptive_gk21<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    abs_tol: f64,
    rel_tol: f64,
    max_subdivisions: usize,
) -> (f64, f64, bool) {
    let mut pts = vec![a];
    pts.extend(breaks.iter().copied().filter(|&x| x > a && x < b));
    pts.push(b);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let mut panels: Vec<(f64, f64, f64, f64)> = pts
        .windows(2)
        .map(|w| {
            let (v, e) = gk21(&mut f, w[0], w[1]);
            (w[0], w[1], v, e)
        })
        .collect();
    let mut frozen = vec![false; panels.len()];
    let total = |p: &[(f64, f64, f64, f64)]| -> (f64, f64) {
        p.iter()
            .fold((0.0, 0.0), |acc, x| (acc.0 + x.2, acc.1 + x.3))
    };
    for _ in 0..max_subdivisions {
        let (v, e) = total(&panels);
        if e <= abs_tol.max(rel_tol * v.abs()) {
            return (v, e, true);
        }
        let mut worst = None;
        for (i, p) in panels.iter().enumerate() {
            if !frozen[i] && worst.is_none_or(|j: usize| p.3 > panels[j].3) {
                worst = Some(i);
            }
        }
        let Some(i) = worst else { return (v, e, false) };
        let (x0, x1, _, _) = panels[i];
        let mid = 0.5 * (x0 + x1);
        if x1 - x0 <= 64.0 * f64::EPSILON * x0.abs().max(x1.abs()).max(f64::MIN_POSITIVE) {
            frozen[i] = true;
            continue;
        }
        let (vl, el) = gk21(&mut f, x0, mid);
        let (vr, er) = gk21(&mut f, mid, x1);
        panels[i] = (x0, mid, vl, el);
        panels.push((mid, x1, vr, er));
        frozen.push(false);
    }
    let (v, e) = total(&panels);
    (v, e, e <= abs_tol.max(rel_tol * v.abs()))
}

/// Gauss-Jacobi rule for ∫₀¹ q(v) v^b dv with b in (-1, 0].
#[derive(Debug, Clone)]
pub struct GaussJacobi {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussJacobi {
    pub fn new(n: usize, b: f64) -> Self {
        // Jacobi matrix for weight (1+x)^b on [-1, 1] (alpha = 0).
        let al = 0.0f64;
        let be = b;
        let ab = al + be;
        let mut j = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            let fi = i as f64;
            let diag = if i == 0 {
                (be - al) / (ab + 2.0)
            } else {
                (be * be - al * al) / ((2.0 * fi + ab) * (2.0 * fi + ab + 2.0))
            };
            j[(i, i)] = diag;
            if i + 1 < n {
                let m = fi + 1.0;
                let num = if i == 0 {
                    4.0 * (1.0 + al) * (1.0 + be)
                } else {
                    4.0 * m * (m + al) * (m + be) * (m + ab)
                };
                let den = if i == 0 {
                    (2.0 + ab).powi(2) * (3.0 + ab)
                } else {
                    (2.0 * m + ab).powi(2) * (2.0 * m + ab + 1.0) * (2.0 * m + ab - 1.0)
                };
                let off = (num / den).sqrt();
                j[(i, i + 1)] = off;
                j[(i + 1, i)] = off;
            }
        }
        let mu0 = 2f64.powf(ab + 1.0) * gamma(al + 1.0) * gamma(be + 1.0) / gamma(ab + 2.0);
        let eig = SymmetricEigen::new(j);
        let scale = 2f64.powf(-1.0 - be);
        let mut pairs: Vec<(f64, f64)> = (0..n)
            .map(|i| {
                let x = eig.eigenvalues[i];
                let v0 = eig.eigenvectors[(0, i)];
                (0.5 * (1.0 + x), mu0 * v0 * v0 * scale)
            })
            .collect();
        pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
        GaussJacobi {
            nodes: pairs.iter().map(|p| p.0).collect(),
            weights: pairs.iter().map(|p| p.1).collect(),
        }
    }

    pub fn apply<F: FnMut(f64) -> f64>(&self, mut q: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&v, &w)| w * q(v))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gk21_polynomials_exact() {
        let (v, e) = gk21(|x| x.powi(20) + 3.0 * x.powi(5), 0.0, 1.0);
        assert!((v - (1.0 / 21.0 + 0.5)).abs() < 1e-15);
        assert!(e < 1e-3);
        let (v, _) = gk21(|x| x.sin(), 0.0, std::f64::consts::PI);
        assert!((v - 2.0).abs() < 1e-14);
    }

    #[test]
    fn jacobi_moments() {
        for &b in &[-0.3, -0.75, -0.95, 0.0] {
            let r = GaussJacobi::new(16, b);
            let total: f64 = r.weights.iter().sum();
            assert!((total - 1.0 / (1.0 + b)).abs() < 1e-13, "b = {b}");
            // ∫ v^7 v^b = 1/(8+b)
            let m = r.apply(|v| v.powi(7));
            assert!((m - 1.0 / (8.0 + b)).abs() < 1e-13);
            assert!(r.nodes.iter().all(|&v| v > 0.0 && v < 1.0));
        }
    }
}
