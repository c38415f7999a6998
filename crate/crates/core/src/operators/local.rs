use nalgebra::{DMatrix, SymmetricEigen};

use super::Sign;
use crate::error::{Error, Result};
use crate::profiles::RadialProfile;

/// Sum of the k largest (plus) or k smallest (minus) Hessian eigenvalues.
pub fn local_truncated(hessian: &DMatrix<f64>, k: usize, sign: Sign) -> Result<f64> {
    let n = hessian.nrows();
    if hessian.ncols() != n {
        return Err(Error::InvalidParams("Hessian must be square".into()));
    }
    if k == 0 || k > n {
        return Err(Error::InvalidParams(format!("k = {k} outside 1..={n}")));
    }
    let asym = (hessian - hessian.transpose()).amax();
    if asym > 1e-12 {
        return Err(Error::NonSymmetric(asym));
    }
    let mut eig: Vec<f64> = SymmetricEigen::new(hessian.clone())
        .eigenvalues
        .iter()
        .copied()
        .collect();
    eig.sort_by(f64::total_cmp);
    Ok(sum_extreme(&eig, k, sign))
}

fn sum_extreme(sorted: &[f64], k: usize, sign: Sign) -> f64 {
    match sign {
        Sign::Plus => sorted[sorted.len() - k..].iter().sum(),
        Sign::Minus => sorted[..k].iter().sum(),
    }
}

/// Radial Hessian spectrum: g''(r) once and g'(r)/r with multiplicity N - 1.
pub fn radial_hessian_eigs(p: &RadialProfile, r: f64) -> (f64, f64) {
    (p.d2(r), p.d1(r) / r)
}

/// P_k^± of u = g(|x|) at |x| = r in R^N.
pub fn local_radial(p: &RadialProfile, r: f64, n: usize, k: usize, sign: Sign) -> Result<f64> {
    if k == 0 || k > n {
        return Err(Error::InvalidParams(format!("k = {k} outside 1..={n}")));
    }
    let (a, b) = radial_hessian_eigs(p, r);
    let mut eig = vec![b; n - 1];
    eig.push(a);
    eig.sort_by(f64::total_cmp);
    Ok(sum_extreme(&eig, k, sign))
}

/// Radial Hessian assembled as g''·x̂x̂ᵀ + (g'/r)(I - x̂x̂ᵀ).
pub fn radial_hessian(p: &RadialProfile, x: &[f64]) -> DMatrix<f64> {
    let n = x.len();
    let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let (a, b) = radial_hessian_eigs(p, r);
    DMatrix::from_fn(n, n, |i, j| {
        let outer = x[i] * x[j] / (r * r);
        let id = if i == j { 1.0 } else { 0.0 };
        a * outer + b * (id - outer)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::make_power;

    #[test]
    fn diagonal_cases() {
        let id = DMatrix::<f64>::identity(3, 3);
        assert!((local_truncated(&id, 2, Sign::Plus).unwrap() - 2.0).abs() < 1e-14);
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![-1.0, 0.0, 3.0]));
        assert!((local_truncated(&d, 1, Sign::Plus).unwrap() - 3.0).abs() < 1e-14);
        assert!((local_truncated(&d, 1, Sign::Minus).unwrap() + 1.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_asymmetric() {
        let mut m = DMatrix::<f64>::identity(2, 2);
        m[(0, 1)] = 1e-6;
        assert!(matches!(
            local_truncated(&m, 1, Sign::Plus),
            Err(Error::NonSymmetric(_))
        ));
    }

    #[test]
    fn power_spectrum() {
        let g = 0.4;
        let (a, b) = radial_hessian_eigs(&make_power(g).unwrap(), 1.0);
        assert!((a - g * (g + 1.0)).abs() < 1e-14);
        assert!((b + g).abs() < 1e-14);
    }
}
