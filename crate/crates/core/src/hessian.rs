//! Observed information by central finite differences.

use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Relative finite-difference step per coordinate.
pub const RELATIVE_STEP: f64 = 1e-4;

/// Largest Newton step, in standard errors, accepted as stationary.
pub const STATIONARITY_TOL: f64 = 1e-3;

fn steps(at: &[f64]) -> Vec<f64> {
    at.iter().map(|x| RELATIVE_STEP * x.abs().max(1.0)).collect()
}

/// Central-difference gradient with the same steps as [`observed_information`].
pub fn gradient<F: Fn(&[f64]) -> f64>(f: F, at: &[f64]) -> Vec<f64> {
    let h = steps(at);
    let mut x = at.to_vec();
    (0..at.len())
        .map(|i| {
            x[i] = at[i] + h[i];
            let up = f(&x);
            x[i] = at[i] - h[i];
            let down = f(&x);
            x[i] = at[i];
            (up - down) / (2.0 * h[i])
        })
        .collect()
}

/// `-H` where `H` is the symmetrized central-difference Hessian of `f` at `at`.
pub fn observed_information<F: Fn(&[f64]) -> f64>(f: F, at: &[f64]) -> DMatrix<f64> {
    let k = at.len();
    let h = steps(at);
    let f0 = f(at);
    let mut x = at.to_vec();
    let mut hess = DMatrix::<f64>::zeros(k, k);
    for i in 0..k {
        x[i] = at[i] + h[i];
        let up = f(&x);
        x[i] = at[i] - h[i];
        let down = f(&x);
        x[i] = at[i];
        hess[(i, i)] = (up - 2.0 * f0 + down) / (h[i] * h[i]);
        for j in 0..i {
            let mut eval = |si: f64, sj: f64| {
                x[i] = at[i] + si * h[i];
                x[j] = at[j] + sj * h[j];
                let v = f(&x);
                x[i] = at[i];
                x[j] = at[j];
                v
            };
            let d = (eval(1.0, 1.0) - eval(1.0, -1.0) - eval(-1.0, 1.0) + eval(-1.0, -1.0))
                / (4.0 * h[i] * h[j]);
            hess[(i, j)] = d;
            hess[(j, i)] = d;
        }
    }
    -hess
}

/// Standard errors: square roots of the diagonal of the inverse observed
/// information at the stationary point `at`.
///
/// Stationarity is judged by the Newton step `sqrt(g' I^-1 g)`, which is in
/// standard-error units and so independent of parameter scale.
pub fn se_from_hessian<F: Fn(&[f64]) -> f64>(f: F, at: &[f64]) -> Result<Vec<f64>> {
    let info = observed_information(&f, at);
    let chol = info.cholesky().ok_or(Error::SingularInformation)?;
    let grad = DVector::from_vec(gradient(&f, at));
    let step = libm::sqrt(grad.dot(&chol.solve(&grad)));
    if step.is_nan() || step > STATIONARITY_TOL {
        return Err(Error::NotStationary(step));
    }
    let covariance = chol.inverse();
    let se: Vec<f64> = covariance.diagonal().iter().map(|v| libm::sqrt(*v)).collect();
    if se.iter().all(|s| s.is_finite()) {
        Ok(se)
    } else {
        Err(Error::SingularInformation)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_information_is_exact() {
        // f = -(x^2 + x*y + 2 y^2): information [[2, 1], [1, 4]].
        let f = |p: &[f64]| -(p[0] * p[0] + p[0] * p[1] + 2.0 * p[1] * p[1]);
        let info = observed_information(f, &[0.0, 0.0]);
        assert!((info[(0, 0)] - 2.0).abs() < 1e-6);
        assert!((info[(1, 1)] - 4.0).abs() < 1e-6);
        assert!((info[(0, 1)] - 1.0).abs() < 1e-6);
        let se = se_from_hessian(f, &[0.0, 0.0]).unwrap();
        // inverse = [[4, -1], [-1, 2]] / 7
        assert!((se[0] - libm::sqrt(4.0 / 7.0)).abs() < 1e-6);
        assert!((se[1] - libm::sqrt(2.0 / 7.0)).abs() < 1e-6);
    }

    #[test]
    fn saddle_is_singular() {
        let f = |p: &[f64]| p[0] * p[0] - p[1] * p[1];
        assert_eq!(se_from_hessian(f, &[0.0, 0.0]), Err(Error::SingularInformation));
    }

    #[test]
    fn off_optimum_is_rejected() {
        let f = |p: &[f64]| -(p[0] - 1.0) * (p[0] - 1.0);
        assert!(matches!(se_from_hessian(f, &[0.0]), Err(Error::NotStationary(_))));
    }
}
