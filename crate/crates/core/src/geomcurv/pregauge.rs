//! The Gram endomorphism `H0⁻¹H` and its positive square root `τ`, the
//! isometry `(V, H) → (V, H0)` that is self-adjoint for both forms.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::CurvError;

/// Eigenvalues and orthonormal eigenvectors by cyclic Jacobi rotations.
// nalgebra's SymmetricEigen loses up to 1e-1 relative accuracy on some
// ill-conditioned 4×4 inputs; Jacobi keeps eigenvalues to full relative precision.
pub fn jacobi_eigen(m: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let n = m.nrows();
    let mut a = (m + m.transpose()) * 0.5;
    let mut v = DMatrix::identity(n, n);
    for _sweep in 0..64 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq.abs() <= 1e-20 * (a[(p, p)] * a[(q, q)]).abs().sqrt() || apq == 0.0 {
                    continue;
                }
                rotated = true;
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    (DVector::from_fn(n, |i, _| a[(i, i)]), v)
}

fn spd_power(m: &DMatrix<f64>, p: f64) -> Result<DMatrix<f64>, CurvError> {
    let (values, vectors) = jacobi_eigen(m);
    if values.iter().any(|&l| !(l > 0.0)) {
        return Err(CurvError::Precondition("matrix is not positive definite".into()));
    }
    let d = DMatrix::from_diagonal(&values.map(|l| l.powf(p)));
    Ok(&vectors * d * vectors.transpose())
}

fn require_symmetric(m: &DMatrix<f64>, name: &str) -> Result<(), CurvError> {
    if !m.is_square() || (m - m.transpose()).amax() > 1e-12 * (1.0 + m.amax()) {
        return Err(CurvError::Precondition(format!("{} is not symmetric", name)));
    }
    Ok(())
}

/// `H0⁻¹H`.
pub fn gram(h0: &DMatrix<f64>, h: &DMatrix<f64>) -> Result<DMatrix<f64>, CurvError> {
    h0.clone().cholesky().map(|c| c.solve(h)).ok_or_else(|| CurvError::Precondition("H0 is not positive definite".into()))
}

/// `τ = H0^{-1/2} (H0^{-1/2} H H0^{-1/2})^{1/2} H0^{1/2}`.
pub fn pre_gauge(h0: &DMatrix<f64>, h: &DMatrix<f64>) -> Result<DMatrix<f64>, CurvError> {
    require_symmetric(h0, "H0")?;
    require_symmetric(h, "H")?;
    if h0.shape() != h.shape() {
        return Err(CurvError::Precondition("H0 and H differ in size".into()));
    }
    let half = spd_power(h0, 0.5)?;
    let inv_half = spd_power(h0, -0.5)?;
    spd_power(h, 1.0)?;
    let s = spd_power(&(&inv_half * h * &inv_half), 0.5)?;
    Ok(&inv_half * s * half)
}

/// Postcondition residuals, each relative to the size of the inputs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PreGaugeResiduals {
    /// `τᵀH0τ − H`.
    pub isometry: f64,
    /// `H0τ − (H0τ)ᵀ`.
    pub self_adjoint_h0: f64,
    /// `Hτ − (Hτ)ᵀ`.
    pub self_adjoint_h: f64,
    /// `τ² − H0⁻¹H`.
    pub square: f64,
    /// `τ(H0, H)·τ(H, H0) − 1`, relative to `‖τ‖‖τ⁻¹‖`.
    pub inverse: f64,
    /// Smallest eigenvalue of the symmetrized `H0τ`; positive iff τ is positive.
    pub min_eigenvalue: f64,
}

impl PreGaugeResiduals {
    pub fn max(&self) -> f64 {
        [self.isometry, self.self_adjoint_h0, self.self_adjoint_h, self.square, self.inverse].into_iter().fold(0.0, f64::max)
    }

    pub fn holds(&self, tol: f64) -> bool {
        self.max() < tol && self.min_eigenvalue > 0.0
    }
}

fn rel(m: &DMatrix<f64>, scale: f64) -> f64 {
    m.amax() / scale.max(1.0)
}

pub fn pre_gauge_residuals(h0: &DMatrix<f64>, h: &DMatrix<f64>) -> Result<PreGaugeResiduals, CurvError> {
    let tau = pre_gauge(h0, h)?;
    let back = pre_gauge(h, h0)?;
    let scale = h0.amax().max(h.amax());
    let h0t = h0 * &tau;
    let ht = h * &tau;
    let n = tau.nrows();
    let min_eigenvalue = jacobi_eigen(&h0t).0.min();
    Ok(PreGaugeResiduals {
        isometry: rel(&(tau.transpose() * h0 * &tau - h), scale),
        self_adjoint_h0: rel(&(&h0t - h0t.transpose()), scale * tau.amax()),
        self_adjoint_h: rel(&(&ht - ht.transpose()), scale * tau.amax()),
        square: rel(&(&tau * &tau - gram(h0, h)?), tau.amax() * tau.amax()),
        inverse: rel(&(&tau * &back - DMatrix::identity(n, n)), tau.amax() * back.amax()),
        min_eigenvalue,
    })
}

/// A random symmetric positive-definite matrix with eigenvalues in `[1, cond]`.
pub fn random_spd(rng: &mut ChaCha8Rng, n: usize, cond: f64) -> DMatrix<f64> {
    let q = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0)).qr().q();
    let eig: Vec<f64> = (0..n).map(|k| if k == 0 { 1.0 } else if k == 1 { cond } else { rng.gen_range(1.0..cond) }).collect();
    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(eig));
    let m = &q * d * q.transpose();
    (&m + m.transpose()) * 0.5
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PreGaugeSample {
    pub dim: usize,
    pub residuals: PreGaugeResiduals,
    /// `τ(AᵀH0A, AᵀHA) − A⁻¹τ(H0, H)A`, relative.
    pub naturality: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PreGaugeReport {
    pub samples: Vec<PreGaugeSample>,
    pub max_residual: f64,
    pub max_naturality: f64,
    pub tol: f64,
    pub passed: bool,
}

/// Checks every postcondition and naturality on `k` random pairs with
/// condition number at most `cond` and dimensions in `2..=max_dim`.
pub fn pre_gauge_check(k: usize, seed: u64, max_dim: usize, cond: f64, tol: f64) -> Result<PreGaugeReport, CurvError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inputs: Vec<(DMatrix<f64>, DMatrix<f64>, DMatrix<f64>)> = (0..k)
        .map(|_| {
            let n = rng.gen_range(2..=max_dim.max(2));
            let h0 = random_spd(&mut rng, n, cond);
            let h = random_spd(&mut rng, n, cond);
            let a = loop {
                let a = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0)) + DMatrix::identity(n, n) * 2.0;
                if a.clone().svd(false, false).singular_values.min() > 0.2 {
                    break a;
                }
            };
            (h0, h, a)
        })
        .collect();
    let results: Vec<Result<PreGaugeSample, CurvError>> = inputs
        .par_iter()
        .map(|(h0, h, a)| {
            let residuals = pre_gauge_residuals(h0, h)?;
            let tau = pre_gauge(h0, h)?;
            let pulled = pre_gauge(&(a.transpose() * h0 * a), &(a.transpose() * h * a))?;
            let a_inv = a.clone().try_inverse().ok_or_else(|| CurvError::Precondition("A is singular".into()))?;
            let naturality = rel(&(pulled - a_inv * &tau * a), tau.amax());
            Ok(PreGaugeSample { dim: h0.nrows(), residuals, naturality })
        })
        .collect();
    let samples = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    let max_residual = samples.iter().map(|s| s.residuals.max()).fold(0.0, f64::max);
    let max_naturality = samples.iter().map(|s| s.naturality).fold(0.0, f64::max);
    let passed = samples.iter().all(|s| s.residuals.holds(tol)) && max_naturality < tol;
    Ok(PreGaugeReport { samples, max_residual, max_naturality, tol, passed })
}
