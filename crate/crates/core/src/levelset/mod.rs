//! Dice functions, the merged two-dimensional function `𝚍_ρ`, its
//! rotational extension `𝔡_{n,ρ}`, and sampled checks of their level sets
//! and gradient flow.
//!
//! Every function is generic over [`Scalar`] so gradients and Hessians come
//! from hyper-dual evaluation.

mod flow;
mod profile;
mod scan;

use serde::Serialize;
use thiserror::Error;

use crate::exprparse::{HyperDual, Scalar};

pub use flow::{
    flow_decomposition_check, FarFieldSample, FlowReport, Trajectory, TrajectoryCheckpoint, LEVEL_TOL, ORTHOGONALITY_TOL,
    SPEED_TOL, START_LEVEL, TRANSLATION_TOL,
};
pub use profile::{aux, bump, cutoff, smooth_step, DELTA, MASS};
pub use scan::{property_scan, ScanReport, Violation};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DiceError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("point {at:?} lies outside every branch of the merged function")]
    OutsideDomain { at: Vec<f64> },
    #[error("flow failed: {0}")]
    Flow(String),
}

/// Tolerance used when testing membership in the closed branch domains.
pub const DOMAIN_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiceConfig {
    pub n: usize,
    pub rho: f64,
    /// Half-width of the overlap between the left and upper branches.
    pub epsilon: f64,
    /// `C⁻¹` in the extension of `dice_{n−1,ρ−2}`.
    pub c_inv: f64,
}

/// Which definition of `𝚍_ρ` applies at a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Upper,
    Lower,
    Left,
    Linear,
}

impl DiceConfig {
    /// `ε = (ρ−2)/4` and `C⁻¹ = 2(n−1)(ρ−2)²/(ρ−3)`.
    pub fn new(n: usize, rho: f64) -> Result<Self, DiceError> {
        if n < 2 {
            return Err(DiceError::Config(format!("n must be at least 2, got {}", n)));
        }
        if !(rho > 5.0) || !rho.is_finite() {
            return Err(DiceError::Config(format!("rho must exceed 5, got {}", rho)));
        }
        let m = (n - 1) as f64;
        Ok(DiceConfig { n, rho, epsilon: (rho - 2.0) / 4.0, c_inv: 2.0 * m * (rho - 2.0).powi(2) / (rho - 3.0) })
    }

    /// Which branch of `𝚍_ρ` covers `(x1, x2)`, in priority order.
    pub fn branch(&self, x1: f64, x2: f64) -> Option<Branch> {
        let (r, e, s) = (self.rho, self.epsilon, DOMAIN_SLACK);
        let within = |v: f64, lo: f64, hi: f64| v >= lo - s && v <= hi + s;
        let upper = |y: f64| (within(x1, -e, r) && within(y, r, r + 1.0)) || (within(x1, r - 2.0, r + 1.0) && within(y, r, r + 4.0));
        if upper(x2) {
            Some(Branch::Upper)
        } else if upper(-x2) {
            Some(Branch::Lower)
        } else if x1 < e {
            Some(Branch::Left)
        } else if within(x1, r, r + 1.0) && x2.abs() > r + 3.0 {
            Some(Branch::Linear)
        } else {
            None
        }
    }

    /// `𝚍_ρ(x1, x2)`.
    pub fn dfun<S: Scalar>(&self, x1: S, x2: S) -> Result<S, DiceError> {
        let r = self.rho;
        let branch = self.branch(x1.re(), x2.re()).ok_or_else(|| DiceError::OutsideDomain { at: vec![x1.re(), x2.re()] })?;
        Ok(match branch {
            Branch::Upper => three_minus(dice(r, &[x1, x2.offset(-(2.0 * r + 1.0))])),
            Branch::Lower => three_minus(dice(r, &[x1, x2.offset(2.0 * r + 1.0)])),
            Branch::Left => dice(r, &[x1, x2]),
            Branch::Linear => S::constant(2.0 + r) - x1,
        })
    }

    /// `d̃ice_{n−1,ρ}(y) = φχ(φ) + C(1 − χ(φ))|y|²` with `φ = dice_{n−1,ρ−2}(y) + ρ − 3`.
    pub fn tilde_dice<S: Scalar>(&self, y: &[S]) -> S {
        let r = self.rho;
        let phi = dice(r - 2.0, y).offset(r - 3.0);
        let chi = cutoff(r, phi);
        let norm_sq = y.iter().fold(S::constant(0.0), |acc, &v| acc + v * v);
        phi * chi + (S::constant(1.0) - chi) * norm_sq.scale(1.0 / self.c_inv)
    }

    /// `𝔡_{n,ρ}(x) = 𝚍_ρ(x1, d̃ice_{n−1,ρ}(x2, …, xn))`.
    pub fn frak_d<S: Scalar>(&self, x: &[S]) -> Result<S, DiceError> {
        if x.len() != self.n {
            return Err(DiceError::Config(format!("expected {} coordinates, got {}", self.n, x.len())));
        }
        self.dfun(x[0], self.tilde_dice(&x[1..]))
    }

    /// Value and gradient of `𝔡` at `x`.
    pub fn frak_gradient(&self, x: &[f64]) -> Result<(f64, Vec<f64>), DiceError> {
        value_and_gradient(x, |a| self.frak_d(a))
    }

    /// `∂_a∂_b 𝔡` at `x`.
    pub fn frak_second(&self, x: &[f64], a: usize, b: usize) -> Result<f64, DiceError> {
        let args: Vec<HyperDual> = x.iter().enumerate().map(|(k, &v)| HyperDual::variable(v, k == a, k == b)).collect();
        Ok(self.frak_d(&args)?.e12)
    }
}

fn three_minus<S: Scalar>(v: S) -> S {
    S::constant(3.0) - v
}

/// `dice_{n,ρ}(x) = Σ_j aux_ρ(|x_j|)`.
pub fn dice<S: Scalar>(rho: f64, x: &[S]) -> S {
    x.iter().fold(S::constant(0.0), |acc, &v| acc + aux(rho, v.abs()))
}

/// Value and gradient of a fallible scalar function, one hyper-dual pass per coordinate.
pub fn value_and_gradient<F, E>(x: &[f64], f: F) -> Result<(f64, Vec<f64>), E>
where
    F: Fn(&[HyperDual]) -> Result<HyperDual, E>,
{
    let mut value = 0.0;
    let mut grad = Vec::with_capacity(x.len());
    for a in 0..x.len() {
        let args: Vec<HyperDual> = x.iter().enumerate().map(|(k, &v)| HyperDual::variable(v, k == a, false)).collect();
        let out = f(&args)?;
        value = out.v;
        grad.push(out.e1);
    }
    Ok((value, grad))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_configs() {
        assert!(DiceConfig::new(1, 21.0).is_err());
        assert!(DiceConfig::new(2, 5.0).is_err());
        assert!(DiceConfig::new(3, f64::NAN).is_err());
    }

    #[test]
    fn dice_is_zero_on_the_cube() {
        assert_eq!(dice(21.0, &[0.0, 0.0, 0.0]), 0.0);
        assert_eq!(dice(21.0, &[18.9, -19.0, 5.0]), 0.0);
        let (v, g) = value_and_gradient(&[3.0, -4.0], |x| Ok::<_, ()>(dice(21.0, x))).unwrap();
        assert_eq!((v, g), (0.0, vec![0.0, 0.0]));
    }

    #[test]
    fn branches_and_linear_piece() {
        let c = DiceConfig::new(2, 21.0).unwrap();
        assert_eq!(c.branch(0.0, 21.5), Some(Branch::Upper));
        assert_eq!(c.branch(0.0, -21.5), Some(Branch::Lower));
        assert_eq!(c.branch(-30.0, 0.0), Some(Branch::Left));
        assert_eq!(c.branch(21.5, 40.0), Some(Branch::Linear));
        assert_eq!(c.branch(10.0, 0.0), None);
        assert!(matches!(c.dfun(10.0, 0.0), Err(DiceError::OutsideDomain { .. })));
        assert_eq!(c.dfun(21.5, 40.0).unwrap(), 1.5);
        // the upper branch reduces to the linear piece on its far corner
        assert!((c.dfun(21.5, 24.5).unwrap() - 1.5).abs() < 1e-12);
        assert!((c.dfun(0.0, 21.0).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn extension_agrees_with_shifted_dice_far_out() {
        let c = DiceConfig::new(3, 21.0).unwrap();
        for y in [[19.5, 3.0], [-20.0, 19.7], [0.0, 25.0]] {
            let phi = dice(19.0, &y) + 18.0;
            assert!(phi >= 19.0);
            assert!((c.tilde_dice(&y) - phi).abs() < 1e-12);
        }
        assert_eq!(c.tilde_dice(&[0.0, 0.0]), 0.0);
        assert!(c.tilde_dice(&[3.0, 4.0]) < 19.0);
    }
}
