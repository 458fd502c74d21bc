//! The chart `Ξ_R(r,φ) = γ_R(φ) + r·v_R(φ)` around an arc-length planar
//! curve of curvature `κ_R(φ) = R⁻¹κ(φ/R)`, whose Euclidean pullback is
//! `dr² + (1 + rκ_R(φ))² dφ²`.
//!
//! ```text
//! kappa = "1/3"
//! scale = 1
//! domain phi in [0, 6]
//! domain r in [-0.5, 0.5]
//! seed = 1
//! ```

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::family::{as_count, format_err, parse_quoted, read_entries, Entry, Value};
use super::CurvError;
use crate::exprparse::Expr;

#[derive(Debug, Clone, PartialEq)]
pub struct AngleChart {
    /// `κ` as an expression in `t1`.
    pub kappa: Expr,
    pub scale: f64,
    pub phi: (f64, f64),
    pub r: (f64, f64),
    pub seed: u64,
}

impl AngleChart {
    pub fn parse(text: &str) -> Result<Self, CurvError> {
        let mut kappa = None;
        let mut scale = 1.0;
        let mut seed = 0;
        let mut phi = None;
        let mut r = None;
        for e in read_entries(text)? {
            match e {
                Entry::Assign { key, value, line, col } => match (key.as_str(), &value) {
                    ("kappa", Value::Quoted(s, c)) => {
                        let k = parse_quoted(s, line, *c)?;
                        if k.max_indices().0 > 0 || k.max_indices().1 > 1 {
                            return Err(format_err(line, *c, "kappa may only use t1"));
                        }
                        kappa = Some(k);
                    }
                    ("scale", Value::Number(v)) if *v > 0.0 => scale = *v,
                    ("seed", v) => seed = as_count(v, line, col)? as u64,
                    (k, _) => return Err(format_err(line, col, format!("unexpected key '{}'", k))),
                },
                Entry::Domain { var, lo, hi, line, col } => match var.as_str() {
                    "phi" => phi = Some((lo, hi)),
                    "r" => r = Some((lo, hi)),
                    _ => return Err(format_err(line, col, format!("unknown domain variable '{}'", var))),
                },
            }
        }
        Ok(AngleChart {
            kappa: kappa.ok_or_else(|| format_err(1, 1, "missing 'kappa'"))?,
            scale,
            phi: phi.ok_or_else(|| format_err(1, 1, "missing domain for phi"))?,
            r: r.ok_or_else(|| format_err(1, 1, "missing domain for r"))?,
            seed,
        })
    }

    /// `κ_R(φ)`.
    pub fn kappa_r(&self, phi: f64) -> Result<f64, CurvError> {
        Ok(self.kappa.value(&[], &[phi / self.scale])? / self.scale)
    }

    /// `1/κ` when `κ` is a positive constant.
    fn circle_radius(&self) -> Option<f64> {
        if self.kappa.max_indices() != (0, 0) {
            return None;
        }
        let k = self.kappa_r(0.0).ok()?;
        (k > 0.0).then(|| 1.0 / k)
    }
}

/// `(x, y, θ)` along the curve, tabulated by RK4 on a fixed grid.
struct Curve<'a> {
    chart: &'a AngleChart,
    start: f64,
    step: f64,
    nodes: Vec<[f64; 3]>,
}

impl<'a> Curve<'a> {
    const STEP: f64 = 1e-3;
    const PAD: f64 = 0.01;

    fn new(chart: &'a AngleChart) -> Result<Self, CurvError> {
        let start = chart.phi.0 - Self::PAD;
        let count = ((chart.phi.1 + Self::PAD - start) / Self::STEP).ceil() as usize + 1;
        let mut curve = Curve { chart, start, step: Self::STEP, nodes: vec![[0.0; 3]] };
        for k in 0..count {
            let next = curve.advance(curve.nodes[k], start + k as f64 * Self::STEP, Self::STEP)?;
            curve.nodes.push(next);
        }
        Ok(curve)
    }

    fn rhs(&self, s: [f64; 3], phi: f64) -> Result<[f64; 3], CurvError> {
        Ok([s[2].cos(), s[2].sin(), self.chart.kappa_r(phi)?])
    }

    fn advance(&self, s: [f64; 3], phi: f64, h: f64) -> Result<[f64; 3], CurvError> {
        let add = |a: [f64; 3], b: [f64; 3], c: f64| [a[0] + c * b[0], a[1] + c * b[1], a[2] + c * b[2]];
        let k1 = self.rhs(s, phi)?;
        let k2 = self.rhs(add(s, k1, h / 2.0), phi + h / 2.0)?;
        let k3 = self.rhs(add(s, k2, h / 2.0), phi + h / 2.0)?;
        let k4 = self.rhs(add(s, k3, h), phi + h)?;
        Ok([0, 1, 2].map(|i| s[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])))
    }

    fn at(&self, phi: f64) -> Result<[f64; 3], CurvError> {
        let k = (((phi - self.start) / self.step).floor().max(0.0) as usize).min(self.nodes.len() - 1);
        let node = self.start + k as f64 * self.step;
        self.advance(self.nodes[k], node, phi - node)
    }

    fn chart_point(&self, r: f64, phi: f64) -> Result<[f64; 2], CurvError> {
        let [x, y, th] = self.at(phi)?;
        Ok([x + r * th.sin(), y - r * th.cos()])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AngleSample {
    pub r: f64,
    pub phi: f64,
    /// Pullback `[g_rr, g_rφ, g_φφ]` from finite-difference Jacobians.
    pub pullback: [f64; 3],
    /// `[1, 0, (1 + rκ_R)²]`.
    pub closed_form: [f64; 3],
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AngleReport {
    pub samples: Vec<AngleSample>,
    pub max_error: f64,
    /// For a circle of radius `ρ`: `max | |Ξ(r,φ) − c| − (ρ + r) |`.
    pub polar_radius_error: Option<f64>,
    pub tol: f64,
    pub passed: bool,
}

/// Compares the finite-difference pullback of `Ξ_R` with the closed form at
/// `k` samples of the strip.
pub fn angle_chart_check(chart: &AngleChart, k: usize, seed: u64, tol: f64) -> Result<AngleReport, CurvError> {
    let curve = Curve::new(chart)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let delta = 1e-5;
    let points: Vec<(f64, f64)> = (0..k)
        .map(|_| (rng.gen_range(chart.r.0..=chart.r.1), rng.gen_range(chart.phi.0 + delta..=chart.phi.1 - delta)))
        .collect();
    let results: Vec<Result<AngleSample, CurvError>> = points
        .par_iter()
        .map(|&(r, phi)| {
            let stretch = 1.0 + r * chart.kappa_r(phi)?;
            if !(stretch > 0.0) {
                return Err(CurvError::Degenerate(format!("1 + rκ_R ≤ 0 at r = {}, φ = {}", r, phi)));
            }
            let p = |r: f64, phi: f64| curve.chart_point(r, phi);
            let (rp, rm) = (p(r + delta, phi)?, p(r - delta, phi)?);
            let (pp, pm) = (p(r, phi + delta)?, p(r, phi - delta)?);
            let dr = [(rp[0] - rm[0]) / (2.0 * delta), (rp[1] - rm[1]) / (2.0 * delta)];
            let dphi = [(pp[0] - pm[0]) / (2.0 * delta), (pp[1] - pm[1]) / (2.0 * delta)];
            let pullback = [
                dr[0] * dr[0] + dr[1] * dr[1],
                dr[0] * dphi[0] + dr[1] * dphi[1],
                dphi[0] * dphi[0] + dphi[1] * dphi[1],
            ];
            let closed_form = [1.0, 0.0, stretch * stretch];
            let error = (0..3).map(|i| (pullback[i] - closed_form[i]).abs()).fold(0.0, f64::max);
            Ok(AngleSample { r, phi, pullback, closed_form, error })
        })
        .collect();
    let samples = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    let max_error = samples.iter().map(|s| s.error).fold(0.0, f64::max);
    let polar_radius_error = match chart.circle_radius() {
        Some(rho) => {
            let [x, y, th] = curve.at(chart.phi.0)?;
            let center = [x - rho * th.sin(), y + rho * th.cos()];
            let mut worst: f64 = 0.0;
            for s in &samples {
                let q = curve.chart_point(s.r, s.phi)?;
                let dist = ((q[0] - center[0]).powi(2) + (q[1] - center[1]).powi(2)).sqrt();
                worst = worst.max((dist - (rho + s.r)).abs());
            }
            Some(worst)
        }
        None => None,
    };
    let passed = max_error < tol && polar_radius_error.map_or(true, |e| e < tol);
    Ok(AngleReport { samples, max_error, polar_radius_error, tol, passed })
}
