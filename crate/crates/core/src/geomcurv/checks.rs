//! Sampled verification over a metric family.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use super::family::{MetricFamily, SuspensionMetric, WarpedMetric};
use super::tensor::{curvature_fd, inverse_pd, Curvature, FdSteps, MetricJet};
use super::warped::{require_single_parameter, warped_terms_of, WarpedTerms};
use super::CurvError;

/// Evaluates `f` on every sample in parallel and reports the first error in
/// sample order.
fn map_samples<T, F>(points: &[Vec<f64>], f: F) -> Result<Vec<T>, CurvError>
where
    T: Send,
    F: Fn(&[f64]) -> Result<T, CurvError> + Sync,
{
    let results: Vec<Result<T, CurvError>> = points.par_iter().map(|y| f(y)).collect();
    results.into_iter().collect()
}

fn relative(a: f64, b: f64) -> f64 {
    (a - b).abs() / (1.0 + b.abs())
}

fn max_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, f64::max)
}

/// Checks `h` is positive definite and `f > 0` at `y`.
pub fn check_sample(fam: &MetricFamily, y: &[f64]) -> Result<(), CurvError> {
    let (x, t) = fam.split(y);
    let h = DMatrix::from_row_slice(fam.d, fam.d, &fam.h_entries(x, t)?);
    inverse_pd(&h, y)?;
    if !(fam.warp(x, t)? > 0.0) {
        return Err(CurvError::NonPositiveWarp { at: y.to_vec() });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvatureSample {
    pub point: Vec<f64>,
    pub formula: f64,
    pub oracle: f64,
    pub abs_error: f64,
    pub rel_error: f64,
    pub terms: WarpedTerms,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvatureReport {
    pub samples: Vec<CurvatureSample>,
    pub max_abs_error: f64,
    pub max_rel_error: f64,
    pub tol: f64,
    pub passed: bool,
}

/// Compares the warped formula with the finite-difference oracle on
/// `h + f²dt²` at `k` samples; relative error is `|a − b| / (1 + |b|)`.
pub fn curvature_check(fam: &MetricFamily, k: usize, seed: u64, tol: f64) -> Result<CurvatureReport, CurvError> {
    require_single_parameter(fam)?;
    let metric = WarpedMetric::new(fam);
    let points = fam.samples(k, seed);
    let samples = map_samples(&points, |y| {
        check_sample(fam, y)?;
        let terms = warped_terms_of(&metric, y)?;
        let oracle = curvature_fd(&metric, y, FdSteps::default())?.scal;
        Ok(CurvatureSample {
            point: y.to_vec(),
            formula: terms.total,
            oracle,
            abs_error: (terms.total - oracle).abs(),
            rel_error: relative(terms.total, oracle),
            terms,
        })
    })?;
    let max_abs_error = max_of(samples.iter().map(|s| s.abs_error));
    let max_rel_error = max_of(samples.iter().map(|s| s.rel_error));
    Ok(CurvatureReport { samples, max_abs_error, max_rel_error, tol, passed: max_rel_error < tol })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RescaleEntry {
    pub r: f64,
    /// `max |scal(R²·_Rh + _Rf²dt²)|`.
    pub max_abs_scal: f64,
    /// `max |scal(R²·_Rh + _Rf²dt²) − R⁻²·_R scal(h + f²dt²)|`, relative.
    pub identity_error: f64,
    /// `max |scal(_Rh + _Rf²dt²) − _R scal(h)|`, when `f` depends on `t` only.
    pub slice_difference: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RescaleReport {
    pub entries: Vec<RescaleEntry>,
    /// Least-squares slope of `log max|scal|` against `log R`.
    pub fitted_exponent: Option<f64>,
    pub slice_fitted_exponent: Option<f64>,
    pub tol: f64,
    pub passed: bool,
}

/// Slope of the least-squares line through `(log r, log v)`, ignoring zero values.
pub fn fitted_exponent(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points.iter().filter(|(_, v)| *v > 1e-300).map(|(r, v)| (r.ln(), v.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / n, sy / n);
    let cov: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = pts.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    Some(cov / var)
}

/// The exponent window accepted for `R⁻²` decay.
pub const DECAY_WINDOW: (f64, f64) = (-2.2, -1.8);

/// Verifies `scal(R²·_Rh + _Rf²dt²)(x, Rs) = R⁻²·scal(h + f²dt²)(x, s)` and
/// the resulting decay, at `k` samples `(x, s)` for each `R`.
pub fn rescaling_check(fam: &MetricFamily, rs: &[f64], k: usize, seed: u64, tol: f64) -> Result<RescaleReport, CurvError> {
    require_single_parameter(fam)?;
    let base = WarpedMetric::new(fam);
    let points = fam.samples(k, seed);
    let reference = map_samples(&points, |y| {
        check_sample(fam, y)?;
        Ok(curvature_fd(&base, y, FdSteps::default())?.scal)
    })?;
    let slice_reference = if fam.warp_depends_on_t_only() {
        Some(map_samples(&points, |y| Ok(warped_terms_of(&base, y)?.scal_h))?)
    } else {
        None
    };
    let mut entries = Vec::new();
    for &r in rs {
        let scaled = WarpedMetric { fam, t_scale: r, slice_factor: r * r };
        let stretched = WarpedMetric { fam, t_scale: r, slice_factor: 1.0 };
        let at = |y: &[f64]| {
            let mut z = y.to_vec();
            z[fam.d] *= r;
            z
        };
        let values = map_samples(&points, |y| warped_terms_of(&scaled, &at(y)).map(|t| t.total))?;
        let identity_error = max_of(values.iter().zip(&reference).map(|(v, s)| relative(*v, s / (r * r))));
        let slice_difference = match &slice_reference {
            Some(sref) => {
                let vals = map_samples(&points, |y| warped_terms_of(&stretched, &at(y)).map(|t| t.total))?;
                Some(max_of(vals.iter().zip(sref).map(|(v, s)| (v - s).abs())))
            }
            None => None,
        };
        entries.push(RescaleEntry { r, max_abs_scal: max_of(values.iter().map(|v| v.abs())), identity_error, slice_difference });
    }
    let fitted = fitted_exponent(&entries.iter().map(|e| (e.r, e.max_abs_scal)).collect::<Vec<_>>());
    let slice_fitted = if slice_reference.is_some() {
        fitted_exponent(&entries.iter().filter_map(|e| e.slice_difference.map(|v| (e.r, v))).collect::<Vec<_>>())
    } else {
        None
    };
    let in_window = |e: Option<f64>| e.map_or(true, |x| x >= DECAY_WINDOW.0 && x <= DECAY_WINDOW.1);
    let passed = entries.iter().all(|e| e.identity_error < tol) && in_window(fitted) && in_window(slice_fitted);
    Ok(RescaleReport { entries, fitted_exponent: fitted, slice_fitted_exponent: slice_fitted, tol, passed })
}

/// Which slowness predicate guards the suspension bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SlownessMode {
    /// `Σ_j(…) < ⅛ scal(g)`, guaranteeing `scal(susp g) > ⅞ scal(g)`.
    Eighth,
    /// `(1+d)·Σ_j(…) < scal(g)`, guaranteeing `scal(susp g) > (1 − 1/(1+d))·scal(g)`.
    Chapter7,
}

impl SlownessMode {
    pub fn holds(self, slowness: f64, scal: f64, d: usize) -> bool {
        match self {
            SlownessMode::Eighth => slowness < scal / 8.0,
            SlownessMode::Chapter7 => (1.0 + d as f64) * slowness < scal,
        }
    }

    pub fn bound_factor(self, d: usize) -> f64 {
        match self {
            SlownessMode::Eighth => 7.0 / 8.0,
            SlownessMode::Chapter7 => 1.0 - 1.0 / (1.0 + d as f64),
        }
    }
}

/// Per-parameter traces of a family at one point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParameterTraces {
    /// `tr((∂_j gᵒᵖ)²)`.
    pub tr_sq: Vec<f64>,
    /// `tr(∂_j g)`.
    pub tr: Vec<f64>,
    /// `tr(∂²_j g)`.
    pub tr_second: Vec<f64>,
}

impl ParameterTraces {
    fn from_jet(jet: &MetricJet, d: usize, ginv: &DMatrix<f64>) -> Self {
        let n = jet.g.nrows() - d;
        let cut = |m: &DMatrix<f64>| m.view((0, 0), (d, d)).into_owned();
        let mut out = ParameterTraces { tr_sq: Vec::new(), tr: Vec::new(), tr_second: Vec::new() };
        for j in 0..n {
            let a = ginv * cut(&jet.dg[d + j]);
            let b = ginv * cut(&jet.ddg[d + j][d + j]);
            out.tr_sq.push((&a * &a).trace());
            out.tr.push(a.trace());
            out.tr_second.push(b.trace());
        }
        out
    }

    /// `Σ_j (¾ tr((∂_j gᵒᵖ)²) − ¼ tr(∂_j g)² − tr(∂²_j g))`.
    pub fn correction(&self) -> f64 {
        (0..self.tr.len()).map(|j| 0.75 * self.tr_sq[j] - 0.25 * self.tr[j] * self.tr[j] - self.tr_second[j]).sum()
    }

    /// `Σ_j |tr((∂_j gᵒᵖ)²)| + |tr(∂²_j g)| + |tr(∂_j g)|²`.
    pub fn slowness(&self) -> f64 {
        (0..self.tr.len()).map(|j| self.tr_sq[j].abs() + self.tr_second[j].abs() + self.tr[j] * self.tr[j]).sum()
    }

    /// `‖𝔈rr‖²_op = (2/16)·Σ_k tr(∂_k g)²`.
    pub fn error_norm_sq(&self) -> f64 {
        2.0 / 16.0 * self.tr.iter().map(|t| t * t).sum::<f64>()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuspensionSample {
    pub point: Vec<f64>,
    pub scal_slice: f64,
    pub scal_susp: f64,
    pub correction: f64,
    /// `|scal(susp g) − scal(g) − Σ_j(…)|`.
    pub residual: f64,
    /// Relative error of `scal(susp g)` against the finite-difference oracle.
    pub oracle_error: f64,
    pub slowness: f64,
    /// `None` when `scal(g) ≤ 0` and the predicate is not evaluated.
    pub predicate_holds: Option<bool>,
    /// Set where the predicate holds.
    pub bound_holds: Option<bool>,
    pub error_norm_sq: f64,
    /// `‖𝔈rr‖² < scal/64`, set where the `⅛` predicate holds.
    pub error_bound_holds: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuspensionReport {
    pub mode: SlownessMode,
    pub bound_factor: f64,
    pub samples: Vec<SuspensionSample>,
    pub accepted: usize,
    pub rejected: usize,
    pub max_residual: f64,
    pub max_oracle_error: f64,
    pub min_bound_margin: Option<f64>,
    pub passed: bool,
}

/// Residual tolerance of the suspension identity.
pub const SUSPENSION_RESIDUAL_TOL: f64 = 1e-6;
/// Relative tolerance against the finite-difference oracle.
pub const ORACLE_TOL: f64 = 1e-5;

fn suspension_point(fam: &MetricFamily, y: &[f64]) -> Result<(Curvature, Curvature, ParameterTraces, f64), CurvError> {
    check_sample(fam, y)?;
    let metric = SuspensionMetric { fam };
    let jet = MetricJet::of(&metric, y)?;
    let slice = Curvature::from_jet(&jet.restrict(fam.d), y)?;
    let susp = Curvature::from_jet(&jet, y)?;
    let traces = ParameterTraces::from_jet(&jet, fam.d, &slice.ginv);
    let oracle = curvature_fd(&metric, y, FdSteps::default())?.scal;
    Ok((slice, susp, traces, oracle))
}

fn require_unit_warp(fam: &MetricFamily) -> Result<(), CurvError> {
    if fam.unit_warp() {
        Ok(())
    } else {
        Err(CurvError::Precondition("suspension needs f = \"1\"".into()))
    }
}

/// Verifies the suspension identity and, where the slowness predicate of
/// `mode` holds, the lower bound on `scal(susp g)`.
pub fn suspension_check(fam: &MetricFamily, k: usize, seed: u64, mode: SlownessMode) -> Result<SuspensionReport, CurvError> {
    require_unit_warp(fam)?;
    let factor = mode.bound_factor(fam.d);
    let points = fam.samples(k, seed);
    let samples = map_samples(&points, |y| {
        let (slice, susp, traces, oracle) = suspension_point(fam, y)?;
        let (scal_slice, scal_susp) = (slice.scal, susp.scal);
        let correction = traces.correction();
        let slowness = traces.slowness();
        let positive = scal_slice > 0.0;
        let predicate_holds = positive.then(|| mode.holds(slowness, scal_slice, fam.d));
        let bound_holds = (predicate_holds == Some(true)).then(|| scal_susp > factor * scal_slice);
        let eighth = positive && SlownessMode::Eighth.holds(slowness, scal_slice, fam.d);
        let error_norm_sq = traces.error_norm_sq();
        Ok(SuspensionSample {
            point: y.to_vec(),
            scal_slice,
            scal_susp,
            correction,
            residual: (scal_susp - scal_slice - correction).abs(),
            oracle_error: relative(scal_susp, oracle),
            slowness,
            predicate_holds,
            bound_holds,
            error_norm_sq,
            error_bound_holds: eighth.then(|| error_norm_sq < scal_slice / 64.0),
        })
    })?;
    let accepted = samples.iter().filter(|s| s.predicate_holds == Some(true)).count();
    let rejected = samples.iter().filter(|s| s.predicate_holds.is_none()).count();
    let max_residual = max_of(samples.iter().map(|s| s.residual));
    let max_oracle_error = max_of(samples.iter().map(|s| s.oracle_error));
    let min_bound_margin = samples
        .iter()
        .filter(|s| s.bound_holds.is_some())
        .map(|s| s.scal_susp - factor * s.scal_slice)
        .fold(None, |acc: Option<f64>, m| Some(acc.map_or(m, |a| a.min(m))));
    let passed = max_residual < SUSPENSION_RESIDUAL_TOL
        && max_oracle_error < ORACLE_TOL
        && samples.iter().all(|s| s.bound_holds != Some(false) && s.error_bound_holds != Some(false));
    Ok(SuspensionReport { mode, bound_factor: factor, samples, accepted, rejected, max_residual, max_oracle_error, min_bound_margin, passed })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorTermSample {
    pub point: Vec<f64>,
    pub error_norm_sq: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorTermReport {
    pub samples: Vec<ErrorTermSample>,
    pub min_margin: f64,
    pub passed: bool,
}

/// Asserts `‖𝔈rr‖²_op < scal(g)/64`; refuses unless the `⅛` predicate
/// holds at every sample.
pub fn error_term_check(fam: &MetricFamily, k: usize, seed: u64) -> Result<ErrorTermReport, CurvError> {
    require_unit_warp(fam)?;
    let points = fam.samples(k, seed);
    let samples = map_samples(&points, |y| {
        check_sample(fam, y)?;
        let jet = MetricJet::of(&SuspensionMetric { fam }, y)?;
        let slice = Curvature::from_jet(&jet.restrict(fam.d), y)?;
        let traces = ParameterTraces::from_jet(&jet, fam.d, &slice.ginv);
        if !(slice.scal > 0.0 && SlownessMode::Eighth.holds(traces.slowness(), slice.scal, fam.d)) {
            return Err(CurvError::Precondition(format!("slowness predicate fails at {:?}", y)));
        }
        Ok(ErrorTermSample { point: y.to_vec(), error_norm_sq: traces.error_norm_sq(), bound: slice.scal / 64.0 })
    })?;
    let min_margin = samples.iter().map(|s| s.bound - s.error_norm_sq).fold(f64::INFINITY, f64::min);
    Ok(ErrorTermReport { passed: samples.iter().all(|s| s.error_norm_sq < s.bound), samples, min_margin })
}
