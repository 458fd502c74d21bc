//! Curvature of `g = h(t) + f² dt²` expressed through `h`, `ḣ`, `ḧ` and `f`.
//!
//! ```text
//! scal(g) = scal(h) + f⁻²(¾ tr((ḣᵒᵖ)²) − ¼ tr(ḣ)² − tr(ḧ) + f⁻¹ḟ tr(ḣ)) − 2f⁻¹Δ_h f
//! ```
//!
//! Traces are of `ᵒᵖ`-endomorphisms with respect to `h(t)`.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::family::{MetricFamily, WarpedMetric};
use super::tensor::{curvature_fd, Christoffel, Curvature, FdSteps, MetricField, MetricJet};
use super::CurvError;

/// The summands of the scalar curvature formula at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WarpedTerms {
    pub scal_h: f64,
    /// `f⁻²(¾ tr((ḣᵒᵖ)²) − ¼ tr(ḣ)² − tr(ḧ) + f⁻¹ḟ tr(ḣ))`.
    pub second_fundamental: f64,
    /// `−2f⁻¹Δ_h f`.
    pub laplacian: f64,
    pub total: f64,
    pub f: f64,
    pub tr_hdot: f64,
    pub tr_hdot_sq: f64,
    pub tr_hddot: f64,
}

/// Slice and warping data extracted from the jet of a warped metric on
/// `ℝ^{d+1}` whose last coordinate is `t`.
pub(crate) struct WarpedJet {
    pub d: usize,
    pub slice: Curvature,
    pub hdot: DMatrix<f64>,
    pub hddot: DMatrix<f64>,
    /// `∂_a ḣ` for slice coordinates `a`.
    pub dhdot: Vec<DMatrix<f64>>,
    pub f: f64,
    /// `∂f` in all coordinates, `t` last.
    pub df: DVector<f64>,
    /// `∂_a∂_b f` for slice coordinates.
    pub hess_f: DMatrix<f64>,
}

fn block(m: &DMatrix<f64>, d: usize) -> DMatrix<f64> {
    m.view((0, 0), (d, d)).into_owned()
}

impl WarpedJet {
    pub(crate) fn new(jet: &MetricJet, y: &[f64]) -> Result<Self, CurvError> {
        let n = jet.g.nrows();
        let d = n - 1;
        let t = d;
        for a in 0..d {
            if jet.g[(a, t)] != 0.0 || jet.dg.iter().any(|m| m[(a, t)] != 0.0) {
                return Err(CurvError::Precondition("metric is not of warped form h + f²dt²".into()));
            }
        }
        let slice = Curvature::from_jet(&jet.restrict(d), y)?;
        let f2 = jet.g[(t, t)];
        if !(f2 > 0.0) {
            return Err(CurvError::NonPositiveWarp { at: y.to_vec() });
        }
        let f = f2.sqrt();
        let df = DVector::from_iterator(n, (0..n).map(|a| jet.dg[a][(t, t)] / (2.0 * f)));
        let hess_f = DMatrix::from_fn(d, d, |a, b| (jet.ddg[a][b][(t, t)] - 2.0 * df[a] * df[b]) / (2.0 * f));
        Ok(WarpedJet {
            d,
            slice,
            hdot: block(&jet.dg[t], d),
            hddot: block(&jet.ddg[t][t], d),
            dhdot: (0..d).map(|a| block(&jet.ddg[a][t], d)).collect(),
            f,
            df,
            hess_f,
        })
    }

    fn gamma(&self) -> &Christoffel {
        &self.slice.gamma
    }

    /// `Hess_h f` on slice coordinates.
    pub(crate) fn covariant_hessian(&self) -> DMatrix<f64> {
        let d = self.d;
        DMatrix::from_fn(d, d, |a, b| self.hess_f[(a, b)] - (0..d).map(|c| self.gamma().get(c, a, b) * self.df[c]).sum::<f64>())
    }

    /// `ḣᵒᵖ = h⁻¹ḣ`.
    pub(crate) fn hdot_op(&self) -> DMatrix<f64> {
        &self.slice.ginv * &self.hdot
    }

    pub(crate) fn terms(&self) -> WarpedTerms {
        let a = self.hdot_op();
        let b = &self.slice.ginv * &self.hddot;
        let tr_hdot = a.trace();
        let tr_hdot_sq = (&a * &a).trace();
        let tr_hddot = b.trace();
        let f = self.f;
        let fdot = self.df[self.d];
        let second_fundamental =
            (0.75 * tr_hdot_sq - 0.25 * tr_hdot * tr_hdot - tr_hddot + fdot / f * tr_hdot) / (f * f);
        let laplacian_f = (&self.slice.ginv).component_mul(&self.covariant_hessian()).sum();
        let laplacian = -2.0 * laplacian_f / f;
        WarpedTerms {
            scal_h: self.slice.scal,
            second_fundamental,
            laplacian,
            total: self.slice.scal + second_fundamental + laplacian,
            f,
            tr_hdot,
            tr_hdot_sq,
            tr_hddot,
        }
    }
}

/// The formula's summands for any warped metric field.
pub fn warped_terms_of<M: MetricField>(m: &M, y: &[f64]) -> Result<WarpedTerms, CurvError> {
    Ok(WarpedJet::new(&MetricJet::of(m, y)?, y)?.terms())
}

/// The formula's summands for a family with `n = 1` at `y = (x, t)`.
pub fn warped_terms(fam: &MetricFamily, y: &[f64]) -> Result<WarpedTerms, CurvError> {
    require_single_parameter(fam)?;
    warped_terms_of(&WarpedMetric::new(fam), y)
}

/// `scal(h + f²dt²)` by the warped formula.
pub fn scal_warped(fam: &MetricFamily, y: &[f64]) -> Result<f64, CurvError> {
    Ok(warped_terms(fam, y)?.total)
}

pub(crate) fn require_single_parameter(fam: &MetricFamily) -> Result<(), CurvError> {
    if fam.n == 1 {
        Ok(())
    } else {
        Err(CurvError::Precondition(format!("the warped formula needs n = 1, family has n = {}", fam.n)))
    }
}

/// A formula value beside its finite-difference counterpart.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Compared {
    pub formula: f64,
    pub oracle: f64,
}

impl Compared {
    pub fn error(&self) -> f64 {
        (self.formula - self.oracle).abs()
    }
}

/// Weingarten map and curvature components on slice-tangent vectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComponentReport {
    /// `⟨W(X),Y⟩ = −½f⁻¹ḣ(X,Y)`.
    pub weingarten: Compared,
    /// `⟨R(U,V)X,Y⟩`.
    pub tangential: Compared,
    /// `⟨R(X,Y)U,ν⟩`.
    pub mixed: Compared,
    /// `⟨R(X,ν)ν,Y⟩`.
    pub normal: Compared,
}

impl ComponentReport {
    pub fn max_error(&self) -> f64 {
        [self.weingarten, self.tangential, self.mixed, self.normal].iter().map(Compared::error).fold(0.0, f64::max)
    }
}

fn bilinear(m: &DMatrix<f64>, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
    (u.transpose() * m * v)[(0, 0)]
}

/// Evaluates the component formulas at `y = (x, t)` and compares each with
/// the finite-difference curvature tensor of `h + f²dt²`.
pub fn warped_components(
    fam: &MetricFamily,
    y: &[f64],
    x: &[f64],
    yv: &[f64],
    u: &[f64],
    v: &[f64],
) -> Result<ComponentReport, CurvError> {
    require_single_parameter(fam)?;
    let d = fam.d;
    if [x, yv, u, v].iter().any(|w| w.len() != d) {
        return Err(CurvError::Precondition(format!("tangent vectors must have {} components", d)));
    }
    let metric = WarpedMetric::new(fam);
    let w = WarpedJet::new(&MetricJet::of(&metric, y)?, y)?;
    let (xv, yy, uu, vv) = (DVector::from_column_slice(x), DVector::from_column_slice(yv), DVector::from_column_slice(u), DVector::from_column_slice(v));
    let f = w.f;
    let hd = |p: &DVector<f64>, q: &DVector<f64>| bilinear(&w.hdot, p, q);
    let g = w.gamma();
    // (∇_P ḣ)(Q, S)
    let nabla_hdot = |p: &DVector<f64>, q: &DVector<f64>, s: &DVector<f64>| {
        let mut total = 0.0;
        for a in 0..d {
            for b in 0..d {
                for c in 0..d {
                    let mut comp = w.dhdot[a][(b, c)];
                    for m in 0..d {
                        comp -= g.get(m, a, b) * w.hdot[(m, c)] + g.get(m, a, c) * w.hdot[(b, m)];
                    }
                    total += p[a] * q[b] * s[c] * comp;
                }
            }
        }
        total
    };
    let deriv = |p: &DVector<f64>| (0..d).map(|a| p[a] * w.df[a]).sum::<f64>();
    let weingarten = -0.5 / f * hd(&xv, &yy);
    let tangential = w.slice.riemann_form(u, v, x, yv) + 0.25 / (f * f) * (hd(&uu, &xv) * hd(&vv, &yy) - hd(&uu, &yy) * hd(&vv, &xv));
    let mixed = -0.5 / f * (nabla_hdot(&xv, &yy, &uu) - nabla_hdot(&yy, &xv, &uu))
        + 0.5 / (f * f) * (deriv(&xv) * hd(&yy, &uu) - deriv(&yy) * hd(&xv, &uu));
    let op_x = w.hdot_op() * &xv;
    let normal = 0.5 / (f * f) * (w.df[d] / f * hd(&xv, &yy) - bilinear(&w.hddot, &xv, &yy) + 0.5 * hd(&op_x, &yy))
        - bilinear(&w.covariant_hessian(), &xv, &yy) / f;

    let full = curvature_fd(&metric, y, FdSteps::default())?;
    let lift = |p: &[f64]| {
        let mut q = p.to_vec();
        q.push(0.0);
        q
    };
    let (xl, yl, ul, vl) = (lift(x), lift(yv), lift(u), lift(v));
    let mut nu = vec![0.0; d + 1];
    nu[d] = 1.0 / full.g[(d, d)].sqrt();
    let nabla_x_nu_dot_y: f64 = (0..=d)
        .flat_map(|i| (0..=d).map(move |j| (i, j)))
        .map(|(i, j)| xl[i] * yl[j] * (0..=d).map(|m| full.g[(j, m)] * full.gamma.get(m, i, d)).sum::<f64>() * nu[d])
        .sum();
    Ok(ComponentReport {
        weingarten: Compared { formula: weingarten, oracle: -nabla_x_nu_dot_y },
        tangential: Compared { formula: tangential, oracle: full.riemann_form(&ul, &vl, &xl, &yl) },
        mixed: Compared { formula: mixed, oracle: full.riemann_form(&xl, &yl, &ul, &nu) },
        normal: Compared { formula: normal, oracle: full.riemann_form(&xl, &nu, &nu, &yl) },
    })
}
