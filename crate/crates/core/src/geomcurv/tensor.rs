//! Coordinate curvature from metric jets or from Christoffel symbols.
//!
//! `R(∂_i,∂_j)∂_k = R^l_{kij} ∂_l` with
//! `R^l_{kij} = ∂_iΓ^l_{jk} − ∂_jΓ^l_{ik} + Γ^l_{im}Γ^m_{jk} − Γ^l_{jm}Γ^m_{ik}`,
//! `Ric_{jk} = R^i_{kij}` and `scal = g^{jk} Ric_{jk}`.

use nalgebra::DMatrix;

use super::CurvError;
use crate::exprparse::{HyperDual, Scalar};

/// A metric on an open subset of `ℝ^N`, evaluable over any [`Scalar`].
pub trait MetricField: Sync {
    fn dim(&self) -> usize;
    /// Row-major `N × N` entries at `y`.
    fn entries<S: Scalar>(&self, y: &[S]) -> Result<Vec<S>, CurvError>;

    fn metric(&self, y: &[f64]) -> Result<DMatrix<f64>, CurvError> {
        let n = self.dim();
        Ok(DMatrix::from_row_slice(n, n, &self.entries(y)?))
    }
}

/// Values, first and second partials of the metric at a point.
#[derive(Debug, Clone)]
pub struct MetricJet {
    pub g: DMatrix<f64>,
    pub dg: Vec<DMatrix<f64>>,
    pub ddg: Vec<Vec<DMatrix<f64>>>,
}

impl MetricJet {
    pub fn of<M: MetricField>(m: &M, y: &[f64]) -> Result<Self, CurvError> {
        let n = m.dim();
        let zero = DMatrix::zeros(n, n);
        let mut g = zero.clone();
        let mut dg = vec![zero.clone(); n];
        let mut ddg = vec![vec![zero; n]; n];
        for a in 0..n {
            for b in a..n {
                let seeded: Vec<HyperDual> =
                    y.iter().enumerate().map(|(k, &v)| HyperDual::variable(v, k == a, k == b)).collect();
                let e = m.entries(&seeded)?;
                for (idx, v) in e.iter().enumerate() {
                    let (r, c) = (idx / n, idx % n);
                    g[(r, c)] = v.v;
                    dg[a][(r, c)] = v.e1;
                    dg[b][(r, c)] = v.e2;
                    ddg[a][b][(r, c)] = v.e12;
                    ddg[b][a][(r, c)] = v.e12;
                }
            }
        }
        Ok(MetricJet { g, dg, ddg })
    }

    /// The jet of the metric restricted to the first `k` coordinates.
    pub fn restrict(&self, k: usize) -> MetricJet {
        let cut = |m: &DMatrix<f64>| m.view((0, 0), (k, k)).into_owned();
        MetricJet {
            g: cut(&self.g),
            dg: self.dg[..k].iter().map(cut).collect(),
            ddg: self.ddg[..k].iter().map(|row| row[..k].iter().map(cut).collect()).collect(),
        }
    }
}

/// Inverse of a positive-definite matrix, or an error naming `y`.
pub fn inverse_pd(g: &DMatrix<f64>, y: &[f64]) -> Result<DMatrix<f64>, CurvError> {
    let ch = g.clone().cholesky().ok_or_else(|| CurvError::NotPositiveDefinite { at: y.to_vec() })?;
    Ok(ch.inverse())
}

/// Christoffel symbols `Γ^l_{jk}`, stored `[l][j][k]`.
#[derive(Debug, Clone)]
pub struct Christoffel {
    n: usize,
    data: Vec<f64>,
}

impl Christoffel {
    pub fn zeros(n: usize) -> Self {
        Christoffel { n, data: vec![0.0; n * n * n] }
    }

    pub fn get(&self, l: usize, j: usize, k: usize) -> f64 {
        self.data[(l * self.n + j) * self.n + k]
    }

    fn set(&mut self, l: usize, j: usize, k: usize, v: f64) {
        let n = self.n;
        self.data[(l * n + j) * n + k] = v;
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// `2Γ^k_{ij} = g^{kα}(∂_j g_{iα} + ∂_i g_{αj} − ∂_α g_{ij})`.
    pub fn from_derivatives(ginv: &DMatrix<f64>, dg: &[DMatrix<f64>]) -> Self {
        let n = ginv.nrows();
        let mut out = Christoffel::zeros(n);
        for l in 0..n {
            for j in 0..n {
                for k in j..n {
                    let v: f64 =
                        (0..n).map(|m| ginv[(l, m)] * (dg[j][(k, m)] + dg[k][(j, m)] - dg[m][(j, k)])).sum::<f64>() * 0.5;
                    out.set(l, j, k, v);
                    out.set(l, k, j, v);
                }
            }
        }
        out
    }

    fn axpy(&self, other: &Christoffel, a: f64, b: f64) -> Christoffel {
        Christoffel { n: self.n, data: self.data.iter().zip(&other.data).map(|(x, y)| a * x + b * y).collect() }
    }
}

/// Curvature data at a point.
#[derive(Debug, Clone)]
pub struct Curvature {
    pub g: DMatrix<f64>,
    pub ginv: DMatrix<f64>,
    pub gamma: Christoffel,
    /// `R^l_{kij}`, stored `[l][k][i][j]`.
    riemann: Vec<f64>,
    pub ricci: DMatrix<f64>,
    pub scal: f64,
}

impl Curvature {
    pub fn dim(&self) -> usize {
        self.g.nrows()
    }

    /// `R^l_{kij}`.
    pub fn riemann(&self, l: usize, k: usize, i: usize, j: usize) -> f64 {
        let n = self.dim();
        self.riemann[((l * n + k) * n + i) * n + j]
    }

    /// `⟨R(U,V)X,Y⟩` for coordinate vectors.
    pub fn riemann_form(&self, u: &[f64], v: &[f64], x: &[f64], y: &[f64]) -> f64 {
        let n = self.dim();
        let mut total = 0.0;
        for i in 0..n {
            for j in 0..n {
                let uv = u[i] * v[j];
                if uv == 0.0 {
                    continue;
                }
                for k in 0..n {
                    if x[k] == 0.0 {
                        continue;
                    }
                    for l in 0..n {
                        let gy: f64 = (0..n).map(|m| self.g[(l, m)] * y[m]).sum();
                        total += uv * x[k] * self.riemann(l, k, i, j) * gy;
                    }
                }
            }
        }
        total
    }

    /// From Christoffel symbols and their partials `dgamma[i] = ∂_iΓ`.
    pub fn from_christoffel(g: DMatrix<f64>, ginv: DMatrix<f64>, gamma: Christoffel, dgamma: &[Christoffel]) -> Self {
        let n = g.nrows();
        let mut riemann = vec![0.0; n * n * n * n];
        for l in 0..n {
            for k in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        let mut v = dgamma[i].get(l, j, k) - dgamma[j].get(l, i, k);
                        for m in 0..n {
                            v += gamma.get(l, i, m) * gamma.get(m, j, k) - gamma.get(l, j, m) * gamma.get(m, i, k);
                        }
                        riemann[((l * n + k) * n + i) * n + j] = v;
                    }
                }
            }
        }
        let mut ricci = DMatrix::zeros(n, n);
        for j in 0..n {
            for k in 0..n {
                ricci[(j, k)] = (0..n).map(|i| riemann[((i * n + k) * n + i) * n + j]).sum();
            }
        }
        let scal = (0..n).flat_map(|j| (0..n).map(move |k| (j, k))).map(|(j, k)| ginv[(j, k)] * ricci[(j, k)]).sum();
        Curvature { g, ginv, gamma, riemann, ricci, scal }
    }

    /// From an exact metric jet: `∂_i g⁻¹ = −g⁻¹(∂_i g)g⁻¹` and the
    /// differentiated Christoffel formula.
    pub fn from_jet(jet: &MetricJet, y: &[f64]) -> Result<Self, CurvError> {
        let n = jet.g.nrows();
        let ginv = inverse_pd(&jet.g, y)?;
        let gamma = Christoffel::from_derivatives(&ginv, &jet.dg);
        let dgamma: Vec<Christoffel> = (0..n)
            .map(|i| {
                let dginv = -(&ginv * &jet.dg[i] * &ginv);
                let first = Christoffel::from_derivatives(&dginv, &jet.dg);
                let second = Christoffel::from_derivatives(&ginv, &jet.ddg[i]);
                first.axpy(&second, 1.0, 1.0)
            })
            .collect();
        Ok(Curvature::from_christoffel(jet.g.clone(), ginv, gamma, &dgamma))
    }
}

/// Curvature through exact dual-number jets.
pub fn curvature_jet<M: MetricField>(m: &M, y: &[f64]) -> Result<Curvature, CurvError> {
    Curvature::from_jet(&MetricJet::of(m, y)?, y)
}

/// Step sizes for the finite-difference oracle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdSteps {
    pub metric: f64,
    pub christoffel: f64,
}

impl Default for FdSteps {
    fn default() -> Self {
        FdSteps { metric: 1e-4, christoffel: 1e-3 }
    }
}

fn shifted(y: &[f64], i: usize, h: f64) -> Vec<f64> {
    let mut z = y.to_vec();
    z[i] += h;
    z
}

fn christoffel_fd<M: MetricField>(m: &M, y: &[f64], h: f64) -> Result<(DMatrix<f64>, DMatrix<f64>, Christoffel), CurvError> {
    let g = m.metric(y)?;
    let ginv = inverse_pd(&g, y)?;
    let dg = (0..m.dim())
        .map(|i| Ok((m.metric(&shifted(y, i, h))? - m.metric(&shifted(y, i, -h))?) / (2.0 * h)))
        .collect::<Result<Vec<_>, CurvError>>()?;
    let gamma = Christoffel::from_derivatives(&ginv, &dg);
    Ok((g, ginv, gamma))
}

/// Curvature with every derivative taken by central finite differences:
/// metric partials for `Γ`, then partials of `Γ`.
pub fn curvature_fd<M: MetricField>(m: &M, y: &[f64], steps: FdSteps) -> Result<Curvature, CurvError> {
    let (g, ginv, gamma) = christoffel_fd(m, y, steps.metric)?;
    let h = steps.christoffel;
    let dgamma = (0..m.dim())
        .map(|i| {
            let (_, _, plus) = christoffel_fd(m, &shifted(y, i, h), steps.metric)?;
            let (_, _, minus) = christoffel_fd(m, &shifted(y, i, -h), steps.metric)?;
            Ok(plus.axpy(&minus, 0.5 / h, -0.5 / h))
        })
        .collect::<Result<Vec<_>, CurvError>>()?;
    Ok(Curvature::from_christoffel(g, ginv, gamma, &dgamma))
}

/// The finite-difference scalar curvature.
pub fn scal_direct<M: MetricField>(m: &M, y: &[f64], steps: FdSteps) -> Result<f64, CurvError> {
    Ok(curvature_fd(m, y, steps)?.scal)
}
