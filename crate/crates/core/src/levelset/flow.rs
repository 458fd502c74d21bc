//! The normalized gradient flow `∂_tΦ = grad 𝔡 / ‖grad 𝔡‖²` started on the
//! level `1.9`, and the checks that its pullback of the Euclidean metric is
//! `h(t) + ‖grad 𝔡‖⁻² dt²`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::scan::crossings;
use super::{DiceConfig, DiceError};

pub const START_LEVEL: f64 = 1.9;
pub const LEVEL_TOL: f64 = 1e-5;
pub const ORTHOGONALITY_TOL: f64 = 1e-4;
pub const SPEED_TOL: f64 = 1e-4;
pub const TRANSLATION_TOL: f64 = 1e-9;
/// Offset along tangents for finite-difference tangent vectors.
const TANGENT_STEP: f64 = 1e-4;
const CHECKPOINTS: [f64; 11] = [1.0, 1.1, 1.2, 1.3, 1.4, 1.5, 1.6, 1.7, 1.8, 1.9, 2.0];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryCheckpoint {
    pub t: f64,
    pub point: Vec<f64>,
    /// `|𝔡(Φ_t(x)) − t|`.
    pub level_error: f64,
    /// Largest `|cos|` between the flow direction and a tangent image.
    pub orthogonality: f64,
    /// Relative error of `‖∂_tΦ‖²` (by differences along the trajectory) against `‖grad 𝔡‖⁻²`.
    pub speed_error: f64,
    /// `|Φ_t(x) − x + (t − 1.9)e₁|_∞`, for starts outside the compact window.
    pub translation_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub start: Vec<f64>,
    pub far_field: bool,
    pub checkpoints: Vec<TrajectoryCheckpoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FarFieldSample {
    pub start: Vec<f64>,
    pub max_translation_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlowReport {
    pub config: DiceConfig,
    pub step: f64,
    pub trajectories: Vec<Trajectory>,
    pub far_field: Vec<FarFieldSample>,
    pub max_level_error: f64,
    pub max_orthogonality: f64,
    pub max_speed_error: f64,
    pub max_translation_error: f64,
    pub passed: bool,
}

struct Flow<'a> {
    cfg: &'a DiceConfig,
    step: f64,
}

fn norm_sq(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(x: &[f64], c: f64, d: &[f64]) -> Vec<f64> {
    x.iter().zip(d).map(|(a, b)| a + c * b).collect()
}

impl Flow<'_> {
    fn field(&self, x: &[f64]) -> Result<Vec<f64>, DiceError> {
        let (_, g) = self.cfg.frak_gradient(x)?;
        let n2 = norm_sq(&g);
        if !(n2 > 0.0) {
            return Err(DiceError::Flow(format!("vanishing gradient at {:?}", x)));
        }
        Ok(g.into_iter().map(|v| v / n2).collect())
    }

    fn rk4(&self, x: &[f64], h: f64) -> Result<Vec<f64>, DiceError> {
        let k1 = self.field(x)?;
        let k2 = self.field(&axpy(x, h / 2.0, &k1))?;
        let k3 = self.field(&axpy(x, h / 2.0, &k2))?;
        let k4 = self.field(&axpy(x, h, &k3))?;
        Ok((0..x.len()).map(|i| x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])).collect())
    }

    /// States at `1.0, 1.0 + s, …, 2.0` where `s` divides 0.1; `START_LEVEL` is a grid point.
    fn trajectory(&self, x: &[f64]) -> Result<(Vec<Vec<f64>>, f64, usize), DiceError> {
        let per_tenth = (0.1 / self.step).round().max(1.0) as usize;
        let h = 0.1 / per_tenth as f64;
        let start = 9 * per_tenth;
        let total = 10 * per_tenth;
        let mut states = vec![Vec::new(); total + 1];
        states[start] = x.to_vec();
        for k in (0..start).rev() {
            states[k] = self.rk4(&states[k + 1], -h)?;
        }
        for k in start..total {
            states[k + 1] = self.rk4(&states[k], h)?;
        }
        Ok((states, h, per_tenth))
    }

    /// Newton steps along the gradient back onto `level`.
    fn project(&self, x: &[f64], level: f64) -> Result<Vec<f64>, DiceError> {
        let mut y = x.to_vec();
        for _ in 0..30 {
            let (v, g) = self.cfg.frak_gradient(&y)?;
            let r = v - level;
            if r.abs() < 1e-14 {
                break;
            }
            y = axpy(&y, -r / norm_sq(&g), &g);
        }
        Ok(y)
    }
}

/// An orthonormal basis of the complement of `g`.
fn tangent_basis(g: &[f64]) -> Vec<Vec<f64>> {
    let n = g.len();
    let mut basis: Vec<Vec<f64>> = vec![g.iter().map(|v| v / norm_sq(g).sqrt()).collect()];
    for e in 0..n {
        let mut v = vec![0.0; n];
        v[e] = 1.0;
        for b in &basis {
            let c = dot(&v, b);
            v = axpy(&v, -c, b);
        }
        let len = norm_sq(&v).sqrt();
        if len > 1e-6 && basis.len() < n {
            basis.push(v.into_iter().map(|a| a / len).collect());
        }
    }
    basis.split_off(1)
}

fn check_trajectory(flow: &Flow<'_>, start: &[f64]) -> Result<Trajectory, DiceError> {
    let cfg = flow.cfg;
    let (states, h, per_tenth) = flow.trajectory(start)?;
    let (_, g) = cfg.frak_gradient(start)?;
    let far_field = cfg.tilde_dice(&start[1..]) > cfg.rho + 3.0;
    let mut tangent_images = Vec::new();
    for v in tangent_basis(&g) {
        let plus = flow.project(&axpy(start, TANGENT_STEP, &v), START_LEVEL)?;
        let minus = flow.project(&axpy(start, -TANGENT_STEP, &v), START_LEVEL)?;
        tangent_images.push((flow.trajectory(&plus)?.0, flow.trajectory(&minus)?.0));
    }
    let last = states.len() - 1;
    let mut checkpoints = Vec::new();
    for (c, &t) in CHECKPOINTS.iter().enumerate() {
        let k = c * per_tenth;
        let x = &states[k];
        let (value, grad) = cfg.frak_gradient(x)?;
        let direction = flow.field(x)?;
        let velocity: Vec<f64> = if k == 0 {
            (0..x.len()).map(|i| (-3.0 * states[0][i] + 4.0 * states[1][i] - states[2][i]) / (2.0 * h)).collect()
        } else if k == last {
            (0..x.len()).map(|i| (3.0 * states[k][i] - 4.0 * states[k - 1][i] + states[k - 2][i]) / (2.0 * h)).collect()
        } else {
            (0..x.len()).map(|i| (states[k + 1][i] - states[k - 1][i]) / (2.0 * h)).collect()
        };
        let expected = 1.0 / norm_sq(&grad);
        let orthogonality = tangent_images
            .iter()
            .map(|(p, m)| {
                let tangent: Vec<f64> = p[k].iter().zip(&m[k]).map(|(a, b)| (a - b) / (2.0 * TANGENT_STEP)).collect();
                dot(&tangent, &direction).abs() / (norm_sq(&tangent) * norm_sq(&direction)).sqrt()
            })
            .fold(0.0, f64::max);
        let translation_error = far_field.then(|| {
            let mut shifted = start.to_vec();
            shifted[0] -= t - START_LEVEL;
            x.iter().zip(&shifted).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
        });
        checkpoints.push(TrajectoryCheckpoint {
            t,
            point: x.clone(),
            level_error: (value - t).abs(),
            orthogonality,
            speed_error: (norm_sq(&velocity) - expected).abs() / expected,
            translation_error,
        });
    }
    Ok(Trajectory { start: start.to_vec(), far_field, checkpoints })
}

/// A point of `𝔡⁻¹(1.9)` on a random ray through the origin.
fn level_start(cfg: &DiceConfig, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let n = cfg.n;
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        let len = norm_sq(&v).sqrt();
        if !(len > 0.1 && len <= 1.0) {
            continue;
        }
        let dir: Vec<f64> = v.iter().map(|a| a / len).collect();
        let hits = crossings(cfg, &vec![0.0; n], &dir, (cfg.rho + 8.0) * (n as f64).sqrt(), START_LEVEL);
        if let Some(p) = hits.into_iter().next() {
            return p;
        }
    }
}

/// A point of `𝔡⁻¹(1.9)` with `d̃ice > ρ + 4`, where `𝔡 = 2 − (x₁ − ρ)`.
fn far_start(cfg: &DiceConfig, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let r = cfg.rho;
    let mut x = vec![r + 2.0 - START_LEVEL];
    let j = rng.gen_range(1..cfg.n);
    for k in 1..cfg.n {
        let v = if k == j { rng.gen_range(r + 4.0..=r + 10.0) } else { rng.gen_range(-r..=r) };
        x.push(if rng.gen_bool(0.5) { v } else { -v });
    }
    x
}

/// Integrates `samples` trajectories from random points of the `1.9`-level
/// plus `samples / 5` (at least one) far-field starts.
pub fn flow_decomposition_check(cfg: &DiceConfig, samples: usize, seed: u64, step: f64) -> Result<FlowReport, DiceError> {
    if !(step > 0.0 && step <= 0.05) {
        return Err(DiceError::Config(format!("ode step must lie in (0, 0.05], got {}", step)));
    }
    let flow = Flow { cfg, step };
    let far_count = (samples / 5).max(1);
    let starts: Vec<(Vec<f64>, bool)> = (0..samples + far_count)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            if i < samples {
                (level_start(cfg, &mut rng), false)
            } else {
                (far_start(cfg, &mut rng), true)
            }
        })
        .collect();
    let results: Vec<Result<Trajectory, DiceError>> = starts.par_iter().map(|(s, _)| check_trajectory(&flow, s)).collect();
    let all = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    let (trajectories, far): (Vec<_>, Vec<_>) = all.into_iter().zip(&starts).partition(|(_, (_, f))| !*f);
    let trajectories: Vec<Trajectory> = trajectories.into_iter().map(|(t, _)| t).collect();
    let far_trajectories: Vec<Trajectory> = far.into_iter().map(|(t, _)| t).collect();
    let far_field: Vec<FarFieldSample> = far_trajectories
        .iter()
        .map(|t| FarFieldSample {
            start: t.start.clone(),
            max_translation_error: t.checkpoints.iter().filter_map(|c| c.translation_error).fold(0.0, f64::max),
        })
        .collect();
    let every = || trajectories.iter().chain(&far_trajectories).flat_map(|t| &t.checkpoints);
    let max_level_error = every().map(|c| c.level_error).fold(0.0, f64::max);
    let max_orthogonality = every().map(|c| c.orthogonality).fold(0.0, f64::max);
    let max_speed_error = every().map(|c| c.speed_error).fold(0.0, f64::max);
    let max_translation_error = every().filter_map(|c| c.translation_error).fold(0.0, f64::max);
    let far_ok = far_trajectories.iter().all(|t| t.far_field);
    let passed = max_level_error < LEVEL_TOL
        && max_orthogonality < ORTHOGONALITY_TOL
        && max_speed_error < SPEED_TOL
        && max_translation_error < TRANSLATION_TOL
        && far_ok;
    Ok(FlowReport {
        config: *cfg,
        step,
        trajectories,
        far_field,
        max_level_error,
        max_orthogonality,
        max_speed_error,
        max_translation_error,
        passed,
    })
}
