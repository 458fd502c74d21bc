//! Sampled verification of the regular-value, derivative-support and
//! target-control properties of `𝔡_{n,ρ}` and `dice_{n,ρ}`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{dice, value_and_gradient, DiceConfig};

/// Below this a partial derivative counts as zero.
pub const DERIVATIVE_TOL: f64 = 1e-9;
/// Below this gradient norm a point of `dice` counts as critical.
pub const CRITICAL_TOL: f64 = 1e-12;
const MARCH_STEP: f64 = 0.1;
const MAX_REPORTED: usize = 50;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    /// `a` regular level points, `b` derivative support, `c` target control,
    /// `d` critical values of `dice`.
    pub property: char,
    pub point: Vec<f64>,
    pub value: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanReport {
    pub config: DiceConfig,
    pub samples: usize,
    pub seed: u64,
    /// Points of `𝔡⁻¹([1,2])` located by bisection.
    pub level_points: usize,
    /// Rays on which no level crossing was found.
    pub skipped_rays: usize,
    pub cuboid_points_in_domain: usize,
    pub dice_critical_points: usize,
    pub min_gradient_norm: f64,
    /// Violations per property `a..d`.
    pub violation_counts: [usize; 4],
    /// The first few violations in sample order.
    pub violations: Vec<Violation>,
    pub passed: bool,
}

#[derive(Default)]
struct SampleOutcome {
    level_points: usize,
    skipped: bool,
    cuboid_in_domain: bool,
    dice_critical: bool,
    min_gradient_norm: f64,
    violations: Vec<Violation>,
}

fn in_half_cuboid(cfg: &DiceConfig, x: &[f64]) -> bool {
    let r = cfg.rho - 4.0;
    x[0] >= -r && x[1..].iter().all(|v| v.abs() <= r)
}

/// Crossings of `𝔡 = level` along `start + s·dir`, `s ∈ [0, length]`,
/// bracketed by consecutive defined march points and refined by bisection.
pub(crate) fn crossings(cfg: &DiceConfig, start: &[f64], dir: &[f64], length: f64, level: f64) -> Vec<Vec<f64>> {
    let at = |s: f64| -> Vec<f64> { start.iter().zip(dir).map(|(p, d)| p + s * d).collect() };
    let g = |s: f64| cfg.frak_d(&at(s)).ok().map(|v: f64| v - level);
    let steps = (length / MARCH_STEP).ceil() as usize;
    let mut out = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    for k in 0..=steps {
        let s = k as f64 * MARCH_STEP;
        let cur = g(s).map(|v| (s, v));
        if let (Some((mut a, mut fa)), Some((b0, fb0))) = (prev, cur) {
            if fa == 0.0 {
                out.push(at(a));
            } else if fa.signum() != fb0.signum() && fb0 != 0.0 {
                let mut b = b0;
                let mut ok = true;
                for _ in 0..80 {
                    let m = 0.5 * (a + b);
                    if m <= a || m >= b {
                        break;
                    }
                    match g(m) {
                        Some(fm) if fm.signum() == fa.signum() && fm != 0.0 => {
                            a = m;
                            fa = fm;
                        }
                        Some(_) => b = m,
                        None => {
                            ok = false;
                            break;
                        }
                    }
                }
                if ok {
                    out.push(at(0.5 * (a + b)));
                }
            }
        }
        prev = cur;
    }
    out
}

fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    rng.gen_range(lo..=hi)
}

fn random_direction(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm > 0.1 && norm <= 1.0 {
            return v.into_iter().map(|a| a / norm).collect();
        }
    }
}

fn check_level_point(cfg: &DiceConfig, x: &[f64], out: &mut SampleOutcome) {
    let r4 = cfg.rho - 4.0;
    let (value, grad) = match cfg.frak_gradient(x) {
        Ok(vg) => vg,
        Err(e) => {
            out.violations.push(Violation { property: 'a', point: x.to_vec(), value: f64::NAN, detail: e.to_string() });
            return;
        }
    };
    let norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
    out.min_gradient_norm = out.min_gradient_norm.min(norm);
    if !(norm > DERIVATIVE_TOL) {
        out.violations.push(Violation { property: 'a', point: x.to_vec(), value, detail: format!("gradient norm {:e}", norm) });
    }
    for (j, g) in grad.iter().enumerate() {
        if g.abs() > DERIVATIVE_TOL && !(x[j].abs() > r4) {
            out.violations.push(Violation {
                property: 'b',
                point: x.to_vec(),
                value,
                detail: format!("∂{} = {:e} with |x{}| = {} ≤ {}", j + 1, g, j + 1, x[j].abs(), r4),
            });
        }
    }
    if in_half_cuboid(cfg, x) {
        out.violations.push(Violation { property: 'c', point: x.to_vec(), value, detail: "level point inside the half-cuboid".into() });
    }
}

fn scan_sample(cfg: &DiceConfig, seed: u64, index: usize) -> SampleOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    let (n, r) = (cfg.n, cfg.rho);
    let mut out = SampleOutcome { min_gradient_norm: f64::INFINITY, ..Default::default() };

    let level = uniform(&mut rng, 1.0, 2.0);
    let (start, dir, length) = if index % 2 == 0 {
        (vec![0.0; n], random_direction(&mut rng, n), (r + 8.0) * (n as f64).sqrt())
    } else {
        let mut start = vec![-(r + 3.0)];
        start.extend((1..n).map(|_| uniform(&mut rng, -(r + 8.0), r + 8.0)));
        let mut dir = vec![0.0; n];
        dir[0] = 1.0;
        (start, dir, 2.0 * r + 6.0)
    };
    let points = crossings(cfg, &start, &dir, length, level);
    out.skipped = points.is_empty();
    out.level_points = points.len();
    for p in &points {
        check_level_point(cfg, p, &mut out);
    }

    let mut q = vec![uniform(&mut rng, -(r - 4.0), r + 6.0)];
    q.extend((1..n).map(|_| uniform(&mut rng, -(r - 4.0), r - 4.0)));
    if let Ok(v) = cfg.frak_d::<f64>(&q) {
        out.cuboid_in_domain = true;
        if (1.0..=2.0).contains(&v) {
            out.violations.push(Violation { property: 'c', point: q, value: v, detail: "half-cuboid point in 𝔡⁻¹([1,2])".into() });
        }
    }

    let z: Vec<f64> = (0..n).map(|_| uniform(&mut rng, -(r + 1.0), r + 1.0)).collect();
    let (value, grad) = value_and_gradient(&z, |a| Ok::<_, ()>(dice(r, a))).unwrap();
    let norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
    if norm < CRITICAL_TOL {
        out.dice_critical = true;
        // Σ aux ≤ Σ aux′ for arguments in the transition zone, so a positive value here is round-off
        if value > (n as f64).sqrt() * CRITICAL_TOL {
            out.violations.push(Violation { property: 'd', point: z, value, detail: format!("critical point with gradient norm {:e}", norm) });
        }
    }
    out
}

/// Runs `samples` independent draws, each a ray with a random target level,
/// a point of the half-cuboid and a point for `dice_{n,ρ}`.
pub fn property_scan(cfg: &DiceConfig, samples: usize, seed: u64) -> ScanReport {
    let outcomes: Vec<SampleOutcome> = (0..samples).into_par_iter().map(|i| scan_sample(cfg, seed, i)).collect();
    let mut counts = [0usize; 4];
    let mut violations = Vec::new();
    for v in outcomes.iter().flat_map(|o| &o.violations) {
        counts[(v.property as u8 - b'a') as usize] += 1;
        if violations.len() < MAX_REPORTED {
            violations.push(v.clone());
        }
    }
    let min_gradient_norm = outcomes.iter().map(|o| o.min_gradient_norm).fold(f64::INFINITY, f64::min);
    ScanReport {
        config: *cfg,
        samples,
        seed,
        level_points: outcomes.iter().map(|o| o.level_points).sum(),
        skipped_rays: outcomes.iter().filter(|o| o.skipped).count(),
        cuboid_points_in_domain: outcomes.iter().filter(|o| o.cuboid_in_domain).count(),
        dice_critical_points: outcomes.iter().filter(|o| o.dice_critical).count(),
        min_gradient_norm,
        violation_counts: counts,
        passed: counts.iter().all(|&c| c == 0),
        violations,
    }
}
