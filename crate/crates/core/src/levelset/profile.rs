//! The smooth step `P` behind `aux_ρ` and the cutoff `χ`.
//!
//! `b(x) = S(x/δ)·S((1−x)/δ)` is a plateau bump on `[0,1]`, with
//! `S(y) = e(y)/(e(y) + e(1−y))` and `e(x) = exp(−1/x)` for `x > 0`;
//! `P(u) = ∫₀ᵘ b / ∫₀¹ b` rises from 0 to 1 on `[0,1]` and `Q(u) = ∫₀ᵘ P`.

use std::num::NonZeroUsize;
use std::sync::OnceLock;

use gauss_quad::GaussLegendre;

use crate::exprparse::Scalar;

/// Width of the bump's shoulders.
pub const DELTA: f64 = 0.1;
/// `∫₀¹ b = 1 − δ`, so `max P′ = 1/(1 − δ)`.
pub const MASS: f64 = 1.0 - DELTA;

const CELLS: usize = 1024;

fn e(x: f64) -> f64 {
    if x > 0.0 {
        (-1.0 / x).exp()
    } else {
        0.0
    }
}

fn step(y: f64) -> f64 {
    if y <= 0.0 {
        0.0
    } else if y >= 1.0 {
        1.0
    } else {
        let (a, b) = (e(y), e(1.0 - y));
        a / (a + b)
    }
}

fn step_slope(y: f64) -> f64 {
    if y <= 0.0 || y >= 1.0 {
        return 0.0;
    }
    let (a, b) = (e(y), e(1.0 - y));
    let (da, db) = (a / (y * y), b / ((1.0 - y) * (1.0 - y)));
    (da * b + a * db) / ((a + b) * (a + b))
}

/// The unnormalized bump `b`.
pub fn bump(x: f64) -> f64 {
    step(x / DELTA) * step((1.0 - x) / DELTA)
}

/// `b′`.
pub fn bump_slope(x: f64) -> f64 {
    (step_slope(x / DELTA) * step((1.0 - x) / DELTA) - step(x / DELTA) * step_slope((1.0 - x) / DELTA)) / DELTA
}

struct Tables {
    rule: GaussLegendre,
    /// `P` and `Q` at `k / CELLS`.
    p: Vec<f64>,
    q: Vec<f64>,
}

fn tables() -> &'static Tables {
    static TABLES: OnceLock<Tables> = OnceLock::new();
    TABLES.get_or_init(|| {
        let rule = GaussLegendre::new(NonZeroUsize::new(12).unwrap());
        let h = 1.0 / CELLS as f64;
        let (mut p, mut q) = (vec![0.0; CELLS + 1], vec![0.0; CELLS + 1]);
        for k in 0..CELLS {
            let a = k as f64 * h;
            let b = a + h;
            p[k + 1] = p[k] + rule.integrate(a, b, bump) / MASS;
            q[k + 1] = q[k] + h * p[k] + rule.integrate(a, b, |w| (b - w) * bump(w)) / MASS;
        }
        Tables { rule, p, q }
    })
}

/// `(Q(u), P(u), P′(u))`.
pub fn smooth_step(u: f64) -> (f64, f64, f64) {
    if u <= 0.0 {
        return (0.0, 0.0, 0.0);
    }
    if u >= 1.0 {
        return (0.5 + (u - 1.0), 1.0, 0.0);
    }
    let t = tables();
    let h = 1.0 / CELLS as f64;
    let k = ((u / h) as usize).min(CELLS - 1);
    let node = k as f64 * h;
    if u == node {
        return (t.q[k], t.p[k], bump(u) / MASS);
    }
    let p = t.p[k] + t.rule.integrate(node, u, bump) / MASS;
    let q = t.q[k] + (u - node) * t.p[k] + t.rule.integrate(node, u, |w| (u - w) * bump(w)) / MASS;
    (q, p, bump(u) / MASS)
}

/// `aux_ρ(s) = 2Q((s − ρ + 2)/2)`: convex, zero exactly on `s ≤ ρ − 2`,
/// equal to `s − (ρ − 1)` on `s ≥ ρ`.
pub fn aux<S: Scalar>(rho: f64, s: S) -> S {
    let v = s.re();
    if v >= rho {
        return s.offset(-(rho - 1.0));
    }
    let (q, p, dp) = smooth_step((v - rho + 2.0) / 2.0);
    s.chain(2.0 * q, p, dp / 2.0)
}

/// `χ(s) = P(s − (ρ − 3))`: zero on `s ≤ ρ − 3`, one on `s ≥ ρ − 2`,
/// with `0 ≤ χ′ ≤ 1/(1 − δ) < 1.2`.
pub fn cutoff<S: Scalar>(rho: f64, s: S) -> S {
    let u = s.re() - (rho - 3.0);
    if u <= 0.0 {
        return S::constant(0.0);
    }
    if u >= 1.0 {
        return S::constant(1.0);
    }
    let (_, p, dp) = smooth_step(u);
    s.chain(p, dp, bump_slope(u) / MASS)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exprparse::HyperDual;

    #[test]
    fn step_endpoints_and_symmetry() {
        let (q1, p1, _) = smooth_step(1.0 - 1e-15);
        assert!((q1 - 0.5).abs() < 1e-12 && (p1 - 1.0).abs() < 1e-12);
        for u in [0.01, 0.05, 0.2, 0.37, 0.5, 0.93] {
            let (_, a, _) = smooth_step(u);
            let (_, b, _) = smooth_step(1.0 - u);
            assert!((a + b - 1.0).abs() < 1e-13, "{}", u);
        }
    }

    #[test]
    fn aux_values() {
        let rho = 21.0;
        assert_eq!(aux(rho, rho - 2.0), 0.0);
        assert_eq!(aux(rho, 3.0), 0.0);
        assert!((aux(rho, rho) - 1.0).abs() < 1e-13);
        assert!((aux(rho, rho - 1e-9) - 1.0).abs() < 1e-8);
        assert_eq!(aux(rho, rho + 2.5), 3.5);
        assert!(aux(rho, rho - 2.0 + 1e-3) >= 0.0 && aux(rho, rho - 1.9) > 0.0);
    }

    #[test]
    fn aux_derivatives_match_differences() {
        let rho = 7.5;
        let mut s = rho - 2.3;
        while s < rho + 0.3 {
            let d = aux(rho, HyperDual::variable(s, true, true));
            let h = 1e-5;
            let fd1 = (aux(rho, s + h) - aux(rho, s - h)) / (2.0 * h);
            let fd2 = (aux(rho, s + h) - 2.0 * aux(rho, s) + aux(rho, s - h)) / (h * h);
            assert!((d.e1 - fd1).abs() < 1e-9, "{} {} {}", s, d.e1, fd1);
            assert!((d.e12 - fd2).abs() < 1e-4, "{} {} {}", s, d.e12, fd2);
            s += 0.0173;
        }
    }

    #[test]
    fn bump_slope_matches_differences() {
        for x in [0.03, 0.07, 0.5, 0.92, 0.99] {
            let h = 1e-6;
            assert!((bump_slope(x) - (bump(x + h) - bump(x - h)) / (2.0 * h)).abs() < 1e-6, "{}", x);
        }
    }

    #[test]
    fn cutoff_slope_is_bounded() {
        let rho = 21.0;
        let mut worst: f64 = 0.0;
        for k in 0..=2000 {
            let s = rho - 3.5 + k as f64 * 1e-3;
            worst = worst.max(cutoff(rho, HyperDual::variable(s, true, false)).e1);
        }
        assert!(worst < 1.2 && (worst - 1.0 / MASS).abs() < 1e-6);
        assert_eq!(cutoff(rho, rho - 3.0), 0.0);
        assert_eq!(cutoff(rho, rho - 2.0), 1.0);
    }
}
