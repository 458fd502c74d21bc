//! Second-order forward-mode dual numbers.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Numbers that expressions and the dice functions can be evaluated over.
pub trait Scalar:
    Copy
    + Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn constant(c: f64) -> Self;
    /// The real part.
    fn re(&self) -> f64;
    /// Applies a scalar function given its value and first two derivatives
    /// at `self.re()`.
    fn chain(&self, f0: f64, f1: f64, f2: f64) -> Self;

    fn sin(self) -> Self {
        let v = self.re();
        self.chain(v.sin(), v.cos(), -v.sin())
    }
    fn cos(self) -> Self {
        let v = self.re();
        self.chain(v.cos(), -v.sin(), -v.cos())
    }
    fn exp(self) -> Self {
        let e = self.re().exp();
        self.chain(e, e, e)
    }
    /// Natural logarithm; the caller guarantees a positive real part.
    fn ln(self) -> Self {
        let v = self.re();
        self.chain(v.ln(), 1.0 / v, -1.0 / (v * v))
    }
    /// Square root; the caller guarantees a positive real part.
    fn sqrt(self) -> Self {
        let s = self.re().sqrt();
        self.chain(s, 0.5 / s, -0.25 / (s * s * s))
    }
    fn tanh(self) -> Self {
        let th = self.re().tanh();
        let sech2 = 1.0 - th * th;
        self.chain(th, sech2, -2.0 * th * sech2)
    }
    /// `self^c` for a constant exponent. Integer exponents accept any base.
    fn powf(self, c: f64) -> Self {
        let v = self.re();
        if c == 0.0 {
            return self.chain(1.0, 0.0, 0.0);
        }
        if c == 1.0 {
            return self;
        }
        if c.fract() == 0.0 && c.abs() < i32::MAX as f64 {
            let k = c as i32;
            return self.chain(v.powi(k), c * v.powi(k - 1), c * (c - 1.0) * v.powi(k - 2));
        }
        self.chain(v.powf(c), c * v.powf(c - 1.0), c * (c - 1.0) * v.powf(c - 2.0))
    }
    /// `|x|`, differentiated as `sgn(x)·x`.
    fn abs(self) -> Self {
        if self.re() < 0.0 {
            -self
        } else {
            self
        }
    }
    fn scale(self, c: f64) -> Self {
        self * Self::constant(c)
    }
    fn offset(self, c: f64) -> Self {
        self + Self::constant(c)
    }
}

impl Scalar for f64 {
    fn constant(c: f64) -> Self {
        c
    }
    fn re(&self) -> f64 {
        *self
    }
    fn chain(&self, f0: f64, _f1: f64, _f2: f64) -> Self {
        f0
    }
}

/// `v + e1·ε₁ + e2·ε₂ + e12·ε₁ε₂` with `ε₁² = ε₂² = 0`. Seeding `e1 = ∂/∂a`
/// and `e2 = ∂/∂b` yields `∂_a f` in `e1` and `∂_a∂_b f` in `e12`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct HyperDual {
    pub v: f64,
    pub e1: f64,
    pub e2: f64,
    pub e12: f64,
}

impl HyperDual {
    pub fn new(v: f64, e1: f64, e2: f64, e12: f64) -> Self {
        HyperDual { v, e1, e2, e12 }
    }

    /// A variable seeded in both directions according to its membership.
    pub fn variable(v: f64, in_first: bool, in_second: bool) -> Self {
        HyperDual::new(v, f64::from(u8::from(in_first)), f64::from(u8::from(in_second)), 0.0)
    }

    pub fn recip(self) -> Self {
        let v = self.v;
        self.chain(1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v))
    }
}

impl Scalar for HyperDual {
    fn constant(c: f64) -> Self {
        HyperDual::new(c, 0.0, 0.0, 0.0)
    }
    fn re(&self) -> f64 {
        self.v
    }
    fn chain(&self, f0: f64, f1: f64, f2: f64) -> Self {
        HyperDual::new(f0, f1 * self.e1, f1 * self.e2, f1 * self.e12 + f2 * self.e1 * self.e2)
    }
}

impl Add for HyperDual {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        HyperDual::new(self.v + o.v, self.e1 + o.e1, self.e2 + o.e2, self.e12 + o.e12)
    }
}

impl Sub for HyperDual {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        HyperDual::new(self.v - o.v, self.e1 - o.e1, self.e2 - o.e2, self.e12 - o.e12)
    }
}

impl Mul for HyperDual {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        HyperDual::new(
            self.v * o.v,
            self.v * o.e1 + self.e1 * o.v,
            self.v * o.e2 + self.e2 * o.v,
            self.v * o.e12 + self.e1 * o.e2 + self.e2 * o.e1 + self.e12 * o.v,
        )
    }
}

impl Div for HyperDual {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Self) -> Self {
        self * o.recip()
    }
}

impl Neg for HyperDual {
    type Output = Self;
    fn neg(self) -> Self {
        HyperDual::new(-self.v, -self.e1, -self.e2, -self.e12)
    }
}

/// Value, `∂_a f` and `∂_a∂_b f` of `f` at `point`.
pub fn second_partial<F>(f: F, point: &[f64], a: usize, b: usize) -> HyperDual
where
    F: Fn(&[HyperDual]) -> HyperDual,
{
    let args: Vec<HyperDual> = point.iter().enumerate().map(|(k, &v)| HyperDual::variable(v, k == a, k == b)).collect();
    f(&args)
}

/// Value and gradient of `f` at `point`, one directional pass per coordinate.
pub fn gradient<F>(f: F, point: &[f64]) -> (f64, Vec<f64>)
where
    F: Fn(&[HyperDual]) -> HyperDual,
{
    let consts: Vec<HyperDual> = point.iter().map(|&v| HyperDual::constant(v)).collect();
    let value = f(&consts).v;
    let grad = (0..point.len()).map(|a| second_partial(&f, point, a, a).e1).collect();
    (value, grad)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_rule() {
        let x = HyperDual::variable(3.0, true, true);
        let y = x * x * x;
        assert_eq!(y, HyperDual::new(27.0, 27.0, 27.0, 18.0));
    }

    #[test]
    fn quotient_and_chain() {
        let x = HyperDual::variable(0.5, true, true);
        let y = (x.sin() / x).exp();
        let f = |t: f64| (t.sin() / t).exp();
        let h = 1e-4;
        let d1 = (f(0.5 + h) - f(0.5 - h)) / (2.0 * h);
        let d2 = (f(0.5 + h) - 2.0 * f(0.5) + f(0.5 - h)) / (h * h);
        assert!((y.e1 - d1).abs() < 1e-7);
        assert!((y.e12 - d2).abs() < 1e-5);
    }

    #[test]
    fn integer_power_of_negative_base() {
        let x = HyperDual::variable(-2.0, true, true);
        assert_eq!(x.powf(2.0), HyperDual::new(4.0, -4.0, -4.0, 2.0));
    }
}
