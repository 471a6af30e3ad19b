//! Forward-mode dual numbers carrying a value and its derivative with respect to R.

use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::scalar::Scalar;

/// A value paired with its derivative `d/dR`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Dual<T> {
    pub value: T,
    pub deriv: T,
}

impl<T: Scalar> Dual<T> {
    #[inline]
    pub fn new(value: T, deriv: T) -> Self {
        Self { value, deriv }
    }

    /// A quantity that does not depend on R.
    #[inline]
    pub fn constant(value: T) -> Self {
        Self {
            value,
            deriv: T::zero(),
        }
    }

    /// The independent variable R itself (seed derivative 1).
    #[inline]
    pub fn variable(value: T) -> Self {
        Self { value, deriv: T::one() }
    }

    #[inline]
    pub fn is_finite(&self) -> bool {
        self.value.is_finite() && self.deriv.is_finite()
    }

    #[inline]
    pub fn sin(self) -> Self {
        let (s, c) = self.value.sin_cos();
        Self::new(s, self.deriv * c)
    }

    #[inline]
    pub fn cos(self) -> Self {
        let (s, c) = self.value.sin_cos();
        Self::new(c, -self.deriv * s)
    }

    #[inline]
    pub fn exp(self) -> Self {
        let e = self.value.exp();
        Self::new(e, self.deriv * e)
    }

    /// Natural logarithm; caller guarantees a positive argument.
    #[inline]
    pub fn ln(self) -> Self {
        Self::new(self.value.ln(), self.deriv / self.value)
    }

    /// Square root; caller guarantees a positive argument.
    #[inline]
    pub fn sqrt(self) -> Self {
        let s = self.value.sqrt();
        Self::new(s, self.deriv / (s + s))
    }

    #[inline]
    pub fn tanh(self) -> Self {
        let t = self.value.tanh();
        Self::new(t, self.deriv * (T::one() - t * t))
    }

    /// `self^p` for an exponent constant in R.
    #[inline]
    pub fn powf(self, p: T) -> Self {
        if p == T::zero() {
            return Self::constant(T::one());
        }
        let value = self.value.powf(p);
        let deriv = if self.deriv == T::zero() {
            T::zero()
        } else {
            self.deriv * p * self.value.powf(p - T::one())
        };
        Self::new(value, deriv)
    }

    /// `self^other` where both sides may depend on R; requires `self.value > 0`.
    #[inline]
    pub fn pow_dual(self, other: Self) -> Self {
        let value = self.value.powf(other.value);
        let deriv = value * (other.deriv * self.value.ln() + other.value * self.deriv / self.value);
        Self::new(value, deriv)
    }
}

impl<T: Scalar> Add for Dual<T> {
    type Output = Self;
    #[inline]
    fn add(self, rhs: Self) -> Self {
        Self::new(self.value + rhs.value, self.deriv + rhs.deriv)
    }
}

impl<T: Scalar> Sub for Dual<T> {
    type Output = Self;
    #[inline]
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.value - rhs.value, self.deriv - rhs.deriv)
    }
}

impl<T: Scalar> Mul for Dual<T> {
    type Output = Self;
    #[inline]
    fn mul(self, rhs: Self) -> Self {
        Self::new(self.value * rhs.value, self.deriv * rhs.value + self.value * rhs.deriv)
    }
}

impl<T: Scalar> Div for Dual<T> {
    type Output = Self;
    #[inline]
    fn div(self, rhs: Self) -> Self {
        let q = self.value / rhs.value;
        Self::new(q, (self.deriv - q * rhs.deriv) / rhs.value)
    }
}

impl<T: Scalar> Neg for Dual<T> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.value, -self.deriv)
    }
}

impl<T: Scalar> Add<T> for Dual<T> {
    type Output = Self;
    #[inline]
    fn add(self, rhs: T) -> Self {
        Self::new(self.value + rhs, self.deriv)
    }
}

impl<T: Scalar> Sub<T> for Dual<T> {
    type Output = Self;
    #[inline]
    fn sub(self, rhs: T) -> Self {
        Self::new(self.value - rhs, self.deriv)
    }
}

impl<T: Scalar> Mul<T> for Dual<T> {
    type Output = Self;
    #[inline]
    fn mul(self, rhs: T) -> Self {
        Self::new(self.value * rhs, self.deriv * rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_rule() {
        let a = Dual::new(3.0, 2.0);
        let b = Dual::new(5.0, -1.0);
        assert_eq!(a * b, Dual::new(15.0, 2.0 * 5.0 - 3.0));
    }

    #[test]
    fn quotient_rule() {
        let a = Dual::new(3.0_f64, 2.0);
        let b = Dual::new(4.0, 1.0);
        let q = a / b;
        assert_eq!(q.value, 0.75);
        assert!((q.deriv - (2.0 * 4.0 - 3.0 * 1.0) / 16.0).abs() < 1e-15);
    }

    #[test]
    fn chain_rule_through_elementary_functions() {
        let x = Dual::variable(0.3_f64);
        assert!((x.sin().deriv - 0.3_f64.cos()).abs() < 1e-15);
        assert!((x.cos().deriv + 0.3_f64.sin()).abs() < 1e-15);
        assert!((x.exp().deriv - 0.3_f64.exp()).abs() < 1e-15);
        assert!((x.ln().deriv - 1.0 / 0.3).abs() < 1e-14);
        assert!((x.sqrt().deriv - 0.5 / 0.3_f64.sqrt()).abs() < 1e-14);
        let t = 0.3_f64.tanh();
        assert!((x.tanh().deriv - (1.0 - t * t)).abs() < 1e-15);
    }

    #[test]
    fn pow_variants_agree_for_positive_base() {
        let x = Dual::variable(1.7_f64);
        let c = Dual::constant(2.5_f64);
        let a = x.powf(2.5);
        let b = x.pow_dual(c);
        assert!((a.value - b.value).abs() < 1e-14);
        assert!((a.deriv - b.deriv).abs() < 1e-13);
    }

    #[test]
    fn works_in_single_precision() {
        let x = Dual::variable(0.5_f32);
        let y = x * x + Dual::constant(1.0);
        assert_eq!(y, Dual::new(1.25_f32, 1.0));
    }
}
