//! Forward-mode holomorphic dual numbers.
//!
//! A [`Dual`] carries a value and the derivative with respect to one complex parameter. Group
//! multiplications are written once over [`Scalar`] and evaluated either on plain complex numbers
//! or on duals, which yields their holomorphic Jacobians without a finite-difference step.

use core::ops::{Add, Div, Mul, Neg, Sub};

use crate::C64;

pub trait Scalar:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Div<Output = Self> + Neg<Output = Self>
{
    fn constant(c: C64) -> Self;
}

impl Scalar for C64 {
    fn constant(c: C64) -> Self {
        c
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dual {
    pub value: C64,
    pub deriv: C64,
}

impl Dual {
    pub fn variable(value: C64) -> Self {
        Dual { value, deriv: C64::new(1.0, 0.0) }
    }
}

impl Scalar for Dual {
    fn constant(c: C64) -> Self {
        Dual { value: c, deriv: C64::new(0.0, 0.0) }
    }
}

impl Add for Dual {
    type Output = Dual;
    fn add(self, o: Dual) -> Dual {
        Dual { value: self.value + o.value, deriv: self.deriv + o.deriv }
    }
}

impl Sub for Dual {
    type Output = Dual;
    fn sub(self, o: Dual) -> Dual {
        Dual { value: self.value - o.value, deriv: self.deriv - o.deriv }
    }
}

impl Mul for Dual {
    type Output = Dual;
    fn mul(self, o: Dual) -> Dual {
        Dual { value: self.value * o.value, deriv: self.deriv * o.value + self.value * o.deriv }
    }
}

impl Div for Dual {
    type Output = Dual;
    fn div(self, o: Dual) -> Dual {
        let q = self.value / o.value;
        Dual { value: q, deriv: (self.deriv - q * o.deriv) / o.value }
    }
}

impl Neg for Dual {
    type Output = Dual;
    fn neg(self) -> Dual {
        Dual { value: -self.value, deriv: -self.deriv }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quotient_rule() {
        // d/dz (z^2 / (1 + z)) at z = 1 + i.
        let z = Dual::variable(C64::new(1.0, 1.0));
        let one = Dual::constant(C64::new(1.0, 0.0));
        let f = z * z / (one + z);
        let zv = z.value;
        let expected = (zv * zv + zv * 2.0) / ((zv + 1.0) * (zv + 1.0));
        assert!((f.deriv - expected).norm() < 1e-14);
    }
}
