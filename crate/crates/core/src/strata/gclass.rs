//! Polynomials in the Lefschetz class `L` with big-integer coefficients.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// An element of `Z[L]`, coefficients stored lowest degree first with no
/// trailing zeros (the zero class has no coefficients).
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct GClass {
    coeffs: Vec<BigInt>,
}

impl GClass {
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(BigInt::one())
    }

    pub fn constant(c: BigInt) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// The class `L` of the affine line.
    pub fn lefschetz() -> Self {
        Self::from_coeffs(vec![BigInt::zero(), BigInt::one()])
    }

    /// `L - 1`, the class of the punctured line.
    pub fn punctured_line() -> Self {
        Self::from_i64(&[-1, 1])
    }

    pub fn from_coeffs(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero class.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn pow(&self, k: usize) -> Self {
        let mut out = Self::one();
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    pub fn eval(&self, l: &BigInt) -> BigInt {
        self.coeffs.iter().rev().fold(BigInt::zero(), |acc, c| acc * l + c)
    }

    /// Value at `L = 1`: the topological Euler characteristic.
    pub fn euler_characteristic(&self) -> BigInt {
        self.coeffs.iter().sum()
    }
}

impl Add for &GClass {
    type Output = GClass;
    fn add(self, rhs: &GClass) -> GClass {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        let zero = BigInt::zero();
        GClass::from_coeffs(
            (0..len)
                .map(|i| self.coeffs.get(i).unwrap_or(&zero) + rhs.coeffs.get(i).unwrap_or(&zero))
                .collect(),
        )
    }
}

impl Neg for &GClass {
    type Output = GClass;
    fn neg(self) -> GClass {
        GClass { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Sub for &GClass {
    type Output = GClass;
    fn sub(self, rhs: &GClass) -> GClass {
        self + &(-rhs)
    }
}

impl Mul for &GClass {
    type Output = GClass;
    fn mul(self, rhs: &GClass) -> GClass {
        if self.is_zero() || rhs.is_zero() {
            return GClass::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        GClass::from_coeffs(out)
    }
}

macro_rules! forward_owned {
    ($($tr:ident $f:ident),*) => {$(
        impl $tr for GClass {
            type Output = GClass;
            fn $f(self, rhs: GClass) -> GClass {
                (&self).$f(&rhs)
            }
        }
        impl $tr<&GClass> for GClass {
            type Output = GClass;
            fn $f(self, rhs: &GClass) -> GClass {
                (&self).$f(rhs)
            }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

impl Neg for GClass {
    type Output = GClass;
    fn neg(self) -> GClass {
        -&self
    }
}

impl Sum for GClass {
    fn sum<I: Iterator<Item = GClass>>(iter: I) -> GClass {
        iter.fold(GClass::zero(), |a, b| &a + &b)
    }
}

impl fmt::Display for GClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (d, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if c.is_negative() { '-' } else { '+' })?;
            }
            first = false;
            let unit = mag.is_one() && d > 0;
            if !unit {
                write!(f, "{mag}")?;
            }
            match d {
                0 => {}
                1 => write!(f, "L")?,
                _ => write!(f, "L^{d}")?,
            }
        }
        Ok(())
    }
}
