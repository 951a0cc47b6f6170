//! The coefficient domains polynomials are generic over.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use std::f64::consts::TAU;
use std::fmt;

use super::cyclo::Cyclotomic;

/// Coefficient domain: exact rationals, cyclotomic numbers, or complex
/// doubles for numeric cross-checks.  Deliberately small; polynomials only
/// ever need ring operations plus scaling by rationals.
pub trait Coeff: Clone + PartialEq + fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn scale_rat(&self, q: &BigRational) -> Self;
    fn scale_int(&self, k: i64) -> Self {
        self.scale_rat(&BigRational::from(BigInt::from(k)))
    }
    fn from_rational(q: &BigRational) -> Self {
        Self::one().scale_rat(q)
    }
    /// Image in the complex numbers (numeric checks only).
    fn to_complex(&self) -> Complex64;
}

impl Coeff for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn scale_rat(&self, q: &BigRational) -> Self {
        self * q
    }
    fn from_rational(q: &BigRational) -> Self {
        q.clone()
    }
    fn to_complex(&self) -> Complex64 {
        Complex64::new(rational_to_f64(self), 0.0)
    }
}

impl Coeff for Cyclotomic {
    fn zero() -> Self {
        Cyclotomic::zero(1)
    }
    fn one() -> Self {
        Cyclotomic::one(1)
    }
    fn is_zero(&self) -> bool {
        Cyclotomic::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        Cyclotomic::add(self, other)
    }
    fn sub(&self, other: &Self) -> Self {
        Cyclotomic::sub(self, other)
    }
    fn mul(&self, other: &Self) -> Self {
        Cyclotomic::mul(self, other)
    }
    fn neg(&self) -> Self {
        Cyclotomic::neg(self)
    }
    fn scale_rat(&self, q: &BigRational) -> Self {
        Cyclotomic::scale(self, q)
    }
    fn from_rational(q: &BigRational) -> Self {
        Cyclotomic::from_rational(q.clone())
    }
    fn to_complex(&self) -> Complex64 {
        Cyclotomic::to_complex(self)
    }
}

impl Coeff for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn scale_rat(&self, q: &BigRational) -> Self {
        self * rational_to_f64(q)
    }
    fn to_complex(&self) -> Complex64 {
        *self
    }
}

pub fn rational_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        // fall back to a quotient of truncated parts for extreme values
        let n = q.numer().to_f64().unwrap_or(f64::MAX);
        let d = q.denom().to_f64().unwrap_or(f64::MAX);
        n / d
    })
}

/// `exp(2 pi i k / n)`, the numeric image of a root of unity.
pub fn root_of_unity_f64(k: u32, n: u32) -> Complex64 {
    let theta = TAU * (k % n) as f64 / n as f64;
    Complex64::new(theta.cos(), theta.sin())
}
