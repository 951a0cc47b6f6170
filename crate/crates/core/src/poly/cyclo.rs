//! Exact arithmetic in cyclotomic fields Q(zeta_N).
//!
//! Elements are stored as rational coefficient vectors on the powers
//! `zeta^0 .. zeta^(N-1)` and multiplied cyclically, i.e. modulo `x^N - 1`.
//! That representation is redundant; equality and zero tests reduce modulo
//! the N-th cyclotomic polynomial `Phi_N` first.  Keeping the cheap cyclic
//! form during arithmetic avoids reducing after every multiplication.

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::collections::HashMap;
use std::fmt;
use std::sync::Mutex;
use std::sync::OnceLock;

use super::scalar::{rational_to_f64, root_of_unity_f64};

/// An element of Q(zeta_N) in the cyclic power basis.
#[derive(Clone)]
pub struct Cyclotomic {
    order: u32,
    coeffs: Vec<BigRational>,
}

impl Cyclotomic {
    pub fn zero(order: u32) -> Self {
        assert!(order >= 1);
        Cyclotomic { order, coeffs: vec![BigRational::zero(); order as usize] }
    }

    pub fn one(order: u32) -> Self {
        Self::from_rational_in(BigRational::one(), order)
    }

    pub fn from_rational(q: BigRational) -> Self {
        Self::from_rational_in(q, 1)
    }

    pub fn from_rational_in(q: BigRational, order: u32) -> Self {
        let mut z = Cyclotomic::zero(order);
        z.coeffs[0] = q;
        z
    }

    /// `zeta_N^k`.
    pub fn root_of_unity(order: u32, k: u32) -> Self {
        let mut z = Cyclotomic::zero(order);
        z.coeffs[(k % order) as usize] = BigRational::one();
        z
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// Rewrite on the order-`m` basis (`self.order` must divide `m`).
    pub fn lift_to(&self, m: u32) -> Cyclotomic {
        assert!(m % self.order == 0, "lift target must be a multiple of the order");
        let step = (m / self.order) as usize;
        let mut out = Cyclotomic::zero(m);
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                out.coeffs[i * step] = c.clone();
            }
        }
        out
    }

    fn matched(&self, other: &Self) -> (Cyclotomic, Cyclotomic) {
        if self.order == other.order {
            return (self.clone(), other.clone());
        }
        let m = num_integer::lcm(self.order, other.order);
        (self.lift_to(m), other.lift_to(m))
    }

    pub fn add(&self, other: &Self) -> Self {
        let (mut a, b) = self.matched(other);
        for (x, y) in a.coeffs.iter_mut().zip(&b.coeffs) {
            *x += y;
        }
        a
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Cyclotomic {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (a, b) = self.matched(other);
        let n = a.order as usize;
        let mut out = Cyclotomic::zero(a.order);
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                let k = (i + j) % n;
                out.coeffs[k] += x * y;
            }
        }
        out
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        Cyclotomic {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| c * q).collect(),
        }
    }

    /// Canonical coefficients modulo `Phi_N`, degree < phi(N).
    pub fn reduced(&self) -> Vec<BigRational> {
        let phi = cyclotomic_polynomial(self.order);
        poly_rem(&self.coeffs, &phi)
    }

    pub fn is_zero(&self) -> bool {
        if self.coeffs.iter().all(|c| c.is_zero()) {
            return true;
        }
        self.reduced().iter().all(|c| c.is_zero())
    }

    /// The rational part when the element is rational, `None` otherwise.
    pub fn as_rational(&self) -> Option<BigRational> {
        let r = self.reduced();
        if r.iter().skip(1).all(|c| c.is_zero()) {
            Some(r.first().cloned().unwrap_or_else(BigRational::zero))
        } else {
            None
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        let mut z = Complex64::new(0.0, 0.0);
        for (k, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                z += root_of_unity_f64(k as u32, self.order) * rational_to_f64(c);
            }
        }
        z
    }
}

impl PartialEq for Cyclotomic {
    fn eq(&self, other: &Self) -> bool {
        self.sub(other).is_zero()
    }
}

impl fmt::Debug for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if k == 0 {
                write!(f, "{}", c)?;
            } else {
                write!(f, "{}*z{}^{}", c, self.order, k)?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Coefficients (ascending) of the N-th cyclotomic polynomial, computed by
/// exact division of `x^N - 1` by the product of `Phi_e` over proper
/// divisors `e | N`.  Cached per order.
pub fn cyclotomic_polynomial(n: u32) -> Vec<BigRational> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Vec<BigRational>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = cache.lock().unwrap().get(&n) {
        return p.clone();
    }
    let mut num = vec![BigRational::zero(); n as usize + 1];
    num[0] = -BigRational::one();
    num[n as usize] = BigRational::one();
    let mut den = vec![BigRational::one()];
    for e in 1..n {
        if n % e == 0 {
            den = poly_mul(&den, &cyclotomic_polynomial(e));
        }
    }
    let phi = poly_div_exact(&num, &den);
    cache.lock().unwrap().insert(n, phi.clone());
    phi
}

fn poly_trim(a: &mut Vec<BigRational>) {
    while a.last().map(|c| c.is_zero()).unwrap_or(false) {
        a.pop();
    }
}

fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    poly_trim(&mut out);
    out
}

/// Exact quotient of univariate polynomials; panics on nonzero remainder
/// (the cyclotomic recursion guarantees divisibility).
fn poly_div_exact(num: &[BigRational], den: &[BigRational]) -> Vec<BigRational> {
    let mut rem: Vec<BigRational> = num.to_vec();
    poly_trim(&mut rem);
    let mut den = den.to_vec();
    poly_trim(&mut den);
    let dd = den.len() - 1;
    let lead = den[dd].clone();
    assert!(!lead.is_zero());
    if rem.len() <= dd {
        assert!(rem.iter().all(|c| c.is_zero()));
        return vec![BigRational::zero()];
    }
    let mut quot = vec![BigRational::zero(); rem.len() - dd];
    while rem.len() > dd {
        let k = rem.len() - 1 - dd;
        let c = &rem[rem.len() - 1] / &lead;
        quot[k] = c.clone();
        for (i, dc) in den.iter().enumerate() {
            let idx = k + i;
            let t = &c * dc;
            rem[idx] -= t;
        }
        poly_trim(&mut rem);
        if rem.is_empty() {
            break;
        }
    }
    assert!(rem.iter().all(|c| c.is_zero()), "inexact polynomial division");
    poly_trim(&mut quot);
    if quot.is_empty() {
        quot.push(BigRational::zero());
    }
    quot
}

/// Remainder of `a` modulo monic-leading `b`.
fn poly_rem(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut rem: Vec<BigRational> = a.to_vec();
    poly_trim(&mut rem);
    let mut b = b.to_vec();
    poly_trim(&mut b);
    let db = b.len() - 1;
    let lead = b[db].clone();
    while rem.len() > db {
        let k = rem.len() - 1 - db;
        let c = &rem[rem.len() - 1] / &lead;
        for (i, bc) in b.iter().enumerate() {
            let t = &c * bc;
            rem[k + i] -= t;
        }
        poly_trim(&mut rem);
    }
    rem
}
