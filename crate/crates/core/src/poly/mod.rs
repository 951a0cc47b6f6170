//! Sparse exact polynomials, dual polynomials and the apolar pairing.

pub mod cyclo;
pub mod parse;
pub mod scalar;

use num_bigint::BigInt;
use num_rational::BigRational;
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

pub use scalar::Coeff;

/// Exponent vector of a single monomial.
///
/// The length of the exponent vector is the number of variables in play:
/// `n+1` for homogeneous contexts (`x0..xn`), `n` for affine ones (`x1..xn`
/// after setting `x0 = 1`).  Monomials of equal degree are ordered
/// lexicographically with `x0` most significant, which fixes the row/column
/// labelling of every matrix built downstream.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    exps: Vec<u32>,
}

impl Monomial {
    pub fn new(exps: Vec<u32>) -> Self {
        Monomial { exps }
    }

    pub fn unit(nvars: usize) -> Self {
        Monomial { exps: vec![0; nvars] }
    }

    pub fn var(nvars: usize, i: usize, power: u32) -> Self {
        let mut exps = vec![0; nvars];
        exps[i] = power;
        Monomial { exps }
    }

    pub fn exps(&self) -> &[u32] {
        &self.exps
    }

    pub fn nvars(&self) -> usize {
        self.exps.len()
    }

    pub fn degree(&self) -> u32 {
        self.exps.iter().sum()
    }

    pub fn is_unit(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.exps.len(), other.exps.len());
        Monomial {
            exps: self
                .exps
                .iter()
                .zip(&other.exps)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    /// Componentwise quotient, `None` when `other` does not divide `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut exps = Vec::with_capacity(self.exps.len());
        for (a, b) in self.exps.iter().zip(&other.exps) {
            if a < b {
                return None;
            }
            exps.push(a - b);
        }
        Some(Monomial { exps })
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        other.div(self).is_some()
    }

    /// Multinomial coefficient `deg! / (e0! e1! ... )`.
    pub fn multinomial(&self) -> BigInt {
        let mut result = BigInt::from(1);
        let mut total = 0u32;
        for &e in &self.exps {
            for j in 1..=e {
                total += 1;
                result = result * BigInt::from(total) / BigInt::from(j);
            }
        }
        result
    }

    /// Drop the `x0` exponent (homogeneous -> affine labelling).
    pub fn dehomogenize(&self) -> Monomial {
        Monomial { exps: self.exps[1..].to_vec() }
    }

    /// Prepend an `x0` exponent chosen so the total degree becomes `d`.
    pub fn homogenize(&self, d: u32) -> Monomial {
        let deg = self.degree();
        debug_assert!(deg <= d);
        let mut exps = Vec::with_capacity(self.exps.len() + 1);
        exps.push(d - deg);
        exps.extend_from_slice(&self.exps);
        Monomial { exps }
    }

    /// Apply a permutation of the variables: entry `i` of the result is the
    /// old exponent of variable `perm[i]`.
    pub fn permute(&self, perm: &[usize]) -> Monomial {
        Monomial { exps: perm.iter().map(|&j| self.exps[j]).collect() }
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            // within a degree: lex with x0 most significant, largest first
            .then_with(|| other.exps.cmp(&self.exps))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_unit() {
            return write!(f, "1");
        }
        let mut first = true;
        for (i, &e) in self.exps.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "x{}", i)?;
            } else {
                write!(f, "x{}^{}", i, e)?;
            }
        }
        Ok(())
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl Monomial {
    /// Printed form with variable indices shifted (affine monomials live in
    /// `x1..xn` after dehomogenizing by `x0`).
    pub fn to_string_with_offset(&self, offset: usize) -> String {
        if self.is_unit() {
            return "1".into();
        }
        let mut out = String::new();
        for (i, &e) in self.exps.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !out.is_empty() {
                out.push('*');
            }
            if e == 1 {
                out += &format!("x{}", i + offset);
            } else {
                out += &format!("x{}^{}", i + offset, e);
            }
        }
        out
    }
}

/// All monomials in `nvars` variables of exact degree `d`, in the fixed
/// labelling order (`x0^d` first).
pub fn monomials_of_degree(nvars: usize, d: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    let mut current = vec![0u32; nvars];
    fn rec(out: &mut Vec<Monomial>, current: &mut Vec<u32>, pos: usize, left: u32) {
        if pos + 1 == current.len() {
            current[pos] = left;
            out.push(Monomial::new(current.clone()));
            return;
        }
        for e in (0..=left).rev() {
            current[pos] = e;
            rec(out, current, pos + 1, left - e);
        }
        current[pos] = 0;
    }
    if nvars == 0 {
        if d == 0 {
            out.push(Monomial::new(vec![]));
        }
        return out;
    }
    rec(&mut out, &mut current, 0, d);
    out
}

/// All monomials of degree `<= t`, ordered by degree then labelling order.
pub fn monomials_up_to_degree(nvars: usize, t: u32) -> Vec<Monomial> {
    (0..=t).flat_map(|d| monomials_of_degree(nvars, d)).collect()
}

/// `binom(n+d, d)`, the number of degree-`d` monomials in `n+1` variables.
pub fn space_dimension(nvars: usize, d: u32) -> usize {
    monomials_of_degree(nvars, d).len()
}

/// A sparse polynomial with coefficients in an exact (or floating) domain.
///
/// Terms map monomials to nonzero coefficients; zero coefficients are pruned
/// on every construction path.  The same container serves homogeneous
/// polynomials, affine polynomials, dual polynomials and differential
/// operators; the interpretation is fixed by the caller.
#[derive(Clone, PartialEq)]
pub struct Polynomial<C: Coeff> {
    nvars: usize,
    terms: BTreeMap<Monomial, C>,
}

pub type QPoly = Polynomial<BigRational>;

impl<C: Coeff> Polynomial<C> {
    pub fn zero(nvars: usize) -> Self {
        Polynomial { nvars, terms: BTreeMap::new() }
    }

    pub fn from_terms(nvars: usize, it: impl IntoIterator<Item = (Monomial, C)>) -> Self {
        let mut p = Polynomial::zero(nvars);
        for (m, c) in it {
            p.add_term(m, c);
        }
        p
    }

    pub fn monomial(nvars: usize, m: Monomial, c: C) -> Self {
        Polynomial::from_terms(nvars, [(m, c)])
    }

    pub fn constant(nvars: usize, c: C) -> Self {
        Polynomial::monomial(nvars, Monomial::unit(nvars), c)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero)
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    /// `Some(d)` when every term has total degree exactly `d`.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut it = self.terms.keys();
        let d = it.next()?.degree();
        it.all(|m| m.degree() == d).then_some(d)
    }

    pub fn add_term(&mut self, m: Monomial, c: C) {
        debug_assert_eq!(m.nvars(), self.nvars);
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get().add(&c);
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.add_term(m.clone(), c.neg());
        }
        out
    }

    pub fn neg(&self) -> Self {
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c.neg())).collect(),
        }
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Polynomial::zero(self.nvars);
        }
        Polynomial::from_terms(
            self.nvars,
            self.terms.iter().map(|(m, a)| (m.clone(), a.mul(c))),
        )
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Polynomial::zero(self.nvars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1.mul(c2));
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut result = Polynomial::constant(self.nvars, C::one());
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Polynomial<D> {
        Polynomial::from_terms(self.nvars, self.terms.iter().map(|(m, c)| (m.clone(), f(c))))
    }

    /// Substitute each variable by a polynomial (used for coordinate changes).
    pub fn substitute(&self, images: &[Polynomial<C>]) -> Polynomial<C> {
        assert_eq!(images.len(), self.nvars);
        let out_vars = images.first().map(|p| p.nvars()).unwrap_or(0);
        let mut out = Polynomial::zero(out_vars);
        for (m, c) in &self.terms {
            let mut term = Polynomial::constant(out_vars, c.clone());
            for (i, &e) in m.exps().iter().enumerate() {
                if e > 0 {
                    term = term.mul(&images[i].pow(e));
                }
            }
            out = out.add(&term);
        }
        out
    }

    pub fn evaluate(&self, point: &[C]) -> C {
        assert_eq!(point.len(), self.nvars);
        let mut total = C::zero();
        for (m, c) in &self.terms {
            let mut v = c.clone();
            for (i, &e) in m.exps().iter().enumerate() {
                for _ in 0..e {
                    v = v.mul(&point[i]);
                }
            }
            total = total.add(&v);
        }
        total
    }

    /// Partial derivative with respect to variable `i`.
    pub fn derivative(&self, i: usize) -> Polynomial<C> {
        let mut out = Polynomial::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.exps()[i];
            if e == 0 {
                continue;
            }
            let mut exps = m.exps().to_vec();
            exps[i] = e - 1;
            out.add_term(Monomial::new(exps), c.scale_int(e as i64));
        }
        out
    }

    /// Apply `self` as a constant-coefficient differential operator to `p`
    /// (variable `i` of `self` acts as d/dx_i on `p`).
    pub fn apply_diff(&self, p: &Polynomial<C>) -> Polynomial<C> {
        let mut out = Polynomial::zero(p.nvars());
        for (gamma, c) in &self.terms {
            for (beta, a) in &p.terms {
                if let Some(q) = beta.div(gamma) {
                    // falling factorial prod_i beta_i (beta_i-1) ... (beta_i-gamma_i+1)
                    let mut factor = BigInt::from(1);
                    for (bi, gi) in beta.exps().iter().zip(gamma.exps()) {
                        for t in 0..*gi {
                            factor *= BigInt::from(bi - t);
                        }
                    }
                    out.add_term(q.clone(), c.mul(a).scale_rat(&BigRational::from(factor)));
                }
            }
        }
        out
    }
}

impl QPoly {
    /// Substitute `x0 = 1`: the affine representative in `x1..xn`.
    pub fn dehomogenized(&self) -> QPoly {
        let mut out = Polynomial::zero(self.nvars - 1);
        for (m, c) in &self.terms {
            out.add_term(m.dehomogenize(), c.clone());
        }
        out
    }

    /// Homogenize to degree `d` with the extra leading variable `x0`.
    pub fn homogenized(&self, d: u32) -> Result<QPoly, String> {
        if self.degree() > d {
            return Err(format!(
                "cannot homogenize degree {} polynomial to degree {}",
                self.degree(),
                d
            ));
        }
        let mut out = Polynomial::zero(self.nvars + 1);
        for (m, c) in &self.terms {
            out.add_term(m.homogenize(d), c.clone());
        }
        Ok(out)
    }

    /// Bombieri coefficient `f_alpha` with `f = sum f_alpha binom(d,alpha) x^alpha`.
    pub fn bombieri_coeff(&self, m: &Monomial) -> BigRational {
        self.coeff(m) / BigRational::from(m.multinomial())
    }

    /// Apply an invertible linear change of coordinates `g`: substitutes
    /// `x_i -> sum_j g[i][j] x_j`.
    pub fn change_coordinates(&self, g: &[Vec<BigRational>]) -> QPoly {
        assert_eq!(g.len(), self.nvars);
        let images: Vec<QPoly> = g
            .iter()
            .map(|row| {
                Polynomial::from_terms(
                    self.nvars,
                    row.iter()
                        .enumerate()
                        .map(|(j, c)| (Monomial::var(self.nvars, j, 1), c.clone())),
                )
            })
            .collect();
        self.substitute(&images)
    }

    pub fn to_string_pretty(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut parts = Vec::new();
        // print highest-order terms first
        for (m, c) in self.terms.iter().rev() {
            let cs = rational_to_string(c);
            let one = BigRational::from(BigInt::from(1));
            let body = if m.is_unit() {
                cs
            } else if *c == one {
                format!("{}", m)
            } else if *c == -&one {
                format!("-{}", m)
            } else {
                format!("{}*{}", cs, m)
            };
            parts.push(body);
        }
        let mut s = String::new();
        for (i, p) in parts.iter().enumerate() {
            if i == 0 {
                s.push_str(p);
            } else if let Some(stripped) = p.strip_prefix('-') {
                s.push_str(" - ");
                s.push_str(stripped);
            } else {
                s.push_str(" + ");
                s.push_str(p);
            }
        }
        s
    }
}

impl<C: Coeff> fmt::Debug for Polynomial<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{:?}*{}", c, m)?;
        }
        Ok(())
    }
}

pub fn rational_to_string(q: &BigRational) -> String {
    if num_traits::One::is_one(q.denom()) {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn rational_from_string(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let num: BigInt = a.trim().parse().ok()?;
        let den: BigInt = b.trim().parse().ok()?;
        if num_traits::Zero::is_zero(&den) {
            return None;
        }
        Some(BigRational::new(num, den))
    } else {
        let num: BigInt = s.parse().ok()?;
        Some(BigRational::from(num))
    }
}

/// A linear form `k0 x0 + ... + kn xn`, the building block of Waring
/// decompositions.
#[derive(Clone, PartialEq)]
pub struct LinearForm<C: Coeff> {
    pub coeffs: Vec<C>,
}

impl<C: Coeff> LinearForm<C> {
    pub fn new(coeffs: Vec<C>) -> Self {
        LinearForm { coeffs }
    }

    pub fn nvars(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn to_polynomial(&self) -> Polynomial<C> {
        Polynomial::from_terms(
            self.coeffs.len(),
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| (Monomial::var(self.coeffs.len(), i, 1), c.clone())),
        )
    }

    /// Expand `k^d` with multinomial coefficients.
    pub fn power(&self, d: u32) -> Polynomial<C> {
        let n = self.coeffs.len();
        let mut out = Polynomial::zero(n);
        for m in monomials_of_degree(n, d) {
            let mut c = C::one().scale_rat(&BigRational::from(m.multinomial()));
            let mut skip = false;
            for (i, &e) in m.exps().iter().enumerate() {
                if e > 0 {
                    if self.coeffs[i].is_zero() {
                        skip = true;
                        break;
                    }
                    for _ in 0..e {
                        c = c.mul(&self.coeffs[i]);
                    }
                }
            }
            if !skip {
                out.add_term(m, c);
            }
        }
        out
    }
}

impl<C: Coeff> fmt::Debug for LinearForm<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.to_polynomial())
    }
}

/// A point evaluation composed with a differential operator,
/// `1_zeta o phi(d/dx1 .. d/dxn)`, acting on affine polynomials.
#[derive(Clone, PartialEq, Debug)]
pub struct PointDiffTerm<C: Coeff> {
    /// Affine coordinates of the evaluation point (length `n`).
    pub point: Vec<C>,
    /// Differential polynomial in d/dx1 .. d/dxn; must be nonzero.
    pub phi: Polynomial<C>,
}

impl<C: Coeff> PointDiffTerm<C> {
    /// Value of the functional on an affine polynomial.
    pub fn apply(&self, p: &Polynomial<C>) -> C {
        self.phi.apply_diff(p).evaluate(&self.point)
    }
}

/// The dual of a degree-`d` homogeneous polynomial, stored as a dual
/// polynomial in `d_0..d_n`.  The stored coefficient of `d^gamma` is the
/// value of the functional on `x^gamma` (equivalently the Bombieri
/// coefficient `f_gamma` when the element is `f^*`).
#[derive(Clone, PartialEq, Debug)]
pub struct DualElement {
    degree: u32,
    inner: QPoly,
}

impl DualElement {
    pub fn zero(nvars: usize, degree: u32) -> Self {
        DualElement { degree, inner: Polynomial::zero(nvars) }
    }

    pub fn from_terms(
        nvars: usize,
        degree: u32,
        it: impl IntoIterator<Item = (Monomial, BigRational)>,
    ) -> Self {
        DualElement { degree, inner: Polynomial::from_terms(nvars, it) }
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn nvars(&self) -> usize {
        self.inner.nvars()
    }

    pub fn is_zero(&self) -> bool {
        self.inner.is_zero()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.inner.terms()
    }

    pub fn coeff(&self, m: &Monomial) -> BigRational {
        self.inner.coeff(m)
    }

    /// Value of the functional on a degree-matching homogeneous polynomial.
    pub fn apply(&self, g: &QPoly) -> BigRational {
        let mut total = BigRational::zero();
        for (m, t) in self.inner.terms() {
            total += t * g.coeff(m);
        }
        total
    }
}

/// `f^*`, the linear functional `g -> <f, g>` on degree-`d` forms.
pub fn dual_of(f: &QPoly) -> Result<DualElement, String> {
    if f.is_zero() {
        return Ok(DualElement::zero(f.nvars(), 0));
    }
    let d = f
        .homogeneous_degree()
        .ok_or_else(|| "dual_of requires a homogeneous polynomial".to_string())?;
    Ok(DualElement::from_terms(
        f.nvars(),
        d,
        f.terms().map(|(m, _)| (m.clone(), f.bombieri_coeff(m))),
    ))
}

/// Inverse of [`dual_of`]: the polynomial whose apolar pairing realizes the
/// functional.
pub fn primal_of(l: &DualElement) -> QPoly {
    Polynomial::from_terms(
        l.nvars(),
        l.terms()
            .map(|(m, t)| (m.clone(), t * BigRational::from(m.multinomial()))),
    )
}

/// The module action `p * Lambda`: `x^alpha` shifts `d^gamma` down to
/// `d^(gamma-alpha)` and kills it when any exponent underflows.
pub fn act(p: &QPoly, l: &DualElement) -> Result<DualElement, String> {
    let k = p.degree();
    if k > l.degree() {
        return Err(format!(
            "cannot act by degree {} on a degree {} functional",
            k,
            l.degree()
        ));
    }
    let mut out = Polynomial::zero(l.nvars());
    for (alpha, a) in p.terms() {
        for (gamma, t) in l.terms() {
            if let Some(m) = gamma.div(alpha) {
                out.add_term(m, a * t);
            }
        }
    }
    Ok(DualElement { degree: l.degree() - k, inner: out })
}

/// The apolar (Bombieri) product `sum_alpha f_alpha g_alpha binom(d,alpha)`.
pub fn apolar_product(f: &QPoly, g: &QPoly) -> Result<BigRational, String> {
    if f.is_zero() || g.is_zero() {
        return Ok(BigRational::zero());
    }
    let df = f.homogeneous_degree().ok_or("apolar product: f is not homogeneous")?;
    let dg = g.homogeneous_degree().ok_or("apolar product: g is not homogeneous")?;
    if df != dg {
        return Err(format!("apolar product: degree mismatch {} vs {}", df, dg));
    }
    let mut total = BigRational::zero();
    for (m, c) in f.terms() {
        let gc = g.coeff(m);
        if !gc.is_zero() {
            // f_a g_a binom = (c_f/binom)(c_g/binom)binom = c_f c_g / binom
            total += c * gc / BigRational::from(m.multinomial());
        }
    }
    Ok(total)
}

/// `binom(d, alpha)` for a full exponent vector, as a rational.
pub fn multinomial_rat(m: &Monomial) -> BigRational {
    BigRational::from(m.multinomial())
}

pub fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::from(0);
    }
    let mut r = BigInt::from(1);
    for i in 0..k.min(n - k) {
        r = r * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    r
}
