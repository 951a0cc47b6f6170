//! Closed-form Waring decompositions of monomials via roots of unity, the
//! epsilon-families that witness border-rank bounds, and decomposition
//! verification.
//!
//! For a monomial `x0^a0 .. xn^an` of degree `d` with the pivot exponent
//! `a0` rotated into position 0, the decomposition runs over all tuples
//! `k = (k1..kn)` with `0 <= k_i <= a_i`:
//!
//! ```text
//!   weight(k) = eps^(a0-d) * z1^k1 .. zn^kn / ((a1+1)..(an+1) * binom(d,a))
//!   form(k)   = x0 + eps z1^k1 x1 + .. + eps zn^kn xn
//! ```
//!
//! with `z_i` a primitive `(a_i+1)`-th root of unity.  Rotating the minimal
//! exponent into the pivot makes the sum reproduce the monomial exactly for
//! every eps != 0 (prod/min terms, the Waring rank); rotating the maximal
//! exponent there leaves an O(eps) remainder and witnesses the border rank
//! bound prod/max.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Signed;

use crate::poly::cyclo::Cyclotomic;
use crate::poly::scalar::rational_to_f64;
use crate::poly::{multinomial_rat, Coeff, LinearForm, Monomial, Polynomial, QPoly};

/// Largest cyclotomic order the exact verifier will work in; beyond this the
/// callers fall back to numeric verification.
pub const MAX_CYCLOTOMIC_ORDER: u32 = 60;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DecompError {
    #[error("epsilon must be nonzero")]
    ZeroEpsilon,
    #[error("cyclotomic order {0} exceeds the exact-arithmetic cap {MAX_CYCLOTOMIC_ORDER}")]
    CyclotomicOrderTooLarge(u32),
    #[error("exponent vector must not be all zero")]
    ZeroMonomial,
}

/// A Waring decomposition `target = sum_i weight_i * form_i^d`.
#[derive(Clone, Debug)]
pub struct WaringDecomposition<C: Coeff> {
    pub degree: u32,
    pub terms: Vec<(C, LinearForm<C>)>,
    pub target: QPoly,
}

impl<C: Coeff> WaringDecomposition<C> {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Expand `sum weight * form^d`.
    pub fn value(&self) -> Polynomial<C> {
        let n = self.target.nvars();
        let mut total = Polynomial::zero(n);
        for (w, k) in &self.terms {
            total = total.add(&k.power(self.degree).scale(w));
        }
        total
    }

    pub fn to_complex(&self) -> WaringDecomposition<Complex64> {
        WaringDecomposition {
            degree: self.degree,
            terms: self
                .terms
                .iter()
                .map(|(w, k)| {
                    (
                        w.to_complex(),
                        LinearForm::new(k.coeffs.iter().map(|c| c.to_complex()).collect()),
                    )
                })
                .collect(),
            target: self.target.clone(),
        }
    }
}

/// Waring rank of a monomial: `prod (a_i+1) / min (a_i+1)` over the nonzero
/// exponents; pure powers have rank 1.
pub fn monomial_rank(alpha: &[u32]) -> u64 {
    let support: Vec<u32> = alpha.iter().copied().filter(|&a| a > 0).collect();
    if support.len() <= 1 {
        return 1;
    }
    let prod: u64 = support.iter().map(|&a| (a + 1) as u64).product();
    let min = support.iter().map(|&a| (a + 1) as u64).min().unwrap();
    prod / min
}

/// Border-rank bound / scheme length of a monomial: `prod / max`.
pub fn monomial_border_size(alpha: &[u32]) -> u64 {
    let support: Vec<u32> = alpha.iter().copied().filter(|&a| a > 0).collect();
    if support.len() <= 1 {
        return 1;
    }
    let prod: u64 = support.iter().map(|&a| (a + 1) as u64).product();
    let max = support.iter().map(|&a| (a + 1) as u64).max().unwrap();
    prod / max
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Pivot {
    Min,
    Max,
}

/// The shared root-of-unity construction, parametrized by which exponent is
/// rotated into the pivot slot.
///
/// Variables with exponent zero stay out of the construction entirely;
/// including them (the degenerate 1st root of unity) would smuggle an
/// `eps x_i` into every form and break exactness.
struct RootsOfUnityScheme {
    /// Original variable indices carrying nonzero exponents, pivot first.
    support: Vec<usize>,
    /// Exponents along `support`.
    sup_exps: Vec<u32>,
    /// Total number of variables of the ambient ring.
    nvars: usize,
    degree: u32,
    order: u32,
}

impl RootsOfUnityScheme {
    fn new(alpha: &[u32], pivot: Pivot) -> Result<Self, DecompError> {
        if alpha.iter().all(|&a| a == 0) {
            return Err(DecompError::ZeroMonomial);
        }
        let p = match pivot {
            Pivot::Min => {
                alpha
                    .iter()
                    .enumerate()
                    .filter(|(_, &a)| a > 0)
                    .min_by_key(|&(i, &a)| (a, i))
                    .unwrap()
                    .0
            }
            Pivot::Max => {
                alpha
                    .iter()
                    .enumerate()
                    .filter(|(_, &a)| a > 0)
                    .max_by_key(|&(i, &a)| (a, std::cmp::Reverse(i)))
                    .unwrap()
                    .0
            }
        };
        let mut support = vec![p];
        support.extend((0..alpha.len()).filter(|&i| i != p && alpha[i] > 0));
        let sup_exps: Vec<u32> = support.iter().map(|&i| alpha[i]).collect();
        let mut order = 1u32;
        for &a in &sup_exps[1..] {
            order = num_integer::lcm(order, a + 1);
        }
        if order > MAX_CYCLOTOMIC_ORDER {
            return Err(DecompError::CyclotomicOrderTooLarge(order));
        }
        Ok(RootsOfUnityScheme {
            support,
            sup_exps,
            nvars: alpha.len(),
            degree: alpha.iter().sum(),
            order,
        })
    }

    fn term_count(&self) -> u64 {
        self.sup_exps[1..].iter().map(|&a| (a + 1) as u64).product()
    }

    /// All tuples `k` with `0 <= k_i <= sup_exps[i]`, `i >= 1`.
    fn tuples(&self) -> Vec<Vec<u32>> {
        let mut out = vec![vec![]];
        for &b in &self.sup_exps[1..] {
            let mut next = Vec::with_capacity(out.len() * (b as usize + 1));
            for t in &out {
                for k in 0..=b {
                    let mut t2 = t.clone();
                    t2.push(k);
                    next.push(t2);
                }
            }
            out = next;
        }
        out
    }

    /// `zeta_i^k` embedded in the ambient cyclotomic field.
    fn zeta_pow(&self, i: usize, k: u32) -> Cyclotomic {
        let sub = self.sup_exps[i] + 1;
        Cyclotomic::root_of_unity(self.order, (self.order / sub) * (k % sub))
    }

    /// Decomposition terms, coefficients in the original variable order.
    fn terms(&self, eps: &BigRational) -> Vec<(Cyclotomic, LinearForm<Cyclotomic>)> {
        let d = self.degree;
        let a0 = self.sup_exps[0];
        // eps^(a0 - d) / (prod_{i>=1} (a_i+1) * binom(d, alpha))
        let denom: BigInt = self.sup_exps[1..]
            .iter()
            .map(|&a| BigInt::from(a + 1))
            .product::<BigInt>()
            * Monomial::new(self.sup_exps.clone()).multinomial();
        let scale = eps.pow(-((d - a0) as i32)) / BigRational::from(denom);
        let mut out = Vec::new();
        for k in self.tuples() {
            let mut weight = Cyclotomic::from_rational_in(scale.clone(), self.order);
            let mut coeffs = vec![Cyclotomic::zero(self.order); self.nvars];
            coeffs[self.support[0]] = Cyclotomic::one(self.order);
            for (i, &ki) in k.iter().enumerate() {
                let z = self.zeta_pow(i + 1, ki);
                weight = weight.mul(&z);
                coeffs[self.support[i + 1]] = z.scale(eps);
            }
            out.push((weight, LinearForm::new(coeffs)));
        }
        out
    }
}

/// Exact Waring decomposition of the monomial `x^alpha` with `prod/min`
/// terms, valid for every `eps != 0`.
pub fn monomial_waring(
    alpha: &[u32],
    eps: &BigRational,
) -> Result<WaringDecomposition<Cyclotomic>, DecompError> {
    if num_traits::Zero::is_zero(eps) {
        return Err(DecompError::ZeroEpsilon);
    }
    let target = QPoly::monomial(
        alpha.len(),
        Monomial::new(alpha.to_vec()),
        num_traits::One::one(),
    );
    let scheme = RootsOfUnityScheme::new(alpha, Pivot::Min)?;
    Ok(WaringDecomposition {
        degree: scheme.degree,
        terms: scheme.terms(eps),
        target,
    })
}

/// An epsilon-family of decompositions whose value converges to `limit` as
/// `eps -> 0`; the instantiation at any `eps != 0` is a genuine Waring
/// decomposition of `limit + remainder(eps)`.
pub struct EpsilonFamily {
    scheme: RootsOfUnityScheme,
    pub limit: QPoly,
}

impl EpsilonFamily {
    pub fn term_count(&self) -> u64 {
        self.scheme.term_count()
    }

    pub fn degree(&self) -> u32 {
        self.scheme.degree
    }

    /// The decomposition at a fixed `eps != 0`.
    pub fn instantiate(
        &self,
        eps: &BigRational,
    ) -> Result<WaringDecomposition<Cyclotomic>, DecompError> {
        if num_traits::Zero::is_zero(eps) {
            return Err(DecompError::ZeroEpsilon);
        }
        Ok(WaringDecomposition {
            degree: self.scheme.degree,
            terms: self.scheme.terms(eps),
            target: self.limit.clone(),
        })
    }

    /// Exact rational remainder `value(eps) - limit`: the surplus dual terms
    /// carry eps powers `a0 + rho(l) - d >= 1`, so every coefficient is
    /// O(eps).
    pub fn remainder(&self, eps: &BigRational) -> QPoly {
        let sup = &self.scheme.sup_exps;
        let d = self.scheme.degree;
        let a0 = sup[0];
        let m = sup.len() - 1;
        let n = self.scheme.nvars;
        let alpha_binom = multinomial_rat(&Monomial::new(sup.clone()));
        let mut out = QPoly::zero(n);
        if m == 0 {
            return out;
        }
        // enumerate l in N_+^m with rho(l) = sum l_i (a_i+1) - m in (d-a0, d]
        let mut l = vec![1u32; m];
        'outer: loop {
            let rho: i64 = l
                .iter()
                .zip(&sup[1..])
                .map(|(&li, &ai)| (li as i64) * ((ai + 1) as i64))
                .sum::<i64>()
                - m as i64;
            if rho > (d - a0) as i64 && rho <= d as i64 {
                let mut beta_sup = Vec::with_capacity(m + 1);
                beta_sup.push(d - rho as u32);
                for (li, &ai) in l.iter().zip(&sup[1..]) {
                    beta_sup.push(li * (ai + 1) - 1);
                }
                let mut exps = vec![0u32; n];
                for (slot, &orig) in self.scheme.support.iter().enumerate() {
                    exps[orig] = beta_sup[slot];
                }
                let power = (a0 as i64 + rho - d as i64) as i32;
                let coeff =
                    eps.pow(power) * multinomial_rat(&Monomial::new(beta_sup)) / &alpha_binom;
                out.add_term(Monomial::new(exps), coeff);
            }
            // odometer over l; any l_i > d+1 already violates rho <= d
            let mut idx = 0;
            loop {
                if idx == m {
                    break 'outer;
                }
                l[idx] += 1;
                if l[idx] <= d + 1 {
                    for v in l.iter_mut().take(idx) {
                        *v = 1;
                    }
                    break;
                }
                l[idx] = 1;
                idx += 1;
            }
        }
        out
    }

    /// `limit + remainder(eps)`, the exact value of the instantiated sum.
    pub fn value_at(&self, eps: &BigRational) -> QPoly {
        self.limit.add(&self.remainder(eps))
    }

    /// Max coefficient of the remainder, numerically.
    pub fn remainder_norm(&self, eps: &BigRational) -> f64 {
        self.remainder(eps)
            .terms()
            .map(|(_, c)| rational_to_f64(&c.abs()))
            .fold(0.0, f64::max)
    }
}

/// Border-rank witness family for `x^alpha`: `prod/max` terms whose limit is
/// the monomial.
pub fn monomial_border_family(alpha: &[u32]) -> Result<EpsilonFamily, DecompError> {
    let scheme = RootsOfUnityScheme::new(alpha, Pivot::Max)?;
    let limit = QPoly::monomial(
        alpha.len(),
        Monomial::new(alpha.to_vec()),
        num_traits::One::one(),
    );
    Ok(EpsilonFamily { scheme, limit })
}

/// The rank-5 cubic family separating border rank from smoothable rank:
/// five explicit linear forms whose scaled cube sum converges to the target
/// cubic in five variables.  Returns the decomposition at `eps` and its
/// exact O(eps) remainder.
pub fn jarek_family(
    eps: &BigRational,
) -> Result<(WaringDecomposition<BigRational>, QPoly), DecompError> {
    if num_traits::Zero::is_zero(eps) {
        return Err(DecompError::ZeroEpsilon);
    }
    let target = jarek_cubic();
    let q = |n: i64| BigRational::from(BigInt::from(n));
    let scale = q(3) * eps;
    let z = q(0);
    let form = |coeffs: [BigRational; 5]| LinearForm::new(coeffs.to_vec());
    let terms: Vec<(BigRational, LinearForm<BigRational>)> = vec![
        (
            q(1) / &scale,
            form([q(1), z.clone(), eps.clone(), z.clone(), z.clone()]),
        ),
        (
            q(6) / &scale,
            form([z.clone(), q(1), z.clone(), eps.clone(), z.clone()]),
        ),
        (
            q(-3) / &scale,
            form([q(1), q(1), z.clone(), z.clone(), eps.clone()]),
        ),
        (
            q(3) / &scale,
            form([q(1), q(2), z.clone(), z.clone(), z.clone()]),
        ),
        (
            q(-1) / &scale,
            form([q(1), q(3), z.clone(), z.clone(), z.clone()]),
        ),
    ];
    let dec = WaringDecomposition { degree: 3, terms, target: target.clone() };
    let remainder = dec.value().sub(&target);
    Ok((dec, remainder))
}

/// The cubic the family above converges to.
pub fn jarek_cubic() -> QPoly {
    crate::poly::parse::parse("x0^2*x2 + 6*x1^2*x3 - 3*(x0+x1)^2*x4", 4).expect("fixed polynomial")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerifyMode {
    Exact,
    Numeric,
}

#[derive(Clone, Debug)]
pub struct VerifyReport {
    /// Outcome of the exact comparison, when run.
    pub exact_match: Option<bool>,
    /// Max coefficient residual of `value - target` in the complex image.
    pub residual: f64,
    /// Apolarity cross-check: degree-d forms vanishing on all decomposition
    /// points also pair to zero with the target (numeric).
    pub apolar_cross_check: Option<bool>,
    pub term_count: usize,
}

impl VerifyReport {
    pub fn passed(&self, tol: f64) -> bool {
        match self.exact_match {
            Some(m) => m,
            None => self.residual <= tol,
        }
    }
}

/// Verify a decomposition exactly (cyclotomic identity after reduction) or
/// numerically (complex instantiation, max coefficient residual).
pub fn verify<C: Coeff>(dec: &WaringDecomposition<C>, mode: VerifyMode, tol: f64) -> VerifyReport {
    let numeric = dec.to_complex();
    let diff_num = numeric
        .value()
        .sub(&dec.target.map_coeffs(|c| c.to_complex()));
    let residual = diff_num.terms().map(|(_, c)| c.norm()).fold(0.0, f64::max);
    let exact_match = match mode {
        VerifyMode::Exact => {
            let diff = dec
                .value()
                .sub(&dec.target.map_coeffs(|c| C::from_rational(c)));
            Some(diff.is_zero())
        }
        VerifyMode::Numeric => None,
    };
    let apolar_cross_check = Some(numeric_apolarity_check(&numeric, tol.max(1e-9)));
    VerifyReport {
        exact_match,
        residual,
        term_count: dec.len(),
        apolar_cross_check,
    }
}

/// Numeric apolarity direction: every degree-d form vanishing on all the
/// decomposition points must pair to zero with the target.
fn numeric_apolarity_check(dec: &WaringDecomposition<Complex64>, tol: f64) -> bool {
    let n = dec.target.nvars();
    let monos = crate::poly::monomials_of_degree(n, dec.degree);
    let points: Vec<Vec<Complex64>> = dec.terms.iter().map(|(_, k)| k.coeffs.clone()).collect();
    if points.is_empty() {
        return true;
    }
    let rows: Vec<Vec<Complex64>> = points
        .iter()
        .map(|p| {
            monos
                .iter()
                .map(|m| {
                    let mut v = Complex64::new(1.0, 0.0);
                    for (i, &e) in m.exps().iter().enumerate() {
                        for _ in 0..e {
                            v *= p[i];
                        }
                    }
                    v
                })
                .collect()
        })
        .collect();
    let kernel = crate::numeric::complex_kernel(&rows, 1e-10);
    let fb: Vec<Complex64> = monos
        .iter()
        .map(|m| {
            let c = dec.target.bombieri_coeff(m);
            Complex64::new(rational_to_f64(&c), 0.0)
        })
        .collect();
    for e in &kernel {
        // <e, f> = sum e_plain[m] * f_bombieri[m]
        let pairing: Complex64 = e.iter().zip(&fb).map(|(a, b)| a * b).sum();
        if pairing.norm() > tol * 10.0 {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from(BigInt::from(n))
    }

    fn qr(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn rank_formula() {
        assert_eq!(monomial_rank(&[1, 2, 2]), 9);
        assert_eq!(monomial_rank(&[5, 0, 0]), 1);
        assert_eq!(monomial_rank(&[1, 4]), 5);
        assert_eq!(monomial_border_size(&[1, 2, 2]), 6);
        assert_eq!(monomial_border_size(&[4, 1]), 2);
    }

    #[test]
    fn waring_x0sq_x1_three_terms_exact() {
        // prod/min = 3*2/2 = 3, the binary-monomial rank max+1
        let dec = monomial_waring(&[2, 1], &q(1)).unwrap();
        assert_eq!(dec.len(), 3);
        assert_eq!(dec.len() as u64, monomial_rank(&[2, 1]));
        let r = verify(&dec, VerifyMode::Exact, 1e-9);
        assert_eq!(r.exact_match, Some(true));
    }

    #[test]
    fn waring_x0_x1sq_three_terms_exact() {
        let dec = monomial_waring(&[1, 2], &q(1)).unwrap();
        assert_eq!(dec.len(), 3);
        assert_eq!(verify(&dec, VerifyMode::Exact, 1e-9).exact_match, Some(true));
    }

    #[test]
    fn waring_nine_terms_at_eps_half() {
        let dec = monomial_waring(&[1, 2, 2], &qr(1, 2)).unwrap();
        assert_eq!(dec.len(), 9);
        let r = verify(&dec, VerifyMode::Exact, 1e-9);
        assert_eq!(r.exact_match, Some(true));
        assert_eq!(r.apolar_cross_check, Some(true));
    }

    #[test]
    fn tampered_weight_fails() {
        let mut dec = monomial_waring(&[1, 2], &q(1)).unwrap();
        let (w, _) = &mut dec.terms[0];
        *w = Coeff::add(w, &Cyclotomic::one(w.order()));
        let r = verify(&dec, VerifyMode::Exact, 1e-9);
        assert_eq!(r.exact_match, Some(false));
        assert!(r.residual > 1e-6);
    }

    #[test]
    fn pure_power_is_single_term() {
        let dec = monomial_waring(&[0, 3, 0], &q(1)).unwrap();
        assert_eq!(dec.len(), 1);
        assert_eq!(verify(&dec, VerifyMode::Exact, 1e-9).exact_match, Some(true));
    }

    #[test]
    fn border_family_size_and_limit() {
        // x0^(d-1) x1 -> 2-term family
        let fam = monomial_border_family(&[3, 1]).unwrap();
        assert_eq!(fam.term_count(), 2);
        // value(eps) = limit + remainder(eps), checked exactly over cyclotomics
        let eps = qr(1, 3);
        let dec = fam.instantiate(&eps).unwrap();
        let expect = fam.value_at(&eps).map_coeffs(|c| Cyclotomic::from_rational(c.clone()));
        assert!(dec.value().sub(&expect).is_zero());
        // remainder is O(eps)
        assert!(fam.remainder_norm(&qr(1, 100)) <= 10.0 / 100.0);
    }

    #[test]
    fn border_family_of_quintic_monomial() {
        let fam = monomial_border_family(&[1, 2, 2]).unwrap();
        assert_eq!(fam.term_count(), 6);
        let eps = qr(1, 100);
        let dec = fam.instantiate(&eps).unwrap();
        let expect = fam.value_at(&eps).map_coeffs(|c| Cyclotomic::from_rational(c.clone()));
        assert!(dec.value().sub(&expect).is_zero());
        assert!(fam.remainder_norm(&eps) <= 10.0 * 0.01);
    }

    #[test]
    fn pure_power_family_is_constant() {
        let fam = monomial_border_family(&[0, 4]).unwrap();
        assert_eq!(fam.term_count(), 1);
        assert!(fam.remainder(&q(1)).is_zero());
    }

    #[test]
    fn eps_independence() {
        for eps in [q(1), qr(1, 2), q(3)] {
            let dec = monomial_waring(&[2, 1, 1], &eps).unwrap();
            assert_eq!(verify(&dec, VerifyMode::Exact, 1e-9).exact_match, Some(true));
        }
    }

    #[test]
    fn jarek_family_exact_value() {
        let (dec, remainder) = jarek_family(&q(1)).unwrap();
        assert_eq!(dec.len(), 5);
        // value = target + remainder exactly
        assert_eq!(dec.value(), dec.target.add(&remainder));
        // at eps = 1 the remainder is the quadratic-in-eps tail
        assert!(!remainder.is_zero());
    }

    #[test]
    fn jarek_family_residual_small() {
        let (dec, remainder) = jarek_family(&qr(1, 10000)).unwrap();
        let norm = remainder
            .terms()
            .map(|(_, c)| rational_to_f64(&c.abs()))
            .fold(0.0, f64::max);
        assert!(norm <= 1e-3, "norm {}", norm);
        assert_eq!(dec.len(), 5);
        let r = verify(&dec, VerifyMode::Numeric, 1e-2);
        assert!(r.residual <= 1e-2);
    }

    #[test]
    fn jarek_rejects_zero_eps() {
        assert!(matches!(jarek_family(&q(0)), Err(DecompError::ZeroEpsilon)));
        assert!(matches!(
            monomial_waring(&[1, 1], &q(0)),
            Err(DecompError::ZeroEpsilon)
        ));
    }

    #[test]
    fn border_consistency_for_monomials() {
        // catalecticant rank <= family size <= waring rank
        for alpha in [[1u32, 2, 2], [2, 2, 1], [3, 1, 0]] {
            let f = QPoly::monomial(3, Monomial::new(alpha.to_vec()), q(1));
            let rh = crate::catalecticant::catalecticant_rank(&f).unwrap() as u64;
            let fam = monomial_border_family(&alpha).unwrap();
            assert!(rh <= fam.term_count());
            assert!(fam.term_count() <= monomial_rank(&alpha));
        }
    }
}
