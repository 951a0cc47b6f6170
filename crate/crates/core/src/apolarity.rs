//! Graded pieces of the apolar ideal, Hilbert functions, apolarity checks
//! and degree-one colon spaces.
//!
//! The apolar ideal is never materialized as an ideal object; the paper-level
//! arguments only ever need its graded components up to degree `d`, and each
//! component is the kernel of one catalecticant, so everything here is a
//! stack of exact linear systems.

use num_rational::BigRational;
use num_traits::Zero;

use crate::catalecticant::{self, CatalecticantError};
use crate::linalg::QMat;
use crate::poly::{
    apolar_product, monomials_of_degree, space_dimension, Monomial, PointDiffTerm, QPoly,
};

/// A basis of one graded piece `(f^perp)^k` together with the ambient
/// dimension of `S^k`.
#[derive(Clone, Debug)]
pub struct GradedComponent {
    pub degree: u32,
    pub basis: Vec<QPoly>,
    pub ambient_dimension: usize,
}

impl GradedComponent {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

/// Hilbert function of `S/(f^perp)` in degrees `0..=d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HilbertVector {
    pub values: Vec<usize>,
}

impl HilbertVector {
    pub fn max(&self) -> usize {
        self.values.iter().copied().max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ApolarityError {
    #[error(transparent)]
    Catalecticant(#[from] CatalecticantError),
    #[error("generator degree {got} exceeds the degree {max} of f")]
    GeneratorDegreeTooLarge { got: u32, max: u32 },
    #[error("generators must be homogeneous")]
    InhomogeneousGenerator,
    #[error("repeated evaluation points")]
    RepeatedPoints,
    #[error("zero differential polynomial")]
    ZeroDifferential,
}

/// Basis of `(f^perp)^k`, the kernel of the order-`k` catalecticant.
pub fn apolar_component(f: &QPoly, k: u32) -> Result<GradedComponent, ApolarityError> {
    let c = catalecticant::build(f, k)?;
    Ok(GradedComponent {
        degree: k,
        basis: c.kernel_polynomials(),
        ambient_dimension: space_dimension(f.nvars(), k),
    })
}

/// `H(k) = rank H^{k,d-k}` for `k = 0..=d`.
pub fn hilbert_function(f: &QPoly) -> Result<HilbertVector, ApolarityError> {
    if f.is_zero() {
        return Err(CatalecticantError::ZeroPolynomial.into());
    }
    let d = f
        .homogeneous_degree()
        .ok_or(CatalecticantError::NotHomogeneous)?;
    let values = (0..=d)
        .map(|k| catalecticant::rank(f, k))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(HilbertVector { values })
}

/// Does the ideal generated by `generators` annihilate `f` in degree `d`
/// (equivalently, is it contained in the apolar ideal)?
pub fn is_apolar(generators: &[QPoly], f: &QPoly) -> Result<bool, ApolarityError> {
    let d = f
        .homogeneous_degree()
        .ok_or(CatalecticantError::NotHomogeneous)?;
    for g in generators {
        if g.is_zero() {
            continue;
        }
        let e = g
            .homogeneous_degree()
            .ok_or(ApolarityError::InhomogeneousGenerator)?;
        if e > d {
            return Err(ApolarityError::GeneratorDegreeTooLarge { got: e, max: d });
        }
        for h in monomials_of_degree(f.nvars(), d - e) {
            let gh = g.mul(&QPoly::monomial(f.nvars(), h, num_traits::One::one()));
            if !apolar_product(&gh, f).unwrap().is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Degree-`(k-1)` part of the colon of the ideal generated by `(f^perp)^k`
/// with the maximal ideal, iterated to saturation:
/// `{g of degree k-1 : g * m^N  subset  S^(N-1) * (f^perp)^k}` for the first
/// `N` at which the space stabilizes.
///
/// With `N = 1` this is the plain quotient `{g : x_i g in (f^perp)^k}`; the
/// iteration is needed because the quadric-bundle obstruction examples only
/// reveal the colon after multiplying through higher degrees.  Each step is
/// one exact linear system: the unknown coefficients of `g`, constrained by
/// every functional vanishing on the span of `S^(N-1) * (f^perp)^k`.
pub fn colon_with_maximal(f: &QPoly, k: u32) -> Result<GradedComponent, ApolarityError> {
    if f.is_zero() {
        return Err(CatalecticantError::ZeroPolynomial.into());
    }
    let d = f
        .homogeneous_degree()
        .ok_or(CatalecticantError::NotHomogeneous)?;
    if k == 0 || k > d {
        return Err(CatalecticantError::OrderOutOfRange { k, d }.into());
    }
    let n = f.nvars();
    let kernel = apolar_component(f, k)?.basis;
    let unknowns = monomials_of_degree(n, k - 1);

    // The colon spaces grow monotonically with the exponent and equal the
    // saturation's graded piece from the saturation regularity on; d+2 steps
    // are ample at the degrees this library handles.  The plateau at small
    // exponents can be strict (the Jarek cubic yields 0, 0, 3, 3, ...), so
    // no early exit short of the full space.
    let mut colon: Vec<Vec<BigRational>> = Vec::new();
    for step in 1..=(d + 2) {
        let next = colon_step(n, k, &kernel, &unknowns, step);
        let repeated_nonzero = !next.is_empty() && next.len() == colon.len();
        colon = next;
        if colon.len() == unknowns.len() || repeated_nonzero {
            break;
        }
    }
    let basis = colon
        .into_iter()
        .map(|v| {
            QPoly::from_terms(
                n,
                unknowns.iter().cloned().zip(v).filter(|(_, c)| !c.is_zero()),
            )
        })
        .collect();
    Ok(GradedComponent {
        degree: k - 1,
        basis,
        ambient_dimension: space_dimension(n, k - 1),
    })
}

/// Solve `{g : g * m^step  subset  span(S^(step-1) * kernel)}`.
fn colon_step(
    n: usize,
    k: u32,
    kernel: &[QPoly],
    unknowns: &[Monomial],
    step: u32,
) -> Vec<Vec<BigRational>> {
    let target_deg = k - 1 + step;
    let target: Vec<Monomial> = monomials_of_degree(n, target_deg);
    let index: std::collections::BTreeMap<&Monomial, usize> =
        target.iter().enumerate().map(|(j, m)| (m, j)).collect();

    // span of S^(step-1) * kernel as rows
    let shifts = monomials_of_degree(n, step - 1);
    let mut span = QMat::zeros(shifts.len() * kernel.len(), target.len());
    let mut r = 0;
    for s in &shifts {
        for q in kernel {
            for (m, c) in q.terms() {
                *span.at_mut(r, index[&m.mul(s)]) = c.clone();
            }
            r += 1;
        }
    }
    // functionals vanishing on the span
    let annihilators = span.kernel_basis();

    // one stacked system: lambda(g * h) = 0 for every annihilator lambda and
    // every degree-`step` monomial h
    let cofactors = monomials_of_degree(n, step);
    let mut sys = QMat::zeros(annihilators.len() * cofactors.len(), unknowns.len());
    let mut row = 0;
    for lam in &annihilators {
        for h in &cofactors {
            for (uj, u) in unknowns.iter().enumerate() {
                *sys.at_mut(row, uj) = lam[index[&u.mul(h)]].clone();
            }
            row += 1;
        }
    }
    sys.kernel_basis()
}

/// Dimension of the inverse system spanned by a sum of point-differential
/// terms: the sum over terms of the rank of the closed derivative family of
/// each `phi_i`, points being pairwise distinct.
pub fn inverse_system_dimension(
    terms: &[PointDiffTerm<BigRational>],
) -> Result<usize, ApolarityError> {
    for (i, a) in terms.iter().enumerate() {
        if a.phi.is_zero() {
            return Err(ApolarityError::ZeroDifferential);
        }
        for b in &terms[i + 1..] {
            if a.point == b.point {
                return Err(ApolarityError::RepeatedPoints);
            }
        }
    }
    let mut total = 0;
    for t in terms {
        total += derivative_closure_dimension(&t.phi);
    }
    Ok(total)
}

/// Rank of the coefficient matrix of all iterated derivatives of `phi`
/// (including `phi` itself).
pub fn derivative_closure_dimension(phi: &QPoly) -> usize {
    let closure = derivative_closure(phi);
    let support: Vec<Monomial> = {
        let mut s = std::collections::BTreeSet::new();
        for p in &closure {
            for (m, _) in p.terms() {
                s.insert(m.clone());
            }
        }
        s.into_iter().collect()
    };
    let idx: std::collections::BTreeMap<&Monomial, usize> =
        support.iter().enumerate().map(|(j, m)| (m, j)).collect();
    let mut mat = QMat::zeros(closure.len(), support.len());
    for (i, p) in closure.iter().enumerate() {
        for (m, c) in p.terms() {
            *mat.at_mut(i, idx[m]) = c.clone();
        }
    }
    mat.rank()
}

pub(crate) fn derivative_closure(phi: &QPoly) -> Vec<QPoly> {
    let n = phi.nvars();
    let mut out = Vec::new();
    let mut frontier = vec![phi.clone()];
    while let Some(p) = frontier.pop() {
        if p.is_zero() {
            continue;
        }
        for i in 0..n {
            frontier.push(p.derivative(i));
        }
        out.push(p);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse::parse;
    use num_bigint::BigInt;

    fn q(n: i64) -> BigRational {
        BigRational::from(BigInt::from(n))
    }

    fn jarek() -> QPoly {
        parse("x0^2*x2 + 6*x1^2*x3 - 3*(x0+x1)^2*x4", 4).unwrap()
    }

    #[test]
    fn hilbert_of_quintic_monomial() {
        let f = parse("x0*x1^2*x2^2", 2).unwrap();
        assert_eq!(hilbert_function(&f).unwrap().values, vec![1, 3, 5, 5, 3, 1]);
    }

    #[test]
    fn hilbert_of_pure_power_is_all_ones() {
        let f = parse("x0^4", 2).unwrap();
        assert_eq!(hilbert_function(&f).unwrap().values, vec![1; 5]);
    }

    #[test]
    fn hilbert_of_jarek_cubic() {
        assert_eq!(hilbert_function(&jarek()).unwrap().values, vec![1, 5, 5, 1]);
    }

    #[test]
    fn apolar_component_of_monomial_matches_monomial_ideal() {
        // (f^perp) = (x0^{a0+1}, ..., xn^{an+1}) for a monomial
        let f = parse("x0^2*x1", 1).unwrap();
        // degree-2 piece of (x0^3, x1^2): span{x1^2}
        let c = apolar_component(&f, 2).unwrap();
        assert_eq!(c.dim(), 1);
        let g = &c.basis[0];
        assert!(!g.coeff(&Monomial::new(vec![0, 2])).is_zero());
        assert!(g.coeff(&Monomial::new(vec![2, 0])).is_zero());
        assert!(g.coeff(&Monomial::new(vec![1, 1])).is_zero());
    }

    #[test]
    fn apolar_component_of_pure_power_degree_one() {
        let f = parse("x0^3", 2).unwrap();
        let c = apolar_component(&f, 1).unwrap();
        assert_eq!(c.dim(), 2); // span{x1, x2}
        for g in &c.basis {
            assert!(g.coeff(&Monomial::new(vec![1, 0, 0])).is_zero());
        }
    }

    #[test]
    fn kernel_elements_annihilate_under_cofactors() {
        let f = parse("x0^3 + x0*x1*x2 - x2^3", 2).unwrap();
        for k in 0..=3u32 {
            let c = apolar_component(&f, k).unwrap();
            for g in &c.basis {
                for h in monomials_of_degree(3, 3 - k) {
                    let gh = g.mul(&QPoly::monomial(3, h, q(1)));
                    assert!(apolar_product(&gh, &f).unwrap().is_zero());
                }
            }
            // kernel-rank complement
            let h = hilbert_function(&f).unwrap();
            assert_eq!(c.dim() + h.values[k as usize], c.ambient_dimension);
        }
    }

    #[test]
    fn is_apolar_of_monomial_complement_ideal() {
        // (x1^{a1+1}, .., xn^{an+1}) is apolar to x0^{a0} x1^{a1} .. xn^{an}
        let f = parse("x0*x1^2*x2^2", 2).unwrap();
        let gens = vec![parse("x1^3", 2).unwrap(), parse("x2^3", 2).unwrap()];
        assert!(is_apolar(&gens, &f).unwrap());
        // but (x0) is not apolar to x0^d
        let f2 = parse("x0^3", 1).unwrap();
        assert!(!is_apolar(&[parse("x0", 1).unwrap()], &f2).unwrap());
    }

    #[test]
    fn is_apolar_monotone_under_zero_and_members() {
        let f = parse("x0*x1^2*x2^2", 2).unwrap();
        let mut gens = vec![parse("x1^3", 2).unwrap()];
        assert!(is_apolar(&gens, &f).unwrap());
        gens.push(QPoly::zero(3));
        assert!(is_apolar(&gens, &f).unwrap());
        gens.push(parse("x0^2", 2).unwrap()); // also in the apolar ideal
        assert!(is_apolar(&gens, &f).unwrap());
    }

    #[test]
    fn jarek_colon_is_the_three_last_variables() {
        let c = colon_with_maximal(&jarek(), 2).unwrap();
        assert_eq!(c.dim(), 3);
        let span: Vec<Monomial> = (2..5).map(|i| Monomial::var(5, i, 1)).collect();
        for g in &c.basis {
            for (m, _) in g.terms() {
                assert!(span.contains(m), "unexpected monomial {} in colon basis", m);
            }
        }
        // direct recheck of the saturation membership: g * h lies in the
        // span of S^2 * (f_perp)^2 for every degree-3 cofactor h
        let f = jarek();
        let kernel = apolar_component(&f, 2).unwrap().basis;
        let mut generators = Vec::new();
        for s in monomials_of_degree(5, 2) {
            for p in &kernel {
                generators.push(p.mul(&QPoly::monomial(5, s.clone(), q(1))));
            }
        }
        let target = monomials_of_degree(5, 4);
        let idx: std::collections::BTreeMap<&Monomial, usize> =
            target.iter().enumerate().map(|(j, m)| (m, j)).collect();
        let as_row = |p: &QPoly| {
            let mut v = vec![q(0); target.len()];
            for (m, c) in p.terms() {
                v[idx[m]] = c.clone();
            }
            v
        };
        let base_rows: Vec<Vec<BigRational>> = generators.iter().map(&as_row).collect();
        let base_rank = {
            let mut m = QMat::zeros(base_rows.len(), target.len());
            for (i, r) in base_rows.iter().enumerate() {
                for (j, v) in r.iter().enumerate() {
                    *m.at_mut(i, j) = v.clone();
                }
            }
            m.rank()
        };
        for g in &c.basis {
            for h in monomials_of_degree(5, 3) {
                let gh = g.mul(&QPoly::monomial(5, h, q(1)));
                let mut m = QMat::zeros(base_rows.len() + 1, target.len());
                for (i, r) in base_rows.iter().enumerate() {
                    for (j, v) in r.iter().enumerate() {
                        *m.at_mut(i, j) = v.clone();
                    }
                }
                for (j, v) in as_row(&gh).into_iter().enumerate() {
                    *m.at_mut(base_rows.len(), j) = v;
                }
                assert_eq!(m.rank(), base_rank, "colon element escaped the span");
            }
        }
    }

    #[test]
    fn colon_of_pure_power() {
        let f = parse("x0^4", 2).unwrap();
        let c = colon_with_maximal(&f, 2).unwrap();
        // {g deg 1 : x_i g in (x1,x2)^ ... } = span{x1, x2}
        assert_eq!(c.dim(), 2);
    }

    #[test]
    fn colon_of_generic_binary_cubic_is_zero() {
        let f = parse("x0^3 + 2*x0^2*x1 - x0*x1^2 + 5*x1^3", 1).unwrap();
        let c = colon_with_maximal(&f, 2).unwrap();
        assert_eq!(c.dim(), 0);
    }

    #[test]
    fn inverse_system_dimension_of_monomial_derivative() {
        // phi = d1^a1 d2^a2 has closure dimension (a1+1)(a2+1)
        let phi = QPoly::monomial(2, Monomial::new(vec![1, 2]), q(1));
        let t = PointDiffTerm { point: vec![q(0), q(0)], phi };
        assert_eq!(inverse_system_dimension(&[t]).unwrap(), 6);
    }

    #[test]
    fn inverse_system_dimension_counts_points() {
        // 1_{(0,1)} o (a d1 + b) plus two simple points: 2 + 1 + 1 = 4
        let affine = |coords: [i64; 2], phi: QPoly| PointDiffTerm {
            point: coords.iter().map(|&c| q(c)).collect(),
            phi,
        };
        // a*d1 + b with a != 0
        let lin = QPoly::from_terms(
            2,
            [
                (Monomial::new(vec![1, 0]), q(3)),
                (Monomial::new(vec![0, 0]), q(1)),
            ],
        );
        let terms = vec![
            affine([0, 1], lin),
            affine([2, 1], QPoly::constant(2, q(1))),
            affine([3, -1], QPoly::constant(2, q(5))),
        ];
        assert_eq!(inverse_system_dimension(&terms).unwrap(), 4);
    }

    #[test]
    fn inverse_system_rejects_repeats() {
        let t = PointDiffTerm { point: vec![q(1)], phi: QPoly::constant(1, q(1)) };
        assert!(matches!(
            inverse_system_dimension(&[t.clone(), t]),
            Err(ApolarityError::RepeatedPoints)
        ));
    }

    #[test]
    fn hilbert_symmetry() {
        let f = parse("x0^2*x1^2 + x1^4 - x0*x2^3", 2).unwrap();
        let h = hilbert_function(&f).unwrap();
        let d = h.values.len() - 1;
        for k in 0..=d {
            assert_eq!(h.values[k], h.values[d - k]);
        }
    }
}
