//! Catalecticant matrices of a homogeneous polynomial and the ranks built
//! from them.
//!
//! The order-`k` catalecticant of a degree-`d` form `f` is the map
//! `p -> p . f^*` from degree-`k` forms to dual degree-`(d-k)` forms.  Its
//! matrix is written in the monomial basis on the source and the scaled dual
//! basis `{binom(d-k,beta)^{-1} d^beta}` on the target, which makes the
//! entry rule `M[beta, alpha] = binom(d-k, beta) * f_{alpha+beta}` with
//! `f_.` the Bombieri coefficients.  Any row or column rescaling would leave
//! every rank below unchanged, so the rank results do not depend on that
//! basis convention.

use num_rational::BigRational;

use crate::linalg::QMat;
use crate::poly::{monomials_of_degree, multinomial_rat, Monomial, QPoly};

#[derive(Clone)]
pub struct CatalecticantMatrix {
    pub k: u32,
    pub degree: u32,
    /// Degree-`(d-k)` monomials labelling the rows.
    pub row_labels: Vec<Monomial>,
    /// Degree-`k` monomials labelling the columns.
    pub col_labels: Vec<Monomial>,
    pub matrix: QMat,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CatalecticantError {
    #[error("order {k} out of range for degree {d}")]
    OrderOutOfRange { k: u32, d: u32 },
    #[error("polynomial must be nonzero")]
    ZeroPolynomial,
    #[error("polynomial must be homogeneous")]
    NotHomogeneous,
}

/// Build the order-`k` catalecticant matrix of `f`.
pub fn build(f: &QPoly, k: u32) -> Result<CatalecticantMatrix, CatalecticantError> {
    if f.is_zero() {
        return Err(CatalecticantError::ZeroPolynomial);
    }
    let d = f.homogeneous_degree().ok_or(CatalecticantError::NotHomogeneous)?;
    if k > d {
        return Err(CatalecticantError::OrderOutOfRange { k, d });
    }
    let rows = monomials_of_degree(f.nvars(), d - k);
    let cols = monomials_of_degree(f.nvars(), k);
    let mut m = QMat::zeros(rows.len(), cols.len());
    for (i, beta) in rows.iter().enumerate() {
        let row_scale = multinomial_rat(beta);
        for (j, alpha) in cols.iter().enumerate() {
            let c = f.bombieri_coeff(&alpha.mul(beta));
            if !num_traits::Zero::is_zero(&c) {
                *m.at_mut(i, j) = &row_scale * c;
            }
        }
    }
    Ok(CatalecticantMatrix { k, degree: d, row_labels: rows, col_labels: cols, matrix: m })
}

impl CatalecticantMatrix {
    pub fn rank(&self) -> usize {
        self.matrix.rank()
    }

    /// Kernel vectors as degree-`k` polynomials: a basis of `(f^perp)^k`.
    pub fn kernel_polynomials(&self) -> Vec<QPoly> {
        let n = self.col_labels.first().map(|m| m.nvars()).unwrap_or(0);
        self.matrix
            .kernel_basis()
            .into_iter()
            .map(|v| {
                QPoly::from_terms(
                    n,
                    self.col_labels
                        .iter()
                        .cloned()
                        .zip(v)
                        .filter(|(_, c)| !num_traits::Zero::is_zero(c)),
                )
            })
            .collect()
    }

    /// The pairing `(p, q) -> (p . f^*)(q)` mediated by the matrix, for
    /// `deg p = k`, `deg q = d - k`.  Used by tests against the apolar
    /// product.
    pub fn pairing(&self, p: &QPoly, q: &QPoly) -> BigRational {
        let mut total = BigRational::from_integer(0.into());
        for (i, beta) in self.row_labels.iter().enumerate() {
            let qc = q.coeff(beta);
            if num_traits::Zero::is_zero(&qc) {
                continue;
            }
            let scale = multinomial_rat(beta);
            for (j, alpha) in self.col_labels.iter().enumerate() {
                let pc = p.coeff(alpha);
                if num_traits::Zero::is_zero(&pc) {
                    continue;
                }
                total += self.matrix.at(i, j) * pc * &qc / &scale;
            }
        }
        total
    }
}

/// Exact rank of the order-`k` catalecticant.
pub fn rank(f: &QPoly, k: u32) -> Result<usize, CatalecticantError> {
    Ok(build(f, k)?.rank())
}

/// The catalecticant rank: the maximum over all orders `0..=d`.
pub fn catalecticant_rank(f: &QPoly) -> Result<usize, CatalecticantError> {
    if f.is_zero() {
        return Err(CatalecticantError::ZeroPolynomial);
    }
    let d = f.homogeneous_degree().ok_or(CatalecticantError::NotHomogeneous)?;
    let mut best = 0;
    for k in 0..=d {
        best = best.max(rank(f, k)?);
    }
    Ok(best)
}

/// Membership in the determinantal locus: `rank H^{i,d-i} <= r`.
pub fn gamma_member(f: &QPoly, i: u32, r: usize) -> Result<bool, CatalecticantError> {
    Ok(rank(f, i)? <= r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::apolar_product;
    use crate::poly::parse::parse;
    use num_bigint::BigInt;
    use num_traits::One;

    #[test]
    fn pure_square_is_one_by_one() {
        let f = parse("x0^2", 0).unwrap();
        let c = build(&f, 1).unwrap();
        assert_eq!((c.matrix.rows(), c.matrix.cols()), (1, 1));
        assert!(c.matrix.at(0, 0).is_one());
        assert_eq!(c.rank(), 1);
    }

    #[test]
    fn x0x1_order_one_is_antidiagonal_rank_two() {
        let f = parse("x0*x1", 1).unwrap();
        let c = build(&f, 1).unwrap();
        assert_eq!(c.rank(), 2);
        let half = BigRational::new(BigInt::one(), 2.into());
        assert_eq!(*c.matrix.at(0, 1), half);
        assert_eq!(*c.matrix.at(1, 0), half);
        assert!(num_traits::Zero::is_zero(c.matrix.at(0, 0)));
    }

    #[test]
    fn monomial_ranks_from_hilbert_series() {
        // f = x0 x1^2 x2^2: ranks 1,3,5,5,3,1 across orders 0..=5
        let f = parse("x0*x1^2*x2^2", 2).unwrap();
        let expected = [1usize, 3, 5, 5, 3, 1];
        for (k, want) in expected.iter().enumerate() {
            assert_eq!(rank(&f, k as u32).unwrap(), *want, "order {}", k);
        }
        assert_eq!(catalecticant_rank(&f).unwrap(), 5);
    }

    #[test]
    fn transpose_symmetry_of_ranks() {
        let f = parse("x0^2*x1 + x1^3 - 2*x0*x1*x2 + x2^3", 2).unwrap();
        let d = 3;
        for k in 0..=d {
            assert_eq!(rank(&f, k).unwrap(), rank(&f, d - k).unwrap());
        }
    }

    #[test]
    fn matrix_mediates_apolar_pairing() {
        let f = parse("x0^2*x1 + 3*x1^2*x2 - x0*x1*x2", 2).unwrap();
        let c = build(&f, 1).unwrap();
        let p = parse("x0 - 2*x2", 2).unwrap();
        let q = parse("x0*x1 + x2^2", 2).unwrap();
        assert_eq!(c.pairing(&p, &q), apolar_product(&f, &p.mul(&q)).unwrap());
    }

    #[test]
    fn gamma_membership_thresholds() {
        let f = parse("x0*x1^2*x2^2", 2).unwrap();
        assert!(gamma_member(&f, 2, 5).unwrap());
        assert!(!gamma_member(&f, 2, 4).unwrap());
        assert!(gamma_member(&f, 0, 1).unwrap());
    }

    #[test]
    fn order_out_of_range_errors() {
        let f = parse("x0^2", 1).unwrap();
        assert!(matches!(
            build(&f, 3),
            Err(CatalecticantError::OrderOutOfRange { .. })
        ));
    }

    #[test]
    fn zero_matrix_rank_zero() {
        assert_eq!(QMat::zeros(4, 4).rank(), 0);
    }
}
