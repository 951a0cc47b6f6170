//! Exact dense linear algebra over the rationals.
//!
//! Ranks and kernels are certificates here, so everything is exact: ranks by
//! fraction-free Bareiss elimination on the integer matrix obtained after
//! clearing row denominators, kernels by rational back-substitution on the
//! integer echelon form.  Pivots are chosen by minimal bit length to keep
//! intermediate integers small.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

#[derive(Clone, PartialEq)]
pub struct QMat {
    rows: usize,
    cols: usize,
    a: Vec<BigRational>,
}

impl QMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMat { rows, cols, a: vec![BigRational::zero(); rows * cols] }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> BigRational) -> Self {
        let mut m = QMat::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                *m.at_mut(i, j) = f(i, j);
            }
        }
        m
    }

    pub fn identity(n: usize) -> Self {
        QMat::from_fn(n, n, |i, j| {
            if i == j { BigRational::one() } else { BigRational::zero() }
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> &BigRational {
        &self.a[i * self.cols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut BigRational {
        &mut self.a[i * self.cols + j]
    }

    pub fn transpose(&self) -> QMat {
        QMat::from_fn(self.cols, self.rows, |i, j| self.at(j, i).clone())
    }

    pub fn mul(&self, other: &QMat) -> QMat {
        assert_eq!(self.cols, other.rows);
        QMat::from_fn(self.rows, other.cols, |i, j| {
            let mut s = BigRational::zero();
            for k in 0..self.cols {
                s += self.at(i, k) * other.at(k, j);
            }
            s
        })
    }

    pub fn sub(&self, other: &QMat) -> QMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        QMat::from_fn(self.rows, self.cols, |i, j| self.at(i, j) - other.at(i, j))
    }

    pub fn is_zero(&self) -> bool {
        self.a.iter().all(|x| x.is_zero())
    }

    pub fn rank(&self) -> usize {
        integer_echelon(self.to_integer_rows()).1.len()
    }

    /// Clear denominators row by row; row scaling preserves rank and kernel.
    fn to_integer_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows)
            .map(|i| {
                let mut lcm = BigInt::one();
                for j in 0..self.cols {
                    lcm = num_integer::lcm(lcm, self.at(i, j).denom().clone());
                }
                (0..self.cols)
                    .map(|j| {
                        let q = self.at(i, j);
                        q.numer() * (&lcm / q.denom())
                    })
                    .collect()
            })
            .collect()
    }

    /// Basis of the right kernel `{x : M x = 0}`.
    pub fn kernel_basis(&self) -> Vec<Vec<BigRational>> {
        let (ech, pivots) = integer_echelon(self.to_integer_rows());
        let rank = pivots.len();
        let pivot_set: Vec<bool> = {
            let mut v = vec![false; self.cols];
            for &p in &pivots {
                v[p] = true;
            }
            v
        };
        let mut basis = Vec::new();
        for fc in 0..self.cols {
            if pivot_set[fc] {
                continue;
            }
            let mut x = vec![BigRational::zero(); self.cols];
            x[fc] = BigRational::one();
            for i in (0..rank).rev() {
                let p = pivots[i];
                let mut s = BigRational::zero();
                for j in p + 1..self.cols {
                    if !ech[i][j].is_zero() && !x[j].is_zero() {
                        s += BigRational::from(ech[i][j].clone()) * &x[j];
                    }
                }
                x[p] = -s / BigRational::from(ech[i][p].clone());
            }
            basis.push(x);
        }
        basis
    }

    /// Solve `A X = B` for square invertible `A`.
    pub fn solve(&self, b: &QMat) -> Option<QMat> {
        assert_eq!(self.rows, self.cols);
        assert_eq!(self.rows, b.rows);
        let n = self.rows;
        let mut aug = QMat::zeros(n, n + b.cols);
        for i in 0..n {
            for j in 0..n {
                *aug.at_mut(i, j) = self.at(i, j).clone();
            }
            for j in 0..b.cols {
                *aug.at_mut(i, n + j) = b.at(i, j).clone();
            }
        }
        for col in 0..n {
            let pivot = (col..n)
                .filter(|&i| !aug.at(i, col).is_zero())
                .min_by_key(|&i| rational_bits(aug.at(i, col)))?;
            if pivot != col {
                for j in 0..n + b.cols {
                    let tmp = aug.at(pivot, j).clone();
                    *aug.at_mut(pivot, j) = aug.at(col, j).clone();
                    *aug.at_mut(col, j) = tmp;
                }
            }
            let inv = aug.at(col, col).clone();
            for j in col..n + b.cols {
                *aug.at_mut(col, j) = aug.at(col, j) / &inv;
            }
            for i in 0..n {
                if i == col || aug.at(i, col).is_zero() {
                    continue;
                }
                let f = aug.at(i, col).clone();
                for j in col..n + b.cols {
                    let t = aug.at(col, j) * &f;
                    *aug.at_mut(i, j) = aug.at(i, j) - t;
                }
            }
        }
        Some(QMat::from_fn(n, b.cols, |i, j| aug.at(i, n + j).clone()))
    }

    pub fn determinant_nonzero(&self) -> bool {
        self.rows == self.cols && self.rank() == self.rows
    }
}

impl std::fmt::Debug for QMat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for i in 0..self.rows {
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.at(i, j))?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

fn rational_bits(q: &BigRational) -> u64 {
    q.numer().bits() + q.denom().bits()
}

/// Fraction-free Bareiss echelon form.  Returns the reduced rows and the
/// pivot column indices; entries stay integral throughout, the two-step
/// division by the previous pivot is exact.
fn integer_echelon(mut m: Vec<Vec<BigInt>>) -> (Vec<Vec<BigInt>>, Vec<usize>) {
    let rows = m.len();
    let cols = m.first().map(|r| r.len()).unwrap_or(0);
    let mut pivots = Vec::new();
    let mut prev = BigInt::one();
    let mut row = 0;
    for col in 0..cols {
        if row == rows {
            break;
        }
        let pivot_row = (row..rows)
            .filter(|&i| !m[i][col].is_zero())
            .min_by_key(|&i| m[i][col].bits());
        let Some(p) = pivot_row else { continue };
        m.swap(row, p);
        for i in row + 1..rows {
            for j in col + 1..cols {
                let t = (&m[row][col] * &m[i][j] - &m[i][col] * &m[row][j]) / &prev;
                m[i][j] = t;
            }
            m[i][col] = BigInt::zero();
        }
        prev = m[row][col].clone();
        pivots.push(col);
        row += 1;
    }
    m.truncate(row);
    (m, pivots)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from(BigInt::from(n))
    }

    fn mat(rows: &[&[i64]]) -> QMat {
        QMat::from_fn(rows.len(), rows[0].len(), |i, j| q(rows[i][j]))
    }

    #[test]
    fn rank_of_simple_matrices() {
        assert_eq!(QMat::zeros(3, 4).rank(), 0);
        assert_eq!(QMat::identity(5).rank(), 5);
        assert_eq!(mat(&[&[1, 2], &[2, 4]]).rank(), 1);
        assert_eq!(mat(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 9]]).rank(), 2);
    }

    #[test]
    fn kernel_annihilates() {
        let m = mat(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 9]]);
        let ker = m.kernel_basis();
        assert_eq!(ker.len(), 1);
        for v in &ker {
            for i in 0..m.rows() {
                let mut s = BigRational::zero();
                for j in 0..m.cols() {
                    s += m.at(i, j) * &v[j];
                }
                assert!(s.is_zero());
            }
        }
    }

    #[test]
    fn kernel_plus_rank_is_dimension() {
        let m = mat(&[&[2, 0, 1, 1], &[0, 3, 1, -1]]);
        assert_eq!(m.rank() + m.kernel_basis().len(), m.cols());
    }

    #[test]
    fn solve_linear_system() {
        let a = mat(&[&[2, 1], &[1, 3]]);
        let b = mat(&[&[3], &[4]]);
        let x = a.solve(&b).unwrap();
        assert!(a.mul(&x).sub(&b).is_zero());
        let singular = mat(&[&[1, 2], &[2, 4]]);
        assert!(singular.solve(&b).is_none());
    }

    #[test]
    fn rank_with_rational_entries() {
        let m = QMat::from_fn(2, 2, |i, j| BigRational::new(1.into(), ((i + j + 1) as i64).into()));
        // [[1, 1/2], [1/2, 1/3]] has determinant 1/12 != 0
        assert_eq!(m.rank(), 2);
    }
}
