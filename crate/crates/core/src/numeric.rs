//! Floating-point helpers for decomposition recovery: complex Gaussian
//! elimination, least squares, exact characteristic polynomials and their
//! square-free split, and simultaneous root iteration.
//!
//! The split of labor matters: multiplication matrices are exact rationals,
//! so characteristic polynomials and root multiplicities are computed
//! exactly (Faddeev-LeVerrier, then Yun).  Floating point only enters to
//! locate the roots of an exact square-free polynomial, where simultaneous
//! iteration converges quadratically and multiple-root ill-conditioning
//! cannot occur.

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::linalg::QMat;
use crate::poly::scalar::rational_to_f64;

/// Right null space of a complex matrix given by rows; `tol` is relative to
/// the largest entry.
pub fn complex_kernel(rows: &[Vec<Complex64>], tol: f64) -> Vec<Vec<Complex64>> {
    if rows.is_empty() {
        return Vec::new();
    }
    let cols = rows[0].len();
    let mut m: Vec<Vec<Complex64>> = rows.to_vec();
    let scale = m
        .iter()
        .flatten()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
        .max(1.0);
    let thresh = tol * scale;
    let mut pivots: Vec<usize> = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        let best = (row..m.len())
            .max_by(|&a, &b| m[a][col].norm().total_cmp(&m[b][col].norm()))
            .filter(|&i| m[i][col].norm() > thresh);
        let Some(p) = best else { continue };
        m.swap(row, p);
        let inv = Complex64::new(1.0, 0.0) / m[row][col];
        for j in col..cols {
            m[row][j] *= inv;
        }
        for i in 0..m.len() {
            if i != row {
                let f = m[i][col];
                if f.norm() > 0.0 {
                    for j in col..cols {
                        let t = m[row][j] * f;
                        m[i][j] -= t;
                    }
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == m.len() {
            break;
        }
    }
    let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
    let mut basis = Vec::new();
    for fc in 0..cols {
        if pivot_set.contains(&fc) {
            continue;
        }
        let mut v = vec![Complex64::new(0.0, 0.0); cols];
        v[fc] = Complex64::new(1.0, 0.0);
        for (r, &p) in pivots.iter().enumerate() {
            v[p] = -m[r][fc];
        }
        basis.push(v);
    }
    basis
}

/// Least-squares solution of an overdetermined complex system via the
/// normal equations; fine at the condition numbers seen here.
pub fn complex_lstsq(rows: &[Vec<Complex64>], rhs: &[Complex64]) -> Option<Vec<Complex64>> {
    let n = rows.first()?.len();
    let mut ata = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    let mut atb = vec![Complex64::new(0.0, 0.0); n];
    for (r, row) in rows.iter().enumerate() {
        for i in 0..n {
            let c = row[i].conj();
            for j in 0..n {
                ata[i][j] += c * row[j];
            }
            atb[i] += c * rhs[r];
        }
    }
    complex_solve(&mut ata, &mut atb)
}

fn complex_solve(a: &mut [Vec<Complex64>], b: &mut [Complex64]) -> Option<Vec<Complex64>> {
    let n = b.len();
    for col in 0..n {
        let p = (col..n).max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm()))?;
        if a[p][col].norm() < 1e-12 {
            return None;
        }
        a.swap(col, p);
        b.swap(col, p);
        let inv = Complex64::new(1.0, 0.0) / a[col][col];
        for j in col..n {
            a[col][j] *= inv;
        }
        b[col] *= inv;
        for i in 0..n {
            if i != col {
                let f = a[i][col];
                for j in col..n {
                    let t = a[col][j] * f;
                    a[i][j] -= t;
                }
                let t = b[col] * f;
                b[i] -= t;
            }
        }
    }
    Some(b.to_vec())
}

/// Exact characteristic polynomial of a rational square matrix, ascending
/// coefficients, monic of degree n (Faddeev-LeVerrier).
pub fn char_poly(m: &QMat) -> Vec<BigRational> {
    let n = m.rows();
    assert_eq!(n, m.cols());
    // c_n = 1; M_1 = A, c_{n-1} = -tr(A); M_{k+1} = A(M_k + c_{n-k} I)
    let mut coeffs = vec![BigRational::zero(); n + 1];
    coeffs[n] = BigRational::one();
    let mut mk = m.clone();
    for k in 1..=n {
        let mut tr = BigRational::zero();
        for i in 0..n {
            tr += mk.at(i, i);
        }
        let c = -tr / BigRational::from_integer(k.into());
        coeffs[n - k] = c.clone();
        if k < n {
            let mut shifted = mk.clone();
            for i in 0..n {
                *shifted.at_mut(i, i) = shifted.at(i, i) + &c;
            }
            mk = m.mul(&shifted);
        }
    }
    coeffs
}

fn poly_deg(p: &[BigRational]) -> usize {
    p.iter().rposition(|c| !c.is_zero()).unwrap_or(0)
}

fn poly_derivative(p: &[BigRational]) -> Vec<BigRational> {
    if p.len() <= 1 {
        return vec![BigRational::zero()];
    }
    (1..p.len())
        .map(|i| &p[i] * BigRational::from_integer(i.into()))
        .collect()
}

fn poly_divrem(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let db = poly_deg(b);
    let lead = b[db].clone();
    let mut rem = a.to_vec();
    let da = poly_deg(&rem);
    if da < db || (da == 0 && rem[0].is_zero()) {
        return (vec![BigRational::zero()], rem);
    }
    let mut quot = vec![BigRational::zero(); da - db + 1];
    for k in (0..=da - db).rev() {
        let c = &rem[k + db] / &lead;
        quot[k] = c.clone();
        for i in 0..=db {
            let t = &c * &b[i];
            rem[k + i] -= t;
        }
    }
    rem.truncate(db.max(1));
    (quot, rem)
}

fn poly_gcd(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    while !(poly_deg(&y) == 0 && y[0].is_zero()) {
        let (_, r) = poly_divrem(&x, &y);
        x = y;
        y = r;
    }
    // make monic
    let d = poly_deg(&x);
    let lead = x[d].clone();
    if !lead.is_zero() {
        for c in x.iter_mut() {
            *c = &*c / &lead;
        }
    }
    x.truncate(d + 1);
    x
}

/// Monic gcd of two rational univariate polynomials (ascending
/// coefficients); used by the binary square-free test.
pub fn poly_gcd_public(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    poly_gcd(a, b)
}

/// Yun's square-free decomposition: returns `(factor, multiplicity)` pairs
/// with `p = prod factor_i^mult_i` up to a constant, factors square-free and
/// pairwise coprime.
pub fn squarefree_decomposition(p: &[BigRational]) -> Vec<(Vec<BigRational>, u32)> {
    let dp = poly_derivative(p);
    let g = poly_gcd(p, &dp);
    if poly_deg(&g) == 0 {
        return vec![(p.to_vec(), 1)];
    }
    let (mut w, _) = poly_divrem(p, &g);
    let (mut y, _) = poly_divrem(&dp, &g);
    let mut out = Vec::new();
    let mut mult = 1u32;
    loop {
        // z = y - w'
        let wd = poly_derivative(&w);
        let mut z = vec![BigRational::zero(); y.len().max(wd.len())];
        for (i, c) in y.iter().enumerate() {
            z[i] += c;
        }
        for (i, c) in wd.iter().enumerate() {
            z[i] -= c;
        }
        let zdeg = poly_deg(&z);
        if zdeg == 0 && z[0].is_zero() {
            if poly_deg(&w) > 0 {
                out.push((w, mult));
            }
            break;
        }
        let f = poly_gcd(&w, &z);
        if poly_deg(&f) > 0 {
            out.push((f.clone(), mult));
        }
        let (w2, _) = poly_divrem(&w, &f);
        let (y2, _) = poly_divrem(&z, &f);
        w = w2;
        y = y2;
        mult += 1;
        if poly_deg(&w) == 0 {
            break;
        }
    }
    out
}

/// All roots of a square-free polynomial with rational coefficients, by
/// simultaneous (Durand-Kerner) iteration in the complex plane.
pub fn roots_of_squarefree(p: &[BigRational]) -> Vec<Complex64> {
    let d = poly_deg(p);
    if d == 0 {
        return Vec::new();
    }
    let lead = rational_to_f64(&p[d]);
    let c: Vec<Complex64> = (0..=d)
        .map(|i| Complex64::new(rational_to_f64(&p[i]) / lead, 0.0))
        .collect();
    let eval = |z: Complex64| {
        let mut v = Complex64::new(0.0, 0.0);
        for k in (0..=d).rev() {
            v = v * z + c[k];
        }
        v
    };
    let radius = 1.0
        + c[..d]
            .iter()
            .map(|x| x.norm())
            .fold(0.0, f64::max);
    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..d)
        .map(|k| radius * seed.powu(k as u32 + 1) / seed.norm().powi(k as i32))
        .collect();
    for _ in 0..300 {
        let mut delta = 0.0f64;
        for i in 0..d {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..d {
                if j != i {
                    denom *= roots[i] - roots[j];
                }
            }
            if denom.norm() == 0.0 {
                // perturb a coincidental collision
                roots[i] += Complex64::new(1e-6, 1e-6);
                continue;
            }
            let step = eval(roots[i]) / denom;
            roots[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-14 * radius.max(1.0) {
            break;
        }
    }
    roots
}

/// Roots with exact multiplicities: square-free split first, then the
/// simultaneous iteration per factor.
pub fn roots_with_multiplicity(p: &[BigRational]) -> Vec<(Complex64, u32)> {
    let mut out = Vec::new();
    for (factor, mult) in squarefree_decomposition(p) {
        for r in roots_of_squarefree(&factor) {
            out.push((r, mult));
        }
    }
    out
}
