//! Truncated Hankel functionals, the flat-extension test, multiplication
//! matrix certificates, numeric recovery of generalized decompositions, and
//! the extension-rank search.
//!
//! A degree-`d` form `f`, after an invertible change of coordinates and
//! dehomogenization by `x0`, induces the functional `m -> f_(d-|m|, m)` on
//! affine monomials of degree `<= d` (Bombieri coefficients).  Flatness of
//! the Hankel blocks of that functional certifies a zero-dimensional apolar
//! scheme: an invertible block on a pair of monomial sets connected to 1,
//! enclosed in a block of the same rank, determines commuting multiplication
//! matrices whose joint eigenstructure is the scheme.  The search below
//! looks for the smallest certifiable rank after generic coordinate changes.
//!
//! The data available from `f` stops at degree `d`, and every block used
//! here is assembled from available entries only.  Monomials get their
//! extension in closed form (the functional supported on a single exponent
//! vector), which is what makes their certificates complete at any degree.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, BTreeSet};

use crate::apolarity;
use crate::catalecticant;
use crate::linalg::QMat;
use crate::numeric;
use crate::poly::scalar::rational_to_f64;
use crate::poly::{monomials_up_to_degree, Coeff, Monomial, PointDiffTerm, Polynomial, QPoly};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FlatError {
    #[error("coordinate change is singular")]
    SingularChange,
    #[error("required entry {0} exceeds the functional bound {1}")]
    DegreeOverflow(String, u32),
    #[error("monomial set is not connected to 1: {0}")]
    NotConnected(String),
    #[error("basis is not contained in the enclosing set")]
    ContainmentFailure,
    #[error("products of the extended bases escape the enclosing block")]
    ProductCoverageFailure,
    #[error("principal block is singular")]
    SingularBlock,
    #[error("multiplication matrices do not commute")]
    NonzeroCommutator,
    #[error("eigenvalues cluster beyond tolerance; retries exhausted")]
    IllConditioned,
    #[error("recovered decomposition fails verification (residual {0})")]
    VerificationFailed(f64),
    #[error("polynomial must be nonzero and homogeneous of positive degree")]
    BadInput,
}

/// A linear functional on affine monomials of degree `<= bound`.
#[derive(Clone, Debug)]
pub struct TruncatedFunctional {
    nvars: usize,
    bound: u32,
    values: BTreeMap<Monomial, BigRational>,
}

impl TruncatedFunctional {
    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn bound(&self) -> u32 {
        self.bound
    }

    /// Value on a monomial; `None` when the degree exceeds the bound.
    pub fn value(&self, m: &Monomial) -> Option<BigRational> {
        if m.degree() > self.bound {
            return None;
        }
        Some(self.values.get(m).cloned().unwrap_or_else(BigRational::zero))
    }

    pub fn nonzero_values(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.values.iter()
    }

    /// Apply to an affine polynomial of degree within the bound.
    pub fn apply(&self, p: &QPoly) -> Option<BigRational> {
        let mut total = BigRational::zero();
        for (m, c) in p.terms() {
            total += self.value(m)? * c;
        }
        Some(total)
    }

    #[cfg(test)]
    pub(crate) fn tamper(&mut self, m: Monomial, delta: BigRational) {
        let old = self.values.get(&m).cloned().unwrap_or_else(BigRational::zero);
        self.values.insert(m, old + delta);
    }
}

/// The functional induced by `f` after the coordinate change `g`
/// (`None` = identity): `m ->` the Bombieri coefficient of `g·f` at the
/// homogenization of `m`.
pub fn truncate(
    f: &QPoly,
    g: Option<&[Vec<BigRational>]>,
) -> Result<TruncatedFunctional, FlatError> {
    if f.is_zero() {
        return Err(FlatError::BadInput);
    }
    let d = f.homogeneous_degree().ok_or(FlatError::BadInput)?;
    let fg = match g {
        None => f.clone(),
        Some(rows) => {
            let gm = QMat::from_fn(rows.len(), rows.len(), |i, j| rows[i][j].clone());
            if !gm.determinant_nonzero() {
                return Err(FlatError::SingularChange);
            }
            f.change_coordinates(rows)
        }
    };
    let mut values = BTreeMap::new();
    for (m, _) in fg.terms() {
        let affine = m.dehomogenize();
        let c = fg.bombieri_coeff(m);
        if !c.is_zero() {
            values.insert(affine, c);
        }
    }
    Ok(TruncatedFunctional { nvars: f.nvars() - 1, bound: d, values })
}

/// Synthetic functional `sum_i 1_{zeta_i} o phi_i` evaluated on all
/// monomials of degree `<= bound`; the independent construction the
/// round-trip tests are built on.
pub fn functional_from_terms(
    nvars: usize,
    bound: u32,
    terms: &[PointDiffTerm<BigRational>],
) -> TruncatedFunctional {
    let mut values = BTreeMap::new();
    for m in monomials_up_to_degree(nvars, bound) {
        let p = QPoly::monomial(nvars, m.clone(), BigRational::one());
        let mut v = BigRational::zero();
        for t in terms {
            v += t.apply(&p);
        }
        if !v.is_zero() {
            values.insert(m, v);
        }
    }
    TruncatedFunctional { nvars, bound, values }
}

/// Functional supported on a single exponent vector: the closed-form flat
/// extension of a monomial form, defined out to `bound`.
pub fn monomial_extension(
    alpha_affine: &Monomial,
    value: BigRational,
    bound: u32,
) -> TruncatedFunctional {
    let mut values = BTreeMap::new();
    if !value.is_zero() {
        values.insert(alpha_affine.clone(), value);
    }
    TruncatedFunctional { nvars: alpha_affine.nvars(), bound, values }
}

/// Is the set connected to 1: contains the unit, and every other member is
/// a one-variable multiple of another member.
pub fn is_connected_to_one(set: &[Monomial]) -> bool {
    if set.is_empty() {
        return false;
    }
    let members: BTreeSet<&Monomial> = set.iter().collect();
    let n = set[0].nvars();
    if !members.contains(&Monomial::unit(n)) {
        return false;
    }
    set.iter().all(|m| {
        m.is_unit()
            || (0..n).any(|i| {
                m.div(&Monomial::var(n, i, 1))
                    .map(|q| members.contains(&q))
                    .unwrap_or(false)
            })
    })
}

/// `B u x1 B u .. u xn B`.
pub fn plus_closure(set: &[Monomial]) -> Vec<Monomial> {
    let mut out: BTreeSet<Monomial> = set.iter().cloned().collect();
    let n = set.first().map(|m| m.nvars()).unwrap_or(0);
    for m in set {
        for i in 0..n {
            out.insert(m.mul(&Monomial::var(n, i, 1)));
        }
    }
    out.into_iter().collect()
}

/// The Hankel block: entry `(row b', col b) = Lambda(b·b')`.
pub fn hankel(
    lambda: &TruncatedFunctional,
    cols: &[Monomial],
    rows: &[Monomial],
) -> Result<QMat, FlatError> {
    let mut m = QMat::zeros(rows.len(), cols.len());
    for (i, r) in rows.iter().enumerate() {
        for (j, c) in cols.iter().enumerate() {
            let p = r.mul(c);
            let v = lambda
                .value(&p)
                .ok_or_else(|| FlatError::DegreeOverflow(p.to_string(), lambda.bound()))?;
            *m.at_mut(i, j) = v;
        }
    }
    Ok(m)
}

/// The flat-extension rank test: both the `(B', B)` block and the enclosing
/// `(M', M)` block must have rank `|B| = |B'|`, with `B`, `B'` connected to
/// 1 and the products of the extended bases covered by `M·M'`.
///
/// Rank disagreement answers `false`; a structural violation that would
/// make a `true` answer unsound is reported as an error instead.
pub fn flat_test(
    lambda: &TruncatedFunctional,
    b: &[Monomial],
    b_prime: &[Monomial],
    m: &[Monomial],
    m_prime: &[Monomial],
) -> Result<bool, FlatError> {
    if b.len() != b_prime.len() {
        return Ok(false);
    }
    if !is_connected_to_one(b) {
        return Err(FlatError::NotConnected("B".into()));
    }
    if !is_connected_to_one(b_prime) {
        return Err(FlatError::NotConnected("B'".into()));
    }
    let mset: BTreeSet<&Monomial> = m.iter().collect();
    let mpset: BTreeSet<&Monomial> = m_prime.iter().collect();
    if !b.iter().all(|x| mset.contains(x)) || !b_prime.iter().all(|x| mpset.contains(x)) {
        return Err(FlatError::ContainmentFailure);
    }
    let r = b.len();
    let inner = hankel(lambda, b, b_prime)?;
    let outer = hankel(lambda, m, m_prime)?;
    if inner.rank() != r || outer.rank() != r {
        return Ok(false);
    }
    let products: BTreeSet<Monomial> = m
        .iter()
        .flat_map(|a| m_prime.iter().map(move |b| a.mul(b)))
        .collect();
    for bp in plus_closure(b) {
        for bq in plus_closure(b_prime) {
            if !products.contains(&bp.mul(&bq)) {
                return Err(FlatError::ProductCoverageFailure);
            }
        }
    }
    Ok(true)
}

/// A certified flat extension: invertible principal block, rank-matching
/// enclosing block, and (when the data reaches far enough) commuting
/// multiplication matrices.
#[derive(Clone, Debug)]
pub struct FlatExtensionCertificate {
    pub rank: usize,
    /// Column basis `B`, connected to 1.
    pub basis: Vec<Monomial>,
    /// Row basis `B'`.
    pub basis_dual: Vec<Monomial>,
    /// The invertible `(B', B)` block.
    pub block: QMat,
    /// Multiplication matrices for `x1..xn` on the quotient, when every
    /// entry they need is within the functional's bound.
    pub mult_matrices: Option<Vec<QMat>>,
    /// `true` when the matrices exist and all pairwise commutators vanish
    /// exactly.
    pub commutators_zero: bool,
    /// Coordinate change under which the functional was taken.
    pub transform: Vec<Vec<BigRational>>,
}

/// Build the multiplication-matrix certificate over the invertible
/// `(B', B)` block: `M_i` solves `H^{B',B} M_i = H^{B', x_i B}`.
pub fn extend(
    lambda: &TruncatedFunctional,
    b: &[Monomial],
    b_prime: &[Monomial],
    transform: Vec<Vec<BigRational>>,
) -> Result<FlatExtensionCertificate, FlatError> {
    let n = lambda.nvars();
    let r = b.len();
    let h0 = hankel(lambda, b, b_prime)?;
    if !h0.determinant_nonzero() {
        return Err(FlatError::SingularBlock);
    }
    let mut mult = Vec::with_capacity(n);
    for i in 0..n {
        let shifted: Vec<Monomial> = b.iter().map(|m| m.mul(&Monomial::var(n, i, 1))).collect();
        let hi = hankel(lambda, &shifted, b_prime)?;
        let mi = h0.solve(&hi).ok_or(FlatError::SingularBlock)?;
        mult.push(mi);
    }
    for i in 0..n {
        for j in i + 1..n {
            let ab = mult[i].mul(&mult[j]);
            let ba = mult[j].mul(&mult[i]);
            if !ab.sub(&ba).is_zero() {
                return Err(FlatError::NonzeroCommutator);
            }
        }
    }
    Ok(FlatExtensionCertificate {
        rank: r,
        basis: b.to_vec(),
        basis_dual: b_prime.to_vec(),
        block: h0,
        mult_matrices: Some(mult),
        commutators_zero: true,
        transform,
    })
}

/// The decomposition recovered from a certificate: point evaluations
/// composed with differential operators.  Exact when produced in closed
/// form, numeric when recovered from eigenstructure.
#[derive(Clone, Debug)]
pub enum DecompositionTerms {
    Exact(Vec<PointDiffTerm<BigRational>>),
    Numeric(Vec<PointDiffTerm<Complex64>>),
}

#[derive(Clone, Debug)]
pub struct GeneralizedDecomposition {
    pub terms: DecompositionTerms,
    pub size: usize,
    pub transform: Vec<Vec<BigRational>>,
}

impl GeneralizedDecomposition {
    pub fn num_points(&self) -> usize {
        match &self.terms {
            DecompositionTerms::Exact(t) => t.len(),
            DecompositionTerms::Numeric(t) => t.len(),
        }
    }

    /// Multiplicity per point: the dimension of the derivative closure of
    /// each `phi`.
    pub fn multiplicities(&self) -> Vec<usize> {
        match &self.terms {
            DecompositionTerms::Exact(t) => t
                .iter()
                .map(|x| apolarity::derivative_closure_dimension(&x.phi))
                .collect(),
            DecompositionTerms::Numeric(t) => {
                t.iter().map(|x| numeric_closure_dimension(&x.phi)).collect()
            }
        }
    }

    /// All points are simple (constant differential operators).
    pub fn all_simple(&self) -> bool {
        self.multiplicities().iter().all(|&m| m == 1)
    }

    /// Points mapped back through the transform to the source frame, as
    /// homogeneous representatives normalized to unit first coordinate
    /// when possible.
    pub fn points_in_source_frame(&self) -> Vec<Vec<Complex64>> {
        let nv = self.transform.len();
        let g = QMat::from_fn(nv, nv, |i, j| self.transform[i][j].clone());
        let ginv = g.solve(&QMat::identity(nv)).expect("transform is invertible");
        let points: Vec<Vec<Complex64>> = match &self.terms {
            DecompositionTerms::Exact(t) => t
                .iter()
                .map(|x| x.point.iter().map(|c| c.to_complex()).collect())
                .collect(),
            DecompositionTerms::Numeric(t) => t.iter().map(|x| x.point.clone()).collect(),
        };
        points
            .into_iter()
            .map(|zeta| {
                let mut hom = vec![Complex64::new(1.0, 0.0)];
                hom.extend(zeta);
                // forms transform by (G^-1)^T: out_i = sum_j ginv[j][i] hom_j
                let mut out = vec![Complex64::new(0.0, 0.0); nv];
                for (i, o) in out.iter_mut().enumerate() {
                    for (j, h) in hom.iter().enumerate() {
                        *o += *h * rational_to_f64(ginv.at(j, i));
                    }
                }
                if out[0].norm() > 1e-9 {
                    let inv = Complex64::new(1.0, 0.0) / out[0];
                    for v in out.iter_mut() {
                        *v *= inv;
                    }
                }
                out
            })
            .collect()
    }
}

fn numeric_closure_dimension(phi: &Polynomial<Complex64>) -> usize {
    let n = phi.nvars();
    let mut closure: Vec<Polynomial<Complex64>> = Vec::new();
    let mut frontier = vec![phi.clone()];
    while let Some(p) = frontier.pop() {
        let scale = p.terms().map(|(_, c)| c.norm()).fold(0.0, f64::max);
        if scale < 1e-9 {
            continue;
        }
        for i in 0..n {
            frontier.push(p.derivative(i));
        }
        closure.push(p);
    }
    if closure.is_empty() {
        return 0;
    }
    let support: Vec<Monomial> = {
        let mut s = BTreeSet::new();
        for p in &closure {
            for (m, _) in p.terms() {
                s.insert(m.clone());
            }
        }
        s.into_iter().collect()
    };
    let rows: Vec<Vec<Complex64>> = closure
        .iter()
        .map(|p| support.iter().map(|m| p.coeff(m)).collect())
        .collect();
    let cols: Vec<Vec<Complex64>> = (0..support.len())
        .map(|j| rows.iter().map(|r| r[j]).collect())
        .collect();
    // rank = #columns - dim of column-relation kernel of the transpose
    rows.len() - numeric::complex_kernel(&cols, 1e-8).len()
}

/// Numeric eigenstructure recovery: split a random rational combination of
/// the multiplication matrices into eigenvalue clusters with exact
/// multiplicities (exact characteristic polynomial plus square-free
/// decomposition), read the point coordinates off the invariant subspaces,
/// then fit the differential coefficients against the functional.
pub fn recover(
    cert: &FlatExtensionCertificate,
    lambda: &TruncatedFunctional,
    seed: u64,
) -> Result<GeneralizedDecomposition, FlatError> {
    let mult = cert.mult_matrices.as_ref().ok_or(FlatError::SingularBlock)?;
    let n = lambda.nvars();
    let r = cert.rank;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xA5A5_5A5A_D00D_F00D);
    let retry_budget = 4;
    let mut last_err = FlatError::IllConditioned;
    for _ in 0..retry_budget {
        let coeffs: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=97)).collect();
        let mut combo = QMat::zeros(r, r);
        for (mi, &c) in mult.iter().zip(&coeffs) {
            for i in 0..r {
                for j in 0..r {
                    *combo.at_mut(i, j) =
                        combo.at(i, j) + mi.at(i, j) * BigRational::from(BigInt::from(c));
                }
            }
        }
        let charpoly = numeric::char_poly(&combo);
        let roots = numeric::roots_with_multiplicity(&charpoly);
        // roots from distinct square-free factors are exactly distinct;
        // a numeric near-collision means a bad combination, so redraw
        let mut collision = false;
        for (i, (ri, _)) in roots.iter().enumerate() {
            for (rj, _) in roots.iter().skip(i + 1) {
                if (ri - rj).norm() < 1e-8 {
                    collision = true;
                }
            }
        }
        if collision {
            last_err = FlatError::IllConditioned;
            continue;
        }
        match recover_from_roots(cert, lambda, mult, &combo, &roots) {
            Ok(dec) => return Ok(dec),
            Err(e) => last_err = e,
        }
    }
    Err(last_err)
}

fn recover_from_roots(
    cert: &FlatExtensionCertificate,
    lambda: &TruncatedFunctional,
    mult: &[QMat],
    combo: &QMat,
    roots: &[(Complex64, u32)],
) -> Result<GeneralizedDecomposition, FlatError> {
    let n = lambda.nvars();
    let r = cert.rank;
    let combo_c = to_complex_rows(combo);
    let mult_c: Vec<Vec<Vec<Complex64>>> = mult.iter().map(to_complex_rows).collect();

    let total: u32 = roots.iter().map(|(_, m)| *m).sum();
    if total as usize != r {
        return Err(FlatError::IllConditioned);
    }

    let mut points: Vec<Vec<Complex64>> = Vec::new();
    let mut mults: Vec<usize> = Vec::new();
    for &(mu, m) in roots {
        // generalized eigenspace: kernel of (C - mu I)^m
        let mut shifted = combo_c.clone();
        for (i, row) in shifted.iter_mut().enumerate() {
            row[i] -= mu;
        }
        let mut power = identity_rows(r);
        for _ in 0..m {
            power = complex_matmul(&power, &shifted);
        }
        let basis = numeric::complex_kernel(&power, 1e-8);
        if basis.len() != m as usize {
            return Err(FlatError::IllConditioned);
        }
        // zeta_i = trace of M_i restricted to the invariant subspace / m
        let p_rows: Vec<Vec<Complex64>> = (0..r)
            .map(|i| basis.iter().map(|col| col[i]).collect())
            .collect();
        let mut zeta = Vec::with_capacity(n);
        for mc in &mult_c {
            let mut trace = Complex64::new(0.0, 0.0);
            for (k, col) in basis.iter().enumerate() {
                let mp: Vec<Complex64> = (0..r)
                    .map(|i| (0..r).map(|j| mc[i][j] * col[j]).sum())
                    .collect();
                let sol =
                    numeric::complex_lstsq(&p_rows, &mp).ok_or(FlatError::IllConditioned)?;
                trace += sol[k];
            }
            zeta.push(trace / m as f64);
        }
        points.push(zeta);
        mults.push(m as usize);
    }

    // fit the differential coefficients: unknowns are the coefficients of
    // each phi_j over derivative monomials of degree < mult_j
    let mut unknown_slots: Vec<(usize, Monomial)> = Vec::new();
    for (j, &m) in mults.iter().enumerate() {
        for mono in monomials_up_to_degree(n, m as u32 - 1) {
            unknown_slots.push((j, mono));
        }
    }
    let domain = monomials_up_to_degree(n, lambda.bound());
    let mut rows: Vec<Vec<Complex64>> = Vec::with_capacity(domain.len());
    let mut rhs: Vec<Complex64> = Vec::with_capacity(domain.len());
    for m in &domain {
        let mono_poly: Polynomial<Complex64> =
            Polynomial::monomial(n, m.clone(), Complex64::new(1.0, 0.0));
        let mut row = Vec::with_capacity(unknown_slots.len());
        for (j, gamma) in &unknown_slots {
            let phi_basis = Polynomial::monomial(n, gamma.clone(), Complex64::new(1.0, 0.0));
            let applied = phi_basis.apply_diff(&mono_poly);
            row.push(applied.evaluate(&points[*j]));
        }
        rows.push(row);
        rhs.push(Complex64::new(
            rational_to_f64(&lambda.value(m).unwrap_or_else(BigRational::zero)),
            0.0,
        ));
    }
    // normalize the fit; coordinate changes with integer entries can blow
    // the functional values up by many orders of magnitude
    let scale = rhs.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let rhs_scaled: Vec<Complex64> = rhs.iter().map(|z| z / scale).collect();
    let sol = numeric::complex_lstsq(&rows, &rhs_scaled).ok_or(FlatError::IllConditioned)?;
    let sol: Vec<Complex64> = sol.into_iter().map(|z| z * scale).collect();

    let mut residual = 0.0f64;
    for (row, want) in rows.iter().zip(&rhs) {
        let got: Complex64 = row.iter().zip(&sol).map(|(a, b)| a * b).sum();
        residual = residual.max((got - want).norm());
    }
    if residual > 1e-6 * scale {
        return Err(FlatError::VerificationFailed(residual / scale));
    }

    let mut phis: Vec<Polynomial<Complex64>> = vec![Polynomial::zero(n); points.len()];
    for ((j, gamma), c) in unknown_slots.iter().zip(&sol) {
        if c.norm() > 1e-12 {
            phis[*j].add_term(gamma.clone(), *c);
        }
    }
    let terms: Vec<PointDiffTerm<Complex64>> = points
        .into_iter()
        .zip(phis)
        .map(|(point, phi)| PointDiffTerm { point, phi })
        .collect();
    let size: usize = terms.iter().map(|t| numeric_closure_dimension(&t.phi)).sum();
    Ok(GeneralizedDecomposition {
        terms: DecompositionTerms::Numeric(terms),
        size,
        transform: cert.transform.clone(),
    })
}

fn to_complex_rows(m: &QMat) -> Vec<Vec<Complex64>> {
    (0..m.rows())
        .map(|i| {
            (0..m.cols())
                .map(|j| Complex64::new(rational_to_f64(m.at(i, j)), 0.0))
                .collect()
        })
        .collect()
}

fn identity_rows(n: usize) -> Vec<Vec<Complex64>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0))
                .collect()
        })
        .collect()
}

fn complex_matmul(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
    let n = a.len();
    let k = b.len();
    let m = b[0].len();
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| (0..k).map(|t| a[i][t] * b[t][j]).sum())
                .collect()
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct GenVerifyReport {
    /// Exact agreement on all monomials of degree `<= d` (exact terms only).
    pub exact_match: Option<bool>,
    /// Max residual against the functional.
    pub residual: f64,
    /// Largest functional value, the scale the residual is judged against.
    pub scale: f64,
    /// Declared size vs recomputed inverse-system dimension.
    pub size_consistent: bool,
    /// First failing monomial, when any.
    pub first_mismatch: Option<String>,
}

impl GenVerifyReport {
    /// Tolerance is relative to the magnitude of the functional.
    pub fn passed(&self, tol: f64) -> bool {
        self.size_consistent
            && match self.exact_match {
                Some(e) => e,
                None => self.residual <= tol * self.scale.max(1.0),
            }
    }
}

/// Check a generalized decomposition against its target form: the induced
/// functional must agree with `truncate(f, transform)` on every monomial of
/// degree `<= d`, and the inverse-system dimension must equal the declared
/// size.
pub fn verify_generalized(
    dec: &GeneralizedDecomposition,
    f: &QPoly,
) -> Result<GenVerifyReport, FlatError> {
    let lambda = truncate(f, Some(&dec.transform))?;
    let n = lambda.nvars();
    let domain = monomials_up_to_degree(n, lambda.bound());
    let scale = domain
        .iter()
        .map(|m| rational_to_f64(&lambda.value(m).unwrap()).abs())
        .fold(0.0, f64::max);
    let mut residual = 0.0f64;
    let mut exact_match = None;
    let mut first_mismatch = None;
    match &dec.terms {
        DecompositionTerms::Exact(terms) => {
            let mut ok = true;
            for m in &domain {
                let p = QPoly::monomial(n, m.clone(), BigRational::one());
                let mut v = BigRational::zero();
                for t in terms {
                    v += t.apply(&p);
                }
                let want = lambda.value(m).unwrap();
                if v != want {
                    ok = false;
                    if first_mismatch.is_none() {
                        first_mismatch = Some(m.to_string());
                    }
                    residual = residual.max(rational_to_f64(&num_traits::Signed::abs(&(&v - &want))));
                }
            }
            exact_match = Some(ok);
        }
        DecompositionTerms::Numeric(terms) => {
            for m in &domain {
                let p = Polynomial::monomial(n, m.clone(), Complex64::new(1.0, 0.0));
                let mut v = Complex64::new(0.0, 0.0);
                for t in terms {
                    v += t.phi.apply_diff(&p).evaluate(&t.point);
                }
                let want = rational_to_f64(&lambda.value(m).unwrap());
                let err = (v - Complex64::new(want, 0.0)).norm();
                if err > 1e-9 * scale.max(1.0) && first_mismatch.is_none() {
                    first_mismatch = Some(m.to_string());
                }
                residual = residual.max(err);
            }
        }
    }
    let dims: usize = dec.multiplicities().iter().sum();
    Ok(GenVerifyReport {
        exact_match,
        residual,
        scale,
        size_consistent: dims == dec.size,
        first_mismatch,
    })
}

/// Outcome of the extension-rank search.
#[derive(Clone, Debug)]
pub struct SearchOutcome {
    /// `None` when no rank up to `r_max` could be certified from the
    /// available data; never a claim of nonexistence.
    pub result: Option<SearchSuccess>,
    /// Always a valid lower bound for every rank in the hierarchy.
    pub catalecticant_rank: usize,
    pub attempts_used: u32,
}

#[derive(Clone, Debug)]
pub struct SearchSuccess {
    pub rank: usize,
    pub certificate: FlatExtensionCertificate,
    /// Recovered decomposition; present whenever the multiplication
    /// matrices were available, in particular whenever `d >= 2 rank - 1`.
    pub decomposition: Option<GeneralizedDecomposition>,
    /// Exact closed-form certificate (monomial route).
    pub exact: bool,
}

/// Retry budget for random coordinate changes per candidate rank.
pub const COORDINATE_RETRIES: u32 = 8;

/// Search for the smallest certifiable extension rank of `f`: an upper
/// bound for the generalized / scheme / flat-extension rank.
///
/// Monomials take a closed-form route: their extension is the functional
/// supported on the single affine exponent vector (largest exponent rotated
/// into the dehomogenizing slot), whose divisor-set block is invertible at
/// any degree; the certificate is complete and exact, of size `prod/max`.
///
/// Everything else is probed through coordinate changes.  The candidate
/// rank is the balanced catalecticant rank -- the rank ceiling of every
/// block the degree-`d` data can fill -- and a candidate is accepted only
/// when the half-degree square block also reaches it under some change of
/// coordinates, a connected-to-1 pivot basis exists, and, whenever the
/// multiplication matrices are within reach of the data (always when
/// `d >= 2r - 1`), the exact commutator and numeric recovery checks pass.
/// When they are out of reach the certificate records rank evidence only.
pub fn extension_rank_search(
    f: &QPoly,
    r_max: usize,
    seed: u64,
) -> Result<SearchOutcome, FlatError> {
    if f.is_zero() {
        return Err(FlatError::BadInput);
    }
    let d = f.homogeneous_degree().ok_or(FlatError::BadInput)?;
    if d == 0 {
        return Err(FlatError::BadInput);
    }
    let r_h = catalecticant::catalecticant_rank(f).map_err(|_| FlatError::BadInput)?;

    if f.num_terms() == 1 {
        return monomial_route(f, r_max, r_h);
    }

    let nvars = f.nvars();
    let n = nvars - 1;
    let k_low = d / 2;
    let k_high = d - k_low;
    let candidate = catalecticant::rank(f, k_high).map_err(|_| FlatError::BadInput)?;

    let mut attempts_used = 0;
    if candidate == r_h && candidate <= r_max && candidate > 0 {
        let r = candidate;
        for attempt in 0..=COORDINATE_RETRIES {
            attempts_used = attempt + 1;
            let g = if attempt == 0 {
                identity_matrix(nvars)
            } else {
                random_change(nvars, seed, r as u64, attempt)
            };
            let lambda = match truncate(f, Some(&g)) {
                Ok(l) => l,
                Err(_) => continue,
            };
            let cols_sq = monomials_up_to_degree(n, k_low);
            let square = hankel(&lambda, &cols_sq, &cols_sq)?;
            if square.rank() != r {
                continue;
            }
            let cols_big = monomials_up_to_degree(n, k_high);
            let big = hankel(&lambda, &cols_big, &cols_sq)?;
            if big.rank() != r {
                continue;
            }
            let Some(basis) = greedy_connected_basis(&square, &cols_sq, r) else {
                continue;
            };
            let Some(basis_dual) = greedy_connected_rows(&lambda, &cols_sq, &basis, r) else {
                continue;
            };
            let max_deg = |set: &[Monomial]| set.iter().map(|m| m.degree()).max().unwrap_or(0);
            let mult_available = max_deg(&basis) + max_deg(&basis_dual) + 1 <= d;
            if mult_available {
                let cert = match extend(&lambda, &basis, &basis_dual, g.clone()) {
                    Ok(c) => c,
                    Err(_) => continue,
                };
                let dec = match recover(&cert, &lambda, seed ^ attempt as u64) {
                    Ok(dec) => dec,
                    Err(_) => continue,
                };
                if !verify_generalized(&dec, f)?.passed(1e-6) {
                    continue;
                }
                return Ok(SearchOutcome {
                    result: Some(SearchSuccess {
                        rank: r,
                        certificate: cert,
                        decomposition: Some(dec),
                        exact: false,
                    }),
                    catalecticant_rank: r_h,
                    attempts_used,
                });
            }
            // rank evidence only: the block structure is certified but the
            // data stops before the multiplication matrices
            let block = hankel(&lambda, &basis, &basis_dual)?;
            if block.rank() != r {
                continue;
            }
            let cert = FlatExtensionCertificate {
                rank: r,
                basis,
                basis_dual,
                block,
                mult_matrices: None,
                commutators_zero: false,
                transform: g,
            };
            return Ok(SearchOutcome {
                result: Some(SearchSuccess {
                    rank: r,
                    certificate: cert,
                    decomposition: None,
                    exact: false,
                }),
                catalecticant_rank: r_h,
                attempts_used,
            });
        }
    }
    Ok(SearchOutcome { result: None, catalecticant_rank: r_h, attempts_used })
}

/// Closed-form route for a single-term `c x^alpha`.
fn monomial_route(f: &QPoly, r_max: usize, r_h: usize) -> Result<SearchOutcome, FlatError> {
    let nvars = f.nvars();
    let n = nvars - 1;
    let (alpha, coeff) = f.terms().next().map(|(m, c)| (m.clone(), c.clone())).unwrap();
    let d = alpha.degree();
    let exps = alpha.exps().to_vec();
    let r = crate::monomial_decomp::monomial_border_size(&exps) as usize;
    if r > r_max {
        return Ok(SearchOutcome { result: None, catalecticant_rank: r_h, attempts_used: 0 });
    }
    let pivot = exps
        .iter()
        .enumerate()
        .filter(|(_, &a)| a > 0)
        .max_by_key(|&(i, &a)| (a, std::cmp::Reverse(i)))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let mut perm: Vec<usize> = (0..nvars).collect();
    perm.swap(0, pivot);
    let alpha_affine = alpha.permute(&perm).dehomogenize();
    // transposition as coordinate change: (g f)(x) = f(x_perm)
    let g: Vec<Vec<BigRational>> = (0..nvars)
        .map(|i| {
            (0..nvars)
                .map(|j| if perm[i] == j { BigRational::one() } else { BigRational::zero() })
                .collect()
        })
        .collect();
    let value = &coeff / BigRational::from(alpha.multinomial());
    let wt = alpha_affine.degree();
    let lambda = monomial_extension(&alpha_affine, value, 2 * wt + 2);
    let divisors: Vec<Monomial> = monomials_up_to_degree(n, wt)
        .into_iter()
        .filter(|m| m.divides(&alpha_affine))
        .collect();
    debug_assert_eq!(divisors.len(), r);
    let enclosing = plus_closure(&divisors);
    match flat_test(&lambda, &divisors, &divisors, &enclosing, &enclosing) {
        Ok(true) => {}
        Ok(false) => return Err(FlatError::SingularBlock),
        Err(e) => return Err(e),
    }
    let cert = extend(&lambda, &divisors, &divisors, g.clone())?;
    // exact decomposition: one point at the origin with
    // phi = c * a_pivot! / d! * D^alpha_affine
    let w = &coeff * BigRational::new(factorial(exps[pivot]), factorial(d));
    let phi = Polynomial::monomial(n, alpha_affine, w);
    let terms = vec![PointDiffTerm { point: vec![BigRational::zero(); n], phi }];
    let dec = GeneralizedDecomposition {
        terms: DecompositionTerms::Exact(terms),
        size: r,
        transform: g,
    };
    let report = verify_generalized(&dec, f)?;
    if !report.passed(0.0) {
        return Err(FlatError::VerificationFailed(report.residual));
    }
    Ok(SearchOutcome {
        result: Some(SearchSuccess {
            rank: r,
            certificate: cert,
            decomposition: Some(dec),
            exact: true,
        }),
        catalecticant_rank: r_h,
        attempts_used: 0,
    })
}

fn factorial(k: u32) -> BigInt {
    let mut r = BigInt::from(1);
    for i in 2..=k {
        r *= BigInt::from(i);
    }
    r
}

fn identity_matrix(n: usize) -> Vec<Vec<BigRational>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { BigRational::one() } else { BigRational::zero() })
                .collect()
        })
        .collect()
}

/// Random integer coordinate change with entries in [-10, 10] and nonzero
/// determinant; deterministic in (seed, rank, attempt).
fn random_change(n: usize, seed: u64, rank: u64, attempt: u32) -> Vec<Vec<BigRational>> {
    let mut rng = ChaCha8Rng::seed_from_u64(
        seed ^ rank.wrapping_mul(0x9E37_79B9_7F4A_7C15)
            ^ (attempt as u64).wrapping_mul(0xBF58_476D_1CE4_E5B9),
    );
    loop {
        let g: Vec<Vec<BigRational>> = (0..n)
            .map(|_| {
                (0..n)
                    .map(|_| BigRational::from(BigInt::from(rng.gen_range(-10i64..=10))))
                    .collect()
            })
            .collect();
        let gm = QMat::from_fn(n, n, |i, j| g[i][j].clone());
        if gm.determinant_nonzero() {
            return g;
        }
    }
}

/// Greedy connected-to-1 column basis: walk the columns in degree order,
/// adding a column when its monomial is reachable (the unit, or a
/// one-variable multiple of a chosen one) and it increases the rank of the
/// selected set.
fn greedy_connected_basis(
    square: &QMat,
    labels: &[Monomial],
    target: usize,
) -> Option<Vec<Monomial>> {
    let n = labels.first()?.nvars();
    let mut chosen_cols: Vec<usize> = Vec::new();
    let mut chosen_set: BTreeSet<Monomial> = BTreeSet::new();
    for (j, m) in labels.iter().enumerate() {
        if chosen_cols.len() == target {
            break;
        }
        let eligible = m.is_unit()
            || (0..n).any(|i| {
                m.div(&Monomial::var(n, i, 1))
                    .map(|q| chosen_set.contains(&q))
                    .unwrap_or(false)
            });
        if !eligible {
            continue;
        }
        let mut cols = chosen_cols.clone();
        cols.push(j);
        let sub = QMat::from_fn(square.rows(), cols.len(), |r, c| square.at(r, cols[c]).clone());
        if sub.rank() == cols.len() {
            chosen_cols = cols;
            chosen_set.insert(m.clone());
        }
    }
    (chosen_cols.len() == target)
        .then(|| chosen_cols.iter().map(|&j| labels[j].clone()).collect())
}

/// Greedy connected-to-1 row basis against fixed columns.
fn greedy_connected_rows(
    lambda: &TruncatedFunctional,
    row_labels: &[Monomial],
    cols: &[Monomial],
    target: usize,
) -> Option<Vec<Monomial>> {
    let n = row_labels.first()?.nvars();
    let mut chosen: Vec<Monomial> = Vec::new();
    let mut chosen_set: BTreeSet<Monomial> = BTreeSet::new();
    for m in row_labels {
        if chosen.len() == target {
            break;
        }
        let eligible = m.is_unit()
            || (0..n).any(|i| {
                m.div(&Monomial::var(n, i, 1))
                    .map(|q| chosen_set.contains(&q))
                    .unwrap_or(false)
            });
        if !eligible {
            continue;
        }
        let mut rows = chosen.clone();
        rows.push(m.clone());
        let sub = hankel(lambda, cols, &rows).ok()?;
        if sub.rank() == rows.len() {
            chosen = rows;
            chosen_set.insert(m.clone());
        }
    }
    (chosen.len() == target).then_some(chosen)
}
