//! Aggregated rank reports: catalecticant lower bound, extension-rank
//! search, exact binary ranks, monomial formulas, border-rank witnesses and
//! the saturation obstruction, with every inequality of the rank hierarchy
//! asserted on the way out.
//!
//! The chain used for the assertions:
//!
//! ```text
//!   r_H <= r_ext (generalized = scheme = extension rank bound) <= r
//!   r_H <= r_border <= r
//!   sch_lower <= r_ext, r
//! ```
//!
//! No inequality in either direction ties the border rank to the scheme
//! length; their separation on the quadric-bundle cubic is the point of the
//! bundled corpus.

use num_bigint::BigInt;
use num_rational::BigRational;

use serde::{Deserialize, Serialize};

use crate::apolarity::{self, ApolarityError};
use crate::catalecticant::{self, CatalecticantError};
use crate::flat_extension::{self, DecompositionTerms, FlatError, SearchOutcome};
use crate::monomial_decomp::{self, VerifyMode};
use crate::poly::parse::{parse_homogeneous, ParseError};
use crate::poly::{Coeff, LinearForm, QPoly};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HierarchyError {
    #[error("polynomial must be nonzero")]
    ZeroPolynomial,
    #[error("polynomial must be homogeneous")]
    NotHomogeneous,
    #[error("binary rank requires exactly two variables, got {0}")]
    NotBinary(usize),
    #[error("no square-free kernel element found up to order {0}")]
    SylvesterExhausted(u32),
    #[error("rank hierarchy violated: {0}")]
    Inconsistency(String),
    #[error(transparent)]
    Catalecticant(#[from] CatalecticantError),
    #[error(transparent)]
    Apolarity(#[from] ApolarityError),
    #[error(transparent)]
    Flat(#[from] FlatError),
    #[error("parse: {0}")]
    Parse(String),
}

impl From<ParseError> for HierarchyError {
    fn from(e: ParseError) -> Self {
        HierarchyError::Parse(e.to_string())
    }
}

/// Exact Waring rank of a binary form: the smallest order whose
/// catalecticant kernel contains a square-free form.
///
/// At the first rank-deficient order the kernel is usually a single form;
/// when that form has a repeated root the rank jumps to `d - r + 2`, which
/// the loop discovers by walking the later orders until a square-free
/// element appears.  Kernels of dimension two and more get a short
/// deterministic sweep of integer combinations.
pub fn sylvester_binary_rank(f: &QPoly) -> Result<usize, HierarchyError> {
    if f.is_zero() {
        return Err(HierarchyError::ZeroPolynomial);
    }
    if f.nvars() != 2 {
        return Err(HierarchyError::NotBinary(f.nvars()));
    }
    let d = f
        .homogeneous_degree()
        .ok_or(HierarchyError::NotHomogeneous)?;
    if d == 0 {
        return Err(HierarchyError::ZeroPolynomial);
    }
    for r in 1..=d {
        let kernel = apolarity::apolar_component(f, r)?.basis;
        if kernel.is_empty() {
            continue;
        }
        if kernel.iter().any(binary_square_free) {
            return Ok(r as usize);
        }
        if kernel.len() >= 2 {
            // combinations sum_j t^j b_j over a deterministic t sweep
            for t in 1..=(4 * (d as i64) + 4) {
                let mut combo = QPoly::zero(2);
                let mut scale = BigRational::one();
                for b in &kernel {
                    combo = combo.add(&b.scale(&scale));
                    scale *= BigRational::from(BigInt::from(t));
                }
                if binary_square_free(&combo) {
                    return Ok(r as usize);
                }
            }
        }
    }
    Err(HierarchyError::SylvesterExhausted(d))
}

/// Square-freeness of a binary form over the rationals: the dehomogenized
/// polynomial must be coprime with its derivative, and the degree drop at
/// dehomogenization (the multiplicity of the `x0` factor) at most one.
fn binary_square_free(p: &QPoly) -> bool {
    if p.is_zero() {
        return false;
    }
    let e = p.degree();
    let mut u = vec![BigRational::from(BigInt::from(0)); e as usize + 1];
    for (m, c) in p.terms() {
        u[m.exps()[1] as usize] = c.clone();
    }
    let deg_u = u
        .iter()
        .rposition(|c| !num_traits::Zero::is_zero(c))
        .unwrap_or(0);
    if e as usize - deg_u > 1 {
        return false;
    }
    if deg_u == 0 {
        return true;
    }
    let du: Vec<BigRational> = (1..=deg_u)
        .map(|i| &u[i] * BigRational::from(BigInt::from(i as i64)))
        .collect();
    let g = crate::numeric::poly_gcd_public(&u[..=deg_u], &du);
    g.iter()
        .rposition(|c| !num_traits::Zero::is_zero(c))
        .unwrap_or(0)
        == 0
}

/// Outcome of the saturation obstruction.
#[derive(Clone, Debug)]
pub enum SchemeBound {
    /// No saturated apolar ideal of degree `<= r_target` exists, so the
    /// scheme length (and with it the smoothable rank) is at least
    /// `r_target + 1`; the witness is the nonzero colon space.
    Proven { witness: Vec<QPoly> },
    Inconclusive,
}

/// The contradiction argument for cubics with Hilbert function
/// `[1, s, s, 1]`, `s = n+1`: a saturated apolar ideal of degree `<= s`
/// would force `I^1 = 0` and `I^2 = (f^perp)^2`, hence a zero colon of the
/// quadratic part against the maximal ideal; a nonzero colon rules it out.
/// Only that shape is implemented; anything else is inconclusive, never
/// "disproven".
pub fn scheme_length_lower_bound(
    f: &QPoly,
    r_target: usize,
) -> Result<SchemeBound, HierarchyError> {
    if f.is_zero() {
        return Err(HierarchyError::ZeroPolynomial);
    }
    let d = f
        .homogeneous_degree()
        .ok_or(HierarchyError::NotHomogeneous)?;
    if d != 3 {
        return Ok(SchemeBound::Inconclusive);
    }
    let h = apolarity::hilbert_function(f)?;
    let s = f.nvars();
    if h.values != vec![1, s, s, 1] || r_target != s {
        return Ok(SchemeBound::Inconclusive);
    }
    let colon = apolarity::colon_with_maximal(f, 2)?;
    if colon.dim() == 0 {
        return Ok(SchemeBound::Inconclusive);
    }
    Ok(SchemeBound::Proven { witness: colon.basis })
}

/// Everything the library can certify about one polynomial.
#[derive(Clone, Debug)]
pub struct RankReport {
    /// Catalecticant rank: exact, a lower bound for every other rank.
    pub r_h: usize,
    /// Upper bound on the generalized/scheme/extension rank from the
    /// search; `None` when the search was inconclusive.
    pub r_ext_upper: Option<usize>,
    /// Waring rank upper bound from a verified decomposition.
    pub r_upper: Option<usize>,
    /// Border rank upper bound from an epsilon-family certificate.
    pub r_border_upper: Option<usize>,
    /// Exact Waring rank (binary forms only).
    pub r_exact: Option<usize>,
    /// Scheme-length lower bound from the saturation obstruction.
    pub sch_lower: Option<usize>,
    pub witnesses: Witnesses,
}

#[derive(Clone, Debug, Default)]
pub struct Witnesses {
    pub hilbert: Vec<usize>,
    /// Monomial exponents when the input is a single term.
    pub monomial_alpha: Option<Vec<u32>>,
    /// Exact verification outcome of the monomial Waring decomposition.
    pub monomial_waring_exact: Option<bool>,
    /// Border family: (term count, eps used, numeric residual).
    pub border_family: Option<(u64, String, f64)>,
    /// Saturation colon basis, printed.
    pub colon_basis: Option<Vec<String>>,
    /// Search certificate summary.
    pub extension: Option<ExtensionWitness>,
    /// Waring decomposition recovered from simple points: (terms, residual).
    pub waring_recovered: Option<(usize, f64)>,
}

#[derive(Clone, Debug)]
pub struct ExtensionWitness {
    pub rank: usize,
    pub basis: Vec<String>,
    pub mult_matrices: bool,
    pub exact: bool,
    pub num_points: Option<usize>,
    pub multiplicities: Option<Vec<usize>>,
    pub attempts: u32,
}

/// Default search budget for reports.
pub const DEFAULT_R_MAX: usize = 12;

/// Assemble the full report for `f`, asserting the hierarchy inequalities;
/// a violation is an internal error, never swallowed.
pub fn rank_report(f: &QPoly, r_max: usize, seed: u64) -> Result<RankReport, HierarchyError> {
    if f.is_zero() {
        return Err(HierarchyError::ZeroPolynomial);
    }
    let d = f
        .homogeneous_degree()
        .ok_or(HierarchyError::NotHomogeneous)?;
    if d == 0 {
        return Err(HierarchyError::ZeroPolynomial);
    }

    let mut witnesses = Witnesses {
        hilbert: apolarity::hilbert_function(f)?.values,
        ..Default::default()
    };
    let r_h = catalecticant::catalecticant_rank(f)?;

    let search: SearchOutcome = flat_extension::extension_rank_search(f, r_max, seed)?;
    let r_ext_upper = search.result.as_ref().map(|s| s.rank);
    if let Some(success) = &search.result {
        witnesses.extension = Some(ExtensionWitness {
            rank: success.rank,
            basis: success
                .certificate
                .basis
                .iter()
                .map(|m| m.to_string_with_offset(1))
                .collect(),
            mult_matrices: success.certificate.mult_matrices.is_some(),
            exact: success.exact,
            num_points: success.decomposition.as_ref().map(|d| d.num_points()),
            multiplicities: success.decomposition.as_ref().map(|d| d.multiplicities()),
            attempts: search.attempts_used,
        });
    }

    let mut r_upper: Option<usize> = None;
    let mut r_border_upper: Option<usize> = None;

    // single-term inputs carry the closed-form certificates
    if f.num_terms() == 1 {
        let (alpha_m, coeff) = f.terms().next().map(|(m, c)| (m.clone(), c.clone())).unwrap();
        let alpha: Vec<u32> = alpha_m.exps().to_vec();
        let rank = monomial_decomp::monomial_rank(&alpha) as usize;
        let border = monomial_decomp::monomial_border_size(&alpha) as usize;
        let waring_ok = match monomial_decomp::monomial_waring(&alpha, &BigRational::one()) {
            Ok(mut dec) => {
                // the closed form decomposes the monic monomial; rescaling
                // the weights by the coefficient keeps it exact
                for (w, _) in dec.terms.iter_mut() {
                    *w = w.scale(&coeff);
                }
                dec.target = f.clone();
                monomial_decomp::verify(&dec, VerifyMode::Exact, 1e-9).exact_match == Some(true)
            }
            Err(_) => false,
        };
        witnesses.monomial_alpha = Some(alpha.clone());
        witnesses.monomial_waring_exact = Some(waring_ok);
        if waring_ok {
            r_upper = Some(rank);
        }
        if let Ok(fam) = monomial_decomp::monomial_border_family(&alpha) {
            let eps = BigRational::new(BigInt::from(1), BigInt::from(1000));
            let residual = fam.remainder_norm(&eps)
                * crate::poly::scalar::rational_to_f64(&num_traits::Signed::abs(&coeff));
            witnesses.border_family = Some((fam.term_count(), "1/1000".into(), residual));
            if residual <= 1e-2 {
                r_border_upper = Some(border);
            }
        }
    }

    // the separating cubic's explicit five-term family
    if *f == monomial_decomp::jarek_cubic() {
        let eps = BigRational::new(BigInt::from(1), BigInt::from(1000));
        let (dec, remainder) = monomial_decomp::jarek_family(&eps).unwrap();
        let residual = remainder
            .terms()
            .map(|(_, c)| crate::poly::scalar::rational_to_f64(&num_traits::Signed::abs(c)))
            .fold(0.0, f64::max);
        witnesses.border_family = Some((dec.len() as u64, "1/1000".into(), residual));
        if residual <= 1e-2 {
            r_border_upper = Some(dec.len());
        }
    }

    let r_exact = if f.nvars() == 2 {
        Some(sylvester_binary_rank(f)?)
    } else {
        None
    };

    // saturation obstruction for cubics of the right Hilbert shape
    let mut sch_lower = None;
    if d == 3 {
        let s = f.nvars();
        if witnesses.hilbert == vec![1, s, s, 1] {
            if let SchemeBound::Proven { witness } = scheme_length_lower_bound(f, s)? {
                sch_lower = Some(s + 1);
                witnesses.colon_basis =
                    Some(witness.iter().map(|p| p.to_string_pretty()).collect());
            }
        }
    }

    // a simple-point recovery doubles as a Waring decomposition
    if let Some(success) = &search.result {
        if let Some(dec) = &success.decomposition {
            if dec.all_simple() {
                if let Some((terms, residual)) = waring_from_simple_points(dec, f, d) {
                    if residual <= 1e-6 {
                        witnesses.waring_recovered = Some((terms, residual));
                        r_upper = Some(match r_upper {
                            Some(u) => u.min(terms),
                            None => terms,
                        });
                    }
                }
            }
        }
    }

    let report = RankReport {
        r_h,
        r_ext_upper,
        r_upper,
        r_border_upper,
        r_exact,
        sch_lower,
        witnesses,
    };
    assert_hierarchy(&report)?;
    Ok(report)
}

/// Check every inequality of the hierarchy table the report instantiates.
fn assert_hierarchy(r: &RankReport) -> Result<(), HierarchyError> {
    let fail = |msg: String| Err(HierarchyError::Inconsistency(msg));
    if let Some(e) = r.r_ext_upper {
        if r.r_h > e {
            return fail(format!("r_H = {} > r_ext = {}", r.r_h, e));
        }
    }
    for (name, v) in [
        ("r_upper", r.r_upper),
        ("r_exact", r.r_exact),
        ("r_border_upper", r.r_border_upper),
    ] {
        if let Some(v) = v {
            if r.r_h > v {
                return fail(format!("r_H = {} > {} = {}", r.r_h, name, v));
            }
        }
    }
    let waring = r.r_exact.or(r.r_upper);
    if let (Some(e), Some(w)) = (r.r_ext_upper, waring) {
        if e > w {
            return fail(format!("r_ext = {} > waring bound = {}", e, w));
        }
    }
    if let (Some(b), Some(w)) = (r.r_border_upper, waring) {
        if b > w {
            return fail(format!("r_border = {} > waring bound = {}", b, w));
        }
    }
    if let (Some(s), Some(e)) = (r.sch_lower, r.r_ext_upper) {
        if s > e {
            return fail(format!("sch_lower = {} > r_ext = {}", s, e));
        }
    }
    if let (Some(s), Some(w)) = (r.sch_lower, waring) {
        if s > w {
            return fail(format!("sch_lower = {} > waring bound = {}", s, w));
        }
    }
    Ok(())
}

/// Turn a simple-point generalized decomposition into a Waring
/// decomposition of the source polynomial; returns the term count and the
/// numeric residual.
fn waring_from_simple_points(
    dec: &flat_extension::GeneralizedDecomposition,
    f: &QPoly,
    d: u32,
) -> Option<(usize, f64)> {
    use num_complex::Complex64;
    let weights: Vec<Complex64> = match &dec.terms {
        DecompositionTerms::Numeric(ts) => ts
            .iter()
            .map(|t| {
                t.phi
                    .terms()
                    .next()
                    .map(|(_, c)| *c)
                    .unwrap_or(Complex64::new(0.0, 0.0))
            })
            .collect(),
        DecompositionTerms::Exact(ts) => ts
            .iter()
            .map(|t| {
                t.phi
                    .terms()
                    .next()
                    .map(|(_, c)| c.to_complex())
                    .unwrap_or(Complex64::new(0.0, 0.0))
            })
            .collect(),
    };
    let points = dec.points_in_source_frame();
    let terms: Vec<(Complex64, LinearForm<Complex64>)> = weights
        .into_iter()
        .zip(points)
        .map(|(w, p)| (w, LinearForm::new(p)))
        .collect();
    let count = terms.len();
    let wd = monomial_decomp::WaringDecomposition { degree: d, terms, target: f.clone() };
    let rep = monomial_decomp::verify(&wd, VerifyMode::Numeric, 1e-6);
    Some((count, rep.residual))
}

/// One corpus entry: a named polynomial with optional expected values.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CorpusEntry {
    pub name: String,
    pub n: usize,
    pub polynomial: String,
    #[serde(default)]
    pub expected: Expected,
}

/// Expected values carried as corpus metadata.  An expected `rank` with no
/// computed counterpart (general Waring rank is out of scope) is reported
/// as unchecked, never as a failure.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct Expected {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_h: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_ext: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rank: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub border_upper: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sch_lower: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DiffStatus {
    Match,
    Mismatch,
    Unchecked,
}

#[derive(Clone, Debug, Serialize)]
pub struct Diff {
    pub field: String,
    pub expected: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub computed: Option<usize>,
    pub status: DiffStatus,
}

#[derive(Clone, Debug)]
pub struct CorpusOutcome {
    pub name: String,
    pub report: Result<RankReport, String>,
    pub diffs: Vec<Diff>,
}

#[derive(Clone, Copy, Debug)]
pub struct CorpusParams {
    pub r_max: usize,
    pub seed: u64,
    pub threads: usize,
}

impl Default for CorpusParams {
    fn default() -> Self {
        CorpusParams { r_max: DEFAULT_R_MAX, seed: 0, threads: 1 }
    }
}

/// Evaluate a corpus; per-entry errors are collected and the run continues.
/// The output order matches the input order regardless of the thread count.
pub fn corpus_run(entries: &[CorpusEntry], params: CorpusParams) -> Vec<CorpusOutcome> {
    let threads = params.threads.max(1).min(entries.len().max(1));
    if threads <= 1 {
        return entries.iter().map(|e| run_entry(e, params)).collect();
    }
    let mut out: Vec<Option<CorpusOutcome>> = (0..entries.len()).map(|_| None).collect();
    std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for worker in 0..threads {
            let entries = &entries;
            handles.push(scope.spawn(move || {
                entries
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| i % threads == worker)
                    .map(|(i, e)| (i, run_entry(e, params)))
                    .collect::<Vec<_>>()
            }));
        }
        for h in handles {
            for (i, res) in h.join().expect("corpus worker panicked") {
                out[i] = Some(res);
            }
        }
    });
    out.into_iter().map(|o| o.expect("all entries run")).collect()
}

fn run_entry(entry: &CorpusEntry, params: CorpusParams) -> CorpusOutcome {
    let report = parse_homogeneous(&entry.polynomial, entry.n)
        .map_err(HierarchyError::from)
        .and_then(|f| rank_report(&f, params.r_max, params.seed));
    let mut diffs = Vec::new();
    if let Ok(rep) = &report {
        let mut push = |field: &str, expected: Option<usize>, computed: Option<usize>| {
            if let Some(e) = expected {
                let status = match computed {
                    Some(c) if c == e => DiffStatus::Match,
                    Some(_) => DiffStatus::Mismatch,
                    None => DiffStatus::Unchecked,
                };
                diffs.push(Diff { field: field.into(), expected: e, computed, status });
            }
        };
        push("r_h", entry.expected.r_h, Some(rep.r_h));
        push("r_ext", entry.expected.r_ext, rep.r_ext_upper);
        push("rank", entry.expected.rank, rep.r_exact.or(rep.r_upper));
        push("border_upper", entry.expected.border_upper, rep.r_border_upper);
        push("sch_lower", entry.expected.sch_lower, rep.sch_lower);
    }
    CorpusOutcome {
        name: entry.name.clone(),
        report: report.map_err(|e| e.to_string()),
        diffs,
    }
}
