//! Command-line front end: every operation of the library behind a
//! subcommand, with deterministic JSON on stdout and diagnostics on stderr.
//!
//! Exit codes: 0 success, 1 domain errors (parse failures, violated
//! preconditions), 2 internal inconsistency (a rank hierarchy violation,
//! which indicates a bug rather than bad input).

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::PathBuf;

use crate::apolarity;
use crate::catalecticant;
use crate::flat_extension::{self, DecompositionTerms};
use crate::hierarchy::{self, CorpusParams, HierarchyError, RankReport};
use crate::monomial_decomp::{self, VerifyMode, WaringDecomposition};
use crate::poly::cyclo::Cyclotomic;
use crate::poly::parse::parse_homogeneous;
use crate::poly::scalar::rational_to_f64;
use crate::poly::{rational_from_string, rational_to_string, LinearForm, QPoly};

pub const SCHEMA: &str = "apolar-rank/1";

#[derive(Parser)]
#[command(
    name = "apolar-rank",
    about = "Exact rank certificates for symmetric tensors",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Catalecticant matrix and rank at a given order.
    Cata {
        /// Highest variable index (variables are x0..xn).
        #[arg(short)]
        n: usize,
        /// Catalecticant order.
        #[arg(short)]
        k: u32,
        /// Polynomial, inline or @file.
        poly: String,
    },
    /// Hilbert function of S/(f-perp).
    Hilbert {
        #[arg(short)]
        n: usize,
        poly: String,
    },
    /// Basis of the degree-k graded piece of the apolar ideal.
    Apolar {
        #[arg(short)]
        n: usize,
        #[arg(short)]
        k: u32,
        poly: String,
    },
    /// Membership in the rank-r catalecticant locus at order i.
    Gamma {
        #[arg(short)]
        n: usize,
        #[arg(short)]
        i: u32,
        #[arg(short)]
        r: usize,
        poly: String,
    },
    /// Monomial ranks, root-of-unity decompositions and border families.
    Monomial {
        /// Exponent vector, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        alpha: Vec<u32>,
        /// Highest variable index; must match the alpha length when given.
        #[arg(short)]
        n: Option<usize>,
        /// Emit the exact Waring decomposition.
        #[arg(long)]
        decompose: bool,
        /// Emit the border-rank epsilon family.
        #[arg(long)]
        border: bool,
        /// Epsilon, a rational like 1, 1/2, 3.
        #[arg(long, default_value = "1")]
        eps: String,
    },
    /// Extension-rank search with certificate and recovery.
    Extend {
        #[arg(short)]
        n: usize,
        poly: String,
        #[arg(long, default_value_t = hierarchy::DEFAULT_R_MAX)]
        r_max: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Exact Waring rank of a binary form.
    Sylvester {
        #[arg(short, default_value_t = 1)]
        n: usize,
        poly: String,
    },
    /// Full rank report with hierarchy assertions.
    Report {
        #[arg(short)]
        n: usize,
        poly: String,
        #[arg(long, default_value_t = hierarchy::DEFAULT_R_MAX)]
        r_max: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run a JSON corpus of named polynomials with expected values.
    Corpus {
        file: PathBuf,
        #[arg(long, default_value_t = hierarchy::DEFAULT_R_MAX)]
        r_max: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Re-verify an emitted decomposition JSON against a target polynomial.
    Verify {
        #[arg(short)]
        n: usize,
        /// Target polynomial, inline or @file.
        target: String,
        /// Decomposition JSON file (as emitted by `monomial --decompose`).
        #[arg(long)]
        dec: PathBuf,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
}

pub fn run(args: Vec<String>) -> i32 {
    let mut argv = vec!["apolar-rank".to_string()];
    argv.extend(args);
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            // help and version requests are success, anything else is a
            // domain error
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(CliError::Domain(msg)) => {
            eprintln!("error: {}", msg);
            1
        }
        Err(CliError::Internal(msg)) => {
            eprintln!("internal inconsistency: {}", msg);
            2
        }
    }
}

#[derive(Debug)]
enum CliError {
    Domain(String),
    Internal(String),
}

impl From<HierarchyError> for CliError {
    fn from(e: HierarchyError) -> Self {
        match e {
            HierarchyError::Inconsistency(m) => CliError::Internal(m),
            other => CliError::Domain(other.to_string()),
        }
    }
}

fn domain<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Domain(e.to_string())
}

fn read_poly_arg(arg: &str, n: usize) -> Result<QPoly, CliError> {
    let text = if let Some(path) = arg.strip_prefix('@') {
        std::fs::read_to_string(path).map_err(domain)?
    } else {
        arg.to_string()
    };
    parse_homogeneous(text.trim(), n).map_err(domain)
}

fn emit<T: Serialize>(format: Format, value: &T, text: impl FnOnce() -> String) {
    let out = match format {
        Format::Json => serde_json::to_string_pretty(value).expect("serializable"),
        Format::Text => text(),
    };
    let mut stdout = std::io::stdout().lock();
    let _ = writeln!(stdout, "{}", out);
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    let format = cli.format;
    match cli.cmd {
        Command::Cata { n, k, poly } => {
            let f = read_poly_arg(&poly, n)?;
            let c = catalecticant::build(&f, k).map_err(domain)?;
            let rank = c.rank();
            let dto = CataJson {
                schema: SCHEMA,
                k,
                degree: c.degree,
                rows: c.row_labels.iter().map(|m| m.to_string()).collect(),
                cols: c.col_labels.iter().map(|m| m.to_string()).collect(),
                entries: (0..c.matrix.rows())
                    .map(|i| {
                        (0..c.matrix.cols())
                            .map(|j| rational_to_string(c.matrix.at(i, j)))
                            .collect()
                    })
                    .collect(),
                rank,
            };
            emit(format, &dto, || {
                format!("catalecticant order {}: {}x{}, rank {}", k, dto.rows.len(), dto.cols.len(), rank)
            });
        }
        Command::Hilbert { n, poly } => {
            let f = read_poly_arg(&poly, n)?;
            let h = apolarity::hilbert_function(&f).map_err(domain)?;
            let dto = HilbertJson { schema: SCHEMA, values: h.values.clone() };
            emit(format, &dto, || format!("hilbert function: {:?}", h.values));
        }
        Command::Apolar { n, k, poly } => {
            let f = read_poly_arg(&poly, n)?;
            let c = apolarity::apolar_component(&f, k).map_err(domain)?;
            let dto = ApolarJson {
                schema: SCHEMA,
                k,
                dim: c.dim(),
                ambient_dimension: c.ambient_dimension,
                basis: c.basis.iter().map(|p| p.to_string_pretty()).collect(),
            };
            emit(format, &dto, || {
                format!(
                    "apolar component degree {}: dimension {} of {}\n{}",
                    k,
                    dto.dim,
                    dto.ambient_dimension,
                    dto.basis.join("\n")
                )
            });
        }
        Command::Gamma { n, i, r, poly } => {
            let f = read_poly_arg(&poly, n)?;
            let rank_i = catalecticant::rank(&f, i).map_err(domain)?;
            let dto = GammaJson { schema: SCHEMA, i, r, rank: rank_i, member: rank_i <= r };
            emit(format, &dto, || {
                format!("rank H^({},{}) = {}; member of Gamma_{}: {}", i, f.degree() - i, rank_i, r, dto.member)
            });
        }
        Command::Monomial { alpha, n, decompose, border, eps } => {
            if let Some(n) = n {
                if alpha.len() != n + 1 {
                    return Err(CliError::Domain(format!(
                        "alpha has {} entries but n = {} implies {}",
                        alpha.len(),
                        n,
                        n + 1
                    )));
                }
            }
            let eps = rational_from_string(&eps)
                .ok_or_else(|| CliError::Domain("bad rational for --eps".into()))?;
            if decompose {
                let dec = monomial_decomp::monomial_waring(&alpha, &eps).map_err(domain)?;
                let report = monomial_decomp::verify(&dec, VerifyMode::Exact, 1e-9);
                let dto = decomposition_json(&dec, &report);
                emit(format, &dto, || {
                    format!(
                        "{} terms, exact: {}, residual {:.3e}",
                        dec.len(),
                        report.exact_match.unwrap_or(false),
                        report.residual
                    )
                });
            } else if border {
                let fam = monomial_decomp::monomial_border_family(&alpha).map_err(domain)?;
                let dec = fam.instantiate(&eps).map_err(domain)?;
                let report = monomial_decomp::verify(&dec, VerifyMode::Numeric, 1e-9);
                let dto = BorderJson {
                    schema: SCHEMA,
                    alpha: alpha.clone(),
                    terms: fam.term_count(),
                    eps: rational_to_string(&eps),
                    limit: fam.limit.to_string_pretty(),
                    remainder: fam.remainder(&eps).to_string_pretty(),
                    remainder_norm: fam.remainder_norm(&eps),
                    family: decomposition_json(&dec, &report),
                };
                emit(format, &dto, || {
                    format!(
                        "border family: {} terms, remainder norm {:.3e} at eps = {}",
                        dto.terms, dto.remainder_norm, dto.eps
                    )
                });
            } else {
                let dto = MonomialRankJson {
                    schema: SCHEMA,
                    alpha: alpha.clone(),
                    rank: monomial_decomp::monomial_rank(&alpha),
                    border_size: monomial_decomp::monomial_border_size(&alpha),
                    scheme_length: monomial_decomp::monomial_border_size(&alpha),
                };
                emit(format, &dto, || {
                    format!(
                        "rank {} / border bound {} / scheme length {}",
                        dto.rank, dto.border_size, dto.scheme_length
                    )
                });
            }
        }
        Command::Extend { n, poly, r_max, seed } => {
            let f = read_poly_arg(&poly, n)?;
            let out = flat_extension::extension_rank_search(&f, r_max, seed).map_err(domain)?;
            let dto = extend_json(&out);
            emit(format, &dto, || match &out.result {
                Some(s) => format!("rank {} certified (r_H = {})", s.rank, out.catalecticant_rank),
                None => format!("inconclusive up to r_max = {} (r_H = {})", r_max, out.catalecticant_rank),
            });
        }
        Command::Sylvester { n, poly } => {
            let f = read_poly_arg(&poly, n)?;
            let rank = hierarchy::sylvester_binary_rank(&f)?;
            let dto = SylvesterJson { schema: SCHEMA, rank };
            emit(format, &dto, || format!("binary rank {}", rank));
        }
        Command::Report { n, poly, r_max, seed } => {
            let f = read_poly_arg(&poly, n)?;
            let rep = hierarchy::rank_report(&f, r_max, seed)?;
            let dto = report_json(&rep);
            emit(format, &dto, || report_text(&rep));
        }
        Command::Corpus { file, r_max, seed } => {
            let text = std::fs::read_to_string(&file).map_err(domain)?;
            let entries: Vec<hierarchy::CorpusEntry> =
                serde_json::from_str(&text).map_err(domain)?;
            let threads = std::env::var("APOLAR_RANK_THREADS")
                .ok()
                .and_then(|v| v.parse().ok())
                .unwrap_or(1);
            let outcomes =
                hierarchy::corpus_run(&entries, CorpusParams { r_max, seed, threads });
            let mut mismatches = 0usize;
            let mut unchecked = 0usize;
            let mut errors = 0usize;
            let entries_json: Vec<CorpusEntryJson> = outcomes
                .iter()
                .map(|o| {
                    for d in &o.diffs {
                        match d.status {
                            hierarchy::DiffStatus::Mismatch => mismatches += 1,
                            hierarchy::DiffStatus::Unchecked => unchecked += 1,
                            hierarchy::DiffStatus::Match => {}
                        }
                    }
                    match &o.report {
                        Ok(rep) => CorpusEntryJson {
                            name: o.name.clone(),
                            report: Some(report_json(rep)),
                            error: None,
                            diffs: o.diffs.clone(),
                        },
                        Err(e) => {
                            errors += 1;
                            CorpusEntryJson {
                                name: o.name.clone(),
                                report: None,
                                error: Some(e.clone()),
                                diffs: o.diffs.clone(),
                            }
                        }
                    }
                })
                .collect();
            let dto = CorpusJson {
                schema: SCHEMA,
                seed,
                entries: entries_json,
                summary: CorpusSummary {
                    total: outcomes.len(),
                    errors,
                    mismatches,
                    unchecked,
                    all_expectations_met: mismatches == 0 && errors == 0,
                },
            };
            emit(format, &dto, || {
                format!(
                    "{} entries, {} errors, {} mismatches, {} unchecked",
                    dto.summary.total, errors, mismatches, unchecked
                )
            });
            if mismatches > 0 {
                return Err(CliError::Domain(format!("{} expectation mismatches", mismatches)));
            }
        }
        Command::Verify { n, target, dec, tol } => {
            let f = read_poly_arg(&target, n)?;
            let text = std::fs::read_to_string(&dec).map_err(domain)?;
            let dto: DecompositionJson = serde_json::from_str(&text).map_err(domain)?;
            let dec = decomposition_from_json(&dto, &f)?;
            let report = monomial_decomp::verify(&dec, VerifyMode::Exact, tol);
            let out = VerifyJson {
                schema: SCHEMA,
                verified: report.passed(tol),
                exact: report.exact_match,
                residual: report.residual,
                term_count: report.term_count,
                apolar_cross_check: report.apolar_cross_check,
            };
            let ok = out.verified;
            emit(format, &out, || {
                format!("verified: {} (residual {:.3e})", out.verified, out.residual)
            });
            if !ok {
                return Err(CliError::Domain("decomposition failed verification".into()));
            }
        }
    }
    Ok(())
}

// --- wire formats -------------------------------------------------------

#[derive(Serialize)]
struct CataJson {
    schema: &'static str,
    k: u32,
    degree: u32,
    rows: Vec<String>,
    cols: Vec<String>,
    entries: Vec<Vec<String>>,
    rank: usize,
}

#[derive(Serialize)]
struct HilbertJson {
    schema: &'static str,
    values: Vec<usize>,
}

#[derive(Serialize)]
struct ApolarJson {
    schema: &'static str,
    k: u32,
    dim: usize,
    ambient_dimension: usize,
    basis: Vec<String>,
}

#[derive(Serialize)]
struct GammaJson {
    schema: &'static str,
    i: u32,
    r: usize,
    rank: usize,
    member: bool,
}

#[derive(Serialize)]
struct MonomialRankJson {
    schema: &'static str,
    alpha: Vec<u32>,
    rank: u64,
    border_size: u64,
    scheme_length: u64,
}

/// Cyclotomic scalar on the wire: coefficients of the powers of the
/// order-`n` root of unity.
#[derive(Serialize, Deserialize, Clone)]
pub struct CycloJson {
    pub cyclo: Vec<String>,
    pub n: u32,
}

#[derive(Serialize, Deserialize, Clone)]
pub struct DecTermJson {
    pub weight: CycloJson,
    pub form: Vec<CycloJson>,
}

#[derive(Serialize, Deserialize)]
pub struct DecompositionJson {
    pub schema: String,
    pub degree: u32,
    pub terms: Vec<DecTermJson>,
    pub verified: bool,
    pub residual: f64,
}

#[derive(Serialize)]
struct BorderJson {
    schema: &'static str,
    alpha: Vec<u32>,
    terms: u64,
    eps: String,
    limit: String,
    remainder: String,
    remainder_norm: f64,
    family: DecompositionJson,
}

#[derive(Serialize)]
struct SylvesterJson {
    schema: &'static str,
    rank: usize,
}

#[derive(Serialize)]
struct ExtendJson {
    schema: &'static str,
    catalecticant_rank: usize,
    conclusive: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    rank: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    basis: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    basis_dual: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mult_matrices: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    exact: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    points: Option<Vec<PointJson>>,
    attempts: u32,
}

#[derive(Serialize)]
struct PointJson {
    /// Affine coordinates as [re, im] pairs.
    coords: Vec<[f64; 2]>,
    multiplicity: usize,
}

#[derive(Serialize, Clone)]
struct ReportJson {
    schema: &'static str,
    r_h: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    r_ext_upper: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    r_upper: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    r_border_upper: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    r_exact: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sch_lower: Option<usize>,
    hilbert: Vec<usize>,
    witnesses: WitnessJson,
}

#[derive(Serialize, Clone)]
struct WitnessJson {
    #[serde(skip_serializing_if = "Option::is_none")]
    monomial_alpha: Option<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    monomial_waring_exact: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    border_family: Option<BorderWitnessJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    colon_basis: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    extension: Option<ExtensionWitnessJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    waring_recovered: Option<WaringRecoveredJson>,
}

#[derive(Serialize, Clone)]
struct BorderWitnessJson {
    terms: u64,
    eps: String,
    residual: f64,
}

#[derive(Serialize, Clone)]
struct ExtensionWitnessJson {
    rank: usize,
    basis: Vec<String>,
    mult_matrices: bool,
    exact: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    num_points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    multiplicities: Option<Vec<usize>>,
    attempts: u32,
}

#[derive(Serialize, Clone)]
struct WaringRecoveredJson {
    terms: usize,
    residual: f64,
}

#[derive(Serialize)]
struct CorpusEntryJson {
    name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    report: Option<ReportJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    diffs: Vec<hierarchy::Diff>,
}

#[derive(Serialize)]
struct CorpusSummary {
    total: usize,
    errors: usize,
    mismatches: usize,
    unchecked: usize,
    all_expectations_met: bool,
}

#[derive(Serialize)]
struct CorpusJson {
    schema: &'static str,
    seed: u64,
    entries: Vec<CorpusEntryJson>,
    summary: CorpusSummary,
}

#[derive(Serialize)]
struct VerifyJson {
    schema: &'static str,
    verified: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    exact: Option<bool>,
    residual: f64,
    term_count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    apolar_cross_check: Option<bool>,
}

fn cyclo_json(c: &Cyclotomic) -> CycloJson {
    CycloJson {
        cyclo: c.coeffs().iter().map(rational_to_string).collect(),
        n: c.order(),
    }
}

fn cyclo_from_json(j: &CycloJson) -> Result<Cyclotomic, CliError> {
    if j.n == 0 || j.cyclo.len() != j.n as usize {
        return Err(CliError::Domain("bad cyclotomic payload".into()));
    }
    let mut z = Cyclotomic::zero(j.n);
    let mut out = Vec::with_capacity(j.cyclo.len());
    for s in &j.cyclo {
        out.push(
            rational_from_string(s)
                .ok_or_else(|| CliError::Domain(format!("bad rational '{}'", s)))?,
        );
    }
    for (k, v) in out.into_iter().enumerate() {
        z = z.add(&Cyclotomic::root_of_unity(j.n, k as u32).scale(&v));
    }
    Ok(z)
}

pub(crate) fn decomposition_json(
    dec: &WaringDecomposition<Cyclotomic>,
    report: &monomial_decomp::VerifyReport,
) -> DecompositionJson {
    DecompositionJson {
        schema: SCHEMA.to_string(),
        degree: dec.degree,
        terms: dec
            .terms
            .iter()
            .map(|(w, k)| DecTermJson {
                weight: cyclo_json(w),
                form: k.coeffs.iter().map(cyclo_json).collect(),
            })
            .collect(),
        verified: report.passed(1e-9),
        residual: report.residual,
    }
}

fn decomposition_from_json(
    dto: &DecompositionJson,
    target: &QPoly,
) -> Result<WaringDecomposition<Cyclotomic>, CliError> {
    let mut terms = Vec::with_capacity(dto.terms.len());
    for t in &dto.terms {
        if t.form.len() != target.nvars() {
            return Err(CliError::Domain(
                "form length does not match the variable count".into(),
            ));
        }
        let w = cyclo_from_json(&t.weight)?;
        let coeffs = t
            .form
            .iter()
            .map(cyclo_from_json)
            .collect::<Result<Vec<_>, _>>()?;
        terms.push((w, LinearForm::new(coeffs)));
    }
    Ok(WaringDecomposition { degree: dto.degree, terms, target: target.clone() })
}

fn extend_json(out: &flat_extension::SearchOutcome) -> ExtendJson {
    match &out.result {
        None => ExtendJson {
            schema: SCHEMA,
            catalecticant_rank: out.catalecticant_rank,
            conclusive: false,
            rank: None,
            basis: None,
            basis_dual: None,
            mult_matrices: None,
            exact: None,
            points: None,
            attempts: out.attempts_used,
        },
        Some(s) => {
            let points = s.decomposition.as_ref().map(|dec| {
                let mults = dec.multiplicities();
                let coords: Vec<Vec<[f64; 2]>> = match &dec.terms {
                    DecompositionTerms::Exact(ts) => ts
                        .iter()
                        .map(|t| {
                            t.point
                                .iter()
                                .map(|c| [rational_to_f64(c), 0.0])
                                .collect()
                        })
                        .collect(),
                    DecompositionTerms::Numeric(ts) => ts
                        .iter()
                        .map(|t| t.point.iter().map(|c| [c.re, c.im]).collect())
                        .collect(),
                };
                coords
                    .into_iter()
                    .zip(mults)
                    .map(|(coords, multiplicity)| PointJson { coords, multiplicity })
                    .collect()
            });
            ExtendJson {
                schema: SCHEMA,
                catalecticant_rank: out.catalecticant_rank,
                conclusive: true,
                rank: Some(s.rank),
                basis: Some(s.certificate.basis.iter().map(|m| m.to_string_with_offset(1)).collect()),
                basis_dual: Some(
                    s.certificate
                        .basis_dual
                        .iter()
                        .map(|m| m.to_string_with_offset(1))
                        .collect(),
                ),
                mult_matrices: Some(s.certificate.mult_matrices.is_some()),
                exact: Some(s.exact),
                points,
                attempts: out.attempts_used,
            }
        }
    }
}

/// Serialized report for embedders (the same document `report` prints).
pub fn report_json_string(rep: &RankReport) -> String {
    serde_json::to_string_pretty(&report_json(rep)).expect("serializable")
}

/// Serialized decomposition with its verification outcome, as emitted by
/// `monomial --decompose` and accepted by `verify`.
pub fn decomposition_json_string(
    dec: &WaringDecomposition<Cyclotomic>,
    report: &monomial_decomp::VerifyReport,
) -> String {
    serde_json::to_string_pretty(&decomposition_json(dec, report)).expect("serializable")
}

fn report_json(rep: &RankReport) -> ReportJson {
    ReportJson {
        schema: SCHEMA,
        r_h: rep.r_h,
        r_ext_upper: rep.r_ext_upper,
        r_upper: rep.r_upper,
        r_border_upper: rep.r_border_upper,
        r_exact: rep.r_exact,
        sch_lower: rep.sch_lower,
        hilbert: rep.witnesses.hilbert.clone(),
        witnesses: WitnessJson {
            monomial_alpha: rep.witnesses.monomial_alpha.clone(),
            monomial_waring_exact: rep.witnesses.monomial_waring_exact,
            border_family: rep
                .witnesses
                .border_family
                .as_ref()
                .map(|(t, e, r)| BorderWitnessJson {
                    terms: *t,
                    eps: e.clone(),
                    residual: *r,
                }),
            colon_basis: rep.witnesses.colon_basis.clone(),
            extension: rep.witnesses.extension.as_ref().map(|e| ExtensionWitnessJson {
                rank: e.rank,
                basis: e.basis.clone(),
                mult_matrices: e.mult_matrices,
                exact: e.exact,
                num_points: e.num_points,
                multiplicities: e.multiplicities.clone(),
                attempts: e.attempts,
            }),
            waring_recovered: rep
                .witnesses
                .waring_recovered
                .map(|(t, r)| WaringRecoveredJson { terms: t, residual: r }),
        },
    }
}

fn report_text(rep: &RankReport) -> String {
    let mut s = format!("r_H = {}\n", rep.r_h);
    let opt = |name: &str, v: Option<usize>| match v {
        Some(v) => format!("{} = {}\n", name, v),
        None => String::new(),
    };
    s += &opt("r_ext_upper", rep.r_ext_upper);
    s += &opt("r_upper", rep.r_upper);
    s += &opt("r_border_upper", rep.r_border_upper);
    s += &opt("r_exact", rep.r_exact);
    s += &opt("sch_lower", rep.sch_lower);
    s += &format!("hilbert = {:?}", rep.witnesses.hilbert);
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    #[test]
    fn cyclo_json_round_trip() {
        let z = Cyclotomic::root_of_unity(6, 1)
            .add(&Cyclotomic::from_rational(BigRational::new(3.into(), 2.into())));
        let j = cyclo_json(&z);
        let back = cyclo_from_json(&j).unwrap();
        assert_eq!(z, back);
    }
}
