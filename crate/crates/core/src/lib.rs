//! Exact-arithmetic toolkit for the rank stratification of symmetric tensors.
//!
//! A homogeneous polynomial `f` of degree `d` carries several notions of rank:
//! the catalecticant rank (maximal rank of its catalecticant matrices), the
//! Waring rank (shortest sum of d-th powers of linear forms), the border rank
//! (limits of low-rank forms), and the scheme/generalized/flat-extension rank
//! (shortest apolar zero-dimensional scheme).  This crate computes exact
//! certificates for the pieces of that hierarchy that are decidable at desk
//! scale: catalecticant ranks over the rationals, closed-form root-of-unity
//! decompositions of monomials, truncated-Hankel flat extensions with
//! multiplication-matrix certificates, Sylvester's algorithm for binary forms,
//! and the saturation obstruction that separates border rank from smoothable
//! rank.
//!
//! All certifying arithmetic is exact (big rationals, cyclotomic numbers);
//! floating point appears only in the numeric recovery of decomposition points
//! and in cross-checks, never in a rank claim.

pub mod poly;
pub mod linalg;
pub mod apolarity;
pub mod catalecticant;
pub mod monomial_decomp;
pub mod numeric;
pub mod flat_extension;
pub mod hierarchy;
pub mod cli;

pub use poly::{Monomial, Polynomial, DualElement, LinearForm, PointDiffTerm};
pub use poly::cyclo::Cyclotomic;
pub use poly::parse::{parse, parse_homogeneous, ParseError};
