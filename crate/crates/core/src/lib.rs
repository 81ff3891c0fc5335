//! Growth (Poincaré) series of Kac-Moody Weyl groups.
//!
//! - [`cartan`]: generalized Cartan matrices, classification, weights and
//!   simple reflections.
//! - [`weylgrowth`]: level-by-level enumeration of the Weyl group through the
//!   orbit of the Weyl vector; growth series, parabolic coset series and
//!   canonical reduced words.
//! - [`polyseries`]: exact integer polynomials and truncated series, closed
//!   forms for finite and affine types.
//! - [`factorization`]: `P(G) = P(g) R` splittings, rational-function checks
//!   and denominator polynomials `Q` with `P(H) = P(G) / Q`.
//! - [`catalog`]: the shipped table of denominator polynomials for the
//!   hyperbolic algebras and per-entry verification.
//! - [`cli`]: the command-line front end.

pub mod cartan;
pub mod catalog;
pub mod cli;
pub mod factorization;
pub mod polyseries;
pub mod weylgrowth;
