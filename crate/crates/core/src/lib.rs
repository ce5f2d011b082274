//! Exact combinatorics of tight, oblique and free tensor supports.
//!
//! A support is a set of index triples inside `[a] x [b] x [c]`; a tensor is a
//! support decorated with exact rational coefficients. On top of those two
//! types the crate provides:
//!
//! - [`constructions`]: the catalog of explicit tensors and supports
//!   (maximal tight and free supports, matrix multiplication, Coppersmith-Winograd,
//!   the secant tensor `T_std,m`, and two 4x4x4 counterexamples),
//! - [`deciders`]: exact tight / oblique / free deciders with certificates,
//!   the oblique size bound and the census of maximal antichains in `[3]^3`,
//! - [`symmetry`]: the annihilator Lie algebra of a tensor by exact linear
//!   algebra, support-span stabilizers, variety dimension formulas and the
//!   direct-sum / Kronecker propagation checks,
//! - [`compress`]: coordinate compressibility, multicompressibility and
//!   minimum slice covers,
//! - [`spectral`]: support functionals evaluated at coordinate flags,
//! - [`arrangement`]: line arrangements induced by tight witnesses, their
//!   joints and SVG rendering.
//!
//! Everything outside [`spectral`] is exact: coefficients are arbitrary
//! precision rationals and all set outputs are canonically sorted.

pub mod arrangement;
pub mod compress;
pub mod constructions;
pub mod deciders;
pub mod error;
pub mod io;
pub mod linalg;
pub mod reproduce;
pub mod spectral;
pub mod symmetry;
#[cfg(test)]
mod strategies;
pub mod tensor;

pub use error::{Error, Result};
pub use tensor::{AxisPermutations, Rational, Shape, Support, Tensor, Triple};
