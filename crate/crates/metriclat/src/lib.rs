//! Numerical operator theory around metric operators, at desk scale.
//!
//! A *metric operator* is a strictly positive self-adjoint operator `G`. It
//! induces a new inner product `<G., .>`, a weighted Hilbert space `H(G)`, and
//! through its powers and lattice combinations a whole family of spaces in
//! which non-self-adjoint operators can become Hermitian again. This crate
//! realizes that machinery on finite-dimensional and discretized models:
//!
//! - [`opcore`]: dense complex eigendecompositions, fractional operator
//!   powers, operator norms, numerical range.
//! - [`metric`]: validated metric operators, weighted inner products, the
//!   regularization `R_G = I + G`, and an exact growth-symbol calculus for
//!   diagonal models of unbounded operators.
//! - [`lattice`]: wedge/vee combinations, projective and inductive norms,
//!   embedding constants, and the nine-node lattice generated by a single
//!   metric.
//! - [`similarity`]: intertwining checks, the similarity/quasi-similarity
//!   hierarchy, spectral comparison, resolvent intertwining, Williams'
//!   positivity criterion.
//! - [`quasiherm`]: quasi-Hermiticity diagnostics, metric adjoints,
//!   symmetrization `K = G^{1/2} A G^{-1/2}`, generalized spectral families,
//!   and the physical-Hamiltonian construction.
//! - [`riesz`]: Riesz systems built from an invertible `T`, the metric pair
//!   `S_phi`, `S_psi`, and the diagonalizable operator family `A^alpha`.
//! - [`pipengine`]: representative norms between weighted spaces, operator
//!   profiles over a lattice, KLMN-style self-adjoint restriction from a form
//!   pair, semi-similarity couples.
//! - [`scenarios`]: reproducible discretizations of concrete models (rank-one
//!   intertwining pairs, weighted-L2 lattices, a Robin half-line operator, the
//!   shifted harmonic oscillator).
//!
//! The `metriclat` binary drives all of it from the command line; see the
//! guide under `book/` for a narrative walkthrough with runnable snippets.

// Negated float comparisons like `!(c > 0.0)` reject NaN along with the
// out-of-range values; the `partial_cmp` rewrite clippy suggests does not.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Index loops over square verdict tables read better than iterator chains.
#![allow(clippy::needless_range_loop)]

extern crate blas_src;

pub mod error;
pub mod opcore;
pub mod sampling;
pub mod symbol;

pub mod metric;

pub mod lattice;
pub mod pipengine;
pub mod quasiherm;
pub mod riesz;
pub mod similarity;

pub mod report;
pub mod scenarios;

pub use error::{Error, Result};
pub use opcore::{CMatrix, CVector};

// The guide chapters double as doc-tests: every fenced Rust block below is
// compiled and run by `cargo test --doc`, which keeps the book honest.
#[doc = include_str!("../../../book/src/introduction.md")]
pub mod _guide_introduction {}
#[doc = include_str!("../../../book/src/metric-operators.md")]
pub mod _guide_metric_operators {}
#[doc = include_str!("../../../book/src/lattice.md")]
pub mod _guide_lattice {}
#[doc = include_str!("../../../book/src/similarity.md")]
pub mod _guide_similarity {}
#[doc = include_str!("../../../book/src/quasi-hermitian.md")]
pub mod _guide_quasi_hermitian {}
#[doc = include_str!("../../../book/src/riesz.md")]
pub mod _guide_riesz {}
#[doc = include_str!("../../../book/src/pip-profiles.md")]
pub mod _guide_pip_profiles {}
#[doc = include_str!("../../../book/src/scenarios.md")]
pub mod _guide_scenarios {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod _guide_cli {}
