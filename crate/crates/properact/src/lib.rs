//! Properness of pairs of subgroups of real reductive matrix groups.
//!
//! The library decides whether a pair of closed subgroups `(H1, H2)` of
//! `SL(N, R)` or `GL(N, R)` acts properly on the corresponding homogeneous
//! space, by reducing the question to a bounded-intersection test on the
//! Cartan-projection images `a(H1)`, `a(H2)` inside the flat `a` (a finite
//! union of linear subspaces in the reductive case).  Alongside the decision
//! engine it ships the metric-geometry machinery the reduction rests on, in
//! numerically checkable form:
//!
//! - [`numerics`]: dense small-matrix decompositions, polyhedral-cone
//!   primitives and the shared tolerance policy;
//! - [`flats`]: the set calculus (distances, closed neighborhoods, HBI and
//!   bounded-Hausdorff-equivalence decisions) on flat spaces with a finite
//!   orthogonal group action;
//! - [`cartan`]: Cartan projection, KAK decomposition and construction of
//!   `a(H)` from subgroup specifications;
//! - [`quotient`]: orbit quotients `K\M`, sections, and the non-expanding
//!   map conditions they satisfy;
//! - [`catzero`]: CAT(0) model spaces, comparison-triangle checks,
//!   asymptotic rays and explicit Property-(S) witnesses;
//! - [`properness`]: the decision engine, equivalence classification,
//!   rank-based Calabi–Markus reports, and cross-validation suites;
//! - [`cli`]: problem/report file formats and command dispatch.

pub mod catzero;
pub mod cartan;
pub mod cli;
pub mod flats;
pub mod numerics;
pub mod properness;
pub mod quotient;
pub mod sample;

mod error;

pub use error::{Error, Result};
