//! Exact construction and verification of triangular dynamical r-matrices over
//! possibly nonabelian base subalgebras, and order-by-order checks of their
//! twist quantizations.
//!
//! Module map:
//! - [`exact`]: rationals, polynomials, rational expressions, ℏ-series, zero tests
//! - [`liealg`]: Lie algebras by structure constants, reductive decompositions, builtins
//! - [`exterior`]: multivectors, the Schouten bracket, adjoint action
//! - [`dynr`]: r-matrix construction, closed forms, CDYBE and equivariance residuals
//! - [`pbw`]: enveloping algebras, the PBW star product, shifts, coproduct and counit
//! - [`qdybe`]: ℏ-series tensors, twisted cocycle, QDYBE, Φ and the twist solver
//! - [`cli`]: file formats, reports and the command runner

#![allow(clippy::needless_range_loop, clippy::type_complexity)]

pub mod cli;
pub mod dynr;
pub mod error;
pub mod exact;
pub mod exterior;
pub mod liealg;
pub mod pbw;
pub mod qdybe;

pub use error::{Error, Result};
