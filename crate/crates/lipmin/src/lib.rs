//! Lipschitz minorants of Lévy-process sample paths.
//!
//! Given a two-sided càdlàg path and a slope bound α, the α-Lipschitz
//! minorant is the greatest α-Lipschitz function dominated by the path; the
//! contact set is where the minorant touches it. This crate simulates the
//! processes, computes minorants and contact sets, slices paths into
//! excursions, samples excursions directly from their closed-form path
//! decompositions (Brownian case), evaluates the associated densities and
//! Laplace transforms, and cross-checks everything with a statistical
//! verification harness.
//!
//! The `lipmin` binary exposes the pieces as subcommands; `lipmin verify`
//! runs the named check suites and writes a machine-readable report.

// validations use `!(x > 0.0)` on purpose: it rejects NaN, which `x <= 0.0`
// would let through; reference constants keep their full source precision
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod azema;
pub mod cdf;
pub mod cli;
pub mod error;
pub mod excursion;
pub mod laws;
pub mod minorant;
pub mod paths;
pub mod quad;
pub mod report;
pub mod rng;
pub mod sampler;
pub mod special;
pub mod stats;
pub mod suite;

pub use error::{Error, Result};
pub use rng::RngStream;
