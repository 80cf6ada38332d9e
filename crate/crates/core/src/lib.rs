//! Quaternion self-dual Hermitian random matrices.
//!
//! The crate is organised around five pieces:
//!
//! - [`quaternion`]: quaternion arithmetic and the embedding into 2×2 complex
//!   matrices.
//! - [`structure`]: dense 2n×2n block matrices, the Type-T / Type-I / Type-II
//!   block patterns, Schur-complement inversion and a randomized checker for
//!   the fact that inverses of Type-II matrices are Type-I.
//! - [`ensemble`]: samplers for self-dual matrices (GSE and non-Gaussian
//!   coefficient laws), the truncation / centralization / rescaling pipeline
//!   and the Lindeberg tail statistic.
//! - [`spectra`]: complex embedding, a Householder + implicit QL Hermitian
//!   eigensolver, eigenvalue pair deduplication, the semicircle law,
//!   Kolmogorov and Levy distances, Stieltjes transforms and resolvent
//!   diagnostics.
//! - [`harness`]: a seeded Monte Carlo driver producing convergence tables,
//!   plus the aggregated verification suite used by the `qsc` binary.
//!
//! Runnable walkthroughs for each area live under `examples/`.

pub mod ensemble;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod quaternion;
pub mod rng;
pub mod spectra;
pub mod structure;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use quaternion::{Complex2x2, Quaternion};
