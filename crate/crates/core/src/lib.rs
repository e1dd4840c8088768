//! Verification toolkit for matrix rearrangement and trace inequalities.
//!
//! The crate is organised bottom-up:
//!
//! * [`linalg`]: complex matrices, Hermitian spectra, `|A|`, powers, Schatten norms.
//! * [`rearrange`]: the diagonal rearrangements `Σ↑`, `Σ↓` and the layer-cake decomposition.
//! * [`catalog`]: one checker per inequality, plus the machine-readable registry.
//! * [`integral`]: quadrature realisation of the integral representation of `C^p`.
//! * [`ensembles`]: seeded generators for every hypothesis class.
//! * [`hunter`]: random-restart counterexample search with replayable witnesses.
//! * [`suite`]: seeded verification suites over the proved statements.

// `!(x > 0.0)` is how NaN gets rejected alongside out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod catalog;
pub mod ensembles;
pub mod error;
pub mod hunter;
pub mod integral;
pub mod linalg;
pub mod rearrange;
pub mod report;
pub mod suite;
pub mod tolerances;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, PsdMatrix, SpectralDecomposition, C64};
pub use report::{InequalityReport, Verdict};
