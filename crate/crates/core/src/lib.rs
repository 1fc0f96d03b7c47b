//! Exact rational engine for classical orthogonal polynomials on quadratic
//! lattices `mu(t) = t^2 + c2 t + c3`.
//!
//! The crate is organised bottom-up:
//!
//! - [`lattice`]: lattice scalars `mu`, `f_n`, `g_n`.
//! - [`theta`]: polynomials in the theta basis and the divided-difference
//!   calculus (`D`, `S`, multiplication by `mu`).
//! - [`matrix`], [`family`], [`checks`]: truncated infinite matrices with
//!   validity tracking and the matrix characterization identities.
//! - [`bochner`]: the Bochner-type divided-difference equation and closed
//!   forms for the recurrence coefficients.
//! - [`families`]: Racah preset with an independent hypergeometric oracle,
//!   plus custom input documents.
//! - [`identities`]: randomized product-rule checks.
//! - [`cli`]: the `quadlat` command-line front end.

pub mod bochner;
pub mod checks;
pub mod cli;
pub mod error;
pub mod families;
pub mod family;
pub mod identities;
pub mod lattice;
pub mod matrix;
pub mod rational;
pub mod theta;

pub use bochner::BochnerData;
pub use checks::{CheckContext, CheckKind, CheckReport};
pub use error::{Error, Result};
pub use families::RacahParams;
pub use family::{PolyFamily, RecurrenceCoeffs};
pub use lattice::LatticeParams;
pub use matrix::TruncatedMatrix;
pub use rational::Rational;
pub use theta::{MuPoly, ThetaPoly};
