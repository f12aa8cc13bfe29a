//! Membership certificates and determinant lower bounds for
//! (n-1)-locally positive semidefinite matrices.
//!
//! A symmetric matrix is (n-1)-locally positive semidefinite when every
//! principal submatrix of order n-1 is PSD while the determinant is
//! strictly negative. Such matrices have exactly one negative eigenvalue,
//! and their determinants obey sharp lower bounds that mirror the classical
//! Hadamard, Fischer and Koteljanskii upper bounds for PSD matrices.
//!
//! The crate is organised as:
//!
//! - [`symcore`]: symmetric matrices in floating or exact rational mode,
//!   determinants, eigenvalues, Schur complements and principal minors.
//! - [`cone`]: PSD / PD / locally-PSD classification with witnesses.
//! - [`bounds`]: the extended and classical determinant inequalities, each
//!   evaluated as a [`bounds::BoundVerdict`] rather than assumed.
//! - [`families`]: the extremal and counterexample matrix families.
//! - [`harness`]: seeded cone sampling, bound fuzzing and identity checks.
//! - [`cli`]: the `locps` command-line front end and its JSON formats.

pub mod bounds;
pub mod cli;
pub mod cone;
mod error;
pub mod families;
pub mod harness;
pub mod symcore;

pub use error::{Error, Result};
