//! Symmetric matrices and the elementary kernels built on them:
//! principal submatrices, determinants (elimination and cofactor oracle),
//! eigenvalues, Schur complements, diagonal normalization and principal
//! minor sums.

mod eigen;
mod matrix;
mod minors;
mod oracle;
mod scalar;
mod schur;

pub use eigen::{eigen_decomposition, elementary_symmetric, EigenDecomposition, Spectrum};
pub use matrix::{IndexSet, SymMatrix};
pub use minors::{PrincipalMinors, ScaledRational};
pub use oracle::{all_principal_minors, cofactor_determinant, COFACTOR_MAX_ORDER};
pub use scalar::{Mode, Number, Rational, Scalar};
pub use schur::{normalize_unit_diagonal, schur_complement, sum_principal_minors, MINOR_SUM_MAX_ORDER};
