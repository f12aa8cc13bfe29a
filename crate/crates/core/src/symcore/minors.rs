use super::matrix::{IndexSet, SymMatrix};
use super::scalar::{Rational, Scalar};
use crate::{Error, Result};

/// Anything whose principal minors can be evaluated in a fixed numeric mode.
///
/// Implemented by plain [`SymMatrix`] values and by [`ScaledRational`],
/// which represents matrices with irrational entries whose principal minors
/// are nevertheless rational.
pub trait PrincipalMinors: Send + Sync {
    type Scalar: Scalar;

    fn order(&self) -> usize;

    fn principal_minor(&self, alpha: &IndexSet) -> Result<Self::Scalar>;

    fn diagonal_entry(&self, i: usize) -> Self::Scalar;

    /// Nearest floating-point matrix.
    fn to_float(&self) -> SymMatrix<f64>;

    /// Principal submatrix in the same representation.
    fn restrict(&self, alpha: &IndexSet) -> Result<Self>
    where
        Self: Sized;

    fn determinant(&self) -> Self::Scalar {
        self.principal_minor(&IndexSet::full(self.order())).expect("full index set is always in range")
    }

    fn diagonal_product(&self) -> Self::Scalar {
        (0..self.order()).fold(Self::Scalar::one(), |acc, i| acc * self.diagonal_entry(i))
    }
}

impl<T: Scalar> PrincipalMinors for SymMatrix<T> {
    type Scalar = T;

    fn order(&self) -> usize {
        SymMatrix::order(self)
    }

    fn principal_minor(&self, alpha: &IndexSet) -> Result<T> {
        Ok(self.principal_submatrix(alpha)?.determinant())
    }

    fn diagonal_entry(&self, i: usize) -> T {
        self.get(i, i).clone()
    }

    fn to_float(&self) -> SymMatrix<f64> {
        self.to_f64()
    }

    fn restrict(&self, alpha: &IndexSet) -> Result<Self> {
        self.principal_submatrix(alpha)
    }
}

/// The matrix `D C D` with `C` rational symmetric and `D = diag(sqrt(d_i))`
/// for rational `d_i > 0`.
///
/// Entries `sqrt(d_i d_j) c_ij` may be irrational, but every principal minor
/// equals `prod_{i in alpha} d_i * det C[alpha]` and is exact.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledRational {
    core: SymMatrix<Rational>,
    scale_sq: Vec<Rational>,
}

impl ScaledRational {
    pub fn new(core: SymMatrix<Rational>, scale_sq: Vec<Rational>) -> Result<Self> {
        if scale_sq.len() != core.order() {
            return Err(Error::DimensionMismatch { expected: core.order(), got: scale_sq.len() });
        }
        if let Some(i) = scale_sq.iter().position(|d| !d.is_positive()) {
            return Err(Error::ParameterOutOfRange {
                name: "scale_sq",
                reason: format!("entry {} is not positive", i + 1),
            });
        }
        Ok(ScaledRational { core, scale_sq })
    }

    pub fn core(&self) -> &SymMatrix<Rational> {
        &self.core
    }

    pub fn scale_sq(&self) -> &[Rational] {
        &self.scale_sq
    }

    /// Exact square of entry `(i, j)`.
    pub fn entry_squared(&self, i: usize, j: usize) -> Rational {
        let c = self.core.get(i, j);
        self.scale_sq[i].clone() * self.scale_sq[j].clone() * c.clone() * c.clone()
    }

    /// The same matrix as a plain rational matrix, when every scale is a
    /// perfect square.
    pub fn to_rational(&self) -> Option<SymMatrix<Rational>> {
        let roots: Option<Vec<Rational>> = self.scale_sq.iter().map(Rational::sqrt).collect();
        self.core.congruence(&roots?).ok()
    }
}

impl PrincipalMinors for ScaledRational {
    type Scalar = Rational;

    fn order(&self) -> usize {
        self.core.order()
    }

    fn principal_minor(&self, alpha: &IndexSet) -> Result<Rational> {
        let det = self.core.principal_submatrix(alpha)?.determinant();
        Ok(alpha.iter().fold(det, |acc, i| acc * self.scale_sq[i].clone()))
    }

    fn diagonal_entry(&self, i: usize) -> Rational {
        self.scale_sq[i].clone() * self.core.get(i, i).clone()
    }

    /// Entries whose scale `d_i d_j` is a rational square (the diagonal in
    /// particular) are rounded from their exact value.
    fn to_float(&self) -> SymMatrix<f64> {
        SymMatrix::from_fn(self.order(), |i, j| {
            let c = self.core.get(i, j);
            let scale = self.scale_sq[i].clone() * self.scale_sq[j].clone();
            match scale.sqrt() {
                Some(root) => (root * c.clone()).to_f64(),
                None => c.to_f64() * scale.to_f64().sqrt(),
            }
        })
    }

    fn restrict(&self, alpha: &IndexSet) -> Result<Self> {
        Ok(ScaledRational {
            core: self.core.principal_submatrix(alpha)?,
            scale_sq: alpha.iter().map(|i| self.scale_sq[i].clone()).collect(),
        })
    }
}
