use super::matrix::{IndexSet, SymMatrix};
use super::scalar::Scalar;
use crate::{Error, Result};

/// Enumeration guard for [`sum_principal_minors`].
pub const MINOR_SUM_MAX_ORDER: usize = 20;

/// Solves `M X = B` for square `M` (`m x m`) and `B` (`m x cols`), both
/// row-major, by Gaussian elimination with largest-magnitude pivoting.
fn solve<T: Scalar>(m: usize, mut a: Vec<T>, mut b: Vec<T>, cols: usize) -> Result<Vec<T>> {
    let scale = a.iter().fold(0.0f64, |s, x| s.max(x.to_f64().abs()));
    for k in 0..m {
        let p = (k..m)
            .max_by(|&r, &s| a[r * m + k].abs().partial_cmp(&a[s * m + k].abs()).unwrap_or(std::cmp::Ordering::Equal))
            .unwrap_or(k);
        if a[p * m + k].is_negligible(scale) {
            return Err(Error::SingularBlock);
        }
        if p != k {
            for c in 0..m {
                a.swap(k * m + c, p * m + c);
            }
            for c in 0..cols {
                b.swap(k * cols + c, p * cols + c);
            }
        }
        let pivot = a[k * m + k].clone();
        for r in k + 1..m {
            let f = a[r * m + k].clone() / pivot.clone();
            if f.is_zero() {
                continue;
            }
            for c in k..m {
                let v = a[r * m + c].clone() - f.clone() * a[k * m + c].clone();
                a[r * m + c] = v;
            }
            for c in 0..cols {
                let v = b[r * cols + c].clone() - f.clone() * b[k * cols + c].clone();
                b[r * cols + c] = v;
            }
        }
    }
    for k in (0..m).rev() {
        for c in 0..cols {
            let mut v = b[k * cols + c].clone();
            for j in k + 1..m {
                v = v - a[k * m + j].clone() * b[j * cols + c].clone();
            }
            b[k * cols + c] = v / a[k * m + k].clone();
        }
    }
    Ok(b)
}

/// `A / A[alpha] = A[alpha^c] - A[alpha^c, alpha] A[alpha]^{-1} A[alpha, alpha^c]`,
/// indexed by `alpha^c` in ascending order.
///
/// Fails with [`Error::SingularBlock`] when `A[alpha]` is singular (exactly,
/// or to within a relative `1e-13` pivot threshold in floating mode).
pub fn schur_complement<T: Scalar>(a: &SymMatrix<T>, alpha: &IndexSet) -> Result<SymMatrix<T>> {
    alpha.check_range(a.order())?;
    let rest = alpha.complement(a.order());
    let m = alpha.len();
    let q = rest.len();
    if m == 0 {
        return a.principal_submatrix(&rest);
    }
    let block = a.block(alpha, alpha);
    let coupling = a.block(alpha, &rest);
    // X = A[alpha]^{-1} A[alpha, rest]
    let x = solve(m, block, coupling, q)?;
    let rest_idx = rest.as_slice();
    Ok(SymMatrix::from_fn(q, |i, j| {
        let mut v = a.get(rest_idx[i], rest_idx[j]).clone();
        for (k, ak) in alpha.iter().enumerate() {
            v = v - a.get(rest_idx[i], ak).clone() * x[k * q + j].clone();
        }
        v
    }))
}

/// `D^{-1/2} A D^{-1/2}` with `D = diag(A)`: a unit-diagonal matrix with
/// `det = det(A) / (a_11 ... a_nn)`.
///
/// In rational mode each `a_ii` must be a perfect rational square.
pub fn normalize_unit_diagonal<T: Scalar>(a: &SymMatrix<T>) -> Result<SymMatrix<T>> {
    let zero = T::zero();
    let mut inv_sqrt = Vec::with_capacity(a.order());
    for (i, d) in a.diagonal().into_iter().enumerate() {
        if d <= zero {
            return Err(Error::NonPositiveDiagonal { index: i + 1 });
        }
        let root = d.sqrt_exact().ok_or(Error::IrrationalScale { index: i + 1 })?;
        inv_sqrt.push(T::one() / root);
    }
    Ok(SymMatrix::from_fn(a.order(), |i, j| {
        if i == j {
            T::one()
        } else {
            inv_sqrt[i].clone() * a.get(i, j).clone() * inv_sqrt[j].clone()
        }
    }))
}

/// Sum of all order-`k` principal minors, i.e. the coefficient
/// `e_k(lambda)` of the characteristic polynomial.
pub fn sum_principal_minors<T: Scalar>(a: &SymMatrix<T>, k: usize) -> Result<T> {
    let n = a.order();
    if n > MINOR_SUM_MAX_ORDER {
        return Err(Error::GuardExceeded {
            what: "principal minor enumeration order",
            limit: MINOR_SUM_MAX_ORDER as u64,
            got: n as u64,
        });
    }
    if k > n {
        return Err(Error::ParameterOutOfRange { name: "k", reason: format!("{k} > n = {n}") });
    }
    IndexSet::combinations(n, k)
        .try_fold(T::zero(), |acc, alpha| Ok(acc + a.principal_submatrix(&alpha)?.determinant()))
}
