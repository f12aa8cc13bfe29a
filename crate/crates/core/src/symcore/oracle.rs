//! Cofactor-expansion determinant, independent of the elimination kernels.

use std::collections::HashMap;

use super::matrix::{IndexSet, SymMatrix};
use super::scalar::Scalar;
use crate::{Error, Result};

/// Largest order accepted by [`cofactor_determinant`].
pub const COFACTOR_MAX_ORDER: usize = 16;

/// Laplace expansion along successive rows. Minors are memoized by their
/// column set, so the cost is `O(2^n * n)` rather than `O(n!)`; no division
/// or pivoting is involved.
pub fn cofactor_determinant<T: Scalar>(a: &SymMatrix<T>) -> Result<T> {
    let n = a.order();
    if n > COFACTOR_MAX_ORDER {
        return Err(Error::GuardExceeded {
            what: "cofactor expansion order",
            limit: COFACTOR_MAX_ORDER as u64,
            got: n as u64,
        });
    }
    let mut memo = HashMap::new();
    Ok(expand(a, 0, (1u32 << n) - 1, &mut memo))
}

fn expand<T: Scalar>(a: &SymMatrix<T>, row: usize, cols: u32, memo: &mut HashMap<u32, T>) -> T {
    if cols == 0 {
        return T::one();
    }
    if let Some(v) = memo.get(&cols) {
        return v.clone();
    }
    let mut acc = T::zero();
    let mut position = 0;
    for j in 0..a.order() {
        if cols >> j & 1 == 0 {
            continue;
        }
        let entry = a.get(row, j);
        if !entry.is_zero() {
            let minor = expand(a, row + 1, cols & !(1 << j), memo);
            let term = entry.clone() * minor;
            acc = if position % 2 == 0 { acc + term } else { acc - term };
        }
        position += 1;
    }
    memo.insert(cols, acc.clone());
    acc
}

/// Every principal minor `det A[alpha]`, `alpha` ranging over all subsets in
/// order of increasing size then lexicographically. Computed by cofactor
/// expansion.
pub fn all_principal_minors<T: Scalar>(a: &SymMatrix<T>) -> Result<Vec<(IndexSet, T)>> {
    let n = a.order();
    let mut out = Vec::with_capacity(1 << n);
    for k in 0..=n {
        for alpha in IndexSet::combinations(n, k) {
            let sub = a.principal_submatrix(&alpha)?;
            let d = cofactor_determinant(&sub)?;
            out.push((alpha, d));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symcore::Rational;

    #[test]
    fn agrees_with_hand_values() {
        let a = SymMatrix::from_rows(vec![
            vec![Rational::from_integer(1), Rational::from_integer(-1), Rational::from_integer(1)],
            vec![Rational::from_integer(-1), Rational::from_integer(1), Rational::from_integer(1)],
            vec![Rational::from_integer(1), Rational::from_integer(1), Rational::from_integer(1)],
        ])
        .unwrap();
        assert_eq!(cofactor_determinant(&a).unwrap(), Rational::from_integer(-4));
    }

    #[test]
    fn guard() {
        let a = SymMatrix::<f64>::identity(COFACTOR_MAX_ORDER + 1);
        assert!(matches!(cofactor_determinant(&a), Err(Error::GuardExceeded { .. })));
    }

    #[test]
    fn minor_list_layout() {
        let a = SymMatrix::<f64>::identity(3);
        let minors = all_principal_minors(&a).unwrap();
        assert_eq!(minors.len(), 8);
        assert!(minors[0].0.is_empty());
        assert_eq!(minors[7].0, IndexSet::full(3));
    }
}
