//! Named matrix families: extremal equality cases, families approaching the
//! bounds, and counterexamples showing which hypotheses are needed.
//!
//! Constructors are generic over the scalar mode; pass [`Rational`]
//! parameters to get exact matrices.

use serde::Serialize;

use crate::symcore::{Rational, Scalar, ScaledRational, SymMatrix};
use crate::{Error, Result};

fn require_order(n: usize) -> Result<()> {
    if n < 3 {
        return Err(Error::InvalidOrder { n, reason: "family needs n >= 3" });
    }
    Ok(())
}

/// Where the uniform off-diagonal parameter `x` falls for order `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum UniformRegime {
    /// `0 < x <= 1/(n-1)`: the matrix is PSD, so `det >= 0` and it is not
    /// in the strict locally-PSD cone.
    BelowCone,
    /// `1/(n-1) < x <= 1/(n-2)`: locally PSD with `det < 0`.
    InCone,
    /// `x <= 0` or `x > 1/(n-2)`.
    OutOfRegime,
}

pub fn uniform_offdiag_regime<T: Scalar>(n: usize, x: &T) -> UniformRegime {
    let zero = T::zero();
    let hi = T::from_ratio(1, n as i64 - 2);
    let lo = T::from_ratio(1, n as i64 - 1);
    if *x <= zero || *x > hi {
        UniformRegime::OutOfRegime
    } else if *x <= lo {
        UniformRegime::BelowCone
    } else {
        UniformRegime::InCone
    }
}

/// Unit diagonal, every off-diagonal entry `-x`, for `0 < x <= 1/(n-2)`.
///
/// At `x = 1/(n-2)` the determinant equals the extended Hadamard constant.
/// Note the matrix is in the strict locally-PSD cone only for
/// `x > 1/(n-1)`; see [`uniform_offdiag_regime`].
pub fn uniform_offdiag<T: Scalar>(n: usize, x: T) -> Result<SymMatrix<T>> {
    require_order(n)?;
    if uniform_offdiag_regime(n, &x) == UniformRegime::OutOfRegime {
        return Err(Error::ParameterOutOfRange { name: "x", reason: format!("need 0 < x <= 1/{}, got {x}", n - 2) });
    }
    uniform_offdiag_unchecked(n, x)
}

/// [`uniform_offdiag`] without the parameter check, for boundary probes.
pub fn uniform_offdiag_unchecked<T: Scalar>(n: usize, x: T) -> Result<SymMatrix<T>> {
    require_order(n)?;
    Ok(SymMatrix::from_fn(n, |i, j| if i == j { T::one() } else { -x.clone() }))
}

/// `A(r) = (1-r) I + r 1 1^T`, with eigenvalues `1-r` (n-1 times) and
/// `1+(n-1)r`. Strictly locally PD for `-1/(n-2) < r < -1/(n-1)`.
pub fn ar_family<T: Scalar>(n: usize, r: T) -> Result<SymMatrix<T>> {
    uniform_offdiag_unchecked(n, -r)
}

/// `det A(r) = (1-r)^(n-1) (1+(n-1)r)`.
pub fn ar_determinant<T: Scalar>(n: usize, r: &T) -> T {
    (T::one() - r.clone()).powi(n as u32 - 1) * (T::one() + T::from_i64(n as i64 - 1) * r.clone())
}

/// Leading block `uniform_offdiag(n-1, 1/(n-2))` (singular), border of
/// ones, corner 1. Attains the leading-block bound with equality.
pub fn bordered_equality<T: Scalar>(n: usize) -> Result<SymMatrix<T>> {
    require_order(n)?;
    let x = T::from_ratio(1, n as i64 - 2);
    Ok(SymMatrix::from_fn(n, |i, j| if i == j || i == n - 1 || j == n - 1 { T::one() } else { -x.clone() }))
}

/// Parameters of the Fischer-sharp family, all exact.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FisherSharpParams {
    /// `((n-2)/(n-1))^(n-1)`, the determinant of the leading block.
    pub p: Rational,
    /// `(1-p)/(n-1)`.
    pub t: Rational,
    /// `(1+(n-2)p)/((n-1)(n-2))`.
    pub s_squared: Rational,
}

pub fn fisher_sharp_params(n: usize) -> Result<FisherSharpParams> {
    require_order(n)?;
    let n = n as i64;
    let p = Rational::new(n - 2, n - 1).pow(n as i32 - 1);
    let t = (Rational::one() - p.clone()) / Rational::from_integer(n - 1);
    let s_squared =
        (Rational::one() + Rational::from_integer(n - 2) * p.clone()) / Rational::from_integer((n - 1) * (n - 2));
    Ok(FisherSharpParams { p, t, s_squared })
}

/// `[[I - tJ, s 1], [s 1^T, 1]]` with `s = sqrt(s_squared)`.
///
/// `s` is irrational in general, so the matrix is kept as `D C D` with
/// `D = diag(1, ..., 1, s)` and rational `C = [[I - tJ, 1], [1^T, 1/s^2]]`;
/// every principal minor stays exact. Its determinant is `-1/(n-2)` and it
/// attains the extended Fischer bound with `alpha = {n}`.
pub fn fisher_sharp(n: usize) -> Result<ScaledRational> {
    let FisherSharpParams { t, s_squared, .. } = fisher_sharp_params(n)?;
    let corner = Rational::one() / s_squared.clone();
    let core = SymMatrix::from_fn(n, |i, j| {
        let last = n - 1;
        match (i == last, j == last) {
            (true, true) => corner.clone(),
            (true, false) | (false, true) => Rational::one(),
            (false, false) if i == j => Rational::one() - t.clone(),
            _ => -t.clone(),
        }
    });
    let mut scale_sq = vec![Rational::one(); n];
    scale_sq[n - 1] = s_squared;
    ScaledRational::new(core, scale_sq)
}

/// Floating-point rendering of [`fisher_sharp`].
pub fn fisher_sharp_float(n: usize) -> Result<SymMatrix<f64>> {
    use crate::symcore::PrincipalMinors;
    Ok(fisher_sharp(n)?.to_float())
}

/// `(1-c) I_6 + c J_6` with `c = -1/4`, i.e. `uniform_offdiag(6, 1/4)`.
pub fn kotel_example<T: Scalar>() -> SymMatrix<T> {
    uniform_offdiag_unchecked(6, T::from_ratio(1, 4)).expect("order 6 is valid")
}

/// `[[1, t], [t, 1]]`: locally PD for `t > 1` with `det = 1 - t^2`
/// unbounded below, so no lower bound exists at `n = 2`.
pub fn counterexample_2x2<T: Scalar>(t: T) -> SymMatrix<T> {
    SymMatrix::from_fn(2, |i, j| if i == j { T::one() } else { t.clone() })
}

/// `[[1, 0, t], [0, 1, 0], [t, 0, 1]]`: violates `|b_1| <= sqrt(a_11 a_33)`
/// for `t > 1`, and drops below the leading-block bound for `t > sqrt(5)`.
pub fn counterexample_bordered<T: Scalar>(t: T) -> SymMatrix<T> {
    SymMatrix::from_fn(3, |i, j| match (i, j) {
        _ if i == j => T::one(),
        (0, 2) => t.clone(),
        _ => T::zero(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symcore::{cofactor_determinant, IndexSet, PrincipalMinors};

    fn r(p: i64, q: i64) -> Rational {
        Rational::new(p, q)
    }

    #[test]
    fn uniform_examples() {
        let a = uniform_offdiag(3, r(1, 1)).unwrap();
        assert_eq!(a.determinant(), r(-4, 1));
        assert_eq!(a[(0, 1)], r(-1, 1));
        assert_eq!(uniform_offdiag(4, r(1, 2)).unwrap().determinant(), r(-27, 16));
        // (13/10)^4 (-1/5)
        let d = uniform_offdiag(5, r(3, 10)).unwrap().determinant();
        assert_eq!(d, r(13, 10).pow(4) * r(-1, 5));
        assert!((d.to_f64() + 0.57122).abs() < 1e-12);
        let spectrum = uniform_offdiag(5, 0.3).unwrap().eigenvalues().unwrap();
        assert!((spectrum.min() + 0.2).abs() < 1e-13);
        assert!(spectrum.values()[1..].iter().all(|l| (l - 1.3).abs() < 1e-13));

        assert!(uniform_offdiag(4, r(3, 5)).is_err());
        assert!(uniform_offdiag(4, r(0, 1)).is_err());
        assert!(uniform_offdiag(2, r(1, 2)).is_err());
        assert!(uniform_offdiag_unchecked(4, r(3, 5)).is_ok());
    }

    #[test]
    fn regimes() {
        assert_eq!(uniform_offdiag_regime(4, &r(1, 4)), UniformRegime::BelowCone);
        assert_eq!(uniform_offdiag_regime(4, &r(1, 3)), UniformRegime::BelowCone);
        assert_eq!(uniform_offdiag_regime(4, &r(2, 5)), UniformRegime::InCone);
        assert_eq!(uniform_offdiag_regime(4, &r(1, 2)), UniformRegime::InCone);
        assert_eq!(uniform_offdiag_regime(4, &r(51, 100)), UniformRegime::OutOfRegime);
    }

    #[test]
    fn ar_examples() {
        assert_eq!(ar_family(4, r(-2, 5)).unwrap().determinant(), r(-343, 625));
        assert_eq!(ar_family(3, r(-3, 5)).unwrap().determinant(), r(-64, 125));
        assert_eq!(ar_family(3, r(-3, 4)).unwrap().determinant(), r(-49, 32));
        for n in 3..8 {
            let rr = r(-1, n as i64 - 1) - r(1, 1000);
            assert_eq!(ar_family(n, rr.clone()).unwrap(), uniform_offdiag_unchecked(n, -rr.clone()).unwrap());
            assert_eq!(ar_family(n, rr.clone()).unwrap().determinant(), ar_determinant(n, &rr));
        }
    }

    #[test]
    fn bordered_examples() {
        let a = bordered_equality::<Rational>(3).unwrap();
        let expect = SymMatrix::from_rows(vec![
            vec![r(1, 1), r(-1, 1), r(1, 1)],
            vec![r(-1, 1), r(1, 1), r(1, 1)],
            vec![r(1, 1), r(1, 1), r(1, 1)],
        ])
        .unwrap();
        assert_eq!(a, expect);
        assert_eq!(cofactor_determinant(&a).unwrap(), r(-4, 1));
        let a4 = bordered_equality::<Rational>(4).unwrap();
        assert_eq!(cofactor_determinant(&a4).unwrap(), r(-27, 4));
        for n in 3..=9 {
            let a = bordered_equality::<Rational>(n).unwrap();
            let b = a.principal_submatrix(&IndexSet::full(n - 1)).unwrap();
            assert_eq!(b.determinant(), r(0, 1), "n = {n}");
        }
    }

    #[test]
    fn fisher_params() {
        let p3 = fisher_sharp_params(3).unwrap();
        assert_eq!((p3.p.clone(), p3.t.clone(), p3.s_squared.clone()), (r(1, 4), r(3, 8), r(5, 8)));
        let p4 = fisher_sharp_params(4).unwrap();
        assert_eq!((p4.p.clone(), p4.t.clone(), p4.s_squared.clone()), (r(8, 27), r(19, 81), r(43, 162)));
        for n in 3..=10 {
            let p = fisher_sharp_params(n).unwrap();
            let m = Rational::from_integer(n as i64 - 2);
            // both closed forms of s^2 agree
            assert_eq!(p.s_squared, (Rational::one() - p.t.clone() * m.clone()) / m);
        }
    }

    #[test]
    fn fisher_sharp_exact_structure() {
        for n in 3..=8 {
            let a = fisher_sharp(n).unwrap();
            let params = fisher_sharp_params(n).unwrap();
            assert_eq!(a.determinant(), r(-1, n as i64 - 2), "n = {n}");
            assert_eq!(a.principal_minor(&IndexSet::full(n - 1)).unwrap(), params.p);
            assert_eq!(a.entry_squared(0, n - 1), params.s_squared);
            assert_eq!(a.diagonal_entry(n - 1), r(1, 1));
            for i in 0..n - 1 {
                let rest = IndexSet::full(n).difference(&IndexSet::from_zero_based([i]));
                assert_eq!(a.principal_minor(&rest).unwrap(), r(0, 1));
            }
        }
        let f = fisher_sharp_float(3).unwrap();
        assert!((f[(0, 2)] - (5.0f64 / 8.0).sqrt()).abs() < 1e-15);
        assert!((f.determinant() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn kotel_minors() {
        let a = kotel_example::<Rational>();
        assert_eq!(a, uniform_offdiag(6, r(1, 4)).unwrap());
        assert_eq!(a.determinant(), r(-3125, 4096));
        assert_eq!(a.principal_minor(&IndexSet::from_one_based(&[3, 4]).unwrap()).unwrap(), r(15, 16));
        for alpha in IndexSet::combinations(6, 4) {
            assert_eq!(a.principal_minor(&alpha).unwrap(), r(125, 256));
        }
    }

    #[test]
    fn counterexamples() {
        assert_eq!(counterexample_2x2(r(2, 1)).determinant(), r(-3, 1));
        assert_eq!(counterexample_2x2(r(1, 1)).determinant(), r(0, 1));
        assert_eq!(counterexample_2x2(r(10, 1)).determinant(), r(-99, 1));
        assert_eq!(counterexample_bordered(r(3, 1)).determinant(), r(-8, 1));
        let s5 = counterexample_bordered(5.0f64.sqrt()).determinant();
        assert!((s5 + 4.0).abs() < 1e-14);
    }
}
