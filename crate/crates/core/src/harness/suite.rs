//! Randomised numerical checks of the algebraic facts behind the bounds.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use super::sampler::{gram_of_rank, sample_cone_batch, trial_rng, SampleConfig};
use crate::cone::{eigen_signature, TolerancePolicy};
use crate::symcore::{
    elementary_symmetric, normalize_unit_diagonal, schur_complement, sum_principal_minors, IndexSet, Scalar, SymMatrix,
};
use crate::{Error, Result};

/// Relative tolerance for the three algebraic identities.
pub const IDENTITY_TOL: f64 = 1e-10;
/// Absolute tolerance for the cone-member properties of unit-diagonal samples.
pub const PROPERTY_TOL: f64 = 1e-9;
const KEPT_FAILURES: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityFailure {
    pub trial: u64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub trials: usize,
    pub failures: usize,
    /// Largest relative error for identities, largest property breach
    /// (0 when none) for cone properties.
    pub max_error: f64,
    pub tolerance: f64,
    /// The first few failures, by trial index.
    pub examples: Vec<IdentityFailure>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityReport {
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<IdentityCheck>,
}

/// Largest `|e_k(lambda) - sum of order-k principal minors|` over `k`,
/// each relative to `max(1, e_k(|lambda|))`.
pub fn characteristic_identity_error(a: &SymMatrix<f64>) -> Result<f64> {
    let spectrum = a.eigenvalues()?;
    let abs: Vec<f64> = spectrum.values().iter().map(|l| l.abs()).collect();
    let mut worst = 0f64;
    for k in 1..=a.order() {
        let from_eigs = elementary_symmetric(spectrum.values(), k);
        let from_minors = sum_principal_minors(a, k)?;
        let scale = elementary_symmetric(&abs, k).max(1.0);
        worst = worst.max((from_eigs - from_minors).abs() / scale);
    }
    Ok(worst)
}

/// `(A / A[outer], (A / A[inner]) / (A[outer] / A[inner]))` for
/// `inner` strictly inside `outer`. Both are indexed by the complement of
/// `outer`, and agree exactly by the quotient formula.
pub fn quotient_sides<T: Scalar>(
    a: &SymMatrix<T>,
    outer: &IndexSet,
    inner: &IndexSet,
) -> Result<(SymMatrix<T>, SymMatrix<T>)> {
    outer.check_range(a.order())?;
    if !inner.is_subset(outer) || inner.len() == outer.len() {
        return Err(Error::ParameterOutOfRange {
            name: "inner",
            reason: format!("{inner} must be a proper subset of {outer}"),
        });
    }
    let direct = schur_complement(a, outer)?;
    let reduced = schur_complement(a, inner)?;
    let step = outer.difference(inner).relative_to(&inner.complement(a.order()))?;
    Ok((direct, schur_complement(&reduced, &step)?))
}

/// `|det A - det A[alpha] det(A / A[alpha])|` relative to the largest of 1
/// and the two sides.
pub fn schur_determinant_error(a: &SymMatrix<f64>, alpha: &IndexSet) -> Result<f64> {
    let whole = a.determinant();
    let split = a.principal_submatrix(alpha)?.determinant() * schur_complement(a, alpha)?.determinant();
    Ok((whole - split).abs() / 1f64.max(whole.abs()).max(split.abs()))
}

fn max_entry_gap(x: &SymMatrix<f64>, y: &SymMatrix<f64>) -> f64 {
    let mut gap = 0f64;
    let mut scale = 1f64;
    for i in 0..x.order() {
        for j in 0..x.order() {
            gap = gap.max((x[(i, j)] - y[(i, j)]).abs());
            scale = scale.max(x[(i, j)].abs());
        }
    }
    gap / scale
}

fn random_symmetric(n: usize, rng: &mut ChaCha8Rng) -> SymMatrix<f64> {
    let upper: Vec<f64> = (0..n * n).map(|_| rng.sample(StandardNormal)).collect();
    SymMatrix::from_fn(n, |i, j| upper[i.min(j) * n + i.max(j)])
}

fn random_pd(n: usize, rng: &mut ChaCha8Rng) -> SymMatrix<f64> {
    let g = gram_of_rank(n, n, rng);
    SymMatrix::from_fn(n, |i, j| g[(i, j)] + if i == j { 0.1 } else { 0.0 })
}

/// `inner` strictly inside `outer` strictly inside `{0..n-1}`, `inner`
/// nonempty.
fn nested_sets(n: usize, rng: &mut ChaCha8Rng) -> (IndexSet, IndexSet) {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let c = rng.random_range(1..=n - 2);
    let b = rng.random_range(c + 1..=n - 1);
    (IndexSet::from_zero_based(order[..b].iter().copied()), IndexSet::from_zero_based(order[..c].iter().copied()))
}

fn proper_subset(n: usize, rng: &mut ChaCha8Rng) -> IndexSet {
    IndexSet::from_mask(rng.random_range(1..(1u64 << n) - 1))
}

/// Runs `trial` for every index in parallel and folds in index order.
fn run_check(
    name: &'static str,
    trials: usize,
    seed: u64,
    tolerance: f64,
    trial: impl Fn(usize, &mut ChaCha8Rng) -> Result<(f64, String)> + Sync,
) -> Result<IdentityCheck> {
    let outcomes = (0..trials as u64)
        .into_par_iter()
        .map(|i| trial(i as usize, &mut trial_rng(seed, i)))
        .collect::<Result<Vec<_>>>()?;
    let mut check = IdentityCheck { name, trials, failures: 0, max_error: 0.0, tolerance, examples: Vec::new() };
    for (i, (err, detail)) in outcomes.into_iter().enumerate() {
        check.max_error = check.max_error.max(err);
        if err.is_nan() || err > tolerance {
            check.failures += 1;
            if check.examples.len() < KEPT_FAILURES {
                check.examples.push(IdentityFailure { trial: i as u64, detail });
            }
        }
    }
    Ok(check)
}

/// Four randomised checks at order `n`, each over `trials` instances:
///
/// - `characteristic_coefficients`: `e_k(eigenvalues)` equals the sum of
///   order-`k` principal minors, on random symmetric matrices;
/// - `quotient`: `A/B = (A/C)/(B/C)` for nested `C < B`, on random PD
///   matrices;
/// - `schur_determinant`: `det A = det A[alpha] det(A/A[alpha])`, on random
///   PD matrices;
/// - `cone_properties`: unit-diagonal rescalings of sampled cone members have
///   `lambda_min >= -1/(n-2)`, `|a_ij| <= 1`, exactly one negative
///   eigenvalue, and a nonnegative sum of order-`(n-1)` principal minors.
pub fn identity_suite(n: usize, trials: usize, seed: u64) -> Result<IdentityReport> {
    if !(3..=8).contains(&n) {
        return Err(Error::InvalidOrder { n, reason: "identity suite runs for 3 <= n <= 8" });
    }
    let mut checks = Vec::with_capacity(4);

    checks.push(run_check("characteristic_coefficients", trials, seed, IDENTITY_TOL, |_, rng| {
        let a = random_symmetric(n, rng);
        let err = characteristic_identity_error(&a)?;
        Ok((err, format!("relative error {err:e}")))
    })?);

    checks.push(run_check("quotient", trials, seed.wrapping_add(1), IDENTITY_TOL, |_, rng| {
        let a = random_pd(n, rng);
        let (outer, inner) = nested_sets(n, rng);
        let (direct, nested) = quotient_sides(&a, &outer, &inner)?;
        let err = max_entry_gap(&direct, &nested);
        Ok((err, format!("B = {outer}, C = {inner}: relative gap {err:e}")))
    })?);

    checks.push(run_check("schur_determinant", trials, seed.wrapping_add(2), IDENTITY_TOL, |_, rng| {
        let a = random_pd(n, rng);
        let alpha = proper_subset(n, rng);
        let err = schur_determinant_error(&a, &alpha)?;
        Ok((err, format!("alpha = {alpha}: relative error {err:e}")))
    })?);

    let tol = TolerancePolicy::default();
    let members = sample_cone_batch(&SampleConfig::new(n, trials, seed.wrapping_add(3)), &tol)?.samples;
    let floor = -1.0 / (n as f64 - 2.0);
    checks.push(run_check("cone_properties", trials, seed.wrapping_add(3), PROPERTY_TOL, |i, _| {
        let b = normalize_unit_diagonal(&members[i].matrix)?;
        let lambda_min = b.eigenvalues()?.min();
        let max_off = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| b[(i, j)].abs())
            .fold(0f64, f64::max);
        let negatives = eigen_signature(&b, &tol)?.negative;
        let minor_sum = sum_principal_minors(&b, n - 1)?;
        let breach = (floor - lambda_min).max(max_off - 1.0).max(-minor_sum).max(0.0)
            + if negatives == 1 { 0.0 } else { f64::INFINITY };
        Ok((
            breach,
            format!("lambda_min {lambda_min:e}, max |a_ij| {max_off}, negatives {negatives}, e_(n-1) {minor_sum:e}"),
        ))
    })?);

    Ok(IdentityReport { n, trials, seed, passed: checks.iter().all(|c| c.failures == 0), checks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{kotel_example, uniform_offdiag};
    use crate::symcore::Rational;

    #[test]
    fn worked_example_coefficient() {
        let exact = kotel_example::<Rational>();
        assert_eq!(sum_principal_minors(&exact, 5).unwrap(), Rational::new(0, 1));
        let float = kotel_example::<f64>();
        let spectrum = float.eigenvalues().unwrap();
        assert!(elementary_symmetric(spectrum.values(), 5).abs() < 1e-13);
        assert!(characteristic_identity_error(&float).unwrap() < 1e-13);
    }

    #[test]
    fn boundary_member_eigenvalue() {
        let a = uniform_offdiag(4, 0.5).unwrap();
        assert!((a.eigenvalues().unwrap().min() + 0.5).abs() < 1e-14);
    }

    #[test]
    fn quotient_exact() {
        let a = SymMatrix::from_fn(6, |i, j| {
            Rational::new(if i == j { 7 + i as i64 } else { (i + j) as i64 % 3 - 1 }, 1 + (i * j) as i64 % 2)
        });
        let outer = IndexSet::from_one_based(&[1, 3, 4]).unwrap();
        let inner = IndexSet::from_one_based(&[3]).unwrap();
        let (direct, nested) = quotient_sides(&a, &outer, &inner).unwrap();
        assert_eq!(direct, nested);
        assert!(quotient_sides(&a, &inner, &outer).is_err());
        assert!(quotient_sides(&a, &outer, &outer).is_err());
    }

    #[test]
    fn quotient_float_pd() {
        let mut rng = trial_rng(6, 0);
        let a = random_pd(6, &mut rng);
        let outer = IndexSet::from_one_based(&[3, 4]).unwrap();
        let inner = IndexSet::from_one_based(&[3]).unwrap();
        let (direct, nested) = quotient_sides(&a, &outer, &inner).unwrap();
        assert!(max_entry_gap(&direct, &nested) < 1e-10);
    }

    #[test]
    fn suite_passes_and_is_deterministic() {
        let report = identity_suite(5, 50, 17).unwrap();
        assert!(report.passed, "{report:#?}");
        assert_eq!(report.checks.len(), 4);
        assert_eq!(report, identity_suite(5, 50, 17).unwrap());
        assert!(identity_suite(9, 1, 0).is_err());
    }

    #[test]
    fn nested_sets_are_proper() {
        let mut rng = trial_rng(1, 1);
        for _ in 0..100 {
            let (outer, inner) = nested_sets(3, &mut rng);
            assert!(inner.is_subset(&outer));
            assert!(!inner.is_empty() && inner.len() < outer.len() && outer.len() < 3);
        }
    }
}
