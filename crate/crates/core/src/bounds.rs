//! Determinant inequalities on the locally-PSD cone, evaluated as verdicts.
//!
//! Every checker computes both sides and reports the comparison; none of
//! them assumes the inequality it evaluates. Preconditions are reported
//! alongside and never short-circuit the computation.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cone::{classify_membership, psd_verdict, Classification, TolerancePolicy};
use crate::symcore::{IndexSet, Number, PrincipalMinors, Scalar};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum InequalityId {
    ExtHadamard,
    LeadingBlock,
    ExtFisher,
    ExtKoteljanskii,
    ClassicalHadamard,
    ClassicalFisher,
    ClassicalKoteljanskii,
}

impl InequalityId {
    pub const ALL: [InequalityId; 7] = [
        InequalityId::ExtHadamard,
        InequalityId::LeadingBlock,
        InequalityId::ExtFisher,
        InequalityId::ExtKoteljanskii,
        InequalityId::ClassicalHadamard,
        InequalityId::ClassicalFisher,
        InequalityId::ClassicalKoteljanskii,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            InequalityId::ExtHadamard => "EXT_HADAMARD",
            InequalityId::LeadingBlock => "LEADING_BLOCK",
            InequalityId::ExtFisher => "EXT_FISHER",
            InequalityId::ExtKoteljanskii => "EXT_KOTELJANSKII",
            InequalityId::ClassicalHadamard => "CLASSICAL_HADAMARD",
            InequalityId::ClassicalFisher => "CLASSICAL_FISHER",
            InequalityId::ClassicalKoteljanskii => "CLASSICAL_KOTELJANSKII",
        }
    }

    /// Whether the inequality needs an index set `alpha`.
    pub fn needs_alpha(self) -> bool {
        !matches!(self, InequalityId::ExtHadamard | InequalityId::LeadingBlock | InequalityId::ClassicalHadamard)
    }

    /// Whether the inequality needs a second index set `beta`.
    pub fn needs_beta(self) -> bool {
        matches!(self, InequalityId::ExtKoteljanskii | InequalityId::ClassicalKoteljanskii)
    }
}

impl fmt::Display for InequalityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl std::str::FromStr for InequalityId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_uppercase().replace('-', "_");
        InequalityId::ALL
            .into_iter()
            .find(|id| id.as_str() == norm)
            .ok_or_else(|| Error::Parse(format!("unknown inequality '{s}'")))
    }
}

/// Direction of the inequality between `lhs` and `rhs`.
///
/// Extended (lower) bounds read `lhs >= rhs`; classical (upper) bounds read
/// `lhs <= rhs`. In both cases `lhs` is the determinant side and `slack` is
/// oriented so that a nonnegative slack means the inequality holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = ">=")]
    AtLeast,
    #[serde(rename = "<=")]
    AtMost,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Condition {
    pub name: &'static str,
    pub met: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Preconditions {
    pub met: bool,
    pub conditions: Vec<Condition>,
}

impl Preconditions {
    fn new(conditions: Vec<Condition>) -> Self {
        Preconditions { met: conditions.iter().all(|c| c.met), conditions }
    }

    pub fn failed(&self) -> impl Iterator<Item = &Condition> {
        self.conditions.iter().filter(|c| !c.met)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundVerdict<T> {
    pub inequality_id: InequalityId,
    pub relation: Relation,
    pub lhs: T,
    pub rhs: T,
    /// Signed coefficient multiplying the product of minors on the bound
    /// side; 1 for the classical inequalities.
    pub constant: T,
    /// `lhs - rhs` for `>=`, `rhs - lhs` for `<=`.
    pub slack: T,
    pub holds: bool,
    pub preconditions: Preconditions,
}

impl<T: Scalar> BoundVerdict<T> {
    fn evaluate(
        inequality_id: InequalityId,
        relation: Relation,
        lhs: T,
        rhs: T,
        constant: T,
        preconditions: Preconditions,
        tol: &TolerancePolicy,
    ) -> Self {
        let slack = match relation {
            Relation::AtLeast => lhs.clone() - rhs.clone(),
            Relation::AtMost => rhs.clone() - lhs.clone(),
        };
        let scale = lhs.to_f64().abs().max(rhs.to_f64().abs());
        let holds = slack.nonneg_within(scale, tol.slack_tol);
        BoundVerdict { inequality_id, relation, lhs, rhs, constant, slack, holds, preconditions }
    }

    /// `slack / max(1, |lhs|, |rhs|)` as a float.
    pub fn relative_slack(&self) -> f64 {
        let scale = 1f64.max(self.lhs.to_f64().abs()).max(self.rhs.to_f64().abs());
        self.slack.to_f64() / scale
    }

    pub fn to_numbers(&self) -> BoundVerdict<Number> {
        BoundVerdict {
            inequality_id: self.inequality_id,
            relation: self.relation,
            lhs: self.lhs.to_number(),
            rhs: self.rhs.to_number(),
            constant: self.constant.to_number(),
            slack: self.slack.to_number(),
            holds: self.holds,
            preconditions: self.preconditions.clone(),
        }
    }
}

fn require_order(n: usize) -> Result<()> {
    if n < 3 {
        return Err(Error::InvalidOrder { n, reason: "bound needs n >= 3" });
    }
    Ok(())
}

/// `-(1/(n-2)) ((n-1)/(n-2))^(n-1)`.
pub fn hadamard_constant<T: Scalar>(n: usize) -> Result<T> {
    require_order(n)?;
    let m = n as i64 - 2;
    Ok(T::from_ratio(-1, m) * T::from_ratio(m + 1, m).powi(n as u32 - 1))
}

/// `-(n-1) ((n-1)/(n-2))^(n-2)`.
pub fn leading_constant<T: Scalar>(n: usize) -> Result<T> {
    require_order(n)?;
    let m = n as i64 - 2;
    Ok(T::from_i64(-(m + 1)) * T::from_ratio(m + 1, m).powi(n as u32 - 2))
}

fn membership_condition<M: PrincipalMinors>(a: &M, tol: &TolerancePolicy, name: &'static str) -> Result<Condition> {
    let report = classify_membership(a, tol)?;
    Ok(Condition {
        name,
        met: report.classification.is_locally_psd(),
        detail: format!("classification {}", report.classification),
    })
}

/// `det(A) >= c_H(n) a_11 ... a_nn` on the locally-PSD cone.
pub fn check_extended_hadamard<M: PrincipalMinors>(a: &M, tol: &TolerancePolicy) -> Result<BoundVerdict<M::Scalar>> {
    let n = a.order();
    let c = hadamard_constant::<M::Scalar>(n)?;
    let pre = Preconditions::new(vec![membership_condition(a, tol, "locally_psd")?]);
    Ok(extended_hadamard_verdict(a, c, pre, tol))
}

/// [`check_extended_hadamard`] with membership already decided by the caller.
pub fn check_extended_hadamard_classified<M: PrincipalMinors>(
    a: &M,
    classification: Classification,
    tol: &TolerancePolicy,
) -> Result<BoundVerdict<M::Scalar>> {
    let c = hadamard_constant::<M::Scalar>(a.order())?;
    let pre = Preconditions::new(vec![Condition {
        name: "locally_psd",
        met: classification.is_locally_psd(),
        detail: format!("classification {classification}"),
    }]);
    Ok(extended_hadamard_verdict(a, c, pre, tol))
}

fn extended_hadamard_verdict<M: PrincipalMinors>(
    a: &M,
    c: M::Scalar,
    pre: Preconditions,
    tol: &TolerancePolicy,
) -> BoundVerdict<M::Scalar> {
    let rhs = c.clone() * a.diagonal_product();
    BoundVerdict::evaluate(InequalityId::ExtHadamard, Relation::AtLeast, a.determinant(), rhs, c, pre, tol)
}

/// `det(A) >= c_L(n) a_11 ... a_nn` for `A = [[B, b], [b^T, a_nn]]` with
/// `B` PSD, `det(A) <= 0`, `a_nn >= 0` and `|b_i| <= sqrt(a_ii a_nn)`.
///
/// The border condition is read off the 2x2 principal minor
/// `det A[{i, n}] = a_ii a_nn - b_i^2`, so only principal minors are needed.
pub fn check_leading_block<M: PrincipalMinors>(a: &M, tol: &TolerancePolicy) -> Result<BoundVerdict<M::Scalar>> {
    let n = a.order();
    let c = leading_constant::<M::Scalar>(n)?;
    let last = n - 1;
    let norm = a.to_float().inf_norm();
    let det = a.determinant();

    let b_verdict = psd_verdict(&a.restrict(&IndexSet::full(last))?, tol)?;
    let mut conditions = vec![Condition {
        name: "leading_block_psd",
        met: b_verdict.definiteness.is_psd(),
        detail: format!("leading block {}", b_verdict.definiteness),
    }];
    let det_nonpositive = (-det.clone()).nonneg_within(norm.powi(n as i32), tol.det_neg_tol);
    conditions.push(Condition { name: "det_nonpositive", met: det_nonpositive, detail: format!("det {det}") });
    let corner = a.diagonal_entry(last);
    conditions.push(Condition {
        name: "corner_nonnegative",
        met: corner.nonneg_within(norm, tol.eig_tol),
        detail: format!("a_nn {corner}"),
    });
    for i in 0..last {
        let gap = a.principal_minor(&IndexSet::from_zero_based([i, last]))?;
        conditions.push(Condition {
            name: "border_bounded",
            met: gap.nonneg_within(norm * norm, tol.eig_tol),
            detail: format!("|b_{}|^2 <= a_{0}{0} a_nn: a_ii a_nn - b_i^2 = {gap}", i + 1),
        });
    }

    let rhs = c.clone() * a.diagonal_product();
    Ok(BoundVerdict::evaluate(
        InequalityId::LeadingBlock,
        Relation::AtLeast,
        det,
        rhs,
        c,
        Preconditions::new(conditions),
        tol,
    ))
}

/// `det(A) >= c_H(n) det(A[alpha]) det(A[alpha^c])` for a proper nonempty
/// `alpha`. A trivial `alpha` would turn the bound into `det >= c_H det`,
/// false for every member of the cone, so it is rejected.
pub fn check_extended_fisher<M: PrincipalMinors>(
    a: &M,
    alpha: &IndexSet,
    tol: &TolerancePolicy,
) -> Result<BoundVerdict<M::Scalar>> {
    let n = a.order();
    alpha.check_range(n)?;
    if alpha.is_empty() || alpha.len() == n {
        return Err(Error::TrivialPartition { n });
    }
    let c = hadamard_constant::<M::Scalar>(n)?;
    let pre = Preconditions::new(vec![membership_condition(a, tol, "locally_psd")?]);
    let rhs = c.clone() * a.principal_minor(alpha)? * a.principal_minor(&alpha.complement(n))?;
    Ok(BoundVerdict::evaluate(InequalityId::ExtFisher, Relation::AtLeast, a.determinant(), rhs, c, pre, tol))
}

/// `det(A[alpha | beta]) det(A[alpha & beta]) >= c_H(r) det(A[alpha])
/// det(A[beta])` with `r = |alpha ^ beta| >= 3`, for `A[alpha | beta]` in
/// the locally-PSD cone of its own order.
pub fn check_extended_koteljanskii<M: PrincipalMinors>(
    a: &M,
    alpha: &IndexSet,
    beta: &IndexSet,
    tol: &TolerancePolicy,
) -> Result<BoundVerdict<M::Scalar>> {
    let n = a.order();
    alpha.check_range(n)?;
    beta.check_range(n)?;
    let union = alpha.union(beta);
    let common = alpha.intersection(beta);
    let r = union.len() - common.len();
    if r < 3 {
        return Err(Error::ParameterOutOfRange {
            name: "alpha, beta",
            reason: format!("symmetric difference has {r} elements, need at least 3"),
        });
    }
    let c = hadamard_constant::<M::Scalar>(r)?;
    let pre = Preconditions::new(vec![membership_condition(&a.restrict(&union)?, tol, "union_block_locally_psd")?]);
    let lhs = a.principal_minor(&union)? * a.principal_minor(&common)?;
    let rhs = c.clone() * a.principal_minor(alpha)? * a.principal_minor(beta)?;
    Ok(BoundVerdict::evaluate(InequalityId::ExtKoteljanskii, Relation::AtLeast, lhs, rhs, c, pre, tol))
}

/// The classical Hadamard, Fischer and Koteljanskii upper bounds for PSD
/// matrices, in that order. Fischer uses the partition `alpha`, `alpha^c`.
pub fn check_classical<M: PrincipalMinors>(
    a: &M,
    alpha: &IndexSet,
    beta: &IndexSet,
    tol: &TolerancePolicy,
) -> Result<[BoundVerdict<M::Scalar>; 3]> {
    let n = a.order();
    alpha.check_range(n)?;
    beta.check_range(n)?;
    let verdict = psd_verdict(a, tol)?;
    let pre = Preconditions::new(vec![Condition {
        name: "psd",
        met: verdict.definiteness.is_psd(),
        detail: format!("{}, min eigenvalue {:e}", verdict.definiteness, verdict.min_eigenvalue),
    }]);
    let one = <M::Scalar as Scalar>::one();
    let det = a.determinant();

    let hadamard = BoundVerdict::evaluate(
        InequalityId::ClassicalHadamard,
        Relation::AtMost,
        det.clone(),
        a.diagonal_product(),
        one.clone(),
        pre.clone(),
        tol,
    );
    let fisher = BoundVerdict::evaluate(
        InequalityId::ClassicalFisher,
        Relation::AtMost,
        det,
        a.principal_minor(alpha)? * a.principal_minor(&alpha.complement(n))?,
        one.clone(),
        pre.clone(),
        tol,
    );
    let kotel = BoundVerdict::evaluate(
        InequalityId::ClassicalKoteljanskii,
        Relation::AtMost,
        a.principal_minor(&alpha.union(beta))? * a.principal_minor(&alpha.intersection(beta))?,
        a.principal_minor(alpha)? * a.principal_minor(beta)?,
        one,
        pre,
        tol,
    );
    Ok([hadamard, fisher, kotel])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::*;
    use crate::symcore::{Rational, SymMatrix};

    fn r(p: i64, q: i64) -> Rational {
        Rational::new(p, q)
    }

    fn set(ix: &[usize]) -> IndexSet {
        IndexSet::from_one_based(ix).unwrap()
    }

    fn tol() -> TolerancePolicy {
        TolerancePolicy::default()
    }

    #[test]
    fn constants() {
        assert_eq!(hadamard_constant::<Rational>(3).unwrap(), r(-4, 1));
        assert_eq!(hadamard_constant::<Rational>(4).unwrap(), r(-27, 16));
        assert_eq!(hadamard_constant::<Rational>(5).unwrap(), r(-256, 243));
        assert_eq!(hadamard_constant::<Rational>(6).unwrap(), r(-3125, 4096));
        assert_eq!(leading_constant::<Rational>(3).unwrap(), r(-4, 1));
        assert_eq!(leading_constant::<Rational>(4).unwrap(), r(-27, 4));
        assert_eq!(leading_constant::<Rational>(5).unwrap(), r(-256, 27));
        assert!(hadamard_constant::<f64>(10).unwrap().abs() < hadamard_constant::<f64>(4).unwrap().abs());
        for n in 4..20 {
            let h = hadamard_constant::<Rational>(n).unwrap();
            let l = leading_constant::<Rational>(n).unwrap();
            assert!(h.abs() < l.abs());
            assert!((h.to_f64() - hadamard_constant::<f64>(n).unwrap()).abs() < 1e-14);
        }
        assert!(hadamard_constant::<Rational>(2).is_err());
        assert!(leading_constant::<f64>(1).is_err());
    }

    #[test]
    fn extended_hadamard_examples() {
        let v = check_extended_hadamard(&uniform_offdiag(3, r(1, 1)).unwrap(), &tol()).unwrap();
        assert_eq!((v.lhs.clone(), v.rhs.clone(), v.slack.clone()), (r(-4, 1), r(-4, 1), r(0, 1)));
        assert!(v.holds && v.preconditions.met);

        let v = check_extended_hadamard(&ar_family(3, r(-3, 4)).unwrap(), &tol()).unwrap();
        assert_eq!((v.lhs.clone(), v.rhs.clone()), (r(-49, 32), r(-4, 1)));
        assert!(v.holds && v.slack.is_positive());

        let v = check_extended_hadamard(&kotel_example::<Rational>(), &tol()).unwrap();
        assert_eq!((v.lhs.clone(), v.rhs.clone()), (r(-3125, 4096), r(-3125, 4096)));
        assert!(v.holds);

        let id = check_extended_hadamard(&SymMatrix::<Rational>::identity(4), &tol()).unwrap();
        assert!(id.holds && !id.preconditions.met);
    }

    #[test]
    fn float_slack_tolerance() {
        let a = uniform_offdiag(5, 1.0 / 3.0).unwrap();
        let v = check_extended_hadamard(&a, &tol()).unwrap();
        assert!(v.holds);
        assert!(v.slack.abs() < 1e-12);
        let below = a.add_outer(&1e-6, &[1.0, -1.0, 0.0, 0.0, 0.0]).unwrap();
        let v = check_extended_hadamard(&below.congruence(&[1.0; 5]).unwrap(), &tol()).unwrap();
        assert_eq!(v.holds, v.slack >= -1e-9);
    }

    #[test]
    fn leading_block_examples() {
        let v = check_leading_block(&bordered_equality::<Rational>(3).unwrap(), &tol()).unwrap();
        assert_eq!((v.lhs.clone(), v.rhs.clone(), v.slack.clone()), (r(-4, 1), r(-4, 1), r(0, 1)));
        assert!(v.holds && v.preconditions.met);
        assert_eq!(v.preconditions.conditions.len(), 3 + 2);

        let v = check_leading_block(&counterexample_bordered(r(3, 1)), &tol()).unwrap();
        assert_eq!(v.lhs, r(-8, 1));
        assert!(!v.holds && !v.preconditions.met);
        let failed: Vec<_> = v.preconditions.failed().collect();
        assert_eq!(failed.len(), 1);
        assert_eq!(failed[0].name, "border_bounded");
        assert!(failed[0].detail.starts_with("|b_1|"));

        let zero_corner = SymMatrix::from_rows(vec![
            vec![r(1, 1), r(-1, 1), r(0, 1)],
            vec![r(-1, 1), r(1, 1), r(0, 1)],
            vec![r(0, 1), r(0, 1), r(0, 1)],
        ])
        .unwrap();
        let v = check_leading_block(&zero_corner, &tol()).unwrap();
        assert_eq!((v.lhs.clone(), v.rhs.clone(), v.slack.clone()), (r(0, 1), r(0, 1), r(0, 1)));
        assert!(v.holds && v.preconditions.met);
    }

    #[test]
    fn extended_fisher_examples() {
        let a = fisher_sharp(3).unwrap();
        let v = check_extended_fisher(&a, &set(&[3]), &tol()).unwrap();
        assert_eq!((v.lhs.clone(), v.rhs.clone(), v.slack.clone()), (r(-1, 1), r(-1, 1), r(0, 1)));
        assert!(v.holds && v.preconditions.met);

        let v = check_extended_fisher(&ar_family(3, r(-3, 4)).unwrap(), &set(&[1]), &tol()).unwrap();
        assert_eq!((v.lhs.clone(), v.rhs.clone()), (r(-49, 32), r(-7, 4)));
        assert!(v.holds);

        let probe = uniform_offdiag(4, r(1, 2)).unwrap();
        let v = check_extended_fisher(&probe, &set(&[1, 2, 3]), &tol()).unwrap();
        assert_eq!((v.lhs.clone(), v.rhs.clone()), (r(-27, 16), r(0, 1)));
        assert!(!v.holds && v.preconditions.met);

        assert_eq!(
            check_extended_fisher(&probe, &IndexSet::empty(), &tol()).unwrap_err(),
            Error::TrivialPartition { n: 4 }
        );
        assert!(check_extended_fisher(&probe, &IndexSet::full(4), &tol()).is_err());
        assert!(check_extended_fisher(&probe, &IndexSet::from_zero_based([4]), &tol()).is_err());
    }

    #[test]
    fn koteljanskii_worked_example() {
        let a = kotel_example::<Rational>();
        let v = check_extended_koteljanskii(&a, &set(&[1, 2, 3, 4]), &set(&[3, 4, 5, 6]), &tol()).unwrap();
        assert_eq!(v.lhs, r(-46875, 65536));
        assert_eq!(v.constant, r(-27, 16));
        assert_eq!(v.rhs, r(-421875, 1048576));
        assert!(v.preconditions.met);
        // exact comparison orders the two values opposite to the claimed bound
        assert!(v.lhs < v.rhs);
        assert!(!v.holds);

        let f = fisher_sharp(3).unwrap();
        let v = check_extended_koteljanskii(&f, &set(&[3]), &set(&[1, 2]), &tol()).unwrap();
        assert_eq!((v.lhs.clone(), v.rhs.clone()), (r(-1, 1), r(-1, 1)));
        assert!(v.holds);

        let id = SymMatrix::<Rational>::identity(6);
        let v = check_extended_koteljanskii(&id, &set(&[1, 2]), &set(&[3]), &tol()).unwrap();
        assert!(!v.preconditions.met);
        assert!(check_extended_koteljanskii(&id, &set(&[1, 2]), &set(&[2, 3]), &tol()).is_err());
    }

    #[test]
    fn classical_examples() {
        let id = SymMatrix::<Rational>::identity(5);
        for v in check_classical(&id, &set(&[1, 2]), &set(&[2, 3, 4]), &tol()).unwrap() {
            assert!(v.holds && v.preconditions.met);
            assert_eq!(v.slack, r(0, 1));
        }
        let two = SymMatrix::from_rows(vec![vec![r(2, 1), r(1, 1)], vec![r(1, 1), r(2, 1)]]).unwrap();
        let [h, _, _] = check_classical(&two, &set(&[1]), &set(&[2]), &tol()).unwrap();
        assert_eq!((h.lhs.clone(), h.rhs.clone(), h.relation), (r(3, 1), r(4, 1), Relation::AtMost));
        assert!(h.holds);

        // (5/4) I - (1/4) J at n = 5 is singular: the all-ones eigenvalue is 0
        let a = SymMatrix::from_fn(5, |i, j| if i == j { r(1, 1) } else { r(-1, 4) });
        let [h, f, k] = check_classical(&a, &set(&[1, 2]), &set(&[2, 3]), &tol()).unwrap();
        assert_eq!((h.lhs.clone(), h.rhs.clone()), (r(0, 1), r(1, 1)));
        assert!(h.holds && f.holds && k.holds);

        let [h, ..] = check_classical(&kotel_example::<Rational>(), &set(&[1]), &set(&[2]), &tol()).unwrap();
        assert!(!h.preconditions.met);
    }

    #[test]
    fn ids_round_trip() {
        for id in InequalityId::ALL {
            assert_eq!(id.as_str().parse::<InequalityId>().unwrap(), id);
            assert_eq!(serde_json::to_string(&id).unwrap(), format!("\"{id}\""));
        }
        assert_eq!("ext-fisher".parse::<InequalityId>().unwrap(), InequalityId::ExtFisher);
        assert!("fisher".parse::<InequalityId>().is_err());
    }

    #[test]
    fn numbers_serialize() {
        let v = check_extended_hadamard(&uniform_offdiag(4, r(1, 2)).unwrap(), &tol()).unwrap();
        let json = serde_json::to_value(v.to_numbers()).unwrap();
        assert_eq!(json["lhs"], "-27/16");
        assert_eq!(json["relation"], ">=");
        assert_eq!(json["inequality_id"], "EXT_HADAMARD");
        assert_eq!(json["preconditions"]["met"], true);
    }
}
