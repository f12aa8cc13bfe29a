//! Classification against the PSD / PD cones and the (n-1)-locally PSD cone.
//!
//! The locally-PSD cone used throughout is the strict variant: every
//! principal submatrix of order n-1 is PSD *and* `det < 0`. Its PD analogue
//! asks for positive definite submatrices instead.
//!
//! Floating-mode matrices are decided from eigenvalues with the thresholds
//! of a [`TolerancePolicy`]. Exact-mode matrices are decided from the signs
//! of their principal minors, so boundary members (a singular PSD submatrix,
//! an eigenvalue exactly zero) are classified without any tolerance.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::symcore::{IndexSet, Mode, Number, PrincipalMinors, Scalar, SymMatrix};
use crate::{Error, Result};

/// Largest order accepted by the exact (minor-sign) decision path.
pub const EXACT_MAX_ORDER: usize = 16;

/// Largest number of submatrices [`locally_psd_verdict`] will enumerate.
pub const ENUMERATION_LIMIT: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TolerancePolicy {
    /// Relative eigenvalue tolerance, scaled by `max(1, |A|_inf)`.
    pub eig_tol: f64,
    /// `det` counts as strictly negative below `-det_neg_tol * max(1, |A|_inf)^n`.
    pub det_neg_tol: f64,
    /// Relative slack tolerance for bound verdicts.
    pub slack_tol: f64,
}

impl Default for TolerancePolicy {
    fn default() -> Self {
        TolerancePolicy { eig_tol: 1e-9, det_neg_tol: 1e-12, slack_tol: 1e-9 }
    }
}

impl TolerancePolicy {
    pub fn eig_threshold(&self, norm: f64) -> f64 {
        self.eig_tol.abs() * norm.max(1.0)
    }

    /// Negative threshold below which a determinant is strictly negative.
    pub fn det_threshold(&self, norm: f64, n: usize) -> f64 {
        -self.det_neg_tol.abs() * norm.max(1.0).powi(n as i32)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Definiteness {
    #[serde(rename = "PD")]
    PositiveDefinite,
    #[serde(rename = "PSD")]
    PositiveSemidefinite,
    #[serde(rename = "INDEFINITE")]
    Indefinite,
}

impl fmt::Display for Definiteness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            Definiteness::PositiveDefinite => "PD",
            Definiteness::PositiveSemidefinite => "PSD",
            Definiteness::Indefinite => "INDEFINITE",
        })
    }
}

impl Definiteness {
    pub fn is_psd(self) -> bool {
        self != Definiteness::Indefinite
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PsdVerdict {
    pub definiteness: Definiteness,
    pub min_eigenvalue: f64,
}

/// One examined principal submatrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub indices: IndexSet,
    pub definiteness: Definiteness,
    pub min_eigenvalue: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalReport {
    pub k: usize,
    pub all_psd: bool,
    pub all_pd: bool,
    pub witnesses: Vec<Witness>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Classification {
    Pd,
    Psd,
    LocallyPsd,
    LocallyPd,
    None,
}

impl Classification {
    /// Member of the (n-1)-locally PSD cone (which contains the PD variant).
    pub fn is_locally_psd(self) -> bool {
        matches!(self, Classification::LocallyPsd | Classification::LocallyPd)
    }

    pub fn is_psd(self) -> bool {
        matches!(self, Classification::Pd | Classification::Psd)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Classification::Pd => "PD",
            Classification::Psd => "PSD",
            Classification::LocallyPsd => "LOCALLY_PSD",
            Classification::LocallyPd => "LOCALLY_PD",
            Classification::None => "NONE",
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

/// Inertia counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Signature {
    pub negative: usize,
    pub zero: usize,
    pub positive: usize,
}

impl Signature {
    pub fn as_tuple(self) -> (usize, usize, usize) {
        (self.negative, self.zero, self.positive)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MembershipReport {
    pub classification: Classification,
    pub mode: Mode,
    pub det_value: Number,
    /// Floating mode only; exact mode tests the sign of `det` directly.
    pub det_threshold: Option<f64>,
    pub min_eigenvalue: f64,
    pub signature: Signature,
    pub witnesses: Vec<Witness>,
}

/// Every principal minor, indexed by subset bitmask. Exact mode only.
struct MinorTable<T> {
    minors: Vec<T>,
}

impl<T: Scalar> MinorTable<T> {
    fn build<M: PrincipalMinors<Scalar = T>>(a: &M) -> Result<Self> {
        let n = a.order();
        if n > EXACT_MAX_ORDER {
            return Err(Error::GuardExceeded {
                what: "exact classification order",
                limit: EXACT_MAX_ORDER as u64,
                got: n as u64,
            });
        }
        let minors = (0u64..1 << n)
            .into_par_iter()
            .map(|mask| a.principal_minor(&IndexSet::from_mask(mask)))
            .collect::<Result<Vec<_>>>()?;
        Ok(MinorTable { minors })
    }

    fn get(&self, mask: u64) -> &T {
        &self.minors[mask as usize]
    }

    /// PSD iff every principal minor is nonnegative; PD iff every one is
    /// positive.
    fn definiteness(&self, mask: u64) -> Definiteness {
        let zero = T::zero();
        let mut all_positive = true;
        let mut sub = mask;
        while sub != 0 {
            let m = self.get(sub);
            if *m < zero {
                return Definiteness::Indefinite;
            }
            if m.is_zero() {
                all_positive = false;
            }
            sub = (sub - 1) & mask;
        }
        if all_positive {
            Definiteness::PositiveDefinite
        } else {
            Definiteness::PositiveSemidefinite
        }
    }
}

fn float_verdict(sub: &SymMatrix<f64>, threshold: f64) -> Result<PsdVerdict> {
    let min = sub.eigenvalues()?.min();
    let definiteness = if min > threshold {
        Definiteness::PositiveDefinite
    } else if min >= -threshold {
        Definiteness::PositiveSemidefinite
    } else {
        Definiteness::Indefinite
    };
    Ok(PsdVerdict { definiteness, min_eigenvalue: min })
}

fn is_exact<M: PrincipalMinors>() -> bool {
    <M::Scalar as Scalar>::MODE == Mode::Rational
}

/// PD iff `lambda_min > eig_tol`, PSD iff `lambda_min >= -eig_tol`, else
/// indefinite. Exact matrices are decided by principal minor signs; the
/// reported minimal eigenvalue is then informational.
pub fn psd_verdict<M: PrincipalMinors>(a: &M, tol: &TolerancePolicy) -> Result<PsdVerdict> {
    let n = a.order();
    if n == 0 {
        return Err(Error::InvalidOrder { n, reason: "empty matrix" });
    }
    let float = a.to_float();
    let threshold = tol.eig_threshold(float.inf_norm());
    let verdict = float_verdict(&float, threshold)?;
    if is_exact::<M>() {
        let table = MinorTable::build(a)?;
        return Ok(PsdVerdict { definiteness: table.definiteness((1 << n) - 1), ..verdict });
    }
    Ok(verdict)
}

fn binomial(n: usize, k: usize) -> u64 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| (acc * (n - i) as u128 / (i + 1) as u128).min(u64::MAX as u128)) as u64
}

/// Verdict for every order-`k` principal submatrix, in lexicographic order
/// of index sets. Thresholds scale with the norm of the whole matrix.
pub fn locally_psd_verdict<M: PrincipalMinors>(a: &M, k: usize, tol: &TolerancePolicy) -> Result<LocalReport> {
    let n = a.order();
    if k == 0 || k > n {
        return Err(Error::ParameterOutOfRange { name: "k", reason: format!("need 1 <= k <= {n}, got {k}") });
    }
    let count = binomial(n, k);
    if count > ENUMERATION_LIMIT {
        return Err(Error::GuardExceeded { what: "principal submatrix count", limit: ENUMERATION_LIMIT, got: count });
    }
    let table = if is_exact::<M>() { Some(MinorTable::build(a)?) } else { None };
    local_report(a, k, tol, table.as_ref())
}

fn local_report<M: PrincipalMinors>(
    a: &M,
    k: usize,
    tol: &TolerancePolicy,
    table: Option<&MinorTable<M::Scalar>>,
) -> Result<LocalReport> {
    let float = a.to_float();
    let threshold = tol.eig_threshold(float.inf_norm());
    let subsets: Vec<IndexSet> = IndexSet::combinations(a.order(), k).collect();
    let examine = |alpha: &IndexSet| -> Result<Witness> {
        let v = float_verdict(&float.principal_submatrix(alpha)?, threshold)?;
        let definiteness = match table {
            Some(t) => t.definiteness(alpha.mask()),
            None => v.definiteness,
        };
        Ok(Witness { indices: alpha.clone(), definiteness, min_eigenvalue: v.min_eigenvalue })
    };
    let witnesses = if subsets.len() >= 64 {
        subsets.par_iter().map(examine).collect::<Result<Vec<_>>>()?
    } else {
        subsets.iter().map(examine).collect::<Result<Vec<_>>>()?
    };
    Ok(LocalReport {
        k,
        all_psd: witnesses.iter().all(|w| w.definiteness.is_psd()),
        all_pd: witnesses.iter().all(|w| w.definiteness == Definiteness::PositiveDefinite),
        witnesses,
    })
}

/// Classifies `A` as PD, PSD, LOCALLY_PD, LOCALLY_PSD or NONE.
///
/// A strictly negative determinant routes to the local classes (PD/PSD are
/// then impossible); otherwise the global verdict decides. LOCALLY_PD is
/// reported in preference to LOCALLY_PSD when it applies.
pub fn classify_membership<M: PrincipalMinors>(a: &M, tol: &TolerancePolicy) -> Result<MembershipReport> {
    let n = a.order();
    if n < 2 {
        return Err(Error::InvalidOrder { n, reason: "classification needs n >= 2" });
    }
    let exact = is_exact::<M>();
    let float = a.to_float();
    let norm = float.inf_norm();
    let table = if exact { Some(MinorTable::build(a)?) } else { None };

    let det = match &table {
        Some(t) => t.get((1 << n) - 1).clone(),
        None => a.determinant(),
    };
    let (negative, det_threshold) = if exact {
        (det < <M::Scalar as Scalar>::zero(), None)
    } else {
        let thr = tol.det_threshold(norm, n);
        (det.to_f64() < thr, Some(thr))
    };

    let global = float_verdict(&float, tol.eig_threshold(norm))?;
    let global_def = match &table {
        Some(t) => t.definiteness((1 << n) - 1),
        None => global.definiteness,
    };
    let local = local_report(a, n - 1, tol, table.as_ref())?;

    let classification = if negative {
        if local.all_pd {
            Classification::LocallyPd
        } else if local.all_psd {
            Classification::LocallyPsd
        } else {
            Classification::None
        }
    } else {
        match global_def {
            Definiteness::PositiveDefinite => Classification::Pd,
            Definiteness::PositiveSemidefinite => Classification::Psd,
            Definiteness::Indefinite => Classification::None,
        }
    };

    let signature = match &table {
        Some(t) => signature_from_minors(n, t),
        None => eigen_signature(&float, tol)?,
    };

    Ok(MembershipReport {
        classification,
        mode: <M::Scalar as Scalar>::MODE,
        det_value: det.to_number(),
        det_threshold,
        min_eigenvalue: global.min_eigenvalue,
        signature,
        witnesses: local.witnesses,
    })
}

/// Counts of eigenvalues below `-eig_tol`, within `eig_tol` of zero, and
/// above `eig_tol` (thresholds scaled by `max(1, |A|_inf)`).
pub fn eigen_signature(a: &SymMatrix<f64>, tol: &TolerancePolicy) -> Result<Signature> {
    let threshold = tol.eig_threshold(a.inf_norm());
    let spectrum = a.eigenvalues()?;
    let mut s = Signature { negative: 0, zero: 0, positive: 0 };
    for &l in spectrum.values() {
        if l < -threshold {
            s.negative += 1;
        } else if l > threshold {
            s.positive += 1;
        } else {
            s.zero += 1;
        }
    }
    Ok(s)
}

/// Exact inertia from the characteristic polynomial.
///
/// `det(tI - A) = sum_k (-1)^k e_k t^(n-k)` where `e_k` is the sum of the
/// order-`k` principal minors. All roots are real, so Descartes' rule of
/// signs counts the positive roots exactly (sign changes of `(-1)^k e_k`)
/// and the negative roots exactly (sign changes of `e_k`); zero has the
/// multiplicity `n - max{k : e_k != 0}`.
pub fn eigen_signature_exact<M: PrincipalMinors>(a: &M) -> Result<Signature> {
    let table = MinorTable::build(a)?;
    Ok(signature_from_minors(a.order(), &table))
}

fn signature_from_minors<T: Scalar>(n: usize, table: &MinorTable<T>) -> Signature {
    let mut e = vec![T::zero(); n + 1];
    for mask in 0u64..1 << n {
        let k = mask.count_ones() as usize;
        e[k] = e[k].clone() + table.get(mask).clone();
    }
    let zero = T::zero();
    let sign = |x: &T| -> i8 {
        if *x > zero {
            1
        } else if *x < zero {
            -1
        } else {
            0
        }
    };
    let changes = |signs: &mut dyn Iterator<Item = i8>| -> usize {
        let nonzero: Vec<i8> = signs.filter(|&s| s != 0).collect();
        nonzero.windows(2).filter(|w| w[0] != w[1]).count()
    };
    let positive = changes(&mut e.iter().enumerate().map(|(k, x)| if k % 2 == 0 { sign(x) } else { -sign(x) }));
    let negative = changes(&mut e.iter().map(sign));
    let top = e.iter().rposition(|x| !x.is_zero()).unwrap_or(0);
    Signature { negative, zero: n - top, positive }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symcore::Rational;

    fn r(p: i64, q: i64) -> Rational {
        Rational::new(p, q)
    }

    fn uniform<T: Scalar>(n: usize, x: T) -> SymMatrix<T> {
        SymMatrix::from_fn(n, |i, j| if i == j { T::one() } else { -x.clone() })
    }

    #[test]
    fn psd_examples() {
        let tol = TolerancePolicy::default();
        let rank_one = SymMatrix::from_rows(vec![vec![1.0, -1.0], vec![-1.0, 1.0]]).unwrap();
        let v = psd_verdict(&rank_one, &tol).unwrap();
        assert_eq!(v.definiteness, Definiteness::PositiveSemidefinite);
        assert!(v.min_eigenvalue.abs() < 1e-15);

        let v = psd_verdict(&uniform(3, 1.0), &tol).unwrap();
        assert_eq!(v.definiteness, Definiteness::Indefinite);
        assert!((v.min_eigenvalue + 1.0).abs() < 1e-14);

        let v = psd_verdict(&SymMatrix::<f64>::identity(5), &tol).unwrap();
        assert_eq!(v.definiteness, Definiteness::PositiveDefinite);
        assert_eq!(v.min_eigenvalue, 1.0);
    }

    #[test]
    fn exact_psd_uses_minors() {
        let tol = TolerancePolicy::default();
        let rank_one = SymMatrix::from_rows(vec![vec![r(1, 1), r(-1, 1)], vec![r(-1, 1), r(1, 1)]]).unwrap();
        assert_eq!(psd_verdict(&rank_one, &tol).unwrap().definiteness, Definiteness::PositiveSemidefinite);
        // a hair below PSD; invisible at default float tolerance, exact says indefinite
        let almost = SymMatrix::from_rows(vec![
            vec![r(1, 1), r(-1, 1) - r(1, 1_000_000_000_000)],
            vec![r(-1, 1) - r(1, 1_000_000_000_000), r(1, 1)],
        ])
        .unwrap();
        assert_eq!(psd_verdict(&almost, &tol).unwrap().definiteness, Definiteness::Indefinite);
        assert_eq!(psd_verdict(&almost.to_f64(), &tol).unwrap().definiteness, Definiteness::PositiveSemidefinite);
    }

    #[test]
    fn local_verdict_examples() {
        let tol = TolerancePolicy::default();
        let two = SymMatrix::from_rows(vec![vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        let rep = locally_psd_verdict(&two, 1, &tol).unwrap();
        assert!(rep.all_pd && rep.witnesses.len() == 2);

        let kotel = uniform(6, r(1, 4));
        let rep = locally_psd_verdict(&kotel, 5, &tol).unwrap();
        assert!(rep.all_psd && !rep.all_pd);
        assert_eq!(rep.witnesses.len(), 6);
        for w in &rep.witnesses {
            assert_eq!(w.definiteness, Definiteness::PositiveSemidefinite);
            assert!(w.min_eigenvalue.abs() < 1e-14);
        }

        let u = uniform(4, 0.5);
        let rep = locally_psd_verdict(&u, 3, &tol).unwrap();
        assert!(rep.all_psd);
        assert!(rep.witnesses.iter().all(|w| w.min_eigenvalue.abs() < 1e-14));
        assert_eq!(rep.witnesses[0].indices.to_one_based(), vec![1, 2, 3]);
        assert_eq!(rep.witnesses[3].indices.to_one_based(), vec![2, 3, 4]);

        assert!(locally_psd_verdict(&u, 0, &tol).is_err());
        assert!(locally_psd_verdict(&u, 5, &tol).is_err());
    }

    #[test]
    fn enumeration_guard() {
        let big = SymMatrix::<f64>::identity(30);
        let e = locally_psd_verdict(&big, 15, &TolerancePolicy::default()).unwrap_err();
        assert!(matches!(e, Error::GuardExceeded { .. }));
    }

    #[test]
    fn classification_examples() {
        let tol = TolerancePolicy::default();
        for (label, m) in [
            ("float", classify_membership(&uniform(3, 1.0), &tol).unwrap()),
            ("exact", classify_membership(&uniform(3, r(1, 1)), &tol).unwrap()),
        ] {
            assert_eq!(m.classification, Classification::LocallyPsd, "{label}");
            assert_eq!(m.signature.as_tuple(), (1, 0, 2), "{label}");
        }
        let ar = uniform(4, 0.4);
        assert_eq!(classify_membership(&ar, &tol).unwrap().classification, Classification::LocallyPd);
        let id = SymMatrix::<f64>::identity(4);
        assert_eq!(classify_membership(&id, &tol).unwrap().classification, Classification::Pd);
        let psd = SymMatrix::from_rows(vec![vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        assert_eq!(classify_membership(&psd, &tol).unwrap().classification, Classification::Psd);
        // x below 1/(n-1) is PD, x = 1/(n-1) is singular PSD
        let below = uniform(4, r(1, 4));
        assert_eq!(classify_membership(&below, &tol).unwrap().classification, Classification::Pd);
        let at = uniform(4, r(1, 3));
        assert_eq!(classify_membership(&at, &tol).unwrap().classification, Classification::Psd);
        assert_eq!(classify_membership(&at.to_f64(), &tol).unwrap().classification, Classification::Psd);
        // x above 1/(n-2): subs indefinite
        let above = uniform(4, r(3, 4));
        assert_eq!(classify_membership(&above, &tol).unwrap().classification, Classification::None);
        assert!(classify_membership(&SymMatrix::<f64>::identity(1), &tol).is_err());
    }

    #[test]
    fn signatures() {
        let tol = TolerancePolicy::default();
        let kotel = uniform(6, 0.25);
        assert_eq!(eigen_signature(&kotel, &tol).unwrap().as_tuple(), (1, 0, 5));
        assert_eq!(eigen_signature(&SymMatrix::<f64>::zeros(4), &tol).unwrap().as_tuple(), (0, 4, 0));
        assert_eq!(eigen_signature_exact(&uniform(6, r(1, 4))).unwrap().as_tuple(), (1, 0, 5));
        assert_eq!(eigen_signature_exact(&SymMatrix::<Rational>::zeros(3)).unwrap().as_tuple(), (0, 3, 0));
        // {-1/2, 3/2 x3} and a rank-one PSD with two zero eigenvalues
        assert_eq!(eigen_signature_exact(&uniform(4, r(1, 2))).unwrap().as_tuple(), (1, 0, 3));
        let j3 = SymMatrix::from_fn(3, |_, _| r(1, 1));
        assert_eq!(eigen_signature_exact(&j3).unwrap().as_tuple(), (0, 2, 1));
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(30, 15), 155_117_520);
        assert_eq!(binomial(7, 7), 1);
    }
}
