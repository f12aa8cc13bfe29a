//! Randomised evaluation of the bound checkers.
//!
//! Trials run in parallel; results are collected by trial index and merged
//! sequentially, so a report depends only on its configuration. Minima break
//! ties toward the lowest trial index, and probes are merged after trials.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::sampler::{
    check_reject_budget, diagonal_weights, draw_bordered_candidate, draw_cone_candidate, draw_verified, gram_psd,
    trial_rng, SampleConfig,
};
use crate::bounds::{
    check_classical, check_extended_fisher, check_extended_hadamard, check_extended_hadamard_classified,
    check_extended_koteljanskii, check_leading_block, BoundVerdict, InequalityId,
};
use crate::cone::{classify_membership, Classification, TolerancePolicy};
use crate::families::{bordered_equality, fisher_sharp, kotel_example, uniform_offdiag};
use crate::symcore::{IndexSet, Number, PrincipalMinors, Rational, SymMatrix};
use crate::{Error, Result};

/// How index sets are chosen for the partitioned inequalities.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SubsetStrategy {
    /// Fresh random sets per trial. For the extended Koteljanskii bound the
    /// pair always covers every index, so the union block is the sampled
    /// matrix itself.
    Random,
    /// The same sets for every trial.
    Fixed { alpha: IndexSet, beta: Option<IndexSet> },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Selector {
    pub subsets: SubsetStrategy,
    /// Also evaluate the exact boundary probes for the inequality.
    pub probes: bool,
}

impl Default for Selector {
    fn default() -> Self {
        Selector { subsets: SubsetStrategy::Random, probes: true }
    }
}

impl Selector {
    pub fn without_probes(mut self) -> Self {
        self.probes = false;
        self
    }
}

/// A verdict that failed although its preconditions held.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    /// `trial <index>` or the probe label.
    pub source: String,
    pub matrix: SymMatrix<f64>,
    pub alpha: Option<IndexSet>,
    pub beta: Option<IndexSet>,
    pub verdict: BoundVerdict<Number>,
}

/// An exactly evaluated boundary case.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeVerdict {
    pub label: String,
    pub alpha: Option<IndexSet>,
    pub beta: Option<IndexSet>,
    pub verdict: BoundVerdict<Number>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FuzzReport {
    pub kind: InequalityId,
    pub n: usize,
    pub seed: u64,
    pub trials: usize,
    pub rejects: u64,
    /// Minimum of `slack` over trials and probes.
    pub min_slack: Option<f64>,
    /// Minimum of `slack / max(1, |lhs|, |rhs|)`.
    pub min_rel_slack: Option<f64>,
    /// Minimum of `det(A) / (a_11 ... a_nn)` over sampled matrices.
    pub min_ratio: Option<f64>,
    /// Trials whose preconditions were not met; their verdicts are not
    /// counted as violations.
    pub precondition_failures: usize,
    pub violations: Vec<Violation>,
    pub probes: Vec<ProbeVerdict>,
}

struct Evaluated {
    source: String,
    matrix: SymMatrix<f64>,
    alpha: Option<IndexSet>,
    beta: Option<IndexSet>,
    verdict: BoundVerdict<Number>,
    ratio: Option<f64>,
    rejects: u64,
    is_probe: bool,
}

/// Samples `cfg.count` matrices suited to `kind`, evaluates the checker on
/// each, and merges the verdicts.
///
/// The extended bounds use [`super::sample_cone`] members; the leading-block
/// bound uses bordered Gram matrices kept only when `det <= 0`; the
/// classical bounds use Gram matrices of random rank.
pub fn fuzz_bound(
    kind: InequalityId,
    cfg: &SampleConfig,
    selector: &Selector,
    tol: &TolerancePolicy,
) -> Result<FuzzReport> {
    cfg.validate()?;
    if let SubsetStrategy::Fixed { alpha, beta } = &selector.subsets {
        alpha.check_range(cfg.n)?;
        if let Some(beta) = beta {
            beta.check_range(cfg.n)?;
        }
    }
    let trials = (0..cfg.count as u64)
        .into_par_iter()
        .map(|index| run_trial(kind, cfg, selector, tol, index))
        .collect::<Result<Vec<_>>>()?;
    let rejects = check_reject_budget(trials.iter().map(|t| t.rejects).sum(), cfg.max_rejects)?;

    let probes = if selector.probes { run_probes(kind, cfg.n, tol)? } else { Vec::new() };

    let mut report = FuzzReport {
        kind,
        n: cfg.n,
        seed: cfg.seed,
        trials: cfg.count,
        rejects,
        min_slack: None,
        min_rel_slack: None,
        min_ratio: None,
        precondition_failures: 0,
        violations: Vec::new(),
        probes: Vec::new(),
    };
    for e in trials.into_iter().chain(probes) {
        let slack = e.verdict.slack.to_f64();
        let rel = e.verdict.relative_slack_number();
        report.min_slack = Some(report.min_slack.map_or(slack, |m| m.min(slack)));
        report.min_rel_slack = Some(report.min_rel_slack.map_or(rel, |m| m.min(rel)));
        if let Some(ratio) = e.ratio {
            report.min_ratio = Some(report.min_ratio.map_or(ratio, |m| m.min(ratio)));
        }
        if !e.verdict.preconditions.met && !e.is_probe {
            report.precondition_failures += 1;
        }
        if e.is_probe {
            report.probes.push(ProbeVerdict {
                label: e.source.clone(),
                alpha: e.alpha.clone(),
                beta: e.beta.clone(),
                verdict: e.verdict.clone(),
            });
        }
        if e.verdict.preconditions.met && !e.verdict.holds {
            report.violations.push(Violation {
                source: e.source,
                matrix: e.matrix,
                alpha: e.alpha,
                beta: e.beta,
                verdict: e.verdict,
            });
        }
    }
    Ok(report)
}

impl BoundVerdict<Number> {
    fn relative_slack_number(&self) -> f64 {
        let scale = 1f64.max(self.lhs.to_f64().abs()).max(self.rhs.to_f64().abs());
        self.slack.to_f64() / scale
    }
}

fn diag_ratio(a: &SymMatrix<f64>) -> f64 {
    a.determinant() / a.diagonal_product()
}

fn run_trial(
    kind: InequalityId,
    cfg: &SampleConfig,
    selector: &Selector,
    tol: &TolerancePolicy,
    index: u64,
) -> Result<Evaluated> {
    let mut rng = trial_rng(cfg.seed, index);
    let source = format!("trial {index}");
    let n = cfg.n;
    let (matrix, classification, rejects) = match kind {
        InequalityId::ExtHadamard | InequalityId::ExtFisher | InequalityId::ExtKoteljanskii => {
            draw_verified(cfg.max_rejects, &mut rng, |rng| {
                let a = draw_cone_candidate(cfg, rng)?;
                let c = classify_membership(&a, tol)?.classification;
                Ok(c.is_locally_psd().then_some((a, c)))
            })?
        }
        InequalityId::LeadingBlock => draw_verified(cfg.max_rejects, &mut rng, |rng| {
            let a = draw_bordered_candidate(n, rng);
            let a = a.congruence(&diagonal_weights(cfg, rng))?;
            let v = check_leading_block(&a, tol)?;
            Ok(v.preconditions.met.then_some((a, Classification::None)))
        })?,
        _ => draw_verified(cfg.max_rejects, &mut rng, |rng| Ok(Some((gram_psd(n, rng), Classification::Psd))))?,
    };

    let (alpha, beta) = choose_subsets(kind, n, selector, &mut rng);
    let verdict = evaluate(kind, &matrix, classification, alpha.as_ref(), beta.as_ref(), tol)?;
    Ok(Evaluated {
        source,
        ratio: Some(diag_ratio(&matrix)),
        matrix,
        alpha,
        beta,
        verdict: verdict.to_numbers(),
        rejects,
        is_probe: false,
    })
}

fn choose_subsets(
    kind: InequalityId,
    n: usize,
    selector: &Selector,
    rng: &mut ChaCha8Rng,
) -> (Option<IndexSet>, Option<IndexSet>) {
    if !kind.needs_alpha() {
        return (None, None);
    }
    if let SubsetStrategy::Fixed { alpha, beta } = &selector.subsets {
        return (Some(alpha.clone()), beta.clone().or_else(|| kind.needs_beta().then(IndexSet::empty)));
    }
    let full = (1u64 << n) - 1;
    match kind {
        InequalityId::ExtFisher => (Some(IndexSet::from_mask(rng.random_range(1..full))), None),
        InequalityId::ExtKoteljanskii => loop {
            // each index goes to alpha only, beta only, or both
            let (mut a, mut b) = (0u64, 0u64);
            for i in 0..n {
                match rng.random_range(0..3) {
                    0 => a |= 1 << i,
                    1 => b |= 1 << i,
                    _ => {
                        a |= 1 << i;
                        b |= 1 << i;
                    }
                }
            }
            if (a ^ b).count_ones() >= 3 {
                break (Some(IndexSet::from_mask(a)), Some(IndexSet::from_mask(b)));
            }
        },
        _ => {
            let a = rng.random_range(0..=full);
            let b = rng.random_range(0..=full);
            (Some(IndexSet::from_mask(a)), kind.needs_beta().then(|| IndexSet::from_mask(b)))
        }
    }
}

fn evaluate<M: PrincipalMinors>(
    kind: InequalityId,
    a: &M,
    classification: Classification,
    alpha: Option<&IndexSet>,
    beta: Option<&IndexSet>,
    tol: &TolerancePolicy,
) -> Result<BoundVerdict<M::Scalar>> {
    let need = |s: Option<&IndexSet>| -> Result<IndexSet> {
        s.cloned().ok_or(Error::ParameterOutOfRange { name: "alpha", reason: "index set required".into() })
    };
    match kind {
        InequalityId::ExtHadamard => match classification {
            Classification::None => check_extended_hadamard(a, tol),
            c => check_extended_hadamard_classified(a, c, tol),
        },
        InequalityId::LeadingBlock => check_leading_block(a, tol),
        InequalityId::ExtFisher => check_extended_fisher(a, &need(alpha)?, tol),
        InequalityId::ExtKoteljanskii => check_extended_koteljanskii(a, &need(alpha)?, &need(beta)?, tol),
        InequalityId::ClassicalHadamard | InequalityId::ClassicalFisher | InequalityId::ClassicalKoteljanskii => {
            let alpha = alpha.cloned().unwrap_or_else(IndexSet::empty);
            let beta = beta.cloned().unwrap_or_else(IndexSet::empty);
            let [h, f, k] = check_classical(a, &alpha, &beta, tol)?;
            Ok(match kind {
                InequalityId::ClassicalHadamard => h,
                InequalityId::ClassicalFisher => f,
                _ => k,
            })
        }
    }
}

fn probe<M: PrincipalMinors>(
    label: String,
    kind: InequalityId,
    a: &M,
    alpha: Option<IndexSet>,
    beta: Option<IndexSet>,
    tol: &TolerancePolicy,
) -> Result<Evaluated> {
    let verdict = evaluate(kind, a, Classification::None, alpha.as_ref(), beta.as_ref(), tol)?;
    let matrix = a.to_float();
    Ok(Evaluated {
        source: label,
        ratio: Some(diag_ratio(&matrix)),
        matrix,
        alpha,
        beta,
        verdict: verdict.to_numbers(),
        rejects: 0,
        is_probe: true,
    })
}

/// Exact boundary cases for `kind` at order `n`.
///
/// - extended Hadamard: `uniform_offdiag(n, 1/(n-2))`, an equality case;
/// - leading block: `bordered_equality(n)`, an equality case;
/// - extended Fischer: `uniform_offdiag(n, 1/(n-2))` with `alpha = {1..n-1}`
///   (a singular block, so the bound side is 0 while `det < 0`) and
///   `fisher_sharp(n)` with `alpha = {n}`;
/// - extended Koteljanskii: `fisher_sharp(n)` with `alpha = {n}`,
///   `beta = {1..n-1}`, plus the 6x6 worked example when `n = 6`.
fn run_probes(kind: InequalityId, n: usize, tol: &TolerancePolicy) -> Result<Vec<Evaluated>> {
    let edge = Rational::new(1, n as i64 - 2);
    let last = IndexSet::from_zero_based([n - 1]);
    let head = IndexSet::full(n - 1);
    let mut out = Vec::new();
    match kind {
        InequalityId::ExtHadamard => {
            let a = uniform_offdiag(n, edge.clone())?;
            out.push(probe(format!("uniform_offdiag(n={n}, x={edge})"), kind, &a, None, None, tol)?);
        }
        InequalityId::LeadingBlock => {
            let a = bordered_equality::<Rational>(n)?;
            out.push(probe(format!("bordered_equality(n={n})"), kind, &a, None, None, tol)?);
        }
        InequalityId::ExtFisher => {
            let a = uniform_offdiag(n, edge.clone())?;
            out.push(probe(format!("uniform_offdiag(n={n}, x={edge})"), kind, &a, Some(head), None, tol)?);
            let f = fisher_sharp(n)?;
            out.push(probe(format!("fisher_sharp(n={n})"), kind, &f, Some(last), None, tol)?);
        }
        InequalityId::ExtKoteljanskii => {
            let f = fisher_sharp(n)?;
            out.push(probe(format!("fisher_sharp(n={n})"), kind, &f, Some(last), Some(head), tol)?);
            if n == 6 {
                let a = kotel_example::<Rational>();
                let alpha = IndexSet::from_zero_based(0..4);
                let beta = IndexSet::from_zero_based(2..6);
                out.push(probe("kotel_example".into(), kind, &a, Some(alpha), Some(beta), tol)?);
            }
        }
        _ => {}
    }
    Ok(out)
}
