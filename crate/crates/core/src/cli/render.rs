//! Plain-text tables for `--pretty`.

use std::fmt::Write;

use super::{BoundEntry, MinorEntry, Skipped};
use crate::cone::{LocalReport, MembershipReport};
use crate::harness::{FuzzReport, IdentityReport};
use crate::symcore::{Number, Rational};

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "-".into(), |v| format!("{v:.6e}"))
}

fn num(x: &Number) -> String {
    x.to_string()
}

pub(super) fn check(m: &MembershipReport, local: Option<&LocalReport>, n: usize) -> String {
    let mut s = String::new();
    let sig = m.signature;
    let _ = writeln!(s, "classification  {}", m.classification);
    let _ = writeln!(s, "mode            {}", m.mode);
    let _ = writeln!(s, "det             {}", num(&m.det_value));
    if let Some(t) = m.det_threshold {
        let _ = writeln!(s, "det threshold   {t:e}");
    }
    let _ = writeln!(s, "min eigenvalue  {:.6e}", m.min_eigenvalue);
    let _ = writeln!(s, "signature       ({}, {}, {})", sig.negative, sig.zero, sig.positive);
    let _ = writeln!(s, "\norder-{} submatrices:", n.saturating_sub(1));
    for w in &m.witnesses {
        let _ = writeln!(s, "  {:<24} {:<11} {:.6e}", w.indices.to_string(), w.definiteness, w.min_eigenvalue);
    }
    if let Some(l) = local {
        let _ = writeln!(s, "\norder-{} submatrices: all PSD {}, all PD {}", l.k, l.all_psd, l.all_pd);
        for w in l.witnesses.iter().filter(|w| !w.definiteness.is_psd()) {
            let _ = writeln!(s, "  {:<24} {}", w.indices.to_string(), w.definiteness);
        }
    }
    s
}

pub(super) fn bounds(verdicts: &[BoundEntry], skipped: &[Skipped]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:<24} {:<2} {:>22} {:>22} {:>22} {:<6} {:<5} sets",
        "inequality", "", "lhs", "rhs", "slack", "holds", "pre"
    );
    for e in verdicts {
        let v = &e.verdict;
        let rel = match v.relation {
            crate::bounds::Relation::AtLeast => ">=",
            crate::bounds::Relation::AtMost => "<=",
        };
        let sets = [e.alpha.as_ref().map(|a| format!("alpha={a}")), e.beta.as_ref().map(|b| format!("beta={b}"))]
            .into_iter()
            .flatten()
            .collect::<Vec<_>>()
            .join(" ");
        let _ = writeln!(
            s,
            "{:<24} {:<2} {:>22} {:>22} {:>22} {:<6} {:<5} {}",
            v.inequality_id.as_str(),
            rel,
            num(&v.lhs),
            num(&v.rhs),
            num(&v.slack),
            v.holds,
            v.preconditions.met,
            sets
        );
        for c in v.preconditions.failed() {
            let _ = writeln!(s, "    precondition {} failed: {}", c.name, c.detail);
        }
    }
    for k in skipped {
        let _ = writeln!(s, "{:<24} skipped: {}", k.inequality, k.reason);
    }
    s
}

pub(super) fn fuzz(r: &FuzzReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{} n={} seed={} trials={} rejects={}", r.kind, r.n, r.seed, r.trials, r.rejects);
    let _ = writeln!(s, "min slack       {}", opt(r.min_slack));
    let _ = writeln!(s, "min rel slack   {}", opt(r.min_rel_slack));
    let _ = writeln!(s, "min det/prod    {}", opt(r.min_ratio));
    let _ = writeln!(s, "precondition failures {}", r.precondition_failures);
    let _ = writeln!(s, "violations      {}", r.violations.len());
    for v in r.violations.iter().take(10) {
        let _ = writeln!(
            s,
            "  {:<36} lhs {} rhs {} slack {}",
            v.source,
            num(&v.verdict.lhs),
            num(&v.verdict.rhs),
            num(&v.verdict.slack)
        );
    }
    for p in &r.probes {
        let _ = writeln!(s, "probe {:<30} holds {:<5} slack {}", p.label, p.verdict.holds, num(&p.verdict.slack));
    }
    s
}

pub(super) fn suite(r: &IdentityReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "n={} trials={} seed={} passed={}", r.n, r.trials, r.seed, r.passed);
    for c in &r.checks {
        let _ = writeln!(
            s,
            "  {:<28} failures {:>5}  max error {:.3e}  tol {:e}",
            c.name, c.failures, c.max_error, c.tolerance
        );
        for f in &c.examples {
            let _ = writeln!(s, "      trial {}: {}", f.trial, f.detail);
        }
    }
    s
}

pub(super) fn oracle(det: &Rational, minors: &[MinorEntry], agree: bool) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "det {det}  (elimination agrees: {agree})");
    for m in minors {
        let _ = writeln!(s, "  {:<24} {}", m.indices.to_string(), m.value);
    }
    s
}
