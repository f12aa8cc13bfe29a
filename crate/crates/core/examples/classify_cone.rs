//! Classifies a few matrices and prints their witnesses.

use locps::cone::{classify_membership, TolerancePolicy};
use locps::families::{counterexample_2x2, uniform_offdiag};
use locps::symcore::Rational;

fn main() -> locps::Result<()> {
    let tol = TolerancePolicy::default();
    let cases = [
        ("uniform_offdiag(4, 1/2)", uniform_offdiag(4, Rational::new(1, 2))?),
        ("uniform_offdiag(4, 1/4)", uniform_offdiag(4, Rational::new(1, 4))?),
        ("counterexample_2x2(10)", counterexample_2x2(Rational::from_integer(10))),
    ];
    for (label, a) in &cases {
        let report = classify_membership(a, &tol)?;
        let s = report.signature;
        println!(
            "{label}: {} det {} inertia ({}, {}, {})",
            report.classification, report.det_value, s.negative, s.zero, s.positive
        );
        for w in &report.witnesses {
            println!("    {} {}", w.indices, w.definiteness);
        }
    }
    Ok(())
}
