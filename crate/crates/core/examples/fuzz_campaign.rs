//! Fuzzes every inequality at one order and summarises the reports.
//!
//! Violations are verdicts that failed with every precondition met. The
//! extended Fischer bound collects many of them for random partitions.

use locps::bounds::InequalityId;
use locps::cone::TolerancePolicy;
use locps::harness::{fuzz_bound, SampleConfig, Selector};

fn main() -> locps::Result<()> {
    let n = 5;
    let tol = TolerancePolicy::default();
    let cfg = SampleConfig::new(n, 2_000, 42);
    for kind in InequalityId::ALL {
        let r = fuzz_bound(kind, &cfg, &Selector::default(), &tol)?;
        println!(
            "{kind:<24} trials {} rejects {} min rel slack {:+.3e} violations {} probes {}",
            r.trials,
            r.rejects,
            r.min_rel_slack.unwrap_or(f64::NAN),
            r.violations.len(),
            r.probes.len()
        );
        for v in r.violations.iter().take(3) {
            println!("    {} lhs {} rhs {}", v.source, v.verdict.lhs, v.verdict.rhs);
        }
    }
    Ok(())
}
