//! The leading-block bound on its equality case and on a matrix whose
//! border is too large.

use locps::bounds::check_leading_block;
use locps::cone::TolerancePolicy;
use locps::families::{bordered_equality, counterexample_bordered};
use locps::symcore::{Rational, SymMatrix};

fn main() -> locps::Result<()> {
    let tol = TolerancePolicy::default();
    for n in 3..=6 {
        let a: SymMatrix<Rational> = bordered_equality(n)?;
        let v = check_leading_block(&a, &tol)?;
        println!(
            "bordered_equality({n}): det {} >= {} slack {} preconditions met {}",
            v.lhs, v.rhs, v.slack, v.preconditions.met
        );
    }
    let b: SymMatrix<Rational> = counterexample_bordered(Rational::from_integer(3));
    let v = check_leading_block(&b, &tol)?;
    println!("counterexample_bordered(3): det {} rhs {} holds {}", v.lhs, v.rhs, v.holds);
    for c in v.preconditions.failed() {
        println!("    {} failed: {}", c.name, c.detail);
    }
    Ok(())
}
