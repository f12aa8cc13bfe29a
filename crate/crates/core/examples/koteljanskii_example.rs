//! The six-by-six worked example for the extended Koteljanskii bound,
//! evaluated exactly.

use locps::bounds::check_extended_koteljanskii;
use locps::cone::{classify_membership, TolerancePolicy};
use locps::families::kotel_example;
use locps::symcore::{IndexSet, Rational, SymMatrix};

fn main() -> locps::Result<()> {
    let tol = TolerancePolicy::default();
    let a: SymMatrix<Rational> = kotel_example();
    println!("classification {}", classify_membership(&a, &tol)?.classification);
    let alpha = IndexSet::from_one_based(&[1, 2, 3, 4])?;
    let beta = IndexSet::from_one_based(&[3, 4, 5, 6])?;
    let v = check_extended_koteljanskii(&a, &alpha, &beta, &tol)?;
    println!("alpha {alpha} beta {beta}");
    println!("lhs      {}", v.lhs);
    println!("constant {}", v.constant);
    println!("rhs      {}", v.rhs);
    println!("slack    {}", v.slack);
    println!("holds    {}", v.holds);
    Ok(())
}
