//! Cofactor expansion against elimination, plus every principal minor.

use locps::families::kotel_example;
use locps::symcore::{all_principal_minors, cofactor_determinant, Rational, SymMatrix};

fn main() -> locps::Result<()> {
    let a: SymMatrix<Rational> = kotel_example();
    let cofactor = cofactor_determinant(&a)?;
    println!("cofactor {cofactor}, elimination {}", a.determinant());
    let minors = all_principal_minors(&a)?;
    let negative = minors.iter().filter(|(_, m)| m.is_negative()).count();
    println!("{} principal minors, {negative} negative", minors.len());
    for (s, m) in minors.iter().filter(|(s, _)| s.len() >= 5) {
        println!("    {s} {m}");
    }
    Ok(())
}
