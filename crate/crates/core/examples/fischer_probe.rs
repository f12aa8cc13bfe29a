//! The extended Fischer bound: tight on the scaled sharp family, and
//! failing on a uniform matrix when the complementary block is singular.

use locps::bounds::check_extended_fisher;
use locps::cone::TolerancePolicy;
use locps::families::{fisher_sharp, uniform_offdiag};
use locps::symcore::{IndexSet, PrincipalMinors, Rational};

fn main() -> locps::Result<()> {
    let tol = TolerancePolicy::default();
    for n in 3..=6 {
        let a = fisher_sharp(n)?;
        let v = check_extended_fisher(&a, &IndexSet::from_one_based(&[n])?, &tol)?;
        println!("fisher_sharp({n}): det {} rhs {} slack {}", a.determinant(), v.rhs, v.slack);
    }
    let a = uniform_offdiag(4, Rational::new(1, 2))?;
    let v = check_extended_fisher(&a, &IndexSet::from_one_based(&[1, 2, 3])?, &tol)?;
    println!("uniform_offdiag(4, 1/2), alpha = {{1,2,3}}: lhs {} rhs {} holds {}", v.lhs, v.rhs, v.holds);
    Ok(())
}
