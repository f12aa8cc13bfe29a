//! Walks `A(r)` towards the end of its cone interval and watches
//! `det / prod(a_ii)` approach the Hadamard constant.

use locps::bounds::{check_extended_hadamard, hadamard_constant};
use locps::cone::TolerancePolicy;
use locps::families::ar_family;
use locps::symcore::{Rational, Scalar};

fn main() -> locps::Result<()> {
    let n = 5;
    let c: Rational = hadamard_constant(n)?;
    println!("c_H({n}) = {c} ~ {:.9}", c.to_f64());
    for k in 1..=6 {
        let r = Rational::new(-1, n as i64 - 2) + Rational::new(1, 10i64.pow(k));
        let v = check_extended_hadamard(&ar_family(n, r.clone())?, &TolerancePolicy::default())?;
        println!("r = -1/3 + 1e-{k}: det {:.9} slack {:.3e} holds {}", v.lhs.to_f64(), v.slack.to_f64(), v.holds);
    }
    Ok(())
}
