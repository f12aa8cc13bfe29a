//! Runs the determinant identity suite at every supported order.

use locps::harness::identity_suite;

fn main() -> locps::Result<()> {
    for n in 3..=8 {
        let r = identity_suite(n, 500, 1)?;
        println!("n = {n}: passed {}", r.passed);
        for c in &r.checks {
            println!("    {:<28} max error {:.3e} (tol {:e})", c.name, c.max_error, c.tolerance);
        }
    }
    Ok(())
}
