//! Draws cone members and reports their spread of `det / prod(a_ii)`.

use locps::bounds::hadamard_constant;
use locps::harness::{sample_cone, SampleConfig};

fn main() -> locps::Result<()> {
    for n in 3..=8 {
        let samples = sample_cone(&SampleConfig::new(n, 1_000, 3))?;
        let ratios: Vec<f64> = samples.iter().map(|a| a.determinant() / a.diagonal_product()).collect();
        let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        println!("n = {n}: ratio in [{lo:.5}, {hi:.5}], floor {:.5}", hadamard_constant::<f64>(n)?);
    }
    Ok(())
}
