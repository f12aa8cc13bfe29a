use serde::Serialize;

use super::matrix::SymMatrix;
use crate::{Error, Result};

const MAX_SWEEPS: usize = 100;

/// Eigenvalues in nondecreasing order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum(Vec<f64>);

impl Spectrum {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn min(&self) -> f64 {
        self.0.first().copied().unwrap_or(f64::INFINITY)
    }

    pub fn max(&self) -> f64 {
        self.0.last().copied().unwrap_or(f64::NEG_INFINITY)
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// `A = Q diag(values) Q^T`; column `k` of `vectors` (row-major `n x n`)
/// belongs to `spectrum.values()[k]`.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub spectrum: Spectrum,
    pub vectors: Vec<f64>,
}

impl EigenDecomposition {
    pub fn reconstruct(&self) -> SymMatrix<f64> {
        let n = self.spectrum.len();
        let q = &self.vectors;
        let lam = self.spectrum.values();
        SymMatrix::from_fn(n, |i, j| (0..n).map(|k| q[i * n + k] * lam[k] * q[j * n + k]).sum())
    }
}

/// Cyclic Jacobi eigenvalue iteration with threshold skipping.
pub fn eigen_decomposition(a: &SymMatrix<f64>) -> Result<EigenDecomposition> {
    let n = a.order();
    let mut m: Vec<f64> = a.rows().flatten().copied().collect();
    let mut q = vec![0.0; n * n];
    for i in 0..n {
        q[i * n + i] = 1.0;
    }
    let frob: f64 = m.iter().map(|x| x * x).sum::<f64>().sqrt();
    let target = f64::EPSILON * frob;

    let mut converged = n < 2;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let off: f64 = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .map(|(i, j)| m[i * n + j] * m[i * n + j])
            .sum::<f64>()
            .sqrt();
        if off <= target || off == 0.0 {
            converged = true;
            break;
        }
        for p in 0..n {
            for r in p + 1..n {
                let apr = m[p * n + r];
                if apr.abs() <= f64::MIN_POSITIVE {
                    continue;
                }
                let app = m[p * n + p];
                let arr = m[r * n + r];
                let theta = (arr - app) / (2.0 * apr);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                for k in 0..n {
                    let mkp = m[k * n + p];
                    let mkr = m[k * n + r];
                    m[k * n + p] = c * mkp - s * mkr;
                    m[k * n + r] = s * mkp + c * mkr;
                }
                for k in 0..n {
                    let mpk = m[p * n + k];
                    let mrk = m[r * n + k];
                    m[p * n + k] = c * mpk - s * mrk;
                    m[r * n + k] = s * mpk + c * mrk;
                }
                m[p * n + r] = 0.0;
                m[r * n + p] = 0.0;
                for k in 0..n {
                    let qkp = q[k * n + p];
                    let qkr = q[k * n + r];
                    q[k * n + p] = c * qkp - s * qkr;
                    q[k * n + r] = s * qkp + c * qkr;
                }
            }
        }
    }
    if !converged {
        return Err(Error::NonConvergence { sweeps: MAX_SWEEPS });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| m[x * n + x].total_cmp(&m[y * n + y]));
    let values = order.iter().map(|&k| m[k * n + k]).collect();
    let mut vectors = vec![0.0; n * n];
    for (dst, &src) in order.iter().enumerate() {
        for i in 0..n {
            vectors[i * n + dst] = q[i * n + src];
        }
    }
    Ok(EigenDecomposition { spectrum: Spectrum(values), vectors })
}

impl SymMatrix<f64> {
    pub fn eigenvalues(&self) -> Result<Spectrum> {
        eigen_decomposition(self).map(|d| d.spectrum)
    }
}

/// `e_k(x)`, the degree-`k` elementary symmetric polynomial.
pub fn elementary_symmetric(x: &[f64], k: usize) -> f64 {
    let mut e = vec![0.0; k + 1];
    e[0] = 1.0;
    for &v in x {
        for j in (1..=k.min(x.len())).rev() {
            e[j] += e[j - 1] * v;
        }
    }
    e[k]
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Characteristic polynomial coefficients by Faddeev-LeVerrier:
    /// `det(tI - A) = sum_k c[k] t^(n-k)`.
    fn char_poly(a: &SymMatrix<f64>) -> Vec<f64> {
        let n = a.order();
        let av: Vec<f64> = a.rows().flatten().copied().collect();
        let mut mk = vec![0.0; n * n];
        let mut c = vec![1.0];
        for k in 1..=n {
            // M_k = A M_{k-1} + c_{k-1} I
            let mut next = vec![0.0; n * n];
            for i in 0..n {
                for j in 0..n {
                    next[i * n + j] = (0..n).map(|l| av[i * n + l] * mk[l * n + j]).sum::<f64>();
                }
                next[i * n + i] += c[k - 1];
            }
            mk = next;
            let tr: f64 = (0..n).map(|i| (0..n).map(|l| av[i * n + l] * mk[l * n + i]).sum::<f64>()).sum();
            c.push(-tr / k as f64);
        }
        c
    }

    fn eval(c: &[f64], t: f64) -> f64 {
        c.iter().fold(0.0, |acc, &x| acc * t + x)
    }

    #[test]
    fn identity_spectrum() {
        let s = SymMatrix::<f64>::identity(3).eigenvalues().unwrap();
        assert_eq!(s.values(), &[1.0, 1.0, 1.0]);
    }

    #[test]
    fn uniform_offdiag_spectrum_matches_char_poly() {
        // diagonal 1, off-diagonal -1/2, n = 4: {-1/2, 3/2, 3/2, 3/2}
        let a = SymMatrix::from_fn(4, |i, j| if i == j { 1.0 } else { -0.5 });
        let s = a.eigenvalues().unwrap();
        let expect = [-0.5, 1.5, 1.5, 1.5];
        for (x, y) in s.values().iter().zip(expect) {
            assert!((x - y).abs() < 1e-13, "{x} vs {y}");
        }
        let c = char_poly(&a);
        for &l in s.values() {
            assert!(eval(&c, l).abs() < 1e-12);
        }
    }

    #[test]
    fn small_random_matrices_are_char_poly_roots() {
        let mut seed = 12345u64;
        let mut next = || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((seed >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        for n in 1..=4 {
            for _ in 0..50 {
                let vals: Vec<f64> = (0..n * n).map(|_| next()).collect();
                let a = SymMatrix::from_fn(n, |i, j| vals[i * n + j]);
                let s = a.eigenvalues().unwrap();
                let c = char_poly(&a);
                for &l in s.values() {
                    // |p(l)| relative to the size of p' near the root
                    assert!(eval(&c, l).abs() < 1e-10, "n={n} root {l}");
                }
                assert!((s.sum() - a.trace()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn reconstruction() {
        let a = SymMatrix::from_fn(6, |i, j| ((i + 1) * (j + 2)) as f64 / 7.0 - (i as f64 - j as f64).abs());
        let d = eigen_decomposition(&a).unwrap();
        let b = d.reconstruct();
        for i in 0..6 {
            for j in 0..6 {
                assert!((a[(i, j)] - b[(i, j)]).abs() < 1e-12);
            }
        }
        assert!(d.spectrum.values().windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn elementary_symmetric_small() {
        let x = [-1.0, 2.0, 2.0];
        assert_eq!(elementary_symmetric(&x, 0), 1.0);
        assert_eq!(elementary_symmetric(&x, 1), 3.0);
        assert_eq!(elementary_symmetric(&x, 2), 0.0);
        assert_eq!(elementary_symmetric(&x, 3), -4.0);
    }
}
