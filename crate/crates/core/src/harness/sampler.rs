//! Seeded generation of cone members and of the auxiliary matrix classes
//! the fuzzer needs.
//!
//! Each sample index owns an independent ChaCha stream derived from the
//! seed, so a batch is the same whether it is drawn sequentially or in
//! parallel.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::cone::{classify_membership, Classification, TolerancePolicy};
use crate::families::ar_family;
use crate::symcore::SymMatrix;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleConfig {
    pub n: usize,
    pub count: usize,
    pub seed: u64,
    /// Magnitude of the rank-one perturbations, relative to the mean
    /// diagonal entry. Zero disables perturbation.
    pub perturb_scale: f64,
    /// Range of the diagonal congruence weights `d_i`.
    pub diag_range: (f64, f64),
    /// Total rejected draws allowed across the batch.
    pub max_rejects: u64,
}

impl SampleConfig {
    pub fn new(n: usize, count: usize, seed: u64) -> Self {
        SampleConfig { n, count, seed, perturb_scale: 0.05, diag_range: (0.5, 2.0), max_rejects: 100 * count as u64 }
    }

    pub fn with_perturb_scale(mut self, scale: f64) -> Self {
        self.perturb_scale = scale;
        self
    }

    pub fn with_diag_range(mut self, lo: f64, hi: f64) -> Self {
        self.diag_range = (lo, hi);
        self
    }

    pub fn with_max_rejects(mut self, max_rejects: u64) -> Self {
        self.max_rejects = max_rejects;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 3 {
            return Err(Error::InvalidOrder { n: self.n, reason: "sampling needs n >= 3" });
        }
        if !(self.perturb_scale >= 0.0 && self.perturb_scale.is_finite()) {
            return Err(Error::ParameterOutOfRange {
                name: "perturb_scale",
                reason: format!("must be finite and nonnegative, got {}", self.perturb_scale),
            });
        }
        let (lo, hi) = self.diag_range;
        if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
            return Err(Error::ParameterOutOfRange {
                name: "diag_range",
                reason: format!("need 0 < lo <= hi < inf, got [{lo}, {hi}]"),
            });
        }
        Ok(())
    }
}

/// Generator for trial `index` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// One accepted sample with the draws it took to get it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sample {
    pub index: u64,
    pub matrix: SymMatrix<f64>,
    pub classification: Classification,
    pub rejects: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleBatch {
    pub samples: Vec<Sample>,
    pub rejects: u64,
}

/// Draws `cfg.count` verified members of the locally-PSD cone.
pub fn sample_cone(cfg: &SampleConfig) -> Result<Vec<SymMatrix<f64>>> {
    Ok(sample_cone_batch(cfg, &TolerancePolicy::default())?.samples.into_iter().map(|s| s.matrix).collect())
}

/// [`sample_cone`] with classifications and reject counts retained.
pub fn sample_cone_batch(cfg: &SampleConfig, tol: &TolerancePolicy) -> Result<SampleBatch> {
    cfg.validate()?;
    let samples = (0..cfg.count as u64)
        .into_par_iter()
        .map(|index| {
            draw_verified(cfg.max_rejects, &mut trial_rng(cfg.seed, index), |rng| {
                let a = draw_cone_candidate(cfg, rng)?;
                let report = classify_membership(&a, tol)?;
                Ok(report.classification.is_locally_psd().then_some((a, report.classification)))
            })
            .map(|(matrix, classification, rejects)| Sample { index, matrix, classification, rejects })
        })
        .collect::<Result<Vec<_>>>()?;
    finish_batch(samples, cfg.max_rejects)
}

fn finish_batch(samples: Vec<Sample>, max_rejects: u64) -> Result<SampleBatch> {
    let rejects = check_reject_budget(samples.iter().map(|s| s.rejects).sum(), max_rejects)?;
    Ok(SampleBatch { samples, rejects })
}

pub(crate) fn check_reject_budget(rejects: u64, max_rejects: u64) -> Result<u64> {
    if rejects > max_rejects {
        return Err(Error::SamplerExhausted { rejects });
    }
    Ok(rejects)
}

/// Repeats `attempt` until it yields a value or `limit` rejects accumulate.
pub(crate) fn draw_verified<T>(
    limit: u64,
    rng: &mut ChaCha8Rng,
    mut attempt: impl FnMut(&mut ChaCha8Rng) -> Result<Option<(SymMatrix<f64>, T)>>,
) -> Result<(SymMatrix<f64>, T, u64)> {
    let mut rejects = 0;
    loop {
        if let Some((a, extra)) = attempt(rng)? {
            return Ok((a, extra, rejects));
        }
        rejects += 1;
        if rejects > limit {
            return Err(Error::SamplerExhausted { rejects });
        }
    }
}

/// `A(r)` with `r` uniform in `(-1/(n-2), -1/(n-1))`, symmetrically
/// permuted, congruence-scaled and perturbed. Not yet verified.
pub fn draw_cone_candidate(cfg: &SampleConfig, rng: &mut ChaCha8Rng) -> Result<SymMatrix<f64>> {
    let n = cfg.n;
    let lo = -1.0 / (n as f64 - 2.0);
    let hi = -1.0 / (n as f64 - 1.0);
    let r = loop {
        let r = rng.random_range(lo..hi);
        if r > lo {
            break r;
        }
    };
    let mut a = ar_family(n, r)?;

    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    a = a.permuted(&perm)?;

    a = a.congruence(&diagonal_weights(cfg, rng))?;

    if cfg.perturb_scale > 0.0 {
        let mean_diag = a.trace() / n as f64;
        let terms = rng.random_range(1..=2);
        for _ in 0..terms {
            let v = unit_vector(n, rng);
            let eps = cfg.perturb_scale * mean_diag * rng.random_range(-1.0..=1.0);
            a = a.add_outer(&eps, &v)?;
        }
    }
    Ok(a)
}

/// Square roots of weights drawn from `diag_range`, for `D^{1/2} A D^{1/2}`.
pub(crate) fn diagonal_weights(cfg: &SampleConfig, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let (lo, hi) = cfg.diag_range;
    (0..cfg.n).map(|_| if lo == hi { lo.sqrt() } else { rng.random_range(lo..=hi).sqrt() }).collect()
}

pub(crate) fn unit_vector(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-8 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

/// `G G^T / k` for an `n x k` standard normal `G` with `k` uniform in
/// `1..=n`, so every rank occurs.
pub fn gram_psd(n: usize, rng: &mut ChaCha8Rng) -> SymMatrix<f64> {
    let k = rng.random_range(1..=n);
    gram_of_rank(n, k, rng)
}

pub(crate) fn gram_of_rank(n: usize, k: usize, rng: &mut ChaCha8Rng) -> SymMatrix<f64> {
    let g: Vec<f64> = (0..n * k).map(|_| rng.sample(StandardNormal)).collect();
    SymMatrix::from_fn(n, |i, j| (0..k).map(|l| g[i * k + l] * g[j * k + l]).sum::<f64>() / k as f64)
}

/// `[[B, b], [b^T, a_nn]]` with Gram `B` of random rank, `a_nn` in
/// `[1/10, 2]` and `b_i = u_i sqrt(b_ii a_nn)`, `|u_i| < 1`. Meets every
/// leading-block condition except possibly `det <= 0`, which the caller
/// verifies.
pub fn draw_bordered_candidate(n: usize, rng: &mut ChaCha8Rng) -> SymMatrix<f64> {
    let b = gram_psd(n - 1, rng);
    let corner: f64 = rng.random_range(0.1..=2.0);
    let border: Vec<f64> = (0..n - 1).map(|i| rng.random_range(-1.0..1.0) * (b.get(i, i) * corner).sqrt()).collect();
    SymMatrix::from_fn(n, |i, j| match (i == n - 1, j == n - 1) {
        (true, true) => corner,
        (false, true) => border[i],
        (true, false) => border[j],
        (false, false) => *b.get(i, j),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::eigen_signature;

    #[test]
    fn raw_member() {
        let cfg = SampleConfig::new(3, 1, 7).with_perturb_scale(0.0).with_diag_range(1.0, 1.0);
        let batch = sample_cone_batch(&cfg, &TolerancePolicy::default()).unwrap();
        let a = &batch.samples[0].matrix;
        assert!(a.determinant() < 0.0);
        assert_eq!(a.diagonal(), vec![1.0; 3]);
        // A(r) is permutation invariant, so the raw member has a single off-diagonal value
        assert!((a[(0, 1)] - a[(1, 2)]).abs() < 1e-15);
        assert_eq!(batch.rejects, 0);
    }

    #[test]
    fn deterministic() {
        let cfg = SampleConfig::new(5, 40, 99);
        assert_eq!(sample_cone(&cfg).unwrap(), sample_cone(&cfg).unwrap());
        let other = SampleConfig::new(5, 40, 100);
        assert_ne!(sample_cone(&cfg).unwrap(), sample_cone(&other).unwrap());
        // a prefix of a batch is the smaller batch
        let small = SampleConfig::new(5, 10, 99);
        assert_eq!(sample_cone(&small).unwrap()[..], sample_cone(&cfg).unwrap()[..10]);
    }

    #[test]
    fn members_have_one_negative_eigenvalue() {
        let tol = TolerancePolicy::default();
        for a in sample_cone(&SampleConfig::new(4, 100, 3)).unwrap() {
            let s = eigen_signature(&a, &tol).unwrap();
            assert_eq!(s.negative, 1);
            assert_eq!(s.negative + s.zero + s.positive, 4);
        }
    }

    #[test]
    fn config_validation() {
        assert!(SampleConfig::new(2, 1, 0).validate().is_err());
        assert!(SampleConfig::new(3, 1, 0).with_perturb_scale(-1.0).validate().is_err());
        assert!(SampleConfig::new(3, 1, 0).with_diag_range(0.0, 1.0).validate().is_err());
        assert!(SampleConfig::new(3, 1, 0).with_diag_range(2.0, 1.0).validate().is_err());
        assert_eq!(SampleConfig::new(3, 7, 0).max_rejects, 700);
    }

    #[test]
    fn reject_guard() {
        // perturbations this large rarely survive re-verification
        let cfg = SampleConfig::new(8, 50, 1).with_perturb_scale(50.0).with_max_rejects(3);
        assert!(matches!(sample_cone(&cfg), Err(Error::SamplerExhausted { .. })));
    }

    #[test]
    fn bordered_candidates_meet_border_condition() {
        let mut rng = trial_rng(5, 0);
        for _ in 0..50 {
            let a = draw_bordered_candidate(5, &mut rng);
            for i in 0..4 {
                assert!(a[(i, 4)].powi(2) <= a[(i, i)] * a[(4, 4)]);
            }
        }
    }
}
