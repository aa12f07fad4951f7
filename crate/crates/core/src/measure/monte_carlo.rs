//! Block-seeded Monte Carlo hit counting on spheres.
//!
//! Samples are split into fixed-size blocks; block `b` draws from a ChaCha8
//! stream `b` keyed by the configured seed. Block counts are integers summed in
//! block order, so the result is a pure function of `(seed, samples)` no matter
//! how rayon schedules the blocks.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub const BLOCK_SIZE: u64 = 1 << 14;

/// Seed and sample count for Monte Carlo evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct McConfig {
    pub seed: u64,
    pub samples: u64,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            samples: 1_000_000,
        }
    }
}

impl McConfig {
    pub fn new(seed: u64, samples: u64) -> Self {
        Self { seed, samples }
    }

    /// Independent stream for a sub-evaluation identified by `tag`.
    pub fn derive(&self, tag: u64) -> Self {
        Self {
            seed: mix(self.seed ^ mix(tag.wrapping_add(0x9E37_79B9_7F4A_7C15))),
            samples: self.samples,
        }
    }
}

/// SplitMix64 finalizer.
pub fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Counts Gaussian-direction samples satisfying `hit`.
///
/// Directions are drawn in `R^{sample_len}`; when `embed` is given its
/// columns (an orthonormal basis of a subspace) carry them into the ambient
/// space before `hit` is called. Directions are not normalized: every
/// indicator used here is a conjunction of sign tests.
pub(crate) fn count_hits<F>(
    mc: &McConfig,
    sample_len: usize,
    embed: Option<&DMatrix<f64>>,
    hit: F,
) -> u64
where
    F: Fn(&DVector<f64>) -> bool + Sync,
{
    let blocks = mc.samples.div_ceil(BLOCK_SIZE);
    let counts: Vec<u64> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(mc.seed);
            rng.set_stream(b);
            let n = BLOCK_SIZE.min(mc.samples - b * BLOCK_SIZE);
            let mut local = DVector::zeros(sample_len);
            let mut hits = 0u64;
            for _ in 0..n {
                for c in local.iter_mut() {
                    *c = rng.sample(StandardNormal);
                }
                let inside = match embed {
                    Some(basis) => hit(&(basis * &local)),
                    None => hit(&local),
                };
                if inside {
                    hits += 1;
                }
            }
            hits
        })
        .collect();
    counts.iter().sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_for_fixed_seed() {
        let mc = McConfig::new(11, 50_000);
        let a = count_hits(&mc, 3, None, |x| x[0] > 0.0 && x[1] > 0.0);
        let b = count_hits(&mc, 3, None, |x| x[0] > 0.0 && x[1] > 0.0);
        assert_eq!(a, b);
        let c = count_hits(&mc.derive(1), 3, None, |x| x[0] > 0.0 && x[1] > 0.0);
        assert_ne!(a, c);
    }

    #[test]
    fn independent_of_thread_count() {
        let mc = McConfig::new(5, 3 * BLOCK_SIZE + 17);
        let f = |x: &DVector<f64>| x[0] + 0.3 * x[2] > 0.0;
        let serial = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| count_hits(&mc, 3, None, f));
        let parallel = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| count_hits(&mc, 3, None, f));
        assert_eq!(serial, parallel);
    }

    #[test]
    fn derived_seeds_differ() {
        let mc = McConfig::default();
        assert_ne!(mc.derive(0).seed, mc.derive(1).seed);
        assert_eq!(mc.derive(7), mc.derive(7));
    }
}
