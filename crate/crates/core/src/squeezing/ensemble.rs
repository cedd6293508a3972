use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Phasor;

/// Samples drawn per independently seeded block.
const BLOCK: usize = 4096;

/// Independent random streams used by the Monte-Carlo pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Stream {
    Vacuum = 1,
    Loss = 2,
    Readout = 3,
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of block `block` of `stream`, derived from position only.
pub(crate) fn block_seed(seed: u64, stream: Stream, tag: u64, block: u64) -> u64 {
    splitmix(splitmix(splitmix(seed ^ (stream as u64) << 56) ^ tag) ^ block)
}

/// `n` standard normal pairs scaled by `sigma`, reproducible for any thread
/// count.
pub(crate) fn gaussian_pairs(n: usize, sigma: f64, seed: u64, stream: Stream, tag: u64) -> Vec<Phasor> {
    let n_blocks = n.div_ceil(BLOCK);
    (0..n_blocks)
        .into_par_iter()
        .flat_map_iter(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(block_seed(seed, stream, tag, b as u64));
            let len = BLOCK.min(n - b * BLOCK);
            (0..len)
                .map(move |_| {
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = rng.sample(StandardNormal);
                    Phasor::new(sigma * re, sigma * im)
                })
                .collect::<Vec<_>>()
        })
        .collect()
}

/// Semiclassical field samples. `quanta_scale` is the photon flux of one
/// photon over the measurement bandwidth; vacuum has per-quadrature
/// variance `quanta_scale / 4`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhasorEnsemble {
    pub samples: Vec<Phasor>,
    pub seed: u64,
    pub quanta_scale: f64,
}

impl PhasorEnsemble {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn vacuum_variance(&self) -> f64 {
        self.quanta_scale / 4.0
    }
}

pub const MIN_SAMPLES: usize = 1000;

pub fn vacuum_ensemble(n_samples: usize, seed: u64, quanta_scale: f64) -> Result<PhasorEnsemble> {
    if n_samples < MIN_SAMPLES {
        return Err(Error::domain(format!(
            "ensemble needs at least {MIN_SAMPLES} samples, got {n_samples}"
        )));
    }
    if !(quanta_scale > 0.0) {
        return Err(Error::domain("quanta scale must be positive"));
    }
    let sigma = (quanta_scale / 4.0).sqrt();
    Ok(PhasorEnsemble {
        samples: gaussian_pairs(n_samples, sigma, seed, Stream::Vacuum, 0),
        seed,
        quanta_scale,
    })
}
