//! Monte Carlo sampling of the random model.
//!
//! Samples are generated in fixed shards of [`SHARD_LEN`]. Shard `k` draws
//! from ChaCha8 seeded with `seed` on stream `k`, so the output depends only
//! on `(seed, n)` and not on the number of threads. Shard moments are merged
//! in shard order.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use super::{DistributionModel, Orientation};
use crate::summation::CompensatedSum;
use crate::{Error, Result};

pub const SHARD_LEN: u64 = 1 << 16;
pub const CF_PROBES: [f64; 4] = [0.5, 1.0, 2.0, 5.0];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CharacteristicProbe {
    pub t: f64,
    pub empirical_re: f64,
    pub empirical_im: f64,
    pub model_re: f64,
    pub model_im: f64,
    /// `|empirical - model|`
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonteCarloResult {
    pub samples: u64,
    pub seed: u64,
    pub mean: f64,
    pub variance: f64,
    pub min_value: f64,
    pub negative_fraction: f64,
    pub characteristic: Vec<CharacteristicProbe>,
}

struct Shard {
    count: u64,
    mean: f64,
    m2: f64,
    min: f64,
    negative: u64,
    cf: [(CompensatedSum, CompensatedSum); CF_PROBES.len()],
}

impl Shard {
    fn merge(&mut self, other: &Shard) {
        let n = (self.count + other.count) as f64;
        let delta = other.mean - self.mean;
        let w = other.count as f64 / n;
        self.m2 += other.m2 + delta * delta * self.count as f64 * w;
        self.mean += delta * w;
        self.count += other.count;
        self.min = self.min.min(other.min);
        self.negative += other.negative;
        for (a, b) in self.cf.iter_mut().zip(&other.cf) {
            a.0.merge(&b.0);
            a.1.merge(&b.1);
        }
    }
}

fn run_shard(model: &DistributionModel, seed: u64, index: u64, len: u64) -> Shard {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let sign = match model.orientation {
        Orientation::M1 => -1.0,
        Orientation::M2 => 1.0,
    };
    let sigma_tail = model.tail_variance.sqrt();
    let mut shard = Shard {
        count: 0,
        mean: 0.0,
        m2: 0.0,
        min: f64::INFINITY,
        negative: 0,
        cf: Default::default(),
    };
    for _ in 0..len {
        let mut fluctuation = 0.0;
        for &w in model.weights() {
            let angle: f64 = rng.random::<f64>() * TAU;
            fluctuation += w * angle.cos();
        }
        if sigma_tail > 0.0 {
            let g: f64 = rng.sample(StandardNormal);
            fluctuation += sigma_tail * g;
        }
        let z = model.mean_shift + sign * fluctuation;
        shard.count += 1;
        let delta = z - shard.mean;
        shard.mean += delta / shard.count as f64;
        shard.m2 += delta * (z - shard.mean);
        shard.min = shard.min.min(z);
        shard.negative += u64::from(z < 0.0);
        for (acc, &t) in shard.cf.iter_mut().zip(&CF_PROBES) {
            let (s, c) = (t * z).sin_cos();
            acc.0.add(c);
            acc.1.add(s);
        }
    }
    shard
}

/// Draws `n` realizations of `Z`, deterministically in `seed`.
pub fn sample_z(model: &DistributionModel, n: u64, seed: u64) -> Result<MonteCarloResult> {
    if n == 0 {
        return Err(Error::Domain("Monte Carlo needs at least one sample".into()));
    }
    let shards = n.div_ceil(SHARD_LEN);
    let results: Vec<Shard> = (0..shards)
        .into_par_iter()
        .map(|k| run_shard(model, seed, k, SHARD_LEN.min(n - k * SHARD_LEN)))
        .collect();
    let mut iter = results.into_iter();
    let mut total = iter.next().expect("n >= 1");
    for s in iter {
        total.merge(&s);
    }
    let nf = n as f64;
    let characteristic = CF_PROBES
        .iter()
        .zip(&total.cf)
        .map(|(&t, (c, s))| {
            let empirical = Complex64::new(c.value() / nf, s.value() / nf);
            // E e^{itZ} is the conjugate of mu_hat(t).
            let model_cf = model.mu_hat(t).conj();
            CharacteristicProbe {
                t,
                empirical_re: empirical.re,
                empirical_im: empirical.im,
                model_re: model_cf.re,
                model_im: model_cf.im,
                deviation: (empirical - model_cf).norm(),
            }
        })
        .collect();
    Ok(MonteCarloResult {
        samples: n,
        seed,
        mean: total.mean,
        variance: if n > 1 { total.m2 / (nf - 1.0) } else { 0.0 },
        min_value: total.min,
        negative_fraction: total.negative as f64 / nf,
        characteristic,
    })
}
