//! Seeded random streams and the Poisson sampler.
//!
//! Samples are generated in fixed chunks of [`CHUNK`]; chunk `c` draws from
//! ChaCha8 seeded with `seed` on stream `(stream << 32) | c`. Results are
//! merged in chunk order, so output does not depend on the worker count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::factorial::ln_factorial;

/// Samples per independent random stream.
pub const CHUNK: usize = 64;

/// Environment variable holding the default worker count.
pub const WORKERS_ENV: &str = "SUSPENSION_LAB_WORKERS";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RngSpec {
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub stream: u32,
}

impl RngSpec {
    pub fn new(seed: u64, stream: u32) -> Self {
        Self { seed, stream }
    }

    pub fn chunk_rng(&self, chunk: u32) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(((self.stream as u64) << 32) | chunk as u64);
        rng
    }
}

/// Worker count from [`WORKERS_ENV`], if set to a positive integer.
pub fn default_workers() -> Option<usize> {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&n: &usize| n > 0)
}

/// Runs `f` once per sample, in parallel over chunks, and returns results in
/// sample order.
pub fn run_samples<T, F>(rng: &RngSpec, samples: usize, workers: Option<usize>, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng) -> T + Sync,
{
    let chunks = samples.div_ceil(CHUNK);
    let body = || {
        (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut r = rng.chunk_rng(c as u32);
                let len = CHUNK.min(samples - c * CHUNK);
                (0..len).map(|_| f(&mut r)).collect::<Vec<_>>()
            })
            .collect::<Vec<_>>()
    };
    let nested = match workers.or_else(default_workers) {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(body),
            Err(_) => body(),
        },
        None => body(),
    };
    nested.into_iter().flatten().collect()
}

/// Poisson sampler: sequential inversion below rate 10, Hormann's
/// transformed rejection with squeeze (PTRS) from 10 on.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PoissonSampler {
    rate: f64,
    exp_neg: f64,
    ptrs: Option<Ptrs>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct Ptrs {
    b: f64,
    a: f64,
    inv_alpha: f64,
    v_r: f64,
    log_rate: f64,
}

/// Rate from which rejection replaces inversion.
pub const INVERSION_LIMIT: f64 = 10.0;

impl PoissonSampler {
    pub fn new(rate: f64) -> Self {
        debug_assert!(rate >= 0.0 && rate.is_finite());
        let ptrs = (rate >= INVERSION_LIMIT).then(|| {
            let b = 0.931 + 2.53 * rate.sqrt();
            Ptrs {
                b,
                a: -0.059 + 0.02483 * b,
                inv_alpha: 1.1239 + 1.1328 / (b - 3.4),
                v_r: 0.9277 - 3.6224 / (b - 2.0),
                log_rate: rate.ln(),
            }
        });
        Self {
            rate,
            exp_neg: (-rate).exp(),
            ptrs,
        }
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        match &self.ptrs {
            None => self.invert(rng.gen::<f64>()),
            Some(p) => self.reject(p, rng),
        }
    }

    /// Smallest `k` with `u < F(k)`; nondecreasing in the rate for fixed `u`.
    #[inline]
    pub fn invert(&self, mut u: f64) -> u64 {
        let mut p = self.exp_neg;
        let mut k = 0u64;
        while u >= p {
            u -= p;
            k += 1;
            p *= self.rate / k as f64;
            if p == 0.0 {
                break;
            }
        }
        k
    }

    fn reject<R: Rng + ?Sized>(&self, p: &Ptrs, rng: &mut R) -> u64 {
        loop {
            let u = rng.gen::<f64>() - 0.5;
            let v = rng.gen::<f64>();
            let us = 0.5 - u.abs();
            let k = ((2.0 * p.a / us + p.b) * u + self.rate + 0.43).floor();
            if us >= 0.07 && v <= p.v_r {
                return k as u64;
            }
            if k < 0.0 || (us < 0.013 && v > us) {
                continue;
            }
            let lhs = v.ln() + p.inv_alpha.ln() - (p.a / (us * us) + p.b).ln();
            let rhs = -self.rate + k * p.log_rate - ln_factorial(k as u64);
            if lhs <= rhs {
                return k as u64;
            }
        }
    }
}
