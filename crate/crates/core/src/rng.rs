//! Per-chain random streams.
//!
//! Every chain owns a bundle of ChaCha8 streams keyed by `(seed, chain index)`.
//! Refresh noise, integration durations, integrator midpoints and
//! initialization each get a disjoint stream, so two chains built from the
//! same key consume identical noise regardless of which engine they run.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::Scalar;

const PURPOSES: u64 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Purpose {
    Refresh = 0,
    Duration = 1,
    Integrator = 2,
    Init = 3,
}

/// SplitMix64 finalizer; used to derive a per-chain seed.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Independent random streams for one chain.
#[derive(Debug, Clone)]
pub struct ChainStreams {
    seed: u64,
    chain: u64,
    pub refresh: ChaCha8Rng,
    pub duration: ChaCha8Rng,
    pub integrator: ChaCha8Rng,
    pub init: ChaCha8Rng,
}

impl ChainStreams {
    pub fn new(seed: u64, chain: u64) -> Self {
        let stream = |p: Purpose| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chain.wrapping_mul(PURPOSES).wrapping_add(p as u64));
            rng
        };
        Self {
            seed,
            chain,
            refresh: stream(Purpose::Refresh),
            duration: stream(Purpose::Duration),
            integrator: stream(Purpose::Integrator),
            init: stream(Purpose::Init),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn chain(&self) -> u64 {
        self.chain
    }

    /// A reproducible 64-bit identifier for this `(seed, chain)` pair.
    pub fn chain_seed(&self) -> u64 {
        mix(self.seed ^ mix(self.chain))
    }
}

pub fn standard_normal<T: Scalar, R: Rng + ?Sized>(rng: &mut R) -> T {
    let z: f64 = StandardNormal.sample(rng);
    T::lit(z)
}

pub fn fill_standard_normal<T: Scalar, R: Rng + ?Sized>(rng: &mut R, out: &mut [T]) {
    for o in out {
        *o = standard_normal(rng);
    }
}

pub fn standard_normal_vec<T: Scalar, R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<T> {
    (0..n).map(|_| standard_normal(rng)).collect()
}

/// Exponential draw with the given mean.
pub fn exponential<T: Scalar, R: Rng + ?Sized>(rng: &mut R, mean: T) -> T {
    let e: f64 = Exp1.sample(rng);
    T::lit(e) * mean
}

/// Uniform draw on `[0, upper)`.
pub fn uniform<T: Scalar, R: Rng + ?Sized>(rng: &mut R, upper: T) -> T {
    let u: f64 = rng.random();
    T::lit(u) * upper
}
