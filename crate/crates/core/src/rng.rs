//! Seeded, splittable source of Uniform(0, 1] draws.
//!
//! A source is a `(seed, path)` pair. Each path element names a substream, so a
//! simulation can hand trial `t`, hypothesis `i` its own generator with
//! `source.substream(t).substream(i)`. The generator for a path is a ChaCha8
//! keyed by a SplitMix64 fold of the seed and path, which makes draws a pure
//! function of `(seed, path)` and independent of scheduling order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UniformSource {
    seed: u64,
    path: Vec<u64>,
}

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl UniformSource {
    pub fn new(seed: u64) -> Self {
        UniformSource {
            seed,
            path: Vec::new(),
        }
    }

    /// Child stream `id` of this stream.
    pub fn substream(&self, id: u64) -> Self {
        let mut path = self.path.clone();
        path.push(id);
        UniformSource {
            seed: self.seed,
            path,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn path(&self) -> &[u64] {
        &self.path
    }

    /// A fresh generator positioned at the start of this stream.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut state = splitmix64(self.seed);
        for &id in &self.path {
            state = splitmix64(state ^ splitmix64(id));
        }
        state = splitmix64(state ^ self.path.len() as u64);
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            state = splitmix64(state);
            chunk.copy_from_slice(&state.to_le_bytes());
        }
        ChaCha8Rng::from_seed(key)
    }

    /// The first `n` draws of this stream, each in (0, 1].
    pub fn uniforms(&self, n: usize) -> Vec<f64> {
        let mut rng = self.rng();
        (0..n).map(|_| uniform_open_closed(&mut rng)).collect()
    }

    /// The first draw of this stream.
    pub fn uniform(&self) -> f64 {
        uniform_open_closed(&mut self.rng())
    }
}

/// One Uniform(0, 1] draw. Zero is excluded so `x / u` is always defined.
#[inline]
pub fn uniform_open_closed<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    1.0 - rng.random::<f64>()
}
