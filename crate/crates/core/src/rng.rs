//! Pinned counter-based generator and substream layout.
//!
//! All randomness comes from ChaCha20 (`rand_chacha` 0.3). A `u64` seed is
//! expanded to the 256-bit key with `SeedableRng::seed_from_u64`; each
//! signal uses its own ChaCha stream id, so streams never overlap. Sample
//! `k` of a complex Gaussian stream consumes 32-bit words `4k..4k+4`, which
//! lets any chunk of a stream be generated independently.

use num_complex::Complex64;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

/// Identifies the generator algorithm and seeding convention. Changing any
/// part of the derivation must bump this string.
pub const GENERATOR_VERSION: &str = "chacha20-v1";

/// ChaCha stream ids, one per independent signal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum Substream {
    Probe = 0,
    UserNoise1 = 1,
    Secret = 2,
    UserNoise2 = 3,
    EveNoise1 = 4,
    EveNoise2 = 5,
    Payload = 16,
    HashSeed = 17,
}

const WORDS_PER_SAMPLE: u128 = 4;
const TWO_PI: f64 = std::f64::consts::TAU;
const U53: f64 = 1.0 / (1u64 << 53) as f64;

pub fn stream_rng(seed: u64, stream: Substream) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}

/// Circular complex Gaussian samples of a fixed variance, split evenly
/// between real and imaginary parts (Box-Muller).
pub struct ComplexGaussianStream {
    rng: ChaCha20Rng,
    variance: f64,
}

impl ComplexGaussianStream {
    pub fn new(seed: u64, stream: Substream, variance: f64, start_index: u64) -> Self {
        let mut rng = stream_rng(seed, stream);
        rng.set_word_pos(WORDS_PER_SAMPLE * start_index as u128);
        Self { rng, variance }
    }

    pub fn next_sample(&mut self) -> Complex64 {
        // u1 in (0, 1], u2 in [0, 1)
        let u1 = ((self.rng.next_u64() >> 11) + 1) as f64 * U53;
        let u2 = (self.rng.next_u64() >> 11) as f64 * U53;
        if self.variance == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let r = (-self.variance * u1.ln()).sqrt();
        let (s, c) = (TWO_PI * u2).sin_cos();
        Complex64::new(r * c, r * s)
    }

    pub fn take_vec(&mut self, n: usize) -> Vec<Complex64> {
        (0..n).map(|_| self.next_sample()).collect()
    }
}

/// Uniform random bits from a substream.
pub fn random_bits(seed: u64, stream: Substream, n: usize) -> Vec<bool> {
    let mut rng = stream_rng(seed, stream);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let w = rng.next_u64();
        out.extend((0..64).map(|i| (w >> i) & 1 == 1).take(n - out.len()));
    }
    out
}

/// Independent child seed `index` of `seed` (SplitMix64 finalizer).
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Fresh 64-bit seed from operating-system entropy.
pub fn os_seed() -> u64 {
    let mut b = [0u8; 8];
    getrandom::getrandom(&mut b).expect("OS entropy source unavailable");
    u64::from_le_bytes(b)
}
