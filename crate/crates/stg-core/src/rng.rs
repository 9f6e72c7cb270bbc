//! Counter-based deterministic random generator (`stg64`, version 1).
//!
//! Every randomized routine in this crate draws from this generator, so a
//! (seed, experiment index) pair pins down every sampled trace bit-for-bit,
//! on any platform, in any implementation that follows this contract:
//!
//! * `mix64` is the splitmix64 finalizer (Steele, Lea & Flood 2014).
//! * Output `i` (counting from 1) for seed `s` is
//!   `mix64(s + i * 0x9E3779B97F4A7C15)`, all arithmetic mod 2^64.
//!   This is exactly the splitmix64 stream seeded with `s`.
//! * `derive_stream(s, j)`, the pre-split seed for experiment `j`, is
//!   `mix64(mix64(s ^ 0x5851F42D4C957F2D) + j * 0x9E3779B97F4A7C15)`.
//! * A uniform double is the top 53 bits of one output: `(u >> 11) * 2^-53`,
//!   giving values in `[0, 1)`.
//! * A Bernoulli(p) draw consumes exactly one output and is true when the
//!   uniform double is `< p` — one draw even for p = 0 or p = 1, so streams
//!   stay aligned no matter the probabilities.

pub const RNG_NAME: &str = "stg64-v1";

const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
const STREAM_SALT: u64 = 0x5851_F42D_4C95_7F2D;

/// splitmix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for the `j`-th pre-split experiment stream of master seed `seed`.
#[inline]
pub fn derive_stream(seed: u64, j: u64) -> u64 {
    mix64(mix64(seed ^ STREAM_SALT).wrapping_add(j.wrapping_mul(GAMMA)))
}

#[derive(Clone, Debug)]
pub struct CounterRng {
    seed: u64,
    counter: u64,
}

impl CounterRng {
    pub fn new(seed: u64) -> CounterRng {
        CounterRng { seed, counter: 0 }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Number of outputs consumed so far.
    pub fn position(&self) -> u64 {
        self.counter
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        mix64(self.seed.wrapping_add(self.counter.wrapping_mul(GAMMA)))
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// One Bernoulli draw; always consumes exactly one output.
    #[inline]
    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.next_f64() < p
    }

    /// Uniform integer in `[0, bound)` by scaling one double; fine at the
    /// desk scales this crate targets (bound far below 2^53).
    #[inline]
    pub fn next_below(&mut self, bound: u64) -> u64 {
        debug_assert!(bound > 0);
        let v = (self.next_f64() * bound as f64) as u64;
        v.min(bound - 1)
    }
}
