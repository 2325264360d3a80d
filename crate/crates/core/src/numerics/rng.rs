//! Deterministic random number generation.
//!
//! The generator is xoshiro256++ 1.0 (David Blackman and Sebastiano Vigna,
//! 2019, public domain), seeded through splitmix64 as its authors recommend.
//! Both algorithms are fixed by this crate's output contract: the same seed
//! must reproduce the same Monte Carlo results on every platform and in
//! every future version, so the implementation is frozen here rather than
//! delegated to an external crate whose stream might change.
//!
//! Stream layout rules that callers rely on:
//! - [`RandomSource::next_f64`] consumes exactly one `u64` and returns a
//!   value in `[0, 1)` with 53 random bits.
//! - [`RandomSource::next_normal`] consumes exactly two `u64`s per draw
//!   (Box–Muller, the sine partner is discarded), so the position in the
//!   stream after `n` draws is independent of the values drawn.
//! - [`RandomSource::derive`] gives an order-independent per-key substream:
//!   deriving (seed, key) is a pure function of its arguments.

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// One step of the splitmix64 sequence.
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(GOLDEN_GAMMA);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A seeded xoshiro256++ stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RandomSource {
    s: [u64; 4],
}

impl RandomSource {
    /// Expands `seed` into the 256-bit state via four splitmix64 outputs.
    pub fn from_seed(seed: u64) -> Self {
        let mut sm = seed;
        let mut s = [0u64; 4];
        for slot in &mut s {
            *slot = splitmix64(&mut sm);
        }
        // the all-zero state is a fixed point of xoshiro; splitmix64 cannot
        // produce four consecutive zeros, but guard against it anyway
        if s == [0; 4] {
            s[0] = GOLDEN_GAMMA;
        }
        RandomSource { s }
    }

    /// An independent substream identified by `key` under a common `seed`.
    ///
    /// The mapping is a pure function of `(seed, key)`: deriving streams in
    /// any order, or deriving some and not others, yields identical
    /// per-key sequences.
    pub fn derive(seed: u64, key: u64) -> Self {
        let mut mix = seed ^ key.wrapping_mul(GOLDEN_GAMMA);
        Self::from_seed(splitmix64(&mut mix))
    }

    pub fn next_u64(&mut self) -> u64 {
        let s = &mut self.s;
        let result = s[0].wrapping_add(s[3]).rotate_left(23).wrapping_add(s[0]);
        let t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = s[3].rotate_left(45);
        result
    }

    /// Uniform on `[0, 1)` from the top 53 bits of one `u64`.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * 2f64.powi(-53)
    }

    /// One standard normal draw by Box–Muller, consuming exactly two `u64`s.
    ///
    /// `u1` is shifted into `(0, 1]` so the logarithm is always finite; the
    /// second Box–Muller output is discarded to keep the stream position a
    /// function of the draw count alone.
    pub fn next_normal(&mut self) -> f64 {
        let u1 = ((self.next_u64() >> 11) + 1) as f64 * 2f64.powi(-53);
        let u2 = (self.next_u64() >> 11) as f64 * 2f64.powi(-53);
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }
}
