//! SplitMix64 stream used for every randomized choice in the crate.
//!
//! Bounded draws use rejection sampling so that a given seed produces the
//! same sequence of choices on every platform: a raw draw `x` is accepted
//! when `x < 2^B - (2^B mod k)` (B = 64, or 128 for wide draws built from two
//! consecutive outputs, high word first) and mapped to `x mod k`.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform draw from `0..bound`. Panics if `bound == 0`.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "empty range");
        let rem = ((1u128 << 64) % bound as u128) as u64;
        let limit = u64::MAX - rem; // accept x <= 2^64 - 1 - rem
        loop {
            let x = self.next_u64();
            if x <= limit {
                return x % bound;
            }
        }
    }

    /// Uniform draw from `0..bound` over the full 128-bit range.
    pub fn below_u128(&mut self, bound: u128) -> u128 {
        assert!(bound > 0, "empty range");
        if bound <= u64::MAX as u128 {
            return self.below(bound as u64) as u128;
        }
        let rem = (u128::MAX % bound + 1) % bound;
        let limit = u128::MAX - rem;
        loop {
            let hi = self.next_u64() as u128;
            let lo = self.next_u64() as u128;
            let x = (hi << 64) | lo;
            if x <= limit {
                return x % bound;
            }
        }
    }

    /// Uniform index into a slice of length `len`.
    pub fn index(&mut self, len: usize) -> usize {
        self.below(len as u64) as usize
    }

    /// Child seed for an independent stream.
    pub fn fork(&mut self) -> u64 {
        self.next_u64()
    }
}
