//! SplitMix64, used for reproducible random messages.
//!
//! State advances by `0x9E3779B97F4A7C15`; each output is the state passed
//! through the standard mixing function (shifts 30/27/31, multipliers
//! `0xBF58476D1CE4E5B9` and `0x94D049BB133111EB`). Byte streams are the
//! outputs serialized little-endian and concatenated, with the last word
//! truncated as needed. Any implementation following this description
//! produces identical messages for the same seed.

#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    pub fn bytes(&mut self, len: usize) -> Vec<u8> {
        let mut out = Vec::with_capacity(len + 8);
        while out.len() < len {
            out.extend_from_slice(&self.next_u64().to_le_bytes());
        }
        out.truncate(len);
        out
    }
}
