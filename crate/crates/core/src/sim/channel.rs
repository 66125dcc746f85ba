//! Bit-exact dicode erasure channel.
//!
//! Bits `b in {0, 1}` map to `2b - 1`, pass through `1 - D`, and the output
//! `{-2, 0, 2}` is rescaled to `y_k = b_k - b_{k-1} in {-1, 0, 1}`. Every
//! section is preceded by a known zero state and followed by one known zero
//! flush bit, so a section of `M` bits produces `M + 1` symbols and the
//! sections can be detected independently.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{check_probability, Error, Result};

/// Transmitted bits, dicode outputs and erasure pattern.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChannelRealization {
    section_len: usize,
    /// Information bits, section-major.
    bits: Vec<u8>,
    /// `section_len + 1` symbols per section.
    outputs: Vec<i8>,
    erased: Vec<bool>,
}

impl ChannelRealization {
    /// Builds a realization from explicit parts, checking that the outputs
    /// follow from the bits.
    pub fn from_parts(section_len: usize, bits: Vec<u8>, erased: Vec<bool>) -> Result<Self> {
        if section_len == 0 || !bits.len().is_multiple_of(section_len) {
            return Err(Error::InvalidSimulation(format!(
                "{} bits do not split into sections of {section_len}",
                bits.len()
            )));
        }
        if bits.iter().any(|&b| b > 1) {
            return Err(Error::InvalidSimulation("bits must be 0 or 1".into()));
        }
        let sections = bits.len() / section_len;
        if erased.len() != sections * (section_len + 1) {
            return Err(Error::InvalidSimulation(format!(
                "expected {} erasure flags, got {}",
                sections * (section_len + 1),
                erased.len()
            )));
        }
        let outputs = dicode_outputs(&bits, section_len);
        Ok(Self {
            section_len,
            bits,
            outputs,
            erased,
        })
    }

    pub fn section_len(&self) -> usize {
        self.section_len
    }

    pub fn sections(&self) -> usize {
        self.bits.len() / self.section_len
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn outputs(&self) -> &[i8] {
        &self.outputs
    }

    pub fn erased(&self) -> &[bool] {
        &self.erased
    }

    /// Bits, outputs and erasures of section `s`.
    pub fn section(&self, s: usize) -> (&[u8], &[i8], &[bool]) {
        let m = self.section_len;
        let sym = s * (m + 1)..(s + 1) * (m + 1);
        (&self.bits[s * m..(s + 1) * m], &self.outputs[sym.clone()], &self.erased[sym])
    }

    pub fn erasure_fraction(&self) -> f64 {
        self.erased.iter().filter(|&&e| e).count() as f64 / self.erased.len() as f64
    }
}

fn dicode_outputs(bits: &[u8], section_len: usize) -> Vec<i8> {
    let mut out = Vec::with_capacity(bits.len() + bits.len() / section_len);
    for section in bits.chunks(section_len) {
        let mut prev = 0i8;
        for &b in section {
            out.push(b as i8 - prev);
            prev = b as i8;
        }
        out.push(-prev);
    }
    out
}

/// Transmits `bits` in sections of `section_len` and erases each output
/// symbol independently with probability `epsilon`.
pub fn simulate_channel(bits: &[u8], section_len: usize, epsilon: f64, seed: u64) -> Result<ChannelRealization> {
    check_probability("epsilon", epsilon)?;
    if section_len == 0 || !bits.len().is_multiple_of(section_len) {
        return Err(Error::InvalidSimulation(format!(
            "{} bits do not split into sections of {section_len}",
            bits.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let symbols = bits.len() + bits.len() / section_len;
    let erased = (0..symbols).map(|_| rng.random_bool(epsilon)).collect();
    ChannelRealization::from_parts(section_len, bits.to_vec(), erased)
}

/// `count` i.i.d. uniform bits.
pub fn random_bits(count: usize, seed: u64) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| rng.random::<bool>() as u8).collect()
}

/// Seed of sub-stream `stream` of `master`: one SplitMix64 output of
/// `master + (stream + 1) * 0x9E3779B97F4A7C15`.
pub fn derive_seed(master: u64, stream: u64) -> u64 {
    let mut z = master.wrapping_add(stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
