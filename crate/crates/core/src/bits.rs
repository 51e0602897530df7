//! Packed binary words and their hex serialization.
//!
//! Hex layout: bit `i` of a string lands in nibble `i / 4`, most significant
//! bit first, so reading the hex digits left to right reads the bits in index
//! order. Trailing padding bits of the last nibble are zero. Every serialized
//! bit string carries its length in a separate `bits` field.

use std::fmt;
use std::ops::BitXor;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{invalid, Error, Result};

const WORD: usize = 64;

/// Fixed-length binary vector whose length is a power of two.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitWord {
    len: usize,
    words: Vec<u64>,
}

impl BitWord {
    pub fn zeros(len: usize) -> Result<Self> {
        if !len.is_power_of_two() {
            return invalid(format!("bit word length {len} is not a power of two"));
        }
        Ok(Self {
            len,
            words: vec![0; len.div_ceil(WORD)],
        })
    }

    pub fn from_bools(bits: &[bool]) -> Result<Self> {
        let mut w = Self::zeros(bits.len())?;
        for (i, &b) in bits.iter().enumerate() {
            w.set(i, b);
        }
        Ok(w)
    }

    /// Builds a word from 0/1 bytes.
    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        let mut w = Self::zeros(bits.len())?;
        for (i, &b) in bits.iter().enumerate() {
            match b {
                0 => {}
                1 => w.set(i, true),
                _ => return invalid(format!("bit value {b} at position {i}")),
            }
        }
        Ok(w)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    /// Always false; the shortest word has length one.
    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, bit: bool) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        let mask = 1u64 << (i % WORD);
        if bit {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn to_bits(&self) -> Vec<u8> {
        self.iter().map(u8::from).collect()
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Index-order reversal: bit `i` moves to `n - 1 - i`.
    pub fn reversed(&self) -> Self {
        let mut out = Self {
            len: self.len,
            words: vec![0; self.words.len()],
        };
        for i in 0..self.len {
            if self.get(i) {
                out.set(self.len - 1 - i, true);
            }
        }
        out
    }

    pub fn xor_assign(&mut self, other: &BitWord) {
        assert_eq!(self.len, other.len, "xor of words with different lengths");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub(crate) fn words_mut(&mut self) -> &mut [u64] {
        &mut self.words
    }

    pub fn to_hex(&self) -> String {
        pack_hex(self.iter(), self.len)
    }

    pub fn from_hex(len: usize, hex: &str) -> Result<Self> {
        Self::from_bools(&unpack_hex(len, hex)?)
    }
}

impl BitXor for &BitWord {
    type Output = BitWord;

    fn bitxor(self, rhs: &BitWord) -> BitWord {
        let mut out = self.clone();
        out.xor_assign(rhs);
        out
    }
}

impl fmt::Debug for BitWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitWord({self})")
    }
}

impl fmt::Display for BitWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Wire form of a bit string: explicit length plus hex digits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HexBits {
    pub bits: usize,
    pub hex: String,
}

impl HexBits {
    pub fn from_bools(bits: &[bool]) -> Self {
        Self {
            bits: bits.len(),
            hex: pack_hex(bits.iter().copied(), bits.len()),
        }
    }

    pub fn to_bools(&self) -> Result<Vec<bool>> {
        unpack_hex(self.bits, &self.hex)
    }
}

impl Serialize for BitWord {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        HexBits {
            bits: self.len,
            hex: self.to_hex(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for BitWord {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let h = HexBits::deserialize(d)?;
        BitWord::from_hex(h.bits, &h.hex).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for `Vec<bool>` fields stored as [`HexBits`].
pub mod hex_bools {
    use super::HexBits;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[bool], s: S) -> Result<S::Ok, S::Error> {
        HexBits::from_bools(v).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<bool>, D::Error> {
        HexBits::deserialize(d)?
            .to_bools()
            .map_err(serde::de::Error::custom)
    }
}

fn pack_hex(bits: impl Iterator<Item = bool>, len: usize) -> String {
    let mut bytes = vec![0u8; len.div_ceil(8)];
    for (i, b) in bits.enumerate() {
        if b {
            bytes[i / 8] |= 0x80 >> (i % 8);
        }
    }
    let mut s = hex::encode(bytes);
    s.truncate(len.div_ceil(4));
    s
}

fn unpack_hex(len: usize, digits: &str) -> Result<Vec<bool>> {
    if digits.len() != len.div_ceil(4) {
        return invalid(format!(
            "hex string of {} digits cannot hold exactly {len} bits",
            digits.len()
        ));
    }
    let mut padded = digits.to_ascii_lowercase();
    if padded.len() % 2 == 1 {
        padded.push('0');
    }
    let bytes = hex::decode(&padded).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let total = bytes.len() * 8;
    let mut out = Vec::with_capacity(len);
    for i in 0..total {
        let b = bytes[i / 8] & (0x80 >> (i % 8)) != 0;
        if i < len {
            out.push(b);
        } else if b {
            return invalid("nonzero padding bits in hex string");
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rejects_non_power_of_two() {
        assert!(BitWord::zeros(3).is_err());
        assert!(BitWord::zeros(0).is_err());
        assert!(BitWord::from_bits(&[0, 2]).is_err());
    }

    #[test]
    fn hex_layout_is_msb_first() {
        let w = BitWord::from_bits(&[1, 1]).unwrap();
        assert_eq!(w.to_hex(), "c");
        let w = BitWord::from_bits(&[0, 0, 0, 1, 1, 0, 0, 0]).unwrap();
        assert_eq!(w.to_hex(), "18");
        assert!(unpack_hex(2, "d").is_err());
        assert!(unpack_hex(3, "ff").is_err());
    }

    #[test]
    fn json_carries_length() {
        let w = BitWord::from_bits(&[1, 0, 0, 1]).unwrap();
        let s = serde_json::to_string(&w).unwrap();
        assert_eq!(s, r#"{"bits":4,"hex":"9"}"#);
        let back: BitWord = serde_json::from_str(&s).unwrap();
        assert_eq!(back, w);
    }

    proptest! {
        #[test]
        fn hex_roundtrip(bits in prop::collection::vec(any::<bool>(), 0..300)) {
            let h = HexBits::from_bools(&bits);
            prop_assert_eq!(h.to_bools().unwrap(), bits);
        }

        #[test]
        fn reverse_is_involution(k in 0u32..9, seed in any::<u64>()) {
            let n = 1usize << k;
            let bits: Vec<bool> = (0..n).map(|i| (seed.rotate_left(i as u32) ^ i as u64) & 1 == 1).collect();
            let w = BitWord::from_bools(&bits).unwrap();
            prop_assert_eq!(w.reversed().reversed(), w.clone());
            prop_assert_eq!(w.reversed().get(0), w.get(n - 1));
        }
    }
}
