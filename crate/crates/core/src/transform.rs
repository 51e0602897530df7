//! The polar transform `G_k = G^{⊗k}` over F_2 with `G = [[1, 1], [0, 1]]`.
//!
//! # Index convention
//!
//! Input `j` (0-based) of the butterfly is the logical channel whose branch
//! string is the binary expansion of `j`, most significant bit first, with bit
//! value 0 meaning the worse channel and 1 the better one at that level. The
//! top level pairs position `i` with position `i + n/2`, so the first half of
//! the inputs are the worse channels of the first split, exactly as in the
//! recursive two-group wiring. No bit-reversal permutation is applied
//! anywhere; [`encode`] equals the Kronecker-power matrix product with rows and
//! columns in natural order. Construction, decoding and simulation all rely on
//! this one convention.

use serde::{Deserialize, Serialize};

use crate::bits::BitWord;
use crate::error::{invalid, Result};

/// Recursion depth `k` and block length `n = 2^k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransformSpec {
    k: u32,
    n: usize,
}

impl TransformSpec {
    pub fn new(k: u32) -> Result<Self> {
        if k >= usize::BITS - 1 {
            return invalid(format!("recursion depth {k} too large"));
        }
        Ok(Self { k, n: 1 << k })
    }

    pub fn from_len(n: usize) -> Result<Self> {
        Self::new(log2_len(n)?)
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

/// `log2(n)` for a power of two, invalid-argument otherwise.
pub fn log2_len(n: usize) -> Result<u32> {
    if !n.is_power_of_two() {
        return invalid(format!("block length {n} is not a power of two"));
    }
    Ok(n.trailing_zeros())
}

/// Number of CNOT gates in the transform circuit: `(n/2)·log2(n)`.
pub fn cnot_count(n: usize) -> Result<usize> {
    Ok(n / 2 * log2_len(n)? as usize)
}

// Bit positions `p` within a word for which `p & h == 0`, indexed by log2(h).
const LOW_MASKS: [u64; 6] = [
    0x5555_5555_5555_5555,
    0x3333_3333_3333_3333,
    0x0f0f_0f0f_0f0f_0f0f,
    0x00ff_00ff_00ff_00ff,
    0x0000_ffff_0000_ffff,
    0x0000_0000_ffff_ffff,
];

/// `G_k · z`.
pub fn encode(z: &BitWord) -> BitWord {
    let mut out = z.clone();
    encode_in_place(&mut out);
    out
}

/// In-place butterfly: for every stride `h` and pair `(i, i + h)` with bit `h`
/// of `i` clear, `x[i] ^= x[i + h]`.
pub fn encode_in_place(word: &mut BitWord) {
    let n = word.len();
    let words = word.words_mut();
    let mut h = 1;
    while h < n {
        if h < 64 {
            let mask = LOW_MASKS[h.trailing_zeros() as usize];
            for w in words.iter_mut() {
                *w ^= (*w >> h) & mask;
            }
        } else {
            let hw = h / 64;
            for i in 0..words.len() {
                if i & hw == 0 {
                    words[i] ^= words[i + hw];
                }
            }
        }
        h <<= 1;
    }
}

/// `G_k^T · x`, the action of the same circuit in the conjugate basis
/// (control and target of every CNOT swapped).
pub fn encode_transpose(x: &BitWord) -> BitWord {
    let mut out = x.clone();
    encode_transpose_in_place(&mut out);
    out
}

pub fn encode_transpose_in_place(word: &mut BitWord) {
    let n = word.len();
    let words = word.words_mut();
    let mut h = 1;
    while h < n {
        if h < 64 {
            let mask = LOW_MASKS[h.trailing_zeros() as usize];
            for w in words.iter_mut() {
                *w ^= (*w & mask) << h;
            }
        } else {
            let hw = h / 64;
            for i in 0..words.len() {
                if i & hw == 0 {
                    words[i + hw] ^= words[i];
                }
            }
        }
        h <<= 1;
    }
}

/// `G_k · z` on an unpacked slice of 0/1 bytes.
pub fn encode_bits(bits: &mut [u8]) -> Result<()> {
    let n = bits.len();
    log2_len(n)?;
    let mut h = 1;
    while h < n {
        for base in (0..n).step_by(2 * h) {
            for i in base..base + h {
                bits[i] ^= bits[i + h];
            }
        }
        h <<= 1;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn word(bits: &[u8]) -> BitWord {
        BitWord::from_bits(bits).unwrap()
    }

    #[test]
    fn base_kernel() {
        assert_eq!(encode(&word(&[1, 1])), word(&[0, 1]));
        assert_eq!(encode(&word(&[1, 0])), word(&[1, 0]));
        assert_eq!(encode(&word(&[0, 1])), word(&[1, 1]));
        assert_eq!(encode_transpose(&word(&[1, 0])), word(&[1, 1]));
        assert_eq!(encode_transpose(&word(&[0, 1])), word(&[0, 1]));
    }

    #[test]
    fn four_bit_examples() {
        assert_eq!(encode(&word(&[0, 0, 0, 1])), word(&[1, 1, 1, 1]));
        assert_eq!(encode(&word(&[0, 1, 0, 0])), word(&[1, 1, 0, 0]));
    }

    #[test]
    fn zero_maps_to_zero() {
        for k in 0..12 {
            let z = BitWord::zeros(1 << k).unwrap();
            assert_eq!(encode(&z), z);
            assert_eq!(encode_transpose(&z), z);
        }
    }

    #[test]
    fn gate_counts() {
        assert_eq!(cnot_count(1).unwrap(), 0);
        assert_eq!(cnot_count(2).unwrap(), 1);
        assert_eq!(cnot_count(4).unwrap(), 4);
        assert_eq!(cnot_count(1024).unwrap(), 5120);
        assert!(cnot_count(12).is_err());
        assert!(cnot_count(0).is_err());
    }

    #[test]
    fn unpacked_matches_packed() {
        let bits: Vec<u8> = (0..256).map(|i| ((i * 7 + i / 5) % 3 == 0) as u8).collect();
        let mut unpacked = bits.clone();
        encode_bits(&mut unpacked).unwrap();
        assert_eq!(encode(&word(&bits)).to_bits(), unpacked);
        assert!(encode_bits(&mut [0u8; 6]).is_err());
    }

    #[test]
    fn spec_from_len() {
        let t = TransformSpec::from_len(4096).unwrap();
        assert_eq!((t.k(), t.n()), (12, 4096));
        assert!(TransformSpec::from_len(100).is_err());
    }
}
