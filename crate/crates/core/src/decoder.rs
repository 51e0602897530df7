//! Successive-cancellation decoding.
//!
//! The decoder follows the index convention of [`crate::transform`]: for a
//! block `llr[0..n]` the first half of the inputs is decoded from check-node
//! combinations of positions `i` and `i + n/2`, re-encoded, and the second half
//! from variable-node combinations. Decisions are taken in natural index order.
//! A phase-basis block is decoded by feeding it in reversed order.

use crate::bits::BitWord;
use crate::channels::BinaryInputChannel;
use crate::error::{invalid, Result};
use crate::scalar::{lit, Real};

/// Magnitude used for certain evidence.
pub const LLR_CLAMP: f64 = 40.0;

/// Per-position `ln(P(y|0) / P(y|1))`.
#[derive(Debug, Clone, PartialEq)]
pub struct LlrVector<T>(Vec<T>);

impl<T: Real> LlrVector<T> {
    /// Clamps every value to `±LLR_CLAMP`.
    pub fn new(values: Vec<T>) -> Result<Self> {
        if !values.len().is_power_of_two() {
            return invalid(format!("LLR vector length {} is not a power of two", values.len()));
        }
        let c: T = lit(LLR_CLAMP);
        Ok(Self(values.into_iter().map(|v| clamp(v, c)).collect()))
    }

    pub fn values(&self) -> &[T] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn reversed(&self) -> Self {
        Self(self.0.iter().rev().copied().collect())
    }
}

fn clamp<T: Real>(v: T, c: T) -> T {
    if v.is_nan() {
        T::zero()
    } else {
        v.max(-c).min(c)
    }
}

/// Per-symbol LLR lookup for a channel.
#[derive(Debug, Clone)]
pub struct LlrTable<T>(Vec<T>);

impl<T: Real> LlrTable<T> {
    pub fn new(ch: &BinaryInputChannel<T>) -> Self {
        let c: T = lit(LLR_CLAMP);
        let table = ch
            .transitions()
            .iter()
            .map(|&[p0, p1]| {
                if p0 == T::zero() && p1 == T::zero() {
                    T::zero()
                } else if p1 == T::zero() {
                    c
                } else if p0 == T::zero() {
                    -c
                } else {
                    clamp((p0 / p1).ln(), c)
                }
            })
            .collect();
        Self(table)
    }

    #[inline]
    pub fn get(&self, symbol: usize) -> Option<T> {
        self.0.get(symbol).copied()
    }

    pub fn apply(&self, y: &[usize]) -> Result<LlrVector<T>> {
        let values = y
            .iter()
            .map(|&s| match self.get(s) {
                Some(l) => Ok(l),
                None => invalid(format!("output symbol {s} outside channel alphabet")),
            })
            .collect::<Result<Vec<T>>>()?;
        LlrVector::new(values)
    }
}

pub fn llr_from_outputs<T: Real>(ch: &BinaryInputChannel<T>, y: &[usize]) -> Result<LlrVector<T>> {
    LlrTable::new(ch).apply(y)
}

/// Which basis a set of frozen values belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    Amplitude,
    Phase,
}

/// Frozen positions with their known values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrozenMap {
    positions: Vec<usize>,
    values: Vec<bool>,
    basis: Basis,
    lookup: Vec<Option<bool>>,
}

impl FrozenMap {
    pub fn new(n: usize, positions: Vec<usize>, values: Vec<bool>, basis: Basis) -> Result<Self> {
        if positions.len() != values.len() {
            return invalid(format!(
                "{} frozen positions but {} frozen values",
                positions.len(),
                values.len()
            ));
        }
        let mut lookup = vec![None; n];
        for (&p, &v) in positions.iter().zip(&values) {
            match lookup.get_mut(p) {
                Some(slot @ None) => *slot = Some(v),
                Some(Some(_)) => return invalid(format!("position {p} frozen twice")),
                None => return invalid(format!("frozen position {p} outside block of {n}")),
            }
        }
        Ok(Self {
            positions,
            values,
            basis,
            lookup,
        })
    }

    /// No frozen positions.
    pub fn none(n: usize, basis: Basis) -> Self {
        Self {
            positions: Vec::new(),
            values: Vec::new(),
            basis,
            lookup: vec![None; n],
        }
    }

    /// Frozen values read off a full word at the given positions.
    pub fn from_word(word: &BitWord, positions: &[usize], basis: Basis) -> Result<Self> {
        let values = positions.iter().map(|&p| word.get(p)).collect();
        Self::new(word.len(), positions.to_vec(), values, basis)
    }

    pub fn positions(&self) -> &[usize] {
        &self.positions
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn block_len(&self) -> usize {
        self.lookup.len()
    }

    #[inline]
    pub fn get(&self, i: usize) -> Option<bool> {
        self.lookup[i]
    }

    /// Same frozen set in reversed index order, for phase-basis decoding.
    pub fn reversed(&self) -> Self {
        let n = self.lookup.len();
        let mut pairs: Vec<(usize, bool)> = self
            .positions
            .iter()
            .zip(&self.values)
            .map(|(&p, &v)| (n - 1 - p, v))
            .collect();
        pairs.sort_unstable();
        let (positions, values) = pairs.into_iter().unzip();
        Self::new(n, positions, values, self.basis).expect("reversal preserves validity")
    }
}

/// Exact check-node combination `2·atanh(tanh(a/2)·tanh(b/2))`, evaluated in
/// the overflow-free form
/// `sgn(a)·sgn(b)·(min(|a|,|b|) + ln(1+e^{-(|a|+|b|)}) − ln(1+e^{-||a|−|b||}))`.
#[inline]
pub fn check_node<T: Real>(a: T, b: T) -> T {
    let (ma, mb) = (a.abs(), b.abs());
    let m = ma.min(mb) + (-(ma + mb)).exp().ln_1p() - (-(ma - mb).abs()).exp().ln_1p();
    if (a < T::zero()) != (b < T::zero()) {
        -m
    } else {
        m
    }
}

/// Variable-node combination given the partner's decided bit.
#[inline]
pub fn variable_node<T: Real>(a: T, b: T, partner: u8) -> T {
    if partner == 0 {
        b + a
    } else {
        b - a
    }
}

/// Half-width of the band around 0 treated as a tie, in units of the
/// scalar's machine epsilon times [`LLR_CLAMP`]. Absorbs rounding in sums
/// that cancel exactly.
pub const TIE_ULPS: f64 = 256.0;

/// Tie band for scalar `T`.
#[inline]
pub fn tie_tolerance<T: Real>() -> T {
    T::epsilon() * lit::<T>(TIE_ULPS * LLR_CLAMP)
}

/// LLRs within the tie band decide 0.
#[inline]
pub fn hard_decision<T: Real>(llr: T) -> u8 {
    u8::from(llr < -tie_tolerance::<T>())
}

/// SC decoder with a reusable workspace.
#[derive(Debug, Clone, Default)]
pub struct ScDecoder<T> {
    scratch: Vec<T>,
    partial: Vec<u8>,
    decided: Vec<u8>,
    ops: u64,
}

impl<T: Real> ScDecoder<T> {
    pub fn new() -> Self {
        Self {
            scratch: Vec::new(),
            partial: Vec::new(),
            decided: Vec::new(),
            ops: 0,
        }
    }

    /// Node updates performed since construction or the last reset.
    pub fn operations(&self) -> u64 {
        self.ops
    }

    pub fn reset_operations(&mut self) {
        self.ops = 0;
    }

    /// Estimates the full input word. Frozen positions echo their values.
    pub fn decode(&mut self, llr: &LlrVector<T>, frozen: &FrozenMap) -> Result<BitWord> {
        check_lengths(llr.len(), frozen.block_len())?;
        self.run(llr.values(), |i, l| match frozen.get(i) {
            Some(v) => u8::from(v),
            None => hard_decision(l),
        });
        BitWord::from_bits(&self.decided)
    }

    /// Genie-aided pass: each free decision is compared with `truth` and then
    /// replaced by it. Returns the per-index error flags.
    pub fn genie_decode(
        &mut self,
        llr: &LlrVector<T>,
        truth: &BitWord,
        frozen: &FrozenMap,
    ) -> Result<Vec<bool>> {
        check_lengths(llr.len(), frozen.block_len())?;
        check_lengths(llr.len(), truth.len())?;
        let mut flags = vec![false; llr.len()];
        self.run(llr.values(), |i, l| match frozen.get(i) {
            Some(v) => u8::from(v),
            None => {
                let t = truth.get(i);
                flags[i] = (hard_decision(l) == 1) != t;
                u8::from(t)
            }
        });
        Ok(flags)
    }

    /// Runs the schedule, asking `decide(index, llr)` for every input bit.
    /// The decided bits end up in `self.decided`.
    fn run<D: FnMut(usize, T) -> u8>(&mut self, llr: &[T], mut decide: D) {
        let n = llr.len();
        self.scratch.clear();
        self.scratch.resize(n.max(1), T::zero());
        self.partial.clear();
        self.partial.resize(n, 0);
        self.decided.clear();
        self.decided.resize(n, 0);
        descend(
            llr,
            0,
            &mut self.decided,
            &mut self.partial,
            &mut self.scratch,
            &mut decide,
            &mut self.ops,
        );
    }
}

fn check_lengths(a: usize, b: usize) -> Result<()> {
    if a != b {
        return invalid(format!("block length mismatch: {a} vs {b}"));
    }
    Ok(())
}

/// One subtree: decodes `u` (inputs `base..base+len`) and leaves the
/// re-encoded subtree codeword in `x`.
fn descend<T: Real, D: FnMut(usize, T) -> u8>(
    llr: &[T],
    base: usize,
    u: &mut [u8],
    x: &mut [u8],
    scratch: &mut [T],
    decide: &mut D,
    ops: &mut u64,
) {
    let n = llr.len();
    if n == 1 {
        let bit = decide(base, llr[0]);
        u[0] = bit;
        x[0] = bit;
        return;
    }
    let h = n / 2;
    let (buf, rest) = scratch.split_at_mut(h);
    let (top, bottom) = llr.split_at(h);
    for i in 0..h {
        buf[i] = check_node(top[i], bottom[i]);
    }
    *ops += h as u64;
    let (u_lo, u_hi) = u.split_at_mut(h);
    let (x_lo, x_hi) = x.split_at_mut(h);
    descend(buf, base, u_lo, x_lo, rest, decide, ops);
    for i in 0..h {
        buf[i] = variable_node(top[i], bottom[i], x_lo[i]);
    }
    *ops += h as u64;
    descend(buf, base + h, u_hi, x_hi, rest, decide, ops);
    for i in 0..h {
        x_lo[i] ^= x_hi[i];
    }
}

pub fn sc_decode<T: Real>(llr: &LlrVector<T>, frozen: &FrozenMap) -> Result<BitWord> {
    ScDecoder::new().decode(llr, frozen)
}

pub fn genie_decode<T: Real>(
    llr: &LlrVector<T>,
    truth: &BitWord,
    frozen: &FrozenMap,
) -> Result<Vec<bool>> {
    ScDecoder::new().genie_decode(llr, truth, frozen)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{erasure_channel, extended_symbol, induced_extended_phase, Pauli, ERASURE};
    use crate::transform::encode;
    use approx::assert_abs_diff_eq;

    #[test]
    fn llr_front_end() {
        let bsc = BinaryInputChannel::bsc(0.1).unwrap();
        let l = llr_from_outputs(&bsc, &[0, 1]).unwrap();
        assert_abs_diff_eq!(l.values()[0], 9f64.ln(), epsilon = 1e-12);
        assert_abs_diff_eq!(l.values()[0], 2.1972, epsilon = 1e-4);
        assert_abs_diff_eq!(l.values()[1], -9f64.ln(), epsilon = 1e-12);

        let bec = erasure_channel(0.3).unwrap();
        let l = llr_from_outputs(&bec, &[ERASURE, 0]).unwrap();
        assert_eq!(l.values(), &[0.0, LLR_CLAMP]);

        let ext = induced_extended_phase(&Pauli::depolarizing(0.1).unwrap());
        let l = llr_from_outputs(&ext, &[extended_symbol(false, false), extended_symbol(false, true)]).unwrap();
        assert_abs_diff_eq!(l.values()[0], 27f64.ln(), epsilon = 1e-12);
        assert_abs_diff_eq!(l.values()[0], 3.2958, epsilon = 1e-4);
        assert_eq!(l.values()[1], 0.0);

        assert!(llr_from_outputs(&bsc, &[0, 2]).is_err());
        assert!(llr_from_outputs(&bsc, &[0, 1, 0]).is_err());
    }

    #[test]
    fn check_node_matches_tanh_rule() {
        for &(a, b) in &[(0.3, 1.7), (-2.0, 0.5), (4.0, -4.0), (0.0, 3.0), (-7.5, -0.01)] {
            let exact: f64 = 2.0 * ((a / 2.0_f64).tanh() * (b / 2.0_f64).tanh()).atanh();
            assert_abs_diff_eq!(check_node(a, b), exact, epsilon = 1e-12);
        }
        assert_eq!(check_node(40.0, 0.0), 0.0);
        assert!(check_node(40.0_f64, 40.0).is_finite());
        assert!(check_node(1e6_f64, -1e6) < 0.0);
    }

    #[test]
    fn two_bit_example() {
        // u1 frozen to 0; u2 read off the combined evidence.
        let c = LLR_CLAMP;
        let frozen = FrozenMap::new(2, vec![0], vec![false], Basis::Amplitude).unwrap();
        let out = sc_decode(&LlrVector::new(vec![0.0, c]).unwrap(), &frozen).unwrap();
        assert_eq!(out.to_bits(), vec![0, 0]);
        let out = sc_decode(&LlrVector::new(vec![0.0, -c]).unwrap(), &frozen).unwrap();
        assert_eq!(out.to_bits(), vec![0, 1]);
        // Enumerate the 2-bit posterior for finite LLRs.
        for &(l1, l2) in &[(1.0, -0.5), (-1.0, -0.5), (0.2, 3.0), (-3.0, 2.0)] {
            let p = |l: f64, b: u8| if b == 0 { 1.0 / (1.0 + (-l).exp()) } else { 1.0 / (1.0 + l.exp()) };
            let like = |u2: u8| p(l1, u2) * p(l2, u2);
            let expect = u8::from(like(1) > like(0));
            let out = sc_decode(&LlrVector::new(vec![l1, l2]).unwrap(), &frozen).unwrap();
            assert_eq!(out.to_bits()[1], expect, "llr ({l1}, {l2})");
        }
    }

    #[test]
    fn noiseless_recovery_any_word() {
        for k in 0..10 {
            let n = 1usize << k;
            let bits: Vec<u8> = (0..n).map(|i| ((i * 2654435761) >> 7 & 1) as u8).collect();
            let u = BitWord::from_bits(&bits).unwrap();
            let x = encode(&u);
            let llr: Vec<f64> = x.iter().map(|b| if b { -LLR_CLAMP } else { LLR_CLAMP }).collect();
            let out = sc_decode(&LlrVector::new(llr).unwrap(), &FrozenMap::none(n, Basis::Amplitude)).unwrap();
            assert_eq!(out, u);
        }
    }

    #[test]
    fn frozen_positions_echo() {
        let n = 16;
        let positions = vec![0, 3, 5, 8, 15];
        let values = vec![true, false, true, true, false];
        let frozen = FrozenMap::new(n, positions.clone(), values.clone(), Basis::Phase).unwrap();
        let llr: Vec<f64> = (0..n).map(|i| (i as f64 - 7.3) * 0.9).collect();
        let out = sc_decode(&LlrVector::new(llr).unwrap(), &frozen).unwrap();
        for (p, v) in positions.iter().zip(values) {
            assert_eq!(out.get(*p), v);
        }
    }

    #[test]
    fn frozen_map_validation() {
        assert!(FrozenMap::new(4, vec![1, 1], vec![false, true], Basis::Amplitude).is_err());
        assert!(FrozenMap::new(4, vec![4], vec![false], Basis::Amplitude).is_err());
        assert!(FrozenMap::new(4, vec![1], vec![], Basis::Amplitude).is_err());
        let f = FrozenMap::new(4, vec![0, 2], vec![true, false], Basis::Phase).unwrap();
        let r = f.reversed();
        assert_eq!(r.positions(), &[1, 3]);
        assert_eq!(r.values(), &[false, true]);
    }

    #[test]
    fn genie_flags_zero_on_clean_channel() {
        let n = 64;
        let u = BitWord::from_bits(&(0..n).map(|i| (i % 3 == 0) as u8).collect::<Vec<_>>()).unwrap();
        let x = encode(&u);
        let llr: Vec<f64> = x.iter().map(|b| if b { -5.0 } else { 5.0 }).collect();
        let flags = genie_decode(&LlrVector::new(llr).unwrap(), &u, &FrozenMap::none(n, Basis::Amplitude)).unwrap();
        assert!(flags.iter().all(|f| !f));
    }

    #[test]
    fn f32_decoder() {
        let u = BitWord::from_bits(&[1, 0, 1, 1, 0, 0, 1, 0]).unwrap();
        let x = encode(&u);
        let llr: Vec<f32> = x.iter().map(|b| if b { -3.0 } else { 3.0 }).collect();
        let out = ScDecoder::<f32>::new()
            .decode(&LlrVector::new(llr).unwrap(), &FrozenMap::none(8, Basis::Amplitude))
            .unwrap();
        assert_eq!(out, u);
    }

    #[test]
    fn operation_count_is_n_log_n() {
        let mut dec = ScDecoder::<f64>::new();
        for k in 4..=14 {
            let n = 1usize << k;
            dec.reset_operations();
            let llr = LlrVector::new((0..n).map(|i| ((i % 7) as f64) - 3.0).collect()).unwrap();
            dec.decode(&llr, &FrozenMap::none(n, Basis::Amplitude)).unwrap();
            assert_eq!(dec.operations(), (n as u64) * k as u64);
        }
    }
}
