//! Monte Carlo simulation of the quantum polar scheme in its classical form.
//!
//! A block succeeds when both classical decoders succeed: the amplitude
//! decoder recovers the amplitude input `z` (and with it the amplitude error
//! pattern), then the extended phase decoder recovers the phase input `x`
//! using the amplitude errors recovered in the first stage as side
//! information. Inputs in `E` are frozen in both bases with values drawn fresh
//! for every block and handed to the decoder.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::BitWord;
use crate::channels::{extended_symbol, sample_error, ChannelSpec, ErrorPattern, Noise, ERASURE};
use crate::construction::CodeSpec;
use crate::decoder::{Basis, FrozenMap, LlrTable, ScDecoder};
use crate::error::{invalid, Error, Result};
use crate::rng::{Domain, SeedStream, TrialRng};
use crate::scalar::Prob;
use crate::transform::{encode, encode_transpose};
use crate::NoiseModel;

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Largest block length [`exact_block_oracle`] enumerates.
pub const ORACLE_MAX_N: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialResult {
    pub amp_ok: bool,
    pub phase_ok: bool,
    pub block_ok: bool,
    pub recovered_u: BitWord,
}

/// One draw of the physical noise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Realization {
    Pauli(ErrorPattern),
    /// Erased positions.
    Erasure(BitWord),
}

/// Wilson score interval `(low, high)` for `failures` out of `trials`.
pub fn wilson_interval(failures: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = failures as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    let lo = if failures == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if failures == trials { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

/// An empirical failure rate with its 95% Wilson interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateEstimate {
    pub failures: u64,
    pub rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub half_width: f64,
}

impl RateEstimate {
    pub fn new(failures: u64, trials: u64) -> Self {
        let (lo, hi) = wilson_interval(failures, trials, Z95);
        Self {
            failures,
            rate: failures as f64 / trials as f64,
            ci_low: lo,
            ci_high: hi,
            half_width: 0.5 * (hi - lo),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub n: usize,
    pub channel: ChannelSpec,
    pub trials: u64,
    pub seed: u64,
    pub amp_err: RateEstimate,
    pub phase_err: RateEstimate,
    pub block_err: RateEstimate,
    pub net_rate: f64,
    pub entanglement_rate: f64,
}

/// A code bound to the channel it is simulated on, with everything the
/// per-trial loop needs precomputed.
#[derive(Debug, Clone)]
pub struct Simulator {
    code: CodeSpec,
    channel: ChannelSpec,
    noise: NoiseModel,
    amp_llr: LlrTable<f64>,
    phase_llr: LlrTable<f64>,
    amp_frozen: Vec<usize>,
    // P ∪ E in reversed index order, sorted.
    phase_frozen_rev: Vec<usize>,
}

impl Simulator {
    /// Simulates `code` on its design channel, or on `channel` when given.
    /// The override must be of the same kind (Pauli or erasure).
    pub fn new(code: &CodeSpec, channel: Option<&ChannelSpec>) -> Result<Self> {
        let channel = channel.unwrap_or(code.channel()).clone();
        let noise = channel.noise()?;
        let same_kind = matches!(
            (&noise, &code.noise()),
            (Noise::Pauli(_), Noise::Pauli(_)) | (Noise::Erasure { .. }, Noise::Erasure { .. })
        );
        if !same_kind {
            return Err(Error::Validation(format!(
                "code designed for '{}' cannot be simulated on '{channel}'",
                code.channel()
            )));
        }
        let n = code.n();
        let mut phase_frozen_rev: Vec<usize> =
            code.partition().phase_frozen().iter().map(|&j| n - 1 - j).collect();
        phase_frozen_rev.sort_unstable();
        Ok(Self {
            amp_llr: LlrTable::new(&noise.amplitude_channel()),
            phase_llr: LlrTable::new(&noise.phase_channel()),
            amp_frozen: code.partition().amplitude_frozen(),
            phase_frozen_rev,
            code: code.clone(),
            channel,
            noise,
        })
    }

    pub fn code(&self) -> &CodeSpec {
        &self.code
    }

    pub fn n(&self) -> usize {
        self.code.n()
    }

    pub fn sample_realization<R: Rng + ?Sized>(&self, rng: &mut R) -> Realization {
        let n = self.n();
        match &self.noise {
            Noise::Pauli(t) => Realization::Pauli(sample_error(t, n, rng).expect("power of two")),
            Noise::Erasure { p } => {
                let bits: Vec<bool> = (0..n).map(|_| rng.gen::<f64>() < *p).collect();
                Realization::Erasure(BitWord::from_bools(&bits).expect("power of two"))
            }
        }
    }

    /// Uniform amplitude input with the known values `g` on `A`.
    pub fn sample_amplitude_input<R: Rng + ?Sized>(&self, rng: &mut R) -> BitWord {
        let p = self.code.partition();
        self.input_with(rng, &p.a, &p.g)
    }

    /// Uniform phase input with the known values `h` on `P`.
    pub fn sample_phase_input<R: Rng + ?Sized>(&self, rng: &mut R) -> BitWord {
        let p = self.code.partition();
        self.input_with(rng, &p.p, &p.h)
    }

    fn input_with<R: Rng + ?Sized>(&self, rng: &mut R, pos: &[usize], vals: &[bool]) -> BitWord {
        let bits: Vec<bool> = (0..self.n()).map(|_| rng.gen()).collect();
        let mut w = BitWord::from_bools(&bits).expect("power of two");
        for (&j, &b) in pos.iter().zip(vals) {
            w.set(j, b);
        }
        w
    }

    /// Amplitude stage: decode `z` from `G·z ⊕ u` (or its erasures) with
    /// `A ∪ E` frozen to the true input. Returns success and the recovered
    /// amplitude error pattern.
    pub fn amplitude_stage(
        &self,
        dec: &mut ScDecoder<f64>,
        real: &Realization,
        z: &BitWord,
    ) -> (bool, BitWord) {
        let n = self.n();
        let codeword = encode(z);
        let symbols: Vec<usize> = match real {
            Realization::Pauli(e) => (0..n).map(|i| usize::from(codeword.get(i) != e.u.get(i))).collect(),
            Realization::Erasure(erased) => (0..n)
                .map(|i| if erased.get(i) { ERASURE } else { usize::from(codeword.get(i)) })
                .collect(),
        };
        let llr = self.amp_llr.apply(&symbols).expect("valid symbols");
        let frozen = FrozenMap::from_word(z, &self.amp_frozen, Basis::Amplitude).expect("valid partition");
        let z_hat = dec.decode(&llr, &frozen).expect("lengths agree");
        let reencoded = encode(&z_hat);
        let mut recovered = BitWord::zeros(n).expect("power of two");
        for (i, &s) in symbols.iter().enumerate() {
            if s != ERASURE {
                recovered.set(i, (s == 1) != reencoded.get(i));
            }
        }
        (z_hat == *z, recovered)
    }

    /// Phase stage: decode `x` from `G^T·x ⊕ v` paired with the recovered
    /// amplitude errors, in reversed index order, with `P ∪ E` frozen.
    pub fn phase_stage(
        &self,
        dec: &mut ScDecoder<f64>,
        real: &Realization,
        recovered_u: &BitWord,
        x: &BitWord,
    ) -> bool {
        let n = self.n();
        let w = encode_transpose(x);
        let symbols: Vec<usize> = (0..n)
            .map(|r| {
                let i = n - 1 - r;
                match real {
                    Realization::Pauli(e) => extended_symbol(w.get(i) != e.v.get(i), recovered_u.get(i)),
                    Realization::Erasure(erased) if erased.get(i) => ERASURE,
                    Realization::Erasure(_) => usize::from(w.get(i)),
                }
            })
            .collect();
        let llr = self.phase_llr.apply(&symbols).expect("valid symbols");
        let frozen = FrozenMap::from_word(&x.reversed(), &self.phase_frozen_rev, Basis::Phase)
            .expect("valid partition");
        let x_hat = dec.decode(&llr, &frozen).expect("lengths agree");
        x_hat.reversed() == *x
    }

    /// Both stages for a given noise draw and inputs.
    pub fn run_with(
        &self,
        dec: &mut ScDecoder<f64>,
        real: &Realization,
        z: &BitWord,
        x: &BitWord,
    ) -> TrialResult {
        let (amp_ok, recovered_u) = self.amplitude_stage(dec, real, z);
        let phase_ok = self.phase_stage(dec, real, &recovered_u, x);
        TrialResult {
            amp_ok,
            phase_ok,
            block_ok: amp_ok && phase_ok,
            recovered_u,
        }
    }

    pub fn run_trial<R: Rng + ?Sized>(&self, dec: &mut ScDecoder<f64>, rng: &mut R) -> TrialResult {
        let real = self.sample_realization(rng);
        let z = self.sample_amplitude_input(rng);
        let x = self.sample_phase_input(rng);
        self.run_with(dec, &real, &z, &x)
    }

    /// Runs `trials` blocks; trial `t` uses stream `(Simulation, t)` of `seed`.
    pub fn simulate(&self, trials: u64, seed: u64) -> Result<SimReport> {
        if trials == 0 {
            return invalid("at least one trial is required");
        }
        let seeds = SeedStream::new(seed);
        let [amp, phase, block] = (0..trials)
            .into_par_iter()
            .fold(
                || (ScDecoder::<f64>::new(), [0u64; 3]),
                |(mut dec, mut c), t| {
                    let mut rng: TrialRng = seeds.stream(Domain::Simulation, t);
                    let r = self.run_trial(&mut dec, &mut rng);
                    c[0] += u64::from(!r.amp_ok);
                    c[1] += u64::from(!r.phase_ok);
                    c[2] += u64::from(!r.block_ok);
                    (dec, c)
                },
            )
            .map(|(_, c)| c)
            .reduce(|| [0; 3], |a, b| [a[0] + b[0], a[1] + b[1], a[2] + b[2]]);
        Ok(SimReport {
            n: self.n(),
            channel: self.channel.clone(),
            trials,
            seed,
            amp_err: RateEstimate::new(amp, trials),
            phase_err: RateEstimate::new(phase, trials),
            block_err: RateEstimate::new(block, trials),
            net_rate: self.code.net_rate(),
            entanglement_rate: self.code.entanglement_rate(),
        })
    }
}

/// One block on the code's design channel.
pub fn run_trial<R: Rng + ?Sized>(code: &CodeSpec, rng: &mut R) -> Result<TrialResult> {
    Ok(Simulator::new(code, None)?.run_trial(&mut ScDecoder::new(), rng))
}

/// `trials` blocks on the code's design channel.
pub fn simulate(code: &CodeSpec, trials: u64, seed: u64) -> Result<SimReport> {
    Simulator::new(code, None)?.simulate(trials, seed)
}

/// All words equal to `fixed` values on `pos` and free elsewhere.
fn enumerate_inputs(n: usize, pos: &[usize], vals: &[bool]) -> Vec<BitWord> {
    let free: Vec<usize> = (0..n).filter(|j| !pos.contains(j)).collect();
    (0u32..1 << free.len())
        .map(|m| {
            let mut w = BitWord::zeros(n).expect("power of two");
            for (b, &j) in free.iter().enumerate() {
                w.set(j, m >> b & 1 == 1);
            }
            for (&j, &v) in pos.iter().zip(vals) {
                w.set(j, v);
            }
            w
        })
        .collect()
}

fn word_from_mask(n: usize, mask: u32) -> BitWord {
    let bits: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
    BitWord::from_bools(&bits).expect("power of two")
}

/// Exact two-stage block error probability for `n ≤ 8`.
///
/// Sums the noise distribution over every error (or erasure) pattern and
/// averages over every message and shared-randomness value exactly, running
/// the same deterministic decoders as [`Simulator`]. Probabilities are
/// accumulated in `T`, so an exact rational type gives an exact answer.
pub fn exact_block_oracle<T: Prob>(code: &CodeSpec, noise: &Noise<T>) -> Result<T> {
    let n = code.n();
    if n > ORACLE_MAX_N {
        return invalid(format!("exact oracle enumerates at most n = {ORACLE_MAX_N}, got {n}"));
    }
    let channel = match noise.to_f64() {
        Noise::Pauli(t) => {
            let [p00, p10, p01, p11] = t.weights();
            ChannelSpec::Pauli { p00, p10, p01, p11 }
        }
        Noise::Erasure { p } => ChannelSpec::Erasure { p },
    };
    let sim = Simulator::new(code, Some(&channel))?;
    let part = code.partition();
    let zs = enumerate_inputs(n, &part.a, &part.g);
    let xs = enumerate_inputs(n, &part.p, &part.h);
    let count = |c: usize| T::from_usize(c).expect("count representable");
    let (nz, nx) = (count(zs.len()), count(xs.len()));
    let mut dec = ScDecoder::new();
    let mut ok = T::zero();
    let patterns = 1u32 << n;
    match noise {
        Noise::Pauli(table) => {
            for um in 0..patterns {
                let u = word_from_mask(n, um);
                let zero = BitWord::zeros(n)?;
                let probe = Realization::Pauli(ErrorPattern::new(u.clone(), zero)?);
                let amp_ok = zs.iter().filter(|z| sim.amplitude_stage(&mut dec, &probe, z).0).count();
                if amp_ok == 0 {
                    continue;
                }
                for vm in 0..patterns {
                    let v = word_from_mask(n, vm);
                    let mut weight = T::one();
                    for i in 0..n {
                        weight = weight * table.prob(u.get(i), v.get(i)).clone();
                    }
                    if weight == T::zero() {
                        continue;
                    }
                    let real = Realization::Pauli(ErrorPattern::new(u.clone(), v)?);
                    let phase_ok = xs.iter().filter(|x| sim.phase_stage(&mut dec, &real, &u, x)).count();
                    ok = ok + weight * count(amp_ok) * count(phase_ok) / (nz.clone() * nx.clone());
                }
            }
        }
        Noise::Erasure { p } => {
            for em in 0..patterns {
                let erased = word_from_mask(n, em);
                let k = erased.count_ones();
                let mut weight = T::one();
                for i in 0..n {
                    weight = weight * if i < k { p.clone() } else { T::one() - p.clone() };
                }
                let real = Realization::Erasure(erased);
                let amp_ok = zs.iter().filter(|z| sim.amplitude_stage(&mut dec, &real, z).0).count();
                let zero = BitWord::zeros(n)?;
                let phase_ok = xs.iter().filter(|x| sim.phase_stage(&mut dec, &real, &zero, x)).count();
                ok = ok + weight * count(amp_ok) * count(phase_ok) / (nz.clone() * nx.clone());
            }
        }
    }
    Ok(T::one() - ok)
}
