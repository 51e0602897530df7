//! Code construction: per-index reliabilities for the amplitude and extended
//! phase codes, the Q/A/P/E partition, frozen values and rate accounting.
//!
//! The phase code is the amplitude circuit read in the conjugate basis, which
//! is the same transform with inputs and outputs in reverse order. Its logical
//! channel for physical input `j` is therefore the standard logical channel
//! `n − 1 − j` of the extended phase channel, i.e. the complementary branch
//! string. Every phase profile in this module is stored already reversed, so
//! `amp[j]` and `phase[j]` always describe the same physical input `j`.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::hex_bools;
use crate::channels::{BinaryInputChannel, ChannelSpec, Noise};
use crate::decoder::{Basis, FrozenMap, LlrTable, ScDecoder};
use crate::error::{invalid, Error, Result};
use crate::rng::{Domain, SeedStream};
use crate::scalar::Prob;
use crate::threshold::fprime_bound_profile;
use crate::transform::{encode, log2_len, TransformSpec};
use crate::{BitWord, NoiseModel};

/// Default reliability cutoff.
pub const DEFAULT_EPSILON: f64 = 1e-3;
/// Default Monte Carlo trials per profile.
pub const DEFAULT_MC_TRIALS: u64 = 10_000;

/// How a reliability profile was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Method {
    ExactBec,
    MonteCarlo { trials: u64, seed: u64 },
    FprimeBound,
}

/// What the per-index numbers measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Metric {
    /// Fidelity (Bhattacharyya parameter) or an upper bound on it. Equals the
    /// erasure probability for erasure channels.
    Fidelity,
    /// Genie-aided first-error probability of the SC decoder.
    ErrorProbability,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReliabilityProfile {
    pub n: usize,
    pub amp: Vec<f64>,
    pub phase: Vec<f64>,
    pub method: Method,
    pub metric: Metric,
}

/// Exact erasure probabilities of all logical channels of a BEC(p).
///
/// Values are in the transform's index order: index bit 0 takes the worse
/// branch `z ↦ 2z − z²`, bit 1 the better branch `z ↦ z²`, most significant
/// bit first. Works in place over a single buffer of length `n`.
pub fn bec_reliability<T: Prob>(p: T, n: usize) -> Result<Vec<T>> {
    if !(p >= T::zero() && p <= T::one()) {
        return invalid(format!("erasure probability {p:?} outside [0, 1]"));
    }
    let k = log2_len(n)?;
    let mut z = vec![T::zero(); n];
    z[0] = p;
    let mut filled = 1;
    for _ in 0..k {
        for i in (0..filled).rev() {
            let v = z[i].clone();
            let sq = v.clone() * v.clone();
            z[2 * i] = (v.clone() + v) - sq.clone();
            z[2 * i + 1] = sq;
        }
        filled *= 2;
    }
    Ok(z)
}

/// Genie-aided Monte Carlo error counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct McEstimate {
    pub errors: Vec<u64>,
    pub trials: u64,
}

impl McEstimate {
    pub fn rates(&self) -> Vec<f64> {
        self.errors
            .iter()
            .map(|&e| e as f64 / self.trials as f64)
            .collect()
    }
}

/// Per-index first-decision error counts of the genie-aided SC decoder.
///
/// Each trial draws a uniform input word, passes its encoding through `ch`,
/// and records which decisions would have been wrong with all earlier bits
/// known. Trial `t` uses stream `(domain, t)`, so the result does not depend
/// on how trials are spread over threads.
pub fn mc_reliability(
    ch: &BinaryInputChannel<f64>,
    n: usize,
    trials: u64,
    seeds: SeedStream,
    domain: Domain,
) -> Result<McEstimate> {
    log2_len(n)?;
    if trials == 0 {
        return invalid("at least one trial is required");
    }
    let sampler = ch.sampler();
    let table = LlrTable::new(ch);
    let frozen = FrozenMap::none(n, Basis::Amplitude);
    let errors = (0..trials)
        .into_par_iter()
        .fold(
            || (ScDecoder::<f64>::new(), vec![0u64; n], vec![0usize; n]),
            |(mut dec, mut counts, mut y), t| {
                let mut rng = seeds.stream(domain, t);
                let bits: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
                let u = BitWord::from_bools(&bits).expect("power of two");
                let x = encode(&u);
                for (i, s) in y.iter_mut().enumerate() {
                    *s = sampler.sample(x.get(i), &mut rng);
                }
                let llr = table.apply(&y).expect("symbols from the channel's alphabet");
                let flags = dec.genie_decode(&llr, &u, &frozen).expect("lengths agree");
                for (c, f) in counts.iter_mut().zip(flags) {
                    *c += u64::from(f);
                }
                (dec, counts, y)
            },
        )
        .map(|(_, counts, _)| counts)
        .reduce(
            || vec![0u64; n],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );
    Ok(McEstimate { errors, trials })
}

/// Which reliability method to use when building a code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodRequest {
    /// Exact recursion for erasure, Monte Carlo for Pauli channels.
    Auto,
    ExactBec,
    MonteCarlo,
    FprimeBound,
}

impl std::str::FromStr for MethodRequest {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Self::Auto),
            "exact-bec" => Ok(Self::ExactBec),
            "monte-carlo" => Ok(Self::MonteCarlo),
            "fprime-bound" => Ok(Self::FprimeBound),
            _ => invalid(format!("unknown construction method '{s}'")),
        }
    }
}

fn reversed(v: Vec<f64>) -> Vec<f64> {
    v.into_iter().rev().collect()
}

/// Amplitude and (re-indexed) phase reliabilities for `noise`.
pub fn reliability_profile(
    noise: &NoiseModel,
    n: usize,
    request: MethodRequest,
    trials: u64,
    seed: u64,
) -> Result<ReliabilityProfile> {
    log2_len(n)?;
    let request = match (request, noise) {
        (MethodRequest::Auto, Noise::Erasure { .. }) => MethodRequest::ExactBec,
        (MethodRequest::Auto, Noise::Pauli(_)) => MethodRequest::MonteCarlo,
        (r, _) => r,
    };
    let amp_ch = noise.amplitude_channel();
    let phase_ch = noise.phase_channel();
    let (amp, phase, method, metric) = match request {
        MethodRequest::ExactBec => {
            let Noise::Erasure { p } = *noise else {
                return invalid("exact-bec construction requires an erasure channel");
            };
            let z = bec_reliability(p, n)?;
            (z.clone(), reversed(z), Method::ExactBec, Metric::Fidelity)
        }
        MethodRequest::FprimeBound => (
            fprime_bound_profile(amp_ch.fidelity(), n)?,
            reversed(fprime_bound_profile(phase_ch.fidelity(), n)?),
            Method::FprimeBound,
            Metric::Fidelity,
        ),
        MethodRequest::MonteCarlo => {
            let seeds = SeedStream::new(seed);
            let a = mc_reliability(&amp_ch, n, trials, seeds, Domain::AmplitudeProfile)?;
            let p = mc_reliability(&phase_ch, n, trials, seeds, Domain::PhaseProfile)?;
            (
                a.rates(),
                reversed(p.rates()),
                Method::MonteCarlo { trials, seed },
                Metric::ErrorProbability,
            )
        }
        MethodRequest::Auto => unreachable!("resolved above"),
    };
    Ok(ReliabilityProfile {
        n,
        amp,
        phase,
        method,
        metric,
    })
}

/// Disjoint index sets covering `0..n` plus frozen values.
///
/// Indices are 0-based. `g` holds the amplitude values frozen on `a` and `h`
/// the phase values frozen on `p`, both in increasing index order. Inputs in
/// `e` are frozen in both bases by shared randomness supplied per block.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexPartition {
    pub q: Vec<usize>,
    pub a: Vec<usize>,
    pub p: Vec<usize>,
    pub e: Vec<usize>,
    #[serde(with = "hex_bools")]
    pub g: Vec<bool>,
    #[serde(with = "hex_bools")]
    pub h: Vec<bool>,
}

impl IndexPartition {
    pub fn n(&self) -> usize {
        self.q.len() + self.a.len() + self.p.len() + self.e.len()
    }

    /// Checks disjointness, coverage of `0..n`, ordering and frozen lengths.
    pub fn validate(&self, n: usize) -> Result<()> {
        let mut seen = vec![false; n];
        for (name, set) in [("q", &self.q), ("a", &self.a), ("p", &self.p), ("e", &self.e)] {
            if set.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Validation(format!("index set {name} is not strictly increasing")));
            }
            for &j in set {
                match seen.get_mut(j) {
                    Some(s @ false) => *s = true,
                    Some(true) => return Err(Error::Validation(format!("index {j} in more than one set"))),
                    None => return Err(Error::Validation(format!("index {j} outside block of {n}"))),
                }
            }
        }
        if let Some(j) = seen.iter().position(|s| !s) {
            return Err(Error::Validation(format!("index {j} not assigned to any set")));
        }
        if self.g.len() != self.a.len() || self.h.len() != self.p.len() {
            return Err(Error::Validation("frozen value counts do not match |A| and |P|".into()));
        }
        Ok(())
    }

    /// Positions frozen in the amplitude code: `A ∪ E`, sorted.
    pub fn amplitude_frozen(&self) -> Vec<usize> {
        merge(&self.a, &self.e)
    }

    /// Positions frozen in the phase code: `P ∪ E`, sorted.
    pub fn phase_frozen(&self) -> Vec<usize> {
        merge(&self.p, &self.e)
    }

    pub fn entanglement_rate(&self) -> f64 {
        self.e.len() as f64 / self.n() as f64
    }
}

fn merge(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut v: Vec<usize> = a.iter().chain(b).copied().collect();
    v.sort_unstable();
    v
}

/// Splits `0..n` by comparing both profiles with the cutoff `eps`.
/// Frozen values start out all zero.
pub fn build_partition(rel_a: &[f64], rel_phase: &[f64], eps: f64) -> Result<IndexPartition> {
    if rel_a.len() != rel_phase.len() {
        return invalid(format!(
            "profile lengths differ: {} vs {}",
            rel_a.len(),
            rel_phase.len()
        ));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return invalid(format!("cutoff {eps} outside (0, 1)"));
    }
    let good_a: Vec<bool> = rel_a.iter().map(|&r| r <= eps).collect();
    let good_p: Vec<bool> = rel_phase.iter().map(|&r| r <= eps).collect();
    Ok(split(&good_a, &good_p))
}

/// Splits `0..n` so that exactly `good_a` amplitude and `good_p` phase
/// indices count as good, taking the most reliable ones (ties by index).
/// Used to compare block lengths at a matched rate.
pub fn build_partition_by_count(
    rel_a: &[f64],
    rel_phase: &[f64],
    good_a: usize,
    good_p: usize,
) -> Result<IndexPartition> {
    let n = rel_a.len();
    if rel_phase.len() != n || good_a > n || good_p > n {
        return invalid(format!(
            "profile lengths {n} and {} with good counts {good_a} and {good_p}",
            rel_phase.len()
        ));
    }
    let best = |rel: &[f64], count: usize| {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| rel[i].total_cmp(&rel[j]).then(i.cmp(&j)));
        let mut good = vec![false; n];
        for &i in &order[..count] {
            good[i] = true;
        }
        good
    };
    Ok(split(&best(rel_a, good_a), &best(rel_phase, good_p)))
}

fn split(good_a: &[bool], good_p: &[bool]) -> IndexPartition {
    let mut part = IndexPartition {
        q: Vec::new(),
        a: Vec::new(),
        p: Vec::new(),
        e: Vec::new(),
        g: Vec::new(),
        h: Vec::new(),
    };
    for (j, (&ga, &gp)) in good_a.iter().zip(good_p).enumerate() {
        match (ga, gp) {
            (true, true) => part.q.push(j),
            (false, true) => part.a.push(j),
            (true, false) => part.p.push(j),
            (false, false) => part.e.push(j),
        }
    }
    part.g = vec![false; part.a.len()];
    part.h = vec![false; part.p.len()];
    part
}

/// `(|Q| − |E|) / n`.
pub fn net_rate(partition: &IndexPartition) -> f64 {
    (partition.q.len() as f64 - partition.e.len() as f64) / partition.n() as f64
}

/// How the known frozen values are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "kebab-case")]
pub enum FrozenPolicy {
    AllZero,
    Random { seed: u64 },
}

pub fn assign_frozen(partition: &IndexPartition, policy: FrozenPolicy) -> IndexPartition {
    let mut out = partition.clone();
    match policy {
        FrozenPolicy::AllZero => {
            out.g = vec![false; out.a.len()];
            out.h = vec![false; out.p.len()];
        }
        FrozenPolicy::Random { seed } => {
            let mut rng = SeedStream::new(seed).stream(Domain::FrozenValues, 0);
            out.g = (0..out.a.len()).map(|_| rng.gen()).collect();
            out.h = (0..out.p.len()).map(|_| rng.gen()).collect();
        }
    }
    out
}

/// A complete code: transform size, partition, cutoff, design channel and
/// provenance of the reliabilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CodeSpecWire", into = "CodeSpecWire")]
pub struct CodeSpec {
    transform: TransformSpec,
    partition: IndexPartition,
    epsilon: f64,
    channel: ChannelSpec,
    method: Method,
    metric: Metric,
    frozen_policy: FrozenPolicy,
}

impl CodeSpec {
    pub fn new(
        partition: IndexPartition,
        epsilon: f64,
        channel: ChannelSpec,
        method: Method,
        metric: Metric,
        frozen_policy: FrozenPolicy,
    ) -> Result<Self> {
        let transform = TransformSpec::from_len(partition.n())?;
        partition.validate(transform.n())?;
        channel.noise()?;
        Ok(Self {
            transform,
            partition,
            epsilon,
            channel,
            method,
            metric,
            frozen_policy,
        })
    }

    pub fn n(&self) -> usize {
        self.transform.n()
    }

    pub fn transform(&self) -> TransformSpec {
        self.transform
    }

    pub fn partition(&self) -> &IndexPartition {
        &self.partition
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn channel(&self) -> &ChannelSpec {
        &self.channel
    }

    pub fn noise(&self) -> NoiseModel {
        self.channel.noise().expect("validated at construction")
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn frozen_policy(&self) -> FrozenPolicy {
        self.frozen_policy
    }

    pub fn net_rate(&self) -> f64 {
        net_rate(&self.partition)
    }

    pub fn entanglement_rate(&self) -> f64 {
        self.partition.entanglement_rate()
    }
}

/// JSON layout of a [`CodeSpec`].
#[derive(Debug, Clone, Serialize, Deserialize)]
struct CodeSpecWire {
    n: usize,
    k: u32,
    epsilon: f64,
    channel: ChannelSpec,
    noise: NoiseModel,
    #[serde(flatten)]
    partition: IndexPartition,
    method: Method,
    metric: Metric,
    frozen: FrozenPolicy,
    net_rate: f64,
    entanglement_rate: f64,
    coherent_information: f64,
}

impl From<CodeSpec> for CodeSpecWire {
    fn from(c: CodeSpec) -> Self {
        let noise = c.noise();
        Self {
            n: c.n(),
            k: c.transform.k(),
            epsilon: c.epsilon,
            net_rate: c.net_rate(),
            entanglement_rate: c.entanglement_rate(),
            coherent_information: noise.coherent_information(),
            noise,
            channel: c.channel,
            partition: c.partition,
            method: c.method,
            metric: c.metric,
            frozen: c.frozen_policy,
        }
    }
}

impl TryFrom<CodeSpecWire> for CodeSpec {
    type Error = Error;

    fn try_from(w: CodeSpecWire) -> Result<Self> {
        if w.partition.n() != w.n || TransformSpec::from_len(w.n)?.k() != w.k {
            return Err(Error::Validation(format!(
                "partition covers {} indices but n = {}, k = {}",
                w.partition.n(),
                w.n,
                w.k
            )));
        }
        if w.channel.noise()? != w.noise {
            return Err(Error::Validation(format!(
                "noise table does not match channel '{}'",
                w.channel
            )));
        }
        CodeSpec::new(w.partition, w.epsilon, w.channel, w.method, w.metric, w.frozen)
    }
}

/// Builds a complete code for `channel` at block length `n`.
pub fn construct(
    channel: &ChannelSpec,
    n: usize,
    eps: f64,
    request: MethodRequest,
    trials: u64,
    seed: u64,
    policy: FrozenPolicy,
) -> Result<CodeSpec> {
    let noise = channel.noise()?;
    let profile = reliability_profile(&noise, n, request, trials, seed)?;
    let partition = assign_frozen(&build_partition(&profile.amp, &profile.phase, eps)?, policy);
    CodeSpec::new(
        partition,
        eps,
        channel.clone(),
        profile.method,
        profile.metric,
        policy,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::erasure_channel;
    use proptest::prelude::*;

    #[test]
    fn bec_examples() {
        assert_eq!(bec_reliability(0.5, 2).unwrap(), vec![0.75, 0.25]);
        assert_eq!(bec_reliability(0.5, 4).unwrap(), vec![0.9375, 0.5625, 0.4375, 0.0625]);
        assert_eq!(bec_reliability(0.0, 64).unwrap(), vec![0.0; 64]);
        assert_eq!(bec_reliability(0.3, 1).unwrap(), vec![0.3]);
        assert!(bec_reliability(0.5, 3).is_err());
        assert!(bec_reliability(1.5, 4).is_err());
    }

    #[test]
    fn phase_reindexing_is_reversal() {
        // The phase entry for physical input j is the standard entry for the
        // complementary branch string, which is index n - 1 - j.
        let n = 16;
        let noise = Noise::Erasure { p: 0.3 };
        let prof = reliability_profile(&noise, n, MethodRequest::ExactBec, 1, 0).unwrap();
        let std = bec_reliability(0.3, n).unwrap();
        for j in 0..n {
            let complement = !j & (n - 1);
            assert_eq!(complement, n - 1 - j);
            assert_eq!(prof.phase[j], std[complement]);
            assert_eq!(prof.amp[j], std[j]);
        }
    }

    #[test]
    fn mc_noiseless_and_useless() {
        let s = SeedStream::new(3);
        let est = mc_reliability(&BinaryInputChannel::bsc(0.0).unwrap(), 32, 200, s, Domain::Test).unwrap();
        assert!(est.errors.iter().all(|&e| e == 0));
        let trials = 4000;
        let est = mc_reliability(&BinaryInputChannel::bsc(0.5).unwrap(), 16, trials, s, Domain::Test).unwrap();
        let sigma = (0.25 / trials as f64).sqrt();
        for r in est.rates() {
            assert!((r - 0.5).abs() < 4.0 * sigma, "{r}");
        }
        assert!(mc_reliability(&BinaryInputChannel::bsc(0.1).unwrap(), 16, 0, s, Domain::Test).is_err());
    }

    #[test]
    fn mc_is_deterministic() {
        let ch = BinaryInputChannel::bsc(0.1).unwrap();
        let a = mc_reliability(&ch, 64, 500, SeedStream::new(9), Domain::Test).unwrap();
        let b = mc_reliability(&ch, 64, 500, SeedStream::new(9), Domain::Test).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn mc_converges_to_bec_recursion() {
        // Genie errors on a BEC: an erased logical channel is decided 0, which
        // is wrong half of the time, so the error rate is half the erasure rate.
        let n = 64;
        let trials = 100_000;
        let est = mc_reliability(&erasure_channel(0.5).unwrap(), n, trials, SeedStream::new(1), Domain::Test).unwrap();
        let exact = bec_reliability(0.5, n).unwrap();
        let max_dev = est
            .rates()
            .iter()
            .zip(&exact)
            .map(|(r, z)| (2.0 * r - z).abs())
            .fold(0.0, f64::max);
        assert!(max_dev < 0.01, "{max_dev}");
    }

    #[test]
    fn partition_edge_cases() {
        let n = 8;
        let p = build_partition(&vec![0.0; n], &vec![0.0; n], 1e-3).unwrap();
        assert_eq!(p.q, (0..n).collect::<Vec<_>>());
        assert_eq!(net_rate(&p), 1.0);
        let p = build_partition(&vec![1.0; n], &vec![1.0; n], 1e-3).unwrap();
        assert_eq!(p.e, (0..n).collect::<Vec<_>>());
        assert_eq!(net_rate(&p), -1.0);
        assert!(build_partition(&[0.0; 4], &[0.0; 8], 1e-3).is_err());
        assert!(build_partition(&[0.0; 4], &[0.0; 4], 0.0).is_err());
        let p = build_partition(&[0.0, 0.5, 0.0, 0.5], &[0.0, 0.0, 0.5, 0.5], 0.1).unwrap();
        assert_eq!((p.q.clone(), p.a.clone(), p.p.clone(), p.e.clone()), (vec![0], vec![1], vec![2], vec![3]));
        assert_eq!(net_rate(&p), 0.0);
    }

    #[test]
    fn bec_partition_needs_no_assistance() {
        let n = 1 << 12;
        let z = bec_reliability(0.25, n).unwrap();
        let p = build_partition(&z, &reversed(z.clone()), 1e-3).unwrap();
        assert!((p.e.len() as f64) / (n as f64) < 0.01);
    }

    #[test]
    fn bec_net_rate_below_capacity() {
        let n = 1 << 14;
        let z = bec_reliability(0.25, n).unwrap();
        let r = net_rate(&build_partition(&z, &reversed(z.clone()), 1e-3).unwrap());
        assert!(r > 0.30 && r < 0.50, "{r}");
    }

    #[test]
    fn bec_good_fraction_approaches_capacity() {
        let n = 1 << 14;
        let z = bec_reliability(0.25, n).unwrap();
        let p = build_partition(&z, &reversed(z.clone()), 1e-3).unwrap();
        let amp_good = 1.0 - (p.a.len() + p.e.len()) as f64 / n as f64;
        let phase_good = 1.0 - (p.p.len() + p.e.len()) as f64 / n as f64;
        assert!((amp_good - 0.75).abs() < 0.1, "{amp_good}");
        assert!((phase_good - 0.75).abs() < 0.1, "{phase_good}");
    }

    #[test]
    fn frozen_policies() {
        let z = bec_reliability(0.5, 64).unwrap();
        let p = build_partition(&z, &reversed(z.clone()), 1e-2).unwrap();
        let zero = assign_frozen(&p, FrozenPolicy::AllZero);
        assert!(zero.g.iter().chain(&zero.h).all(|b| !b));
        let r1 = assign_frozen(&p, FrozenPolicy::Random { seed: 4 });
        let r2 = assign_frozen(&p, FrozenPolicy::Random { seed: 4 });
        assert_eq!(r1, r2);
        assert_eq!(r1.g.len(), p.a.len());
        assert!(r1.g.iter().chain(&r1.h).any(|&b| b));
    }

    #[test]
    fn code_spec_json_roundtrip_and_validation() {
        let ch: ChannelSpec = "erasure:p=0.25".parse().unwrap();
        let code = construct(&ch, 64, 1e-2, MethodRequest::Auto, 1, 0, FrozenPolicy::Random { seed: 2 }).unwrap();
        assert_eq!(code.method(), Method::ExactBec);
        let json = serde_json::to_string(&code).unwrap();
        let back: CodeSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, code);

        let mut v: serde_json::Value = serde_json::from_str(&json).unwrap();
        v["n"] = 32.into();
        assert!(serde_json::from_value::<CodeSpec>(v).is_err());
        let mut v: serde_json::Value = serde_json::from_str(&json).unwrap();
        v["channel"] = "erasure:p=0.3".into();
        assert!(serde_json::from_value::<CodeSpec>(v).is_err());
        let mut v: serde_json::Value = serde_json::from_str(&json).unwrap();
        v["q"].as_array_mut().unwrap().push(0.into());
        assert!(serde_json::from_value::<CodeSpec>(v).is_err());
    }

    #[test]
    fn partition_by_count_takes_the_best_indices() {
        let ra = [0.5, 0.1, 0.1, 0.0];
        let rp = [0.0, 0.3, 0.2, 0.9];
        let part = build_partition_by_count(&ra, &rp, 2, 3).unwrap();
        assert_eq!(part.q, vec![1]);
        assert_eq!(part.a, vec![0, 2]);
        assert_eq!(part.p, vec![3]);
        assert!(part.e.is_empty());
        assert_eq!(build_partition_by_count(&ra, &rp, 0, 0).unwrap().e, vec![0, 1, 2, 3]);
        assert!(build_partition_by_count(&ra, &rp, 5, 0).is_err());
    }

    #[test]
    fn exact_bec_rejects_pauli() {
        let ch: ChannelSpec = "depolarizing:q=0.1".parse().unwrap();
        assert!(construct(&ch, 16, 1e-3, MethodRequest::ExactBec, 1, 0, FrozenPolicy::AllZero).is_err());
    }

    proptest! {
        #[test]
        fn partition_is_disjoint_cover(
            ra in prop::collection::vec(0.0f64..=1.0, 1..200),
            seed in any::<u64>(),
            eps in 0.001f64..0.999,
        ) {
            let n = ra.len();
            let rp: Vec<f64> = ra.iter().enumerate().map(|(i, r)| (r * 7.0 + (seed % 13) as f64 + i as f64 * 0.37) % 1.0).collect();
            let p = build_partition(&ra, &rp, eps).unwrap();
            prop_assert!(p.validate(n).is_ok());
        }

        #[test]
        fn growing_cutoff_never_shrinks_q(
            ra in prop::collection::vec(0.0f64..=1.0, 1..200),
            e1 in 0.001f64..0.5,
            de in 0.0f64..0.49,
        ) {
            let rp: Vec<f64> = ra.iter().rev().copied().collect();
            let small = build_partition(&ra, &rp, e1).unwrap();
            let large = build_partition(&ra, &rp, e1 + de).unwrap();
            prop_assert!(small.q.iter().all(|j| large.q.contains(j)));
        }
    }
}
