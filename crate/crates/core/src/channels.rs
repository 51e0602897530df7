//! Pauli and erasure channels and the classical channels they induce.
//!
//! A qubit Pauli channel applies `σ_x^u σ_z^v` with probability `p_{u,v}`.
//! Amplitude information sees a BSC with flip probability `p10 + p11`, phase
//! information a BSC with flip probability `p01 + p11`. The extended phase
//! channel additionally reveals the amplitude flip `u`, taking input `x` to
//! the pair `(x ⊕ v, u)`.
//!
//! Output symbols are small integers. For binary symmetric channels the symbol
//! is the received bit, for erasure channels `2` marks an erasure, and for the
//! extended phase channel the pair `(w, u)` is the symbol `w + 2u`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits::BitWord;
use crate::error::{invalid, Result};
use crate::scalar::{lit, to_f64, Prob, Real};

const SUM_TOLERANCE: f64 = 1e-12;

/// Erasure output symbol of a [`ChannelKind::Bec`] channel.
pub const ERASURE: usize = 2;

/// Output symbol of the extended phase channel for the pair `(w, u)`.
#[inline]
pub fn extended_symbol(w: bool, u: bool) -> usize {
    w as usize | (u as usize) << 1
}

/// Probability table `p_{u,v}` of a qubit Pauli channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pauli<T> {
    p00: T,
    p10: T,
    p01: T,
    p11: T,
}

impl<T: Prob> Pauli<T> {
    /// Weights of I, X, Z and Y in that order.
    pub fn new(p00: T, p10: T, p01: T, p11: T) -> Result<Self> {
        for (name, p) in [("p00", &p00), ("p10", &p10), ("p01", &p01), ("p11", &p11)] {
            if !(*p >= T::zero() && *p <= T::one()) {
                return invalid(format!("{name} = {p:?} is not a probability"));
            }
        }
        let sum = p00.clone() + p10.clone() + p01.clone() + p11.clone();
        if (to_f64(&sum) - 1.0).abs() > SUM_TOLERANCE {
            return invalid(format!("Pauli weights sum to {sum:?}, not 1"));
        }
        Ok(Self { p00, p10, p01, p11 })
    }

    pub fn identity() -> Self {
        Self {
            p00: T::one(),
            p10: T::zero(),
            p01: T::zero(),
            p11: T::zero(),
        }
    }

    /// X, Y and Z each with probability `q/3`.
    pub fn depolarizing(q: T) -> Result<Self> {
        let third = q.clone() / T::from_u8(3).expect("3");
        Self::new(T::one() - q, third.clone(), third.clone(), third)
    }

    /// Independent amplitude and phase flips with rates `du` and `dv`.
    pub fn independent(du: T, dv: T) -> Result<Self> {
        let (cu, cv) = (T::one() - du.clone(), T::one() - dv.clone());
        Self::new(
            cu.clone() * cv.clone(),
            du.clone() * cv,
            cu * dv.clone(),
            du * dv,
        )
    }

    #[inline]
    pub fn prob(&self, u: bool, v: bool) -> &T {
        match (u, v) {
            (false, false) => &self.p00,
            (true, false) => &self.p10,
            (false, true) => &self.p01,
            (true, true) => &self.p11,
        }
    }

    /// `(p00, p10, p01, p11)`.
    pub fn weights(&self) -> [T; 4] {
        [
            self.p00.clone(),
            self.p10.clone(),
            self.p01.clone(),
            self.p11.clone(),
        ]
    }

    /// Amplitude flip probability `δ_u = p10 + p11`.
    pub fn amplitude_flip(&self) -> T {
        self.p10.clone() + self.p11.clone()
    }

    /// Phase flip probability `δ_v = p01 + p11`.
    pub fn phase_flip(&self) -> T {
        self.p01.clone() + self.p11.clone()
    }

    pub fn to_f64(&self) -> Pauli<f64> {
        Pauli {
            p00: to_f64(&self.p00),
            p10: to_f64(&self.p10),
            p01: to_f64(&self.p01),
            p11: to_f64(&self.p11),
        }
    }
}

/// Which family a [`BinaryInputChannel`] belongs to.
#[derive(Debug, Clone, PartialEq)]
pub enum ChannelKind<T> {
    Bsc { delta: T },
    Bec { p: T },
    ExtendedPhase { table: Pauli<T> },
}

/// A binary-input memoryless channel given by its transition table.
///
/// `transitions[y] = [P(y|0), P(y|1)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryInputChannel<T> {
    kind: ChannelKind<T>,
    transitions: Vec<[T; 2]>,
}

impl<T: Prob> BinaryInputChannel<T> {
    pub fn bsc(delta: T) -> Result<Self> {
        check_probability("flip probability", &delta)?;
        let keep = T::one() - delta.clone();
        Ok(Self {
            transitions: vec![[keep.clone(), delta.clone()], [delta.clone(), keep]],
            kind: ChannelKind::Bsc { delta },
        })
    }

    pub fn bec(p: T) -> Result<Self> {
        check_probability("erasure probability", &p)?;
        let keep = T::one() - p.clone();
        Ok(Self {
            transitions: vec![[keep.clone(), T::zero()], [T::zero(), keep], [p.clone(), p.clone()]],
            kind: ChannelKind::Bec { p },
        })
    }

    pub fn extended_phase(table: Pauli<T>) -> Self {
        let mut transitions = Vec::with_capacity(4);
        for symbol in 0..4 {
            let w = symbol & 1 == 1;
            let u = symbol & 2 == 2;
            transitions.push([table.prob(u, w).clone(), table.prob(u, !w).clone()]);
        }
        Self {
            kind: ChannelKind::ExtendedPhase { table },
            transitions,
        }
    }

    pub fn kind(&self) -> &ChannelKind<T> {
        &self.kind
    }

    pub fn num_outputs(&self) -> usize {
        self.transitions.len()
    }

    pub fn transitions(&self) -> &[[T; 2]] {
        &self.transitions
    }

    #[inline]
    pub fn transition(&self, y: usize, x: bool) -> &T {
        &self.transitions[y][x as usize]
    }

    /// Draws one output symbol for input `x`.
    pub fn sample_output<R: Rng + ?Sized>(&self, x: bool, rng: &mut R) -> usize {
        self.sampler().sample(x, rng)
    }

    pub fn sampler(&self) -> OutputSampler {
        let column = |x: usize| self.transitions.iter().map(|t| to_f64(&t[x])).collect();
        OutputSampler {
            columns: [column(0), column(1)],
        }
    }
}

/// Precomputed `f64` transition columns for fast output sampling.
#[derive(Debug, Clone)]
pub struct OutputSampler {
    columns: [Vec<f64>; 2],
}

impl OutputSampler {
    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, x: bool, rng: &mut R) -> usize {
        sample_index(&self.columns[x as usize], rng)
    }
}

impl<T: Real> BinaryInputChannel<T> {
    /// Σ_y √(P(y|0)·P(y|1)).
    pub fn fidelity(&self) -> T {
        self.transitions
            .iter()
            .map(|[a, b]| (*a * *b).sqrt())
            .fold(T::zero(), |acc, x| acc + x)
    }

    /// Mutual information in bits between a uniform input and the output.
    pub fn symmetric_mutual_information(&self) -> T {
        let half: T = lit(0.5);
        let mut info = T::zero();
        for [a, b] in &self.transitions {
            let py = half * (*a + *b);
            for p in [*a, *b] {
                if p > T::zero() {
                    info = info + half * p * (p / py).log2();
                }
            }
        }
        info
    }
}

fn check_probability<T: Prob>(what: &str, p: &T) -> Result<()> {
    if *p >= T::zero() && *p <= T::one() {
        Ok(())
    } else {
        invalid(format!("{what} {p:?} outside [0, 1]"))
    }
}

/// Inverse-CDF draw from a discrete distribution. Never returns a
/// zero-weight index.
fn sample_index<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    let r: f64 = rng.gen();
    let mut acc = 0.0;
    let mut last = 0;
    for (i, &w) in weights.iter().enumerate() {
        if w > 0.0 {
            acc += w;
            last = i;
            if r < acc {
                return i;
            }
        }
    }
    last
}

/// BSC with flip probability `p10 + p11`.
pub fn induced_amplitude<T: Prob>(ch: &Pauli<T>) -> BinaryInputChannel<T> {
    BinaryInputChannel::bsc(ch.amplitude_flip()).expect("sum of Pauli weights is a probability")
}

/// BSC with flip probability `p01 + p11`.
pub fn induced_phase<T: Prob>(ch: &Pauli<T>) -> BinaryInputChannel<T> {
    BinaryInputChannel::bsc(ch.phase_flip()).expect("sum of Pauli weights is a probability")
}

/// Four-output channel with `P((w, u) | x) = p_{u, w ⊕ x}`.
pub fn induced_extended_phase<T: Prob>(ch: &Pauli<T>) -> BinaryInputChannel<T> {
    BinaryInputChannel::extended_phase(ch.clone())
}

pub fn channel_fidelity<T: Real>(ch: &BinaryInputChannel<T>) -> T {
    ch.fidelity()
}

/// The BEC induced in both bases by a qubit erasure channel.
pub fn erasure_channel<T: Prob>(p: T) -> Result<BinaryInputChannel<T>> {
    BinaryInputChannel::bec(p)
}

/// `1 − H(p_{uv})`, the coherent information for Bell-state input.
pub fn coherent_information<T: Real>(ch: &Pauli<T>) -> T {
    let entropy = ch
        .weights()
        .into_iter()
        .filter(|p| *p > T::zero())
        .fold(T::zero(), |acc, p| acc - p * p.log2());
    T::one() - entropy
}

/// Noise acting on the transmitted qubits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Noise<T> {
    Pauli(Pauli<T>),
    /// Each qubit erased independently; the erasure flags are seen by the
    /// receiver in both bases.
    Erasure { p: T },
}

impl<T: Prob> Noise<T> {
    pub fn erasure(p: T) -> Result<Self> {
        check_probability("erasure probability", &p)?;
        Ok(Self::Erasure { p })
    }

    pub fn to_f64(&self) -> Noise<f64> {
        match self {
            Self::Pauli(t) => Noise::Pauli(t.to_f64()),
            Self::Erasure { p } => Noise::Erasure { p: to_f64(p) },
        }
    }

    /// Channel seen by the amplitude code.
    pub fn amplitude_channel(&self) -> BinaryInputChannel<T> {
        match self {
            Self::Pauli(t) => induced_amplitude(t),
            Self::Erasure { p } => BinaryInputChannel::bec(p.clone()).expect("validated"),
        }
    }

    /// Channel seen by the phase code, before index reversal.
    pub fn phase_channel(&self) -> BinaryInputChannel<T> {
        match self {
            Self::Pauli(t) => induced_extended_phase(t),
            Self::Erasure { p } => BinaryInputChannel::bec(p.clone()).expect("validated"),
        }
    }
}

impl<T: Real> Noise<T> {
    /// Symmetric coherent information; `1 − 2p` for erasure.
    pub fn coherent_information(&self) -> T {
        match self {
            Self::Pauli(t) => coherent_information(t),
            Self::Erasure { p } => T::one() - *p - *p,
        }
    }
}

/// Textual channel description as accepted on the command line.
///
/// Forms: `depolarizing:q=0.1`, `xz:du=0.05,dv=0.05`,
/// `pauli:p00=..,p10=..,p01=..,p11=..`, `erasure:p=0.25`.
#[derive(Debug, Clone, PartialEq)]
pub enum ChannelSpec {
    Depolarizing { q: f64 },
    Xz { du: f64, dv: f64 },
    Pauli { p00: f64, p10: f64, p01: f64, p11: f64 },
    Erasure { p: f64 },
}

impl ChannelSpec {
    pub fn noise(&self) -> Result<Noise<f64>> {
        Ok(match *self {
            Self::Depolarizing { q } => Noise::Pauli(Pauli::depolarizing(q)?),
            Self::Xz { du, dv } => Noise::Pauli(Pauli::independent(du, dv)?),
            Self::Pauli { p00, p10, p01, p11 } => Noise::Pauli(Pauli::new(p00, p10, p01, p11)?),
            Self::Erasure { p } => Noise::erasure(p)?,
        })
    }

    /// The family's scalar noise parameter (`q`, `du`, `p00`'s complement, `p`).
    pub fn parameter(&self) -> f64 {
        match *self {
            Self::Depolarizing { q } => q,
            Self::Xz { du, .. } => du,
            Self::Pauli { p00, .. } => 1.0 - p00,
            Self::Erasure { p } => p,
        }
    }
}

impl std::str::FromStr for ChannelSpec {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        let (family, params) = s.split_once(':').unwrap_or((s, ""));
        let mut values = std::collections::BTreeMap::new();
        for kv in params.split(',').filter(|p| !p.is_empty()) {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| crate::error::Error::InvalidArgument(format!("expected key=value, got '{kv}'")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| crate::error::Error::InvalidArgument(format!("'{v}' is not a number")))?;
            if values.insert(k.trim().to_string(), v).is_some() {
                return invalid(format!("parameter '{k}' given twice"));
            }
        }
        let mut take = |key: &str| {
            values
                .remove(key)
                .ok_or_else(|| crate::error::Error::InvalidArgument(format!("channel '{family}' needs '{key}'")))
        };
        let spec = match family {
            "depolarizing" => Self::Depolarizing { q: take("q")? },
            "xz" => Self::Xz {
                du: take("du")?,
                dv: take("dv")?,
            },
            "pauli" => Self::Pauli {
                p00: take("p00")?,
                p10: take("p10")?,
                p01: take("p01")?,
                p11: take("p11")?,
            },
            "erasure" => Self::Erasure { p: take("p")? },
            other => return invalid(format!("unknown channel family '{other}'")),
        };
        if let Some(extra) = values.keys().next() {
            return invalid(format!("unexpected parameter '{extra}' for '{family}'"));
        }
        spec.noise()?;
        Ok(spec)
    }
}

impl std::fmt::Display for ChannelSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Depolarizing { q } => write!(f, "depolarizing:q={q}"),
            Self::Xz { du, dv } => write!(f, "xz:du={du},dv={dv}"),
            Self::Pauli { p00, p10, p01, p11 } => {
                write!(f, "pauli:p00={p00},p10={p10},p01={p01},p11={p11}")
            }
            Self::Erasure { p } => write!(f, "erasure:p={p}"),
        }
    }
}

impl Serialize for ChannelSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ChannelSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Amplitude flips `u` and phase flips `v` on `n` qubits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ErrorPattern {
    pub u: BitWord,
    pub v: BitWord,
}

impl ErrorPattern {
    pub fn new(u: BitWord, v: BitWord) -> Result<Self> {
        if u.len() != v.len() {
            return invalid("amplitude and phase error patterns differ in length");
        }
        Ok(Self { u, v })
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }
}

/// I.i.d. Pauli errors on `n` qubits.
pub fn sample_error<T: Prob, R: Rng + ?Sized>(
    ch: &Pauli<T>,
    n: usize,
    rng: &mut R,
) -> Result<ErrorPattern> {
    let mut u = BitWord::zeros(n)?;
    let mut v = BitWord::zeros(n)?;
    let weights: Vec<f64> = ch.weights().iter().map(to_f64).collect();
    for i in 0..n {
        match sample_index(&weights, rng) {
            0 => {}
            1 => u.set(i, true),
            2 => v.set(i, true),
            _ => {
                u.set(i, true);
                v.set(i, true);
            }
        }
    }
    ErrorPattern::new(u, v)
}
