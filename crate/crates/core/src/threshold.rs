//! The F′ bounding process, the zero-assistance condition and the threshold
//! solvers.
//!
//! Branch labels: `c = 0` squares, `c = 1` maps `F ↦ 2F − F²`. In the
//! transform's index convention a branch-string bit of 0 (worse) is the
//! `2F − F²` step and a bit of 1 (better) is the squaring step.
//! [`fprime_bound_profile`] applies that mapping.

use serde::{Deserialize, Serialize};

use crate::channels::{
    channel_fidelity, coherent_information, induced_amplitude, induced_extended_phase, Pauli,
};
use crate::error::{invalid, Error, Result};
use crate::scalar::{Prob, Real};
use crate::transform::log2_len;

/// One step of the F′ process.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Branch {
    /// `c = 0`: `F ↦ F²`.
    Square,
    /// `c = 1`: `F ↦ 2F − F²`.
    Double,
}

impl Branch {
    pub fn from_bit(c: u8) -> Result<Self> {
        match c {
            0 => Ok(Self::Square),
            1 => Ok(Self::Double),
            _ => invalid(format!("branch bit {c}")),
        }
    }

    pub fn bit(self) -> u8 {
        match self {
            Self::Square => 0,
            Self::Double => 1,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Self::Square => Self::Double,
            Self::Double => Self::Square,
        }
    }
}

#[inline]
fn step_unchecked<T: Prob>(f: T, branch: Branch) -> T {
    let sq = f.clone() * f.clone();
    match branch {
        Branch::Square => sq,
        Branch::Double => (f.clone() + f) - sq,
    }
}

pub fn fprime_step<T: Prob>(f: T, branch: Branch) -> Result<T> {
    if !(f >= T::zero() && f <= T::one()) {
        return invalid(format!("fidelity {f:?} outside [0, 1]"));
    }
    Ok(step_unchecked(f, branch))
}

/// A trajectory of the F′ process.
#[derive(Debug, Clone, PartialEq)]
pub struct FidelityProcessState<T> {
    value: T,
    history: Vec<Branch>,
}

impl<T: Prob> FidelityProcessState<T> {
    pub fn new(initial: T) -> Result<Self> {
        fprime_step(initial.clone(), Branch::Square)?;
        Ok(Self {
            value: initial,
            history: Vec::new(),
        })
    }

    pub fn value(&self) -> &T {
        &self.value
    }

    pub fn history(&self) -> &[Branch] {
        &self.history
    }

    pub fn step(&mut self, branch: Branch) {
        self.value = step_unchecked(self.value.clone(), branch);
        self.history.push(branch);
    }
}

/// F′ values of all `n` logical channels, in the transform's index order.
///
/// For an erasure channel with erasure probability `f0` these are the exact
/// erasure probabilities of the logical channels; for other channels they
/// upper-bound the fidelities.
pub fn fprime_bound_profile<T: Prob>(f0: T, n: usize) -> Result<Vec<T>> {
    fprime_step(f0.clone(), Branch::Square)?;
    let k = log2_len(n)?;
    let mut level = vec![f0];
    for _ in 0..k {
        let mut next = Vec::with_capacity(level.len() * 2);
        for f in level {
            next.push(step_unchecked(f.clone(), Branch::Double));
            next.push(step_unchecked(f, Branch::Square));
        }
        level = next;
    }
    Ok(level)
}

/// `F_{A,0} + F_{P',0} − 1`; non-positive means no entanglement assistance is
/// needed asymptotically.
pub fn assistance_margin<T: Real>(ch: &Pauli<T>) -> T {
    channel_fidelity(&induced_amplitude(ch)) + channel_fidelity(&induced_extended_phase(ch))
        - T::one()
}

/// One-parameter channel families used by the solvers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// Independent X and Z flips with equal rate `δ`.
    IndependentEqual,
    /// Depolarizing with parameter `q`.
    Depolarizing,
}

impl Family {
    pub fn channel(self, t: f64) -> Result<Pauli<f64>> {
        match self {
            Self::IndependentEqual => Pauli::independent(t, t),
            Self::Depolarizing => Pauli::depolarizing(t),
        }
    }

    pub fn bracket(self) -> (f64, f64) {
        match self {
            Self::IndependentEqual => (0.0, 0.25),
            Self::Depolarizing => (0.0, 0.5),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::IndependentEqual => "independent-equal",
            Self::Depolarizing => "depolarizing",
        }
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "independent-equal" | "xz" => Ok(Self::IndependentEqual),
            "depolarizing" => Ok(Self::Depolarizing),
            _ => invalid(format!("unknown family '{s}', expected independent-equal or depolarizing")),
        }
    }
}

const MAX_BISECTIONS: usize = 200;
const MONOTONICITY_GRID: usize = 64;

/// Root of a strictly monotone function on `[lo, hi]` by bisection.
pub fn bisect<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return invalid(format!("tolerance {tol} must be positive"));
    }
    let (flo, fhi) = (f(lo), f(hi));
    if !(flo.signum() * fhi.signum() < 0.0) {
        return Err(Error::SolverFailure(format!(
            "no sign change on [{lo}, {hi}]: f = {flo}, {fhi}"
        )));
    }
    let increasing = fhi > flo;
    let mut prev = flo;
    for i in 1..=MONOTONICITY_GRID {
        let v = f(lo + (hi - lo) * i as f64 / MONOTONICITY_GRID as f64);
        if (v > prev) != increasing {
            return Err(Error::SolverFailure(format!(
                "function not strictly monotone on [{lo}, {hi}]"
            )));
        }
        prev = v;
    }
    let (mut a, mut b) = (lo, hi);
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (a + b);
        if (b - a) * 0.5 <= tol || mid == a || mid == b {
            return Ok(mid);
        }
        let v = f(mid);
        if v == 0.0 {
            return Ok(mid);
        }
        if (v > 0.0) == increasing {
            b = mid;
        } else {
            a = mid;
        }
    }
    Ok(0.5 * (a + b))
}

/// Noise level at which `F_{A,0} + F_{P',0} = 1` along the family.
pub fn solve_threshold(family: Family, tol: f64) -> Result<f64> {
    let (lo, hi) = family.bracket();
    bisect(
        |t| assistance_margin(&family.channel(t).expect("bracket inside valid range")),
        lo,
        hi,
        tol,
    )
}

/// Noise level at which the coherent information vanishes along the family.
pub fn solve_coherent_zero(family: Family, tol: f64) -> Result<f64> {
    let (lo, hi) = family.bracket();
    bisect(
        |t| coherent_information(&family.channel(t).expect("bracket inside valid range")),
        lo,
        hi,
        tol,
    )
}
