//! Scalar abstractions.
//!
//! Probability bookkeeping only needs field arithmetic and ordering, so it is
//! written against [`Prob`], which exact rationals satisfy. Anything that needs
//! square roots, logarithms or `tanh` (fidelities, entropies, LLRs) is written
//! against [`Real`], i.e. `f32` or `f64`.

use std::fmt::Debug;

use num_traits::{Float, FromPrimitive, Num, ToPrimitive};

/// Exact or floating-point probability values.
pub trait Prob:
    Num + Clone + PartialOrd + FromPrimitive + ToPrimitive + Debug + Send + Sync
{
}

impl<T> Prob for T where
    T: Num + Clone + PartialOrd + FromPrimitive + ToPrimitive + Debug + Send + Sync
{
}

/// Floating point: f32 or f64.
pub trait Real: Float + Prob + 'static {}

impl<T: Float + Prob + 'static> Real for T {}

/// Converts an `f64` literal into `T`.
///
/// Panics only if `T` cannot represent the literal at all, which does not
/// happen for the float and rational types used in this crate.
#[inline]
pub fn lit<T: FromPrimitive>(x: f64) -> T {
    T::from_f64(x).expect("literal representable in scalar type")
}

pub(crate) fn to_f64<T: ToPrimitive>(x: &T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}
