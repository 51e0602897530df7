//! Quantum polar codes for qubit Pauli and erasure channels, simulated through
//! their classical amplitude and phase decoders.

pub mod bits;
pub mod channels;
pub mod cli;
pub mod construction;
pub mod decoder;
pub mod error;
pub mod qsim;
pub mod rng;
pub mod scalar;
pub mod threshold;
pub mod transform;

pub use bits::BitWord;
pub use error::{Error, Result};
pub use transform::TransformSpec;

/// Pauli channel with `f64` weights.
pub type PauliChannel = channels::Pauli<f64>;
/// Binary-input channel with `f64` transitions.
pub type BinaryChannel = channels::BinaryInputChannel<f64>;
/// Noise model with `f64` parameters.
pub type NoiseModel = channels::Noise<f64>;
/// LLR vector in double precision.
pub type Llrs = decoder::LlrVector<f64>;
/// Double-precision successive-cancellation decoder.
pub type Decoder = decoder::ScDecoder<f64>;
/// Single-precision successive-cancellation decoder.
pub type DecoderF32 = decoder::ScDecoder<f32>;
