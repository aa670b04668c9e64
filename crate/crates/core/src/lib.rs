//! Construction, simulation and cost estimation of harmonic-sequence state
//! preparation and diagonal block-encoding circuits.
//!
//! Basis indices are big-endian: qubit 0 is the most significant bit.

pub mod circuit;
pub mod circulant;
pub mod error;
pub mod estimator;
pub mod harmonic;
pub mod linear;
pub mod qft;
pub mod report;
pub mod sim;
pub mod widgets;

pub use circuit::{Circuit, Gate, GateKind, Register, RegisterKind, ResourceEstimate};
pub use error::{Error, Result};
pub use sim::{DenseMatrix, StateVector, SynthesisMode, SynthesisModel};

pub type C64 = num_complex::Complex64;
