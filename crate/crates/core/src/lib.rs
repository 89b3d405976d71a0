//! Short-time decoherence of an N-qubit register coupled to spontaneous
//! emission modes, a lossy cavity ancilla and trap vibrations.
//!
//! Numeric kernels (quadrature, special functions, fits, normal modes,
//! register states) are generic over [`scalar::Real`]; the physics layer
//! works in `f64`. The aliases below fix the common instantiation.

// `!(x > 0.0)` deliberately rejects NaN along with non-positive values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constants;
pub mod error;
pub mod io;
pub mod model;
pub mod modesums;
pub mod numerics;
pub mod oracle;
pub mod scalar;
pub mod states;
pub mod tau2;
pub mod vec3;
pub mod vibrations;

pub use error::{DecoError, Result};
pub use scalar::Real;

pub type State = states::RegisterState<f64>;
pub type Cavity = states::CavityState<f64>;
pub type Modes = vibrations::ModeSet<f64>;
pub type NormalModes = vibrations::NormalModes<f64>;
pub type CouplingMatrix = vibrations::CouplingMatrix<f64>;
pub type Spec = states::StateSpec<f64>;
