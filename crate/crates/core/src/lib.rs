//! Airy eigenstates of the symmetric linear potential `V(x) = λ|x|`.
//!
//! The crate evaluates the Airy function and its zeros, builds the parity-labelled
//! eigenbasis of `H = p²/2 + λ|x|`, propagates wave packets by phase-rotating their
//! spectral coefficients, and provides numerical checks for the operator maps that
//! connect Airy states with displaced/squeezed states, position eigenstates and
//! number states.
//!
//! Units are `m = ħ = 1` throughout.

pub mod airy;
pub mod continuum;
pub mod dynamics;
mod error;
pub mod grin;
pub mod oracle;
pub mod quadrature;
pub mod spectrum;
pub mod statemaps;

pub use error::{Error, Result};
pub use quadrature::{Grid, WaveFunction};
pub use spectrum::SpectralBasis;

pub use num_complex::Complex64;
