//! Spectral data of Hankel operators on the Hardy space of the disc.
//!
//! The crate maps Fourier coefficients of a symbol `u` to the interlaced
//! sequence `ζ = (ρ₁e^{−iφ₁}, σ₁e^{−iθ₁}, …)` built from the singular values
//! and phases of `H_u` and its shifted counterpart `K_u`, and reconstructs
//! the coefficients back from `ζ` through the explicit formula
//! `ĉ(n) = X·AⁿY`.

pub mod error;
pub mod generating_function;
pub mod hankel_forward;
pub mod inverse_map;
pub mod kernel_analysis;
pub mod linalg;
pub mod rational_symbols;
pub mod spectral_data;

pub use error::{Error, Result};
pub use hankel_forward::{forward_map, ForwardOptions, SymbolCoefficients};
pub use inverse_map::{real_case_embed, reconstruct};
pub use spectral_data::{compute_weights, validate_zeta, WeightTable, ZetaSequence};
