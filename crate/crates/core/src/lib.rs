//! Distribution–energy inequalities on finite operator models, continuum
//! Laplacian and Fourier models, and lattice convolution operators.
//!
//! The crate evaluates both sides of spectral inequalities relating the
//! energy `τ(ρA)` of a state to the spectral measures `F_Ω(λ)` of the
//! operator, and reports structured verdicts.

pub mod amenable;
pub mod continuum;
pub mod error;
pub mod ext;
pub mod inequality;
pub mod model;
pub mod monotone;
pub mod quad;
pub mod scenario;

pub use error::{Error, Result};
pub use ext::Ext;
