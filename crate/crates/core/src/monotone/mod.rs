//! Calculus of nondecreasing step functions: pseudo-inverses, the
//! integral functionals `φ_t` and `ψ`, and log-concave hulls.

pub mod curve;
pub mod hull;
pub mod step;

pub use curve::{perspective, phi, psi, Piece, PiecewiseCurve, Tail};
pub use hull::LogHull;
pub use step::{parse_step, MonotoneStep, StepDoc};
