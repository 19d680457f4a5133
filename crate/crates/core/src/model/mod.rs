//! Finite-dimensional operator models: weighted point sets, Hermitian
//! operators, states, spectral projectors and spectral measures.

pub mod density;
pub mod io;
pub mod operator;
pub mod space;
pub mod spectral;

pub use density::{norm_one_inf, Density};
pub use operator::{energy, trace_product, CMatrix, EnergyPart, FiniteOperator, MixedState};
pub use space::{MeasureSpace, PartitionSpec, Region};
pub use spectral::{
    apply_spectral_function, MeasureTarget, Monotonicity, ProjectorMode, SpectralDecomposition,
};
